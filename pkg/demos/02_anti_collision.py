"""Framed slotted ALOHA: singulation statistics vs the analytic expectation.

Run: python3 demos/02_anti_collision.py
"""

import random
import statistics

from rfidlbs.air import (
    UHF900,
    FieldView,
    SlotCountPolicy,
    expected_singulations,
    inventory_round,
    run_inventory,
)
from rfidlbs.tags import make_tag

rng = random.Random(1)

# Eight tags contending for sixteen slots: about 5.09 get through per round.
counts = [len(inventory_round(set(range(8)), set(), 16, rng).singulated)
          for _ in range(20_000)]
print(f"8 tags / 16 slots: empirical {statistics.fmean(counts):.3f}, "
      f"analytic {expected_singulations(8, 16):.3f}")

# The adaptive policy doubles the frame on heavy collisions and halves it on
# empties, so a crowded field still drains quickly.
tags = [make_tag(i) for i in range(100)]
view = FieldView((0.0, 0.0), {i: (1.0, 0.0) for i in range(100)}, UHF900)
reads = run_inventory(view, tags, 1.0, policy=SlotCountPolicy(slots=16),
                      rng=random.Random(7))
print(f"100 tags, UHF900, 1 s: {len(reads)} singulations "
      f"(ceiling {int(UHF900.slot_rate)} = slot rate)")
print(f"last read at t={reads[-1][0]:.3f}s" if reads else "no reads")
