"""Simulated radio layer.

Determines which tags are powered by the reader field and drives framed
slotted-ALOHA inventory over a slot-rate time grid. Everything is
deterministic given the caller-supplied random source: tags are iterated in
sorted id order and slot times are computed from integer slot counters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .tags import Tag, TagPower, format_tag_id

ACTIVE_TAG_RANGE_M = 100.0


class UnknownTag(Exception):
    """A position references a tag id with no Tag record."""


@dataclass(frozen=True)
class ReaderPreset:
    name: str
    frequency_hz: float
    read_range_m: float
    slot_rate: float  # inventory slots per second


LF135 = ReaderPreset("LF135", 135e3, 0.15, 50.0)
HF1356 = ReaderPreset("HF1356", 13.56e6, 0.20, 50.0)
UHF900 = ReaderPreset("UHF900", 915e6, 3.0, 400.0)

PRESETS: Mapping[str, ReaderPreset] = {p.name: p for p in (LF135, HF1356, UHF900)}


@dataclass(frozen=True)
class FieldView:
    reader_position: tuple[float, float]
    tag_positions: Mapping[int, tuple[float, float]]
    preset: ReaderPreset


def powered_tags(view: FieldView, tags: Iterable[Tag]) -> set[int]:
    """Tag ids energized by the reader field.

    Passive tags are powered within the preset's read range (closed ball);
    active tags within ACTIVE_TAG_RANGE_M regardless of preset. Killed tags
    never respond.
    """
    by_id = {t.id: t for t in tags}
    rx, ry = view.reader_position
    powered: set[int] = set()
    for tag_id, (x, y) in view.tag_positions.items():
        tag = by_id.get(tag_id)
        if tag is None:
            raise UnknownTag(format_tag_id(tag_id))
        if tag.killed:
            continue
        limit = view.preset.read_range_m if tag.power is TagPower.PASSIVE else ACTIVE_TAG_RANGE_M
        if math.hypot(x - rx, y - ry) <= limit:
            powered.add(tag_id)
    return powered


@dataclass(frozen=True)
class RoundResult:
    slot_count: int
    singulated: tuple[int, ...]          # tag ids, in slot order
    singulated_slots: tuple[int, ...]    # slot index within the round, parallel
    collision_slots: int
    empty_slots: int
    elapsed: float


def inventory_round(
    powered: Iterable[int],
    acknowledged: Iterable[int],
    slot_count: int,
    rng,
    slot_rate: float = 1.0,
) -> RoundResult:
    """One framed-slotted-ALOHA round.

    Each powered, non-acknowledged tag picks one of `slot_count` slots
    uniformly at random (tags draw in sorted id order, keeping the round a
    pure function of the rng state). A slot with exactly one responder
    singulates that tag.
    """
    if slot_count < 1:
        raise ValueError("slot_count must be >= 1")
    contenders = sorted(set(powered) - set(acknowledged))
    slots: list[list[int]] = [[] for _ in range(slot_count)]
    for tag_id in contenders:
        slots[rng.randrange(slot_count)].append(tag_id)
    singulated: list[int] = []
    singulated_slots: list[int] = []
    collisions = 0
    empties = 0
    for k, responders in enumerate(slots):
        if len(responders) == 1:
            singulated.append(responders[0])
            singulated_slots.append(k)
        elif len(responders) > 1:
            collisions += 1
        else:
            empties += 1
    return RoundResult(
        slot_count=slot_count,
        singulated=tuple(singulated),
        singulated_slots=tuple(singulated_slots),
        collision_slots=collisions,
        empty_slots=empties,
        elapsed=slot_count / slot_rate,
    )


def expected_singulations(n: int, slot_count: int) -> float:
    """Analytic mean number of singulations per round: n * (1 - 1/N)^(n-1)."""
    if n < 0 or slot_count < 1:
        raise ValueError("need n >= 0 and slot_count >= 1")
    if n == 0:
        return 0.0
    return n * (1.0 - 1.0 / slot_count) ** (n - 1)


@dataclass
class SlotCountPolicy:
    """Adaptive frame sizing: double on heavy collisions, halve when mostly
    empty. Mirrors Q-style adaptation; slot counts stay powers of two."""

    slots: int = 16
    min_slots: int = 1
    max_slots: int = 1024

    def next_round(self) -> int:
        return self.slots

    def after_round(self, result: RoundResult) -> None:
        if result.collision_slots > result.slot_count / 2:
            self.slots = min(self.slots * 2, self.max_slots)
        elif result.empty_slots > 3 * result.slot_count / 4:
            self.slots = max(self.slots // 2, self.min_slots)


@dataclass
class InventoryEngine:
    """Incremental inventory driver on the global slot grid.

    Slot j spans [j/slot_rate, (j+1)/slot_rate); a singulation in slot j is
    timestamped at the slot's end. Rounds start on slot boundaries; slot
    assignments are drawn from the powered set observed at round start.
    Acknowledged tags stay silent until the powered set changes, at which
    point acknowledgements are cleared so re-entering tags are re-read.
    """

    preset: ReaderPreset
    rng: object
    policy: SlotCountPolicy = field(default_factory=SlotCountPolicy)

    _slot_index: int = 0
    _acknowledged: set[int] = field(default_factory=set)
    _last_powered: Optional[frozenset[int]] = None
    _round: Optional[list[list[int]]] = None
    _round_pos: int = 0
    _round_stats: tuple[int, int, int] = (0, 0, 0)  # singulated, collisions, empties

    def poll(self, now: float, powered: set[int]) -> list[tuple[float, int]]:
        """Process every slot ending at or before `now`; returns timestamped
        singulations. `powered` is the field membership in effect for the
        processed interval."""
        reads: list[tuple[float, int]] = []
        sr = self.preset.slot_rate
        while (self._slot_index + 1) / sr <= now + 1e-12:
            if self._round is None:
                self._start_round(powered)
            assert self._round is not None
            responders = [t for t in self._round[self._round_pos] if t in powered]
            singles, collisions, empties = self._round_stats
            if len(responders) == 1:
                tag_id = responders[0]
                reads.append(((self._slot_index + 1) / sr, tag_id))
                self._acknowledged.add(tag_id)
                singles += 1
            elif len(responders) > 1:
                collisions += 1
            else:
                empties += 1
            self._round_stats = (singles, collisions, empties)
            self._round_pos += 1
            self._slot_index += 1
            if self._round_pos >= len(self._round):
                self._finish_round()
        return reads

    def _start_round(self, powered: set[int]) -> None:
        frozen = frozenset(powered)
        if self._last_powered is not None and frozen != self._last_powered:
            self._acknowledged.clear()
        self._last_powered = frozen
        n_slots = self.policy.next_round()
        slots: list[list[int]] = [[] for _ in range(n_slots)]
        for tag_id in sorted(frozen - self._acknowledged):
            slots[self.rng.randrange(n_slots)].append(tag_id)
        self._round = slots
        self._round_pos = 0
        self._round_stats = (0, 0, 0)

    def _finish_round(self) -> None:
        assert self._round is not None
        singles, collisions, empties = self._round_stats
        n = len(self._round)
        self.policy.after_round(
            RoundResult(n, (), (), collisions, empties, n / self.preset.slot_rate)
        )
        self._round = None

    def notice_field_change(self, powered: set[int]) -> None:
        """Between-round acknowledgement reset hook for callers that track
        the powered set more often than rounds complete."""
        if self._round is None and self._last_powered is not None:
            if frozenset(powered) != self._last_powered:
                self._acknowledged.clear()
                self._last_powered = None


def run_inventory(
    view: FieldView,
    tags: Iterable[Tag],
    duration: float,
    policy: SlotCountPolicy | None = None,
    rng=None,
) -> list[tuple[float, int]]:
    """Run inventory rounds over a static field for `duration` seconds.

    Returns (timestamp, tag id) pairs; total slots consumed is at most
    duration * slot_rate, which structurally caps the read rate.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    if rng is None:
        raise ValueError("rng must be provided (seeded) for determinism")
    engine = InventoryEngine(view.preset, rng, policy or SlotCountPolicy())
    powered = powered_tags(view, tags)
    return engine.poll(duration, powered)
