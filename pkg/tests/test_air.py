import itertools
import math
import random
import statistics

import pytest

from rfidlbs.air import (
    HF1356,
    LF135,
    PRESETS,
    UHF900,
    FieldView,
    InventoryEngine,
    SlotCountPolicy,
    UnknownTag,
    expected_singulations,
    inventory_round,
    powered_tags,
    run_inventory,
)
from rfidlbs.tags import TagPower, kill, make_tag


class ScriptedRng:
    """Deterministic slot picker for exhaustive enumeration."""

    def __init__(self, picks):
        self.picks = list(picks)

    def randrange(self, n):
        return self.picks.pop(0)


def test_preset_parameters():
    assert (LF135.frequency_hz, LF135.read_range_m, LF135.slot_rate) == (135e3, 0.15, 50.0)
    assert (HF1356.frequency_hz, HF1356.read_range_m, HF1356.slot_rate) == (13.56e6, 0.20, 50.0)
    assert (UHF900.frequency_hz, UHF900.read_range_m, UHF900.slot_rate) == (915e6, 3.0, 400.0)
    assert set(PRESETS) == {"LF135", "HF1356", "UHF900"}


class TestPoweredTags:
    def _view(self, distance, preset=HF1356):
        return FieldView((0.0, 0.0), {1: (distance, 0.0)}, preset)

    def test_passive_within_range(self):
        assert powered_tags(self._view(0.15), [make_tag(1)]) == {1}

    def test_passive_beyond_range(self):
        assert powered_tags(self._view(0.25), [make_tag(1)]) == set()

    def test_boundary_is_inclusive(self):
        assert powered_tags(self._view(0.20), [make_tag(1)]) == {1}

    def test_active_ignores_preset_range(self):
        tag = make_tag(1, power=TagPower.ACTIVE)
        assert powered_tags(self._view(50.0), [tag]) == {1}
        assert powered_tags(self._view(100.5), [tag]) == set()

    def test_killed_never_powered(self):
        tag = kill(make_tag(1, kill_code=9), 9)
        assert powered_tags(self._view(0.05), [tag]) == set()

    def test_unknown_tag(self):
        with pytest.raises(UnknownTag):
            powered_tags(self._view(0.1), [])

    def test_memory_contents_irrelevant(self):
        from rfidlbs.tags import TagClass, write_memory

        fresh = make_tag(1, TagClass.CLASS2)
        written = write_memory(fresh, 0, b"\xFF" * 16)
        view = self._view(0.18)
        assert powered_tags(view, [fresh]) == powered_tags(view, [written])


class TestInventoryRound:
    def test_empty_field(self):
        result = inventory_round(set(), set(), 4, random.Random(0))
        assert result.singulated == ()
        assert result.empty_slots == 4

    def test_lone_tag_always_singulated(self):
        result = inventory_round({7}, set(), 1, random.Random(0))
        assert result.singulated == (7,)

    def test_acknowledged_stay_silent(self):
        result = inventory_round({1, 2}, {1, 2}, 4, random.Random(0))
        assert result.singulated == ()
        assert result.empty_slots == 4

    def test_two_tags_two_slots_exhaustive(self):
        # all 4 equiprobable assignments: same slot -> 0 reads, else 2
        outcomes = []
        for a, b in itertools.product(range(2), repeat=2):
            result = inventory_round({1, 2}, set(), 2, ScriptedRng([a, b]))
            outcomes.append(len(result.singulated))
            if a == b:
                assert result.collision_slots == 1
            else:
                assert result.singulated in ((1, 2), (2, 1))
        assert sorted(outcomes) == [0, 0, 2, 2]
        assert statistics.mean(outcomes) == pytest.approx(1.0)

    def test_elapsed(self):
        result = inventory_round({1}, set(), 16, random.Random(0), slot_rate=50.0)
        assert result.elapsed == pytest.approx(16 / 50.0)

    def test_single_responder_slots_match_singulated(self):
        rng = random.Random(3)
        for _ in range(200):
            result = inventory_round(set(range(10)), set(), 8, rng)
            assert len(result.singulated) == len(set(result.singulated))
            assert len(result.singulated) <= min(10, 8)
            one_slots = result.slot_count - result.collision_slots - result.empty_slots
            assert one_slots == len(result.singulated)


class TestExpectedSingulations:
    def test_single_tag(self):
        for n_slots in (1, 2, 16, 400):
            assert expected_singulations(1, n_slots) == pytest.approx(1.0)

    def test_two_two(self):
        assert expected_singulations(2, 2) == pytest.approx(1.0)

    def test_eight_sixteen_value(self):
        assert expected_singulations(8, 16) == pytest.approx(8 * (15 / 16) ** 7)
        assert expected_singulations(8, 16) == pytest.approx(5.092, abs=5e-4)

    def test_monte_carlo_agreement(self):
        # independent simulation oracle for the analytic formula
        rng = random.Random(1234)
        rounds = 20_000
        total = 0
        for _ in range(rounds):
            total += len(inventory_round(set(range(8)), set(), 16, rng).singulated)
        mean = total / rounds
        expected = expected_singulations(8, 16)
        # per-round variance is below n; 6 sigma with a generous bound
        assert abs(mean - expected) < 6 * math.sqrt(8 / rounds)


class TestSlotCountPolicy:
    def test_doubles_on_collisions(self):
        policy = SlotCountPolicy(slots=16)
        result = inventory_round(set(range(200)), set(), 16, random.Random(0))
        assert result.collision_slots > 8
        policy.after_round(result)
        assert policy.slots == 32

    def test_halves_on_empties(self):
        policy = SlotCountPolicy(slots=16)
        result = inventory_round({1}, set(), 16, random.Random(0))
        assert result.empty_slots >= 15
        policy.after_round(result)
        assert policy.slots == 8

    def test_floor_at_min(self):
        policy = SlotCountPolicy(slots=1)
        policy.after_round(inventory_round(set(), set(), 1, random.Random(0)))
        assert policy.slots == 1


class TestRunInventory:
    def _lone_tag_view(self, preset=HF1356):
        return FieldView((0.0, 0.0), {1: (0.1, 0.0)}, preset)

    def test_single_tag_n1_first_read(self):
        reads = run_inventory(
            self._lone_tag_view(), [make_tag(1)], 1.0,
            policy=SlotCountPolicy(slots=1), rng=random.Random(0),
        )
        assert reads[0] == (pytest.approx(0.02), 1)

    def test_zero_tags(self):
        view = FieldView((0.0, 0.0), {}, HF1356)
        assert run_inventory(view, [], 1.0, rng=random.Random(0)) == []

    def test_throughput_cap_uhf(self):
        tags = [make_tag(i) for i in range(100)]
        view = FieldView((0.0, 0.0), {i: (0.5, 0.0) for i in range(100)}, UHF900)
        reads = run_inventory(view, tags, 1.0, rng=random.Random(7))
        assert len(reads) <= 400
        assert all(t <= 1.0 + 1e-9 for t, _ in reads)

    def test_acknowledged_once_per_static_field(self):
        # a static field reads each tag at most once (acks persist)
        tags = [make_tag(i) for i in range(5)]
        view = FieldView((0.0, 0.0), {i: (0.1, 0.0) for i in range(5)}, HF1356)
        reads = run_inventory(view, tags, 5.0, rng=random.Random(2))
        ids = [tag_id for _, tag_id in reads]
        assert sorted(ids) == [0, 1, 2, 3, 4]

    def test_determinism(self):
        tags = [make_tag(i) for i in range(20)]
        view = FieldView((0.0, 0.0), {i: (1.0, 0.0) for i in range(20)}, UHF900)
        a = run_inventory(view, tags, 1.0, rng=random.Random(5))
        b = run_inventory(view, tags, 1.0, rng=random.Random(5))
        assert a == b

    def test_timestamps_nondecreasing(self):
        tags = [make_tag(i) for i in range(20)]
        view = FieldView((0.0, 0.0), {i: (1.0, 0.0) for i in range(20)}, UHF900)
        reads = run_inventory(view, tags, 1.0, rng=random.Random(5))
        times = [t for t, _ in reads]
        assert times == sorted(times)


class TestInventoryEngine:
    def test_field_change_resets_acknowledgements(self):
        engine = InventoryEngine(HF1356, random.Random(0), SlotCountPolicy(slots=1))
        first = engine.poll(0.1, {1})
        assert [tag for _, tag in first] == [1]
        # same field: no re-read
        assert engine.poll(0.5, {1}) == []
        # tag 2 enters: acks cleared, both read again
        reads = engine.poll(2.0, {1, 2})
        assert {tag for _, tag in reads} == {1, 2}

    def test_tag_leaving_mid_round_goes_silent(self):
        engine = InventoryEngine(HF1356, random.Random(0), SlotCountPolicy(slots=16))
        engine.poll(0.02, {1})          # round started with tag 1 contending
        reads = engine.poll(0.4, set())  # tag left before its slot
        assert reads == []
