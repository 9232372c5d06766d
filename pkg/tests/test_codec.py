"""Command word codec and timeline compiler tests.

The golden word values below are evaluated by hand from the bit layout
(polarity code << 14 | cube << 4 | em) and frozen; the golden timelines are
walked out by hand from the two- and three-cube maneuver fixtures.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from empivot.codec import (
    MESSAGE_SLOT_MS,
    VALID_COMMAND_COUNT,
    CommandTimeline,
    MalformedCommandError,
    PwmConfig,
    TimelineEntry,
    TimelineOverflowError,
    compile_timeline,
    decode_command,
    encode_assignment,
    encode_command,
    encode_pwm,
    is_pwm_marker,
    pwm_timeline,
)
from empivot.lattice import Cube, LatticeState
from empivot.planner import EmAssignment, ManeuverRequest, resolve_maneuver

from planner_properties import random_connected_state, random_request


def two_cube_state():
    return LatticeState([Cube(1, (0, 0, 0)), Cube(2, (0, 0, 1))])


def three_cube_state():
    return LatticeState(
        [Cube(1, (0, 0, 0)), Cube(2, (1, 0, 0)), Cube(3, (0, 0, 1))]
    )


# -- single-word codec ---------------------------------------------------------


def test_worked_words():
    assert encode_command(1, 1, 0) == 0x0011
    assert encode_command(1, 1, +1) == 0x4011
    assert encode_command(1023, 12, -1) == -16388
    assert encode_command(1023, 12, -1) & 0xFFFF == 0xBFFC


def test_worked_words_decode():
    assert decode_command(0x0011) == EmAssignment(1, 1, 0)
    assert decode_command(0x4011) == EmAssignment(1, 1, +1)
    assert decode_command(-16388) == EmAssignment(1023, 12, -1)


def test_encode_assignment_matches_encode_command():
    a = EmAssignment(17, 9, -1)
    assert encode_assignment(a) == encode_command(17, 9, -1)


@pytest.mark.parametrize(
    "cube,em,pol",
    [(0, 1, 0), (1024, 1, 0), (1, 0, 0), (1, 13, 0), (1, 1, 2), (1, 1, -2)],
)
def test_encode_rejects_out_of_range(cube, em, pol):
    with pytest.raises(ValueError):
        encode_command(cube, em, pol)


@pytest.mark.parametrize(
    "word",
    [
        0x0000,  # cube 0, em 0
        0x0010,  # em 0
        0x001D,  # em 13
        0x000F,  # cube 0, em 15
        0x0001,  # cube 0
        -16384,  # 0xC000: reserved polarity code
        0xC011 - 0x10000,  # reserved code with otherwise-valid fields
    ],
)
def test_decode_rejects_malformed(word):
    with pytest.raises(MalformedCommandError):
        decode_command(word)


@pytest.mark.parametrize("word", [0x10000, -0x8001, 123456])
def test_decode_rejects_non_16_bit(word):
    with pytest.raises(MalformedCommandError):
        decode_command(word)


def test_exhaustive_scan_is_a_bijection():
    valid = 0
    for pattern in range(0x10000):
        word = pattern - 0x10000 if pattern >= 0x8000 else pattern
        try:
            a = decode_command(word)
        except MalformedCommandError:
            continue
        valid += 1
        assert encode_assignment(a) == word
    assert valid == VALID_COMMAND_COUNT == 1023 * 12 * 3


@settings(max_examples=200, deadline=None)
@given(
    cube=st.integers(1, 1023),
    em=st.integers(1, 12),
    pol=st.sampled_from([-1, 0, 1]),
)
def test_round_trip_property(cube, em, pol):
    word = encode_command(cube, em, pol)
    assert -0x8000 <= word <= 0x7FFF
    assert decode_command(word) == EmAssignment(cube, em, pol)


# -- PWM configuration messages -------------------------------------------------


def test_pwm_words():
    marker, duty = encode_pwm(PwmConfig(3, 128))
    assert marker & 0xFFFF == 0xC030
    assert marker == 0xC030 - 0x10000
    assert duty == 128
    assert is_pwm_marker(marker)
    assert not is_pwm_marker(0x4011)
    with pytest.raises(MalformedCommandError):
        decode_command(marker)


@pytest.mark.parametrize("cube,duty", [(0, 10), (1024, 10), (1, -1), (1, 256)])
def test_pwm_validation(cube, duty):
    with pytest.raises(ValueError):
        PwmConfig(cube, duty)


def test_pwm_timeline_round_trip():
    configs = [PwmConfig(3, 128), PwmConfig(7, 255)]
    tl = pwm_timeline(configs, start_ms=100)
    assert [e.time_ms for e in tl] == [100, 120, 140, 160]
    assert tl.decoded() == [(100, configs[0]), (140, configs[1])]
    assert CommandTimeline.from_text(tl.to_text()) == tl
    assert CommandTimeline.from_binary(tl.to_binary()) == tl


def test_dangling_pwm_marker_is_rejected_on_decode():
    marker, _ = encode_pwm(PwmConfig(3, 128))
    tl = CommandTimeline([TimelineEntry(0, marker)])
    with pytest.raises(MalformedCommandError):
        tl.decoded()


# -- timeline container ----------------------------------------------------------


def test_entry_validation():
    with pytest.raises(ValueError):
        TimelineEntry(-1, 0x11)
    with pytest.raises(ValueError):
        TimelineEntry(0, 0x8000)
    with pytest.raises(ValueError):
        TimelineEntry(0, -0x8001)


def test_spacing_floor_enforced():
    ok = CommandTimeline(
        [TimelineEntry(0, 0x11), TimelineEntry(20, 0x12)]
    )
    assert len(ok) == 2
    with pytest.raises(ValueError):
        CommandTimeline([TimelineEntry(0, 0x11), TimelineEntry(10, 0x12)])
    with pytest.raises(ValueError):
        CommandTimeline([TimelineEntry(20, 0x11), TimelineEntry(0, 0x12)])


def test_empty_timeline():
    tl = CommandTimeline([])
    assert len(tl) == 0
    assert tl.span_ms == 0
    assert tl.decoded() == []
    assert CommandTimeline.from_text(tl.to_text()) == tl
    assert CommandTimeline.from_binary(tl.to_binary()) == tl


# -- compiled maneuver timelines ---------------------------------------------------


PIVOT_GOLDEN = [
    # launch boundary: engage all four magnets, cube-then-em order
    (0, 0x4016),  # cube 1 em 6 +1
    (20, 0x8018),  # cube 1 em 8 -1
    (40, 0x4025),  # cube 2 em 5 +1
    (60, 0x4027),  # cube 2 em 7 +1
    # travel boundary: release the repel pair, keep the hinge pair
    (400, 0x0016),
    (420, 0x0025),
    # catch boundary: engage the catch pair, then release the hinge pair
    (1330, 0x8017),  # cube 1 em 7 -1
    (1350, 0x4028),  # cube 2 em 8 +1
    (1370, 0x0018),
    (1390, 0x0027),
    # closing OFFs, back-scheduled to land on the 1530 ms schedule end
    (1510, 0x0017),
    (1530, 0x0028),
]


def test_pivot_timeline_golden():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan)
    assert [(e.time_ms, e.pattern) for e in tl] == PIVOT_GOLDEN
    assert tl.span_ms == 1530
    assert tl.final_polarities() == {}


def test_traversal_timeline_structure():
    plan = resolve_maneuver(three_cube_state(), ManeuverRequest(3, "Y", "ccw"))
    tl = compile_timeline(plan)
    assert tl.span_ms == 1030
    assert len(tl) == 20
    times = [e.time_ms for e in tl]
    # 8 launch commands, 2 travel releases, 4 catch commands, 6 closing OFFs
    assert times[:8] == [0, 20, 40, 60, 80, 100, 120, 140]
    assert times[8:10] == [400, 420]
    assert times[10:14] == [830, 850, 870, 890]
    assert times[14:] == [930, 950, 970, 990, 1010, 1030]
    for e in tl.entries[14:]:
        assert e.pattern >> 14 == 0  # polarity OFF
    assert tl.final_polarities() == {}


def test_travel_phase_keeps_hinge_engaged():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan)
    on_after_travel = {}
    for t, item in tl.decoded():
        if t > 420:
            break
        if item.polarity == 0:
            on_after_travel.pop((item.cube_id, item.em), None)
        else:
            on_after_travel[(item.cube_id, item.em)] = item.polarity
    assert on_after_travel == {(2, 7): +1, (1, 8): -1}


def test_full_rebroadcast_mode():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan, full_rebroadcast=True)
    # travel boundary now re-sends the hinge pair before the releases
    assert len(tl) == 14
    by_time = {e.time_ms: e.pattern for e in tl}
    assert by_time[400] == 0x8018
    assert by_time[420] == 0x4027
    assert by_time[440] == 0x0016
    assert by_time[460] == 0x0025
    assert tl.span_ms == 1530
    assert tl.final_polarities() == {}


def test_prior_state_is_released_at_launch():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    stray = EmAssignment(9, 3, +1)
    tl = compile_timeline(plan, prior=[stray])
    assert len(tl) == len(PIVOT_GOLDEN) + 1
    assert (80, encode_command(9, 3, 0) & 0xFFFF) == (
        tl.entries[4].time_ms,
        tl.entries[4].pattern,
    )
    assert tl.final_polarities() == {}


def test_shutdown_only_timeline():
    prior = [EmAssignment(4, 2, +1), EmAssignment(3, 11, -1)]
    tl = compile_timeline(None, prior=prior)
    assert [(e.time_ms, e.word) for e in tl] == [
        (0, encode_command(3, 11, 0)),
        (20, encode_command(4, 2, 0)),
    ]
    assert compile_timeline(None).entries == ()


def test_timings_override_and_overflow():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tight = compile_timeline(plan, timings=(80, 930, 200))
    assert tight.span_ms == 80 + 930 + 200
    with pytest.raises(TimelineOverflowError):
        compile_timeline(plan, timings=(40, 930, 200))
    # catch window long enough for its own commands but the closing OFFs
    # would collide with them
    with pytest.raises(TimelineOverflowError):
        compile_timeline(plan, timings=(400, 930, 80))
    ok = compile_timeline(plan, timings=(400, 930, 100))
    assert ok.span_ms == 1430


def test_timings_validation():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    with pytest.raises(ValueError):
        compile_timeline(plan, timings=(400, 930))
    with pytest.raises(ValueError):
        compile_timeline(plan, timings=(400, 0, 200))


def test_start_offset_shifts_everything():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan, start_ms=5000)
    assert [(e.time_ms - 5000, e.pattern) for e in tl] == PIVOT_GOLDEN
    assert tl.span_ms == 1530


def test_compiled_timelines_always_end_all_off():
    rng = random.Random(0xC0DEC)
    checked = 0
    while checked < 40:
        state = random_connected_state(rng, rng.randint(2, 8))
        req = random_request(rng, state)
        try:
            plan = resolve_maneuver(state, req)
        except Exception:
            continue
        tl = compile_timeline(plan)
        assert tl.final_polarities() == {}
        assert tl.span_ms == sum(p.duration_ms for p in plan.phases)
        assert tl.entries[0].time_ms == 0
        checked += 1


# -- text and binary round trips ---------------------------------------------------


def test_text_round_trip():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan, start_ms=40)
    text = tl.to_text()
    assert "# start_ms: 40" in text
    assert f"{40 + 1530} 0028" in text
    again = CommandTimeline.from_text(text)
    assert again == tl


def test_text_parse_tolerates_comments_and_blanks():
    tl = CommandTimeline.from_text(
        """
        # a note
        0 4011

        20 bffc
        """
    )
    assert [(e.time_ms, e.word) for e in tl] == [(0, 0x4011), (20, -16388)]


@pytest.mark.parametrize(
    "bad", ["0", "0 4011 junk", "zero 4011", "0 nothex"]
)
def test_text_parse_rejects_bad_lines(bad):
    with pytest.raises(ValueError, match="line 1"):
        CommandTimeline.from_text(bad)


def test_binary_round_trip():
    plan = resolve_maneuver(two_cube_state(), ManeuverRequest(2, "Y", "ccw"))
    tl = compile_timeline(plan)
    blob = tl.to_binary()
    assert len(blob) == 6 * len(tl)
    assert blob[4:6] == (0x4016).to_bytes(2, "little")
    assert CommandTimeline.from_binary(blob) == tl
    with pytest.raises(ValueError):
        CommandTimeline.from_binary(blob[:-1])
