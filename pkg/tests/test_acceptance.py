"""Acceptance gate: one test per end-to-end acceptance check.

Run with ``pytest -v tests/test_acceptance.py`` — each check appears as
exactly one PASSED/FAILED line.  Tolerances and budgets are stated in the
assertions themselves; nothing here is tuned to the implementation.
"""

import math
import random
import time

import numpy as np
import pytest

from empivot.codec import (
    MESSAGE_SLOT_MS,
    MalformedCommandError,
    compile_timeline,
    decode_command,
    encode_command,
)
from empivot.coilforce import (
    CoilSpec,
    discretize,
    force_distance_sweep,
    pair_force,
    single_loop,
)
from empivot.dynamics import (
    DynParams,
    DynState,
    ForceCurve,
    default_params,
    initial_state,
    kinetic_energy,
    simulate_maneuver,
    step,
)
from empivot.lattice import Cube, LatticeState
from empivot.planner import EmAssignment, ManeuverRequest, resolve_maneuver
from empivot.scenario import load_corpus_scenario, load_corpus_shape, run_script

from elliptic_oracle import coaxial_loop_force
from planner_properties import (
    random_connected_state,
    random_request,
    resolve_and_verify,
)


def asg(cube, em, pol):
    return EmAssignment(cube, em, pol)


# -- 1. codec bijection ---------------------------------------------------------------


def test_codec_bijection_exhaustive_scan_under_one_second():
    t0 = time.perf_counter()
    valid = 0
    for word in range(-32768, 32768):
        try:
            assignment = decode_command(word)
        except MalformedCommandError:
            continue
        valid += 1
        assert (
            encode_command(
                assignment.cube_id, assignment.em, assignment.polarity
            )
            == word
        )
    elapsed = time.perf_counter() - t0
    assert valid == 1023 * 12 * 3 == 36_828
    assert elapsed < 1.0, f"scan took {elapsed:.2f} s"


# -- 2. planner goldens ----------------------------------------------------------------


def test_planner_golden_tables_match_exactly():
    pivot = resolve_maneuver(
        LatticeState([Cube(1, (0, 0, 0)), Cube(2, (0, 0, 1))]),
        ManeuverRequest(2, "Y", "ccw"),
    )
    launch, travel, catch = (pivot.phase(n).assignments for n in
                             ("launch", "travel", "catch"))
    assert launch == {asg(2, 5, +1), asg(1, 6, +1), asg(2, 7, +1), asg(1, 8, -1)}
    assert travel == {asg(2, 7, +1), asg(1, 8, -1)}
    assert catch == {asg(2, 8, +1), asg(1, 7, -1)}
    assert tuple(len(pivot.phase(n).assignments) for n in
                 ("launch", "travel", "catch")) == (4, 2, 2)

    traversal = resolve_maneuver(
        LatticeState([Cube(1, (0, 0, 0)), Cube(2, (1, 0, 0)), Cube(3, (0, 0, 1))]),
        ManeuverRequest(3, "Y", "ccw"),
    )
    attach = {asg(1, 10, +1), asg(1, 12, +1), asg(2, 9, -1), asg(2, 11, -1)}
    launch, travel, catch = (traversal.phase(n).assignments for n in
                             ("launch", "travel", "catch"))
    assert launch == {asg(3, 5, +1), asg(1, 6, +1), asg(3, 7, +1), asg(1, 8, -1)} | attach
    assert travel == {asg(3, 7, +1), asg(1, 8, -1)} | attach
    assert catch == {asg(3, 8, +1), asg(2, 8, -1)} | attach
    assert tuple(len(traversal.phase(n).assignments) for n in
                 ("launch", "travel", "catch")) == (8, 6, 6)
    # the two attach pairs hold cubes whose shared edges run orthogonal
    # to the hinge axis (y): electromagnets 9-12 are the x/z-axis edges
    assert all(a.em in (9, 10, 11, 12) for a in attach)


# -- 3. hinge uniqueness on random lattices ---------------------------------------------


def test_hinge_uniqueness_holds_on_10000_random_lattices_under_30s():
    rng = random.Random(0xACCE97)
    t0 = time.perf_counter()
    plans = errors = 0
    for _ in range(10_000):
        state = random_connected_state(rng, rng.randrange(2, 11))
        plan = resolve_and_verify(state, random_request(rng, state))
        if plan is None:
            errors += 1
        else:
            plans += 1
    elapsed = time.perf_counter() - t0
    assert plans + errors == 10_000
    assert plans > 1_000  # the property must actually be exercised
    assert elapsed < 30.0, f"property sweep took {elapsed:.1f} s"


# -- 4. furniture corpus -----------------------------------------------------------------


def test_corpus_chair_table_couch_runs_22_then_40_deterministically():
    runs = {}
    for name, moves, final_shape in (
        ("chair_to_table.scn", 22, "table.shape"),
        ("table_to_couch.scn", 40, "couch.shape"),
    ):
        scenario = load_corpus_scenario(name)
        assert len(scenario.script) == moves
        first = run_script(scenario)
        second = run_script(scenario)
        assert len(first.plans) == moves
        assert sum(len(p.warnings) for p in first.plans) == 0
        assert first.final_state.state_hash() == second.final_state.state_hash()
        assert first.final_state.canonical_lines() == load_corpus_shape(final_shape)
        runs[name] = first
    # the two scripts chain: scenario 2 starts on scenario 1's occupancy
    placement = lambda lines: [l.split()[:4] for l in lines]  # noqa: E731
    assert placement(
        load_corpus_scenario("table_to_couch.scn").initial_state().canonical_lines()
    ) == placement(runs["chair_to_table.scn"].final_state.canonical_lines())


# -- 5. kernel versus elliptic-integral oracle --------------------------------------------


def test_kernel_matches_elliptic_oracle_within_1_percent():
    d = 2000
    radii = (5e-3, 10e-3, 20e-3)
    separations = (1e-3, 2e-3, 5e-3, 10e-3, 20e-3)
    worst = 0.0
    for a in radii:
        for b in radii:
            c1 = discretize(single_loop(a, 1.0), d)
            for c in separations:
                c2 = discretize(single_loop(b, 1.0), d).translated((0.0, 0.0, c))
                kernel = float(pair_force(c2, c1, 1.0)[2])
                oracle = coaxial_loop_force(a, b, c)
                rel = abs(kernel - oracle) / abs(oracle)
                worst = max(worst, rel)
                assert rel <= 0.01, (
                    f"radii ({a:g},{b:g}) m at {c:g} m: kernel {kernel:.3e}, "
                    f"oracle {oracle:.3e}, rel err {rel:.2%}"
                )
    assert worst <= 0.01


# -- 6. kernel properties ------------------------------------------------------------------


@pytest.fixture(scope="module")
def timed_reference_increments():
    """F(0.5 mm) for the default coil pair at D=4000 and D=8000, with the
    measured wall time of one D=8000 increment."""
    gaps = [0.5e-3, 1.0e-3]
    coarse = force_distance_sweep(elements=4000, gaps=gaps, workers=1)
    t0 = time.perf_counter()
    fine = force_distance_sweep(elements=8000, gaps=gaps, workers=1)
    per_increment = (time.perf_counter() - t0) / len(gaps)
    return float(coarse.force[0]), float(fine.force[0]), per_increment


def test_kernel_antisymmetry_i_squared_convergence_monotone(
    timed_reference_increments,
):
    # antisymmetry (momentum conservation between the two coils)
    c1 = discretize(single_loop(6e-3, 1.0), 400)
    c2 = discretize(single_loop(9e-3, 0.7), 400).translated((1e-3, 2e-3, 4e-3))
    f12 = pair_force(c2, c1, 874.0)
    f21 = pair_force(c1, c2, 874.0)
    assert np.linalg.norm(f12 + f21) <= 1e-12 * np.linalg.norm(f12)

    # exact current-squared scaling at fixed permeability
    full = pair_force(c2, c1, 874.0)
    h1 = discretize(single_loop(6e-3, 0.5), 400)
    h2 = discretize(single_loop(9e-3, 0.35), 400).translated((1e-3, 2e-3, 4e-3))
    half = pair_force(h2, h1, 874.0)
    assert np.array_equal(full, 4.0 * half)

    # discretization convergence at the tightest gap
    f4000, f8000, _ = timed_reference_increments
    rel = abs(f4000 - f8000) / abs(f8000)
    assert rel < 0.01, f"D=4000 vs D=8000 differ by {rel:.2%} at 0.5 mm"

    # attraction decays strictly monotonically over the published sweep
    curve = force_distance_sweep(elements=2000, workers=1)
    magnitudes = np.abs(curve.force)
    assert len(magnitudes) == 40
    assert np.all(np.diff(magnitudes) < 0)


# -- 7. kernel performance ------------------------------------------------------------------


def test_kernel_increment_at_d8000_within_ten_seconds(timed_reference_increments):
    _, _, per_increment = timed_reference_increments
    assert per_increment <= 10.0, f"{per_increment:.2f} s per increment"


# -- 8. dynamics properties ------------------------------------------------------------------


@pytest.fixture(scope="module")
def swing_params():
    return default_params(elements=2000)


def _zero_force_params() -> DynParams:
    flat = ForceCurve(np.array([0.5e-3, 1.0]), np.zeros(2))
    return DynParams(launch_curve=flat, catch_curve=flat)


def test_dynamics_drift_work_energy_step_halving_and_pivot_bracket(swing_params):
    # energy drift in free rotation: < 1e-6 relative over 10,000 steps
    params = _zero_force_params()
    state = DynState(theta1=-0.75 * math.pi, theta2=0.75 * math.pi,
                     omega1=2.0, omega2=-3.0)
    e0 = kinetic_energy(state, params)
    for _ in range(10_000):
        state = step(state, params, "pivot")
    drift = abs(kinetic_energy(state, params) - e0) / e0
    assert drift < 1e-6, f"relative energy drift {drift:.2e}"

    # work-energy agreement: torque power integrates to the energy gained
    flat = ForceCurve(np.array([0.5e-3, 1.0]), np.array([0.05, 0.05]))
    wp = DynParams(launch_curve=flat, catch_curve=flat)
    s = initial_state()
    from empivot.dynamics import generalized_forces

    work = 0.0
    prev_power = 0.0
    dt = wp.step
    for i in range(300):
        q1, q2 = generalized_forces(s, wp, "pivot")
        power = q1 * s.omega1 + q2 * s.omega2
        if i > 0:
            work += 0.5 * (power + prev_power) * dt
        prev_power = power
        s = step(s, wp, "pivot")
    q1, q2 = generalized_forces(s, wp, "pivot")
    work += 0.5 * (prev_power + (q1 * s.omega1 + q2 * s.omega2)) * dt
    gained = kinetic_energy(s, wp) - kinetic_energy(initial_state(), wp)
    assert abs(work - gained) <= 1e-3 * abs(gained), (
        f"work {work:.6e} J vs energy gain {gained:.6e} J"
    )

    # step halving moves the pivot duration by < 0.5%
    base = simulate_maneuver("pivot", swing_params)
    import dataclasses

    halved = simulate_maneuver(
        "pivot", dataclasses.replace(swing_params, step=swing_params.step / 2)
    )
    rel = abs(base.duration - halved.duration) / base.duration
    assert rel < 0.005, f"step halving changed duration by {rel:.2%}"

    # default-parameter pivot completes within the 0.5-3 s bracket
    assert base.completed
    assert 0.5 <= base.duration <= 3.0, f"pivot took {base.duration:.3f} s"


# -- 9. timeline spans ------------------------------------------------------------------------


def test_timeline_default_spans_1530_and_1030_ms():
    pivot = resolve_maneuver(
        LatticeState([Cube(1, (0, 0, 0)), Cube(2, (0, 0, 1))]),
        ManeuverRequest(2, "Y", "ccw"),
    )
    traversal = resolve_maneuver(
        LatticeState([Cube(1, (0, 0, 0)), Cube(2, (1, 0, 0)), Cube(3, (0, 0, 1))]),
        ManeuverRequest(3, "Y", "ccw"),
    )
    pivot_span = compile_timeline(pivot).span_ms
    traversal_span = compile_timeline(traversal).span_ms
    assert abs(pivot_span - 1530) <= MESSAGE_SLOT_MS, f"pivot span {pivot_span} ms"
    assert (
        abs(traversal_span - 1030) <= MESSAGE_SLOT_MS
    ), f"traversal span {traversal_span} ms"
