"""Two-link maneuver dynamics tests.

Synthetic constant and zero force curves give closed-form oracles (free
rotation, equilibrium, work-energy bookkeeping); the default coil curve runs
check the qualitative completion bracket and the integrator's convergence.
"""

import math

import numpy as np
import pytest

from empivot.coilforce import ForceCurve
from empivot.dynamics import (
    CUBE_EDGE,
    DEFAULT_LINK,
    DEFAULT_MASS,
    AnchorSet,
    DynParams,
    DynState,
    NanDetectedError,
    SimResult,
    angular_momentum,
    default_params,
    em_anchor_positions,
    generalized_forces,
    initial_state,
    kinetic_energy,
    simulate_maneuver,
    step,
)


def flat_curve(value: float) -> ForceCurve:
    """Constant force out to 1 m; PCHIP through constant data stays constant."""
    return ForceCurve(np.array([0.5e-3, 1.0]), np.array([value, value]))


ZERO = flat_curve(0.0)


def coast_params(**overrides) -> DynParams:
    return DynParams(launch_curve=ZERO, catch_curve=ZERO, **overrides)


@pytest.fixture(scope="module")
def real_params() -> DynParams:
    return default_params(elements=2000)


def sep(a, b):
    return math.dist(a, b)


# -- parameter and state validation ------------------------------------------------


def test_defaults():
    p = coast_params()
    assert p.mass == DEFAULT_MASS == 0.1031
    assert p.link == DEFAULT_LINK == pytest.approx(math.sqrt(2) / 2 * 0.060)
    assert p.edge == CUBE_EDGE == 0.060
    assert p.step == 1e-3
    assert p.structural_offset == 0.5e-3
    assert p.phase_schedule("pivot") == (400, 930, 200)
    assert p.phase_schedule("traversal") == (400, 430, 200)
    assert coast_params(phase_ms=(100, 200, 300)).phase_schedule("pivot") == (
        100,
        200,
        300,
    )


@pytest.mark.parametrize(
    "bad",
    [
        {"mass": 0.0},
        {"link": -1.0},
        {"edge": 0.0},
        {"step": 0.0},
        {"timeout": -1.0},
        {"structural_offset": 0.0},
    ],
)
def test_params_validation(bad):
    with pytest.raises(ValueError):
        coast_params(**bad)


def test_state_rejects_non_finite():
    with pytest.raises(ValueError):
        DynState(theta1=float("nan"), theta2=0.0)
    with pytest.raises(ValueError):
        DynState(theta1=0.0, theta2=0.0, omega2=float("inf"))


def test_initial_state():
    s = initial_state()
    assert s.theta1 == -3 * math.pi / 4
    assert s.theta2 == 3 * math.pi / 4
    assert s.omega1 == s.omega2 == 0.0
    assert s.t == 0.0
    assert s.relative_angle == pytest.approx(1.5 * math.pi)


def test_kind_validation():
    with pytest.raises(ValueError):
        step(initial_state(), coast_params(), kind="slide")
    with pytest.raises(ValueError):
        simulate_maneuver("hop", coast_params())


# -- anchor geometry ----------------------------------------------------------------


def test_launch_anchors_meet_at_trailing_edge():
    p = coast_params()
    a = em_anchor_positions(initial_state(), p)
    # both sit at the trailing shared-face edge, one structural offset apart
    assert sep(a.launch_traveler, a.launch_origin) == pytest.approx(
        p.structural_offset, rel=1e-12
    )
    assert a.launch_traveler == pytest.approx((-p.edge, 0.0, +p.structural_offset / 2))
    assert a.launch_origin == pytest.approx((-p.edge, 0.0, -p.structural_offset / 2))
    # the catch pair is still a full lattice pitch apart at the start
    assert sep(a.catch_traveler, a.catch_origin) == pytest.approx(
        2 * p.edge, rel=1e-3
    )


def test_catch_anchors_meet_after_full_travel():
    p = coast_params()
    end = DynState(theta1=-math.pi / 4, theta2=math.pi / 4)
    a = em_anchor_positions(end, p)
    assert sep(a.catch_traveler, a.catch_origin) == pytest.approx(
        p.structural_offset, rel=1e-12
    )
    assert a.catch_traveler == pytest.approx((p.edge, 0.0, +p.structural_offset / 2))
    assert a.catch_origin == pytest.approx((p.edge, 0.0, -p.structural_offset / 2))


def test_rigid_rotation_preserves_pairwise_distances():
    p = coast_params()
    base = em_anchor_positions(initial_state(), p)
    for phi in (0.3, -1.2, 2.9):
        turned = em_anchor_positions(
            DynState(
                theta1=initial_state().theta1 + phi,
                theta2=initial_state().theta2 + phi,
            ),
            p,
        )
        for name_a in AnchorSet.__dataclass_fields__:
            for name_b in AnchorSet.__dataclass_fields__:
                d0 = sep(getattr(base, name_a), getattr(base, name_b))
                d1 = sep(getattr(turned, name_a), getattr(turned, name_b))
                assert d1 == pytest.approx(d0, abs=1e-12)


def test_traversal_catch_anchor_is_static():
    p = coast_params()
    for state in (initial_state(), DynState(theta1=-3 * math.pi / 4, theta2=1.0)):
        a = em_anchor_positions(state, p, kind="traversal")
        assert a.catch_origin == pytest.approx(
            (p.edge, 0.0, -p.structural_offset / 2)
        )
    end = DynState(theta1=-3 * math.pi / 4, theta2=math.pi / 4)
    a = em_anchor_positions(end, p, kind="traversal")
    assert sep(a.catch_traveler, a.catch_origin) == pytest.approx(
        p.structural_offset, rel=1e-12
    )


# -- integrator invariants ------------------------------------------------------------


def test_equilibrium_is_fixed_point():
    p = coast_params()
    s0 = initial_state()
    s1 = step(s0, p)
    assert (s1.theta1, s1.theta2, s1.omega1, s1.omega2) == (
        s0.theta1,
        s0.theta2,
        0.0,
        0.0,
    )
    assert s1.t == pytest.approx(p.step)


def test_free_rotation_conserves_energy():
    p = coast_params(timeout=20.0)
    s = DynState(
        theta1=initial_state().theta1,
        theta2=initial_state().theta2,
        omega1=1.0,
    )
    e0 = kinetic_energy(s, p)
    assert e0 == pytest.approx(0.5 * p.mass * p.link**2)
    for _ in range(10_000):
        s = step(s, p)
    assert s.t == pytest.approx(10.0)
    assert abs(kinetic_energy(s, p) - e0) / e0 < 1e-6
    assert s.theta1 == pytest.approx(initial_state().theta1 + 10.0, abs=1e-9)
    assert s.omega1 == pytest.approx(1.0, abs=1e-12)
    assert s.omega2 == 0.0


def test_launch_torques_are_equal_and_opposite(real_params):
    q1, q2 = generalized_forces(initial_state(), real_params)
    assert q2 < 0 < q1  # pushes the traveler toward the landing cell
    assert abs(q1 + q2) <= 1e-12 * abs(q1)


def test_phase_gating(real_params):
    mid_travel = DynState(theta1=-2.0, theta2=2.0, t=0.5)
    assert generalized_forces(mid_travel, real_params) == (0.0, 0.0)
    near_end = DynState(theta1=-math.pi / 4 - 0.05, theta2=math.pi / 4 + 0.05, t=1.4)
    q1, q2 = generalized_forces(near_end, real_params)
    assert q2 < 0  # catch pair pulls the traveler in
    assert abs(q1 + q2) <= 1e-12 * abs(q2)


def test_angular_momentum_conserved_in_pivot(real_params):
    res = simulate_maneuver("pivot", real_params)
    inertia = real_params.mass * real_params.link**2
    scale = max(
        inertia * (abs(s.omega1) + abs(s.omega2)) for s in res.trajectory
    )
    worst = max(abs(angular_momentum(s, real_params)) for s in res.trajectory)
    assert worst <= 1e-9 * scale


def test_work_energy_consistency():
    p = DynParams(launch_curve=flat_curve(0.05), catch_curve=ZERO)
    s = initial_state()
    states = [s]
    for _ in range(300):  # stays inside the launch window (400 ms)
        s = step(s, p)
        states.append(s)
    powers = [
        q1 * st.omega1 + q2 * st.omega2
        for st in states
        for q1, q2 in [generalized_forces(st, p)]
    ]
    work = np.trapezoid(powers, dx=p.step)
    delta_ke = kinetic_energy(states[-1], p) - kinetic_energy(states[0], p)
    assert delta_ke > 0
    assert abs(work - delta_ke) / delta_ke < 1e-3


def test_nan_detection():
    p = DynParams(launch_curve=flat_curve(1e308), catch_curve=ZERO)
    with pytest.raises(NanDetectedError):
        state = initial_state()
        for _ in range(5):
            state = step(state, p)


# -- full maneuvers --------------------------------------------------------------------


def test_default_pivot_completes_in_bracket(real_params):
    res = simulate_maneuver("pivot", real_params)
    assert res.completed
    assert 0.5 <= res.duration <= 3.0
    assert res.kind == "pivot"
    assert res.capture_ok
    assert 0.0 < res.capture_speed < real_params.capture_speed
    swept = abs(res.trajectory[-1].relative_angle - res.trajectory[0].relative_angle)
    assert swept == pytest.approx(math.pi, abs=1e-9)


def test_default_traversal_completes(real_params):
    res = simulate_maneuver("traversal", real_params)
    assert res.completed
    assert res.duration < simulate_maneuver("pivot", real_params).duration
    swept = abs(res.trajectory[-1].relative_angle - res.trajectory[0].relative_angle)
    assert swept == pytest.approx(math.pi / 2, abs=1e-9)
    # the origin link never moves
    assert all(s.theta1 == res.trajectory[0].theta1 for s in res.trajectory)
    assert all(s.omega1 == 0.0 for s in res.trajectory)


def test_step_halving_changes_duration_little(real_params):
    for kind in ("pivot", "traversal"):
        coarse = simulate_maneuver(kind, real_params).duration
        fine_params = DynParams(
            launch_curve=real_params.launch_curve,
            catch_curve=real_params.catch_curve,
            step=real_params.step / 2,
        )
        fine = simulate_maneuver(kind, fine_params).duration
        assert abs(coarse - fine) / fine < 5e-3


def test_doubling_force_strictly_speeds_up(real_params):
    durations = []
    for scale in (0.5, 1.0, 2.0):
        p = DynParams(
            launch_curve=ForceCurve(
                real_params.launch_curve.abscissa,
                real_params.launch_curve.force * scale,
            ),
            catch_curve=ForceCurve(
                real_params.catch_curve.abscissa,
                real_params.catch_curve.force * scale,
            ),
        )
        res = simulate_maneuver("pivot", p)
        assert res.completed
        durations.append(res.duration)
    assert durations[0] > durations[1] > durations[2]


def test_zero_force_times_out():
    p = coast_params(timeout=0.2)
    res = simulate_maneuver("pivot", p)
    assert not res.completed
    assert res.duration == p.timeout
    assert math.isnan(res.capture_speed)
    assert not res.capture_ok
    assert res.trajectory[-1].t == pytest.approx(0.2)


def test_capture_threshold_is_configurable(real_params):
    strict = DynParams(
        launch_curve=real_params.launch_curve,
        catch_curve=real_params.catch_curve,
        capture_speed=1e-9,
    )
    res = simulate_maneuver("pivot", strict)
    assert res.completed
    assert not res.capture_ok


def test_trajectory_recording(real_params):
    dense = simulate_maneuver("pivot", real_params, record_every=1)
    sparse = simulate_maneuver("pivot", real_params, record_every=10)
    assert len(sparse.trajectory) < len(dense.trajectory)
    assert sparse.duration == dense.duration
    assert dense.trajectory[0] == initial_state()
    ts = [s.t for s in dense.trajectory]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    with pytest.raises(ValueError):
        simulate_maneuver("pivot", real_params, record_every=0)


def test_sim_result_requires_trajectory():
    with pytest.raises(ValueError):
        SimResult((), 0.0, False, 0.0, False, "pivot")
