"""Coil geometry, pair-force kernel, and sweep behavior.

Expensive full-resolution checks (D=8000 convergence, 40-gap monotone sweep,
per-increment timing) live in the acceptance suite; these tests cover the
same contracts at fast sizes plus all exact identities.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliptic_oracle import coaxial_loop_force
from empivot.coilforce import (
    CoilSpec,
    CoilsOverlapError,
    ForceCurve,
    PermeabilityModel,
    available_backends,
    discretize,
    force_current_sweep,
    force_distance_sweep,
    pair_force,
    single_loop,
)
from empivot.coilforce.kernel import active_backend

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(), reason="compiled kernel not built"
)


# -- coil specification ------------------------------------------------------


def test_default_spec_layer_structure():
    spec = CoilSpec()
    assert spec.layers == 3
    assert spec.layer_turns() == [346, 346, 108]
    assert spec.layer_radii() == pytest.approx(
        [1.625e-3, 1.785e-3, 1.945e-3], abs=1e-15
    )
    assert sum(spec.layer_turns()) == spec.turns


def test_spec_validation_errors():
    with pytest.raises(ValueError):
        CoilSpec(pitch=0.1e-3)  # below wire diameter
    with pytest.raises(ValueError):
        CoilSpec(turns=800, layers=1)  # cannot fit in one layer
    with pytest.raises(ValueError):
        CoilSpec(core_radius=-1e-3)
    with pytest.raises(ValueError):
        CoilSpec(current=1.5)  # above the 1.2 A drive limit
    with pytest.raises(ValueError):
        CoilSpec(turns=0)


# -- discretization ----------------------------------------------------------


def test_single_loop_discretization_is_a_circle():
    radius = 10e-3
    coil = discretize(single_loop(radius), 360)
    assert coil.elements == 360
    radii = np.hypot(coil.midpoints[:, 0], coil.midpoints[:, 1])
    assert np.max(np.abs(radii - radius)) < 1e-12
    assert np.max(np.abs(coil.midpoints[:, 2])) == 0.0
    assert np.max(np.abs(coil.tangents.sum(axis=0))) < 1e-14
    assert coil.wire_length == pytest.approx(2 * math.pi * radius, rel=1e-12)


def test_default_spec_wire_length_matches_analytic_helix():
    spec = CoilSpec()
    coil = discretize(spec, 8000)
    assert coil.elements == 8000
    # contract bound, then the tight construction bound
    assert coil.wire_length == pytest.approx(spec.wire_length, rel=5e-3)
    assert coil.wire_length == pytest.approx(spec.wire_length, rel=1e-9)
    # roughly N x mean circumference
    mean_circ = 2 * math.pi * (spec.core_radius + spec.wire_diameter)
    assert coil.wire_length == pytest.approx(spec.turns * mean_circ, rel=0.05)


def test_discretized_elements_stay_inside_winding_envelope():
    spec = CoilSpec()
    coil = discretize(spec, 4000)
    assert np.max(np.abs(coil.midpoints[:, 2])) <= spec.winding_length / 2
    radii = np.hypot(coil.midpoints[:, 0], coil.midpoints[:, 1])
    assert set(np.round(np.unique(radii), 12)) == {1.625e-3, 1.785e-3, 1.945e-3}


def test_too_few_elements_rejected():
    with pytest.raises(ValueError):
        discretize(CoilSpec(), 799)


# -- pair force: exact identities -------------------------------------------


def _loop_pair(d=400, sep=4e-3, r1=6e-3, r2=6e-3, i1=1.0, i2=1.0):
    c1 = discretize(single_loop(r1, i1), d)
    c2 = discretize(single_loop(r2, i2), d).translated((0.0, 0.0, sep))
    return c1, c2


def test_zero_current_gives_exact_zero():
    c1, c2 = _loop_pair(i1=0.0)
    assert np.array_equal(pair_force(c2, c1, 874.0), np.zeros(3))


def test_current_squared_scaling_is_exact():
    c1, c2 = _loop_pair(i1=1.0, i2=1.0)
    h1, h2 = _loop_pair(i1=0.5, i2=0.5)
    full = pair_force(c2, c1, 874.0)
    half = pair_force(h2, h1, 874.0)
    assert np.array_equal(full, 4.0 * half)


def test_bilinearity_at_three_levels():
    c1, c2 = _loop_pair(i1=1.0, i2=1.0)
    base = pair_force(c2, c1, 1.0)
    for i1, i2 in [(0.3, 0.7), (1.1, 0.2), (0.9, 0.9)]:
        a, b = _loop_pair(i1=i1, i2=i2)
        np.testing.assert_allclose(pair_force(b, a, 1.0), i1 * i2 * base, rtol=1e-12)


def test_flipping_one_current_negates_exactly():
    c1, c2 = _loop_pair()
    fwd = pair_force(c2, c1, 874.0)
    rev = pair_force(c2.with_current(-c2.current), c1, 874.0)
    assert np.array_equal(rev, -fwd)


def test_flipping_both_currents_changes_nothing():
    c1, c2 = _loop_pair()
    fwd = pair_force(c2, c1, 874.0)
    both = pair_force(
        c2.with_current(-c2.current), c1.with_current(-c1.current), 874.0
    )
    assert np.array_equal(both, fwd)


def test_mu_multiplier_is_linear():
    c1, c2 = _loop_pair()
    np.testing.assert_allclose(
        pair_force(c2, c1, 874.0), 874.0 * pair_force(c2, c1, 1.0), rtol=1e-12
    )


def test_overlapping_coils_rejected():
    c1 = discretize(single_loop(5e-3), 200)
    c2 = discretize(single_loop(5e-3), 200).translated((0.0, 0.0, 5e-6))
    with pytest.raises(CoilsOverlapError):
        pair_force(c2, c1, 1.0)


@settings(max_examples=60, deadline=None)
@given(
    r1=st.floats(2e-3, 15e-3),
    r2=st.floats(2e-3, 15e-3),
    dx=st.floats(-20e-3, 20e-3),
    dy=st.floats(-20e-3, 20e-3),
    dz=st.floats(1e-3, 30e-3),
    i1=st.floats(0.05, 1.2),
    i2=st.floats(0.05, 1.2),
)
def test_antisymmetry_on_random_geometries(r1, r2, dx, dy, dz, i1, i2):
    c1 = discretize(single_loop(r1, i1), 60)
    c2 = discretize(single_loop(r2, i2), 60).translated((dx, dy, dz))
    f_ab = pair_force(c1, c2, 874.0)
    f_ba = pair_force(c2, c1, 874.0)
    scale = np.max(np.abs(f_ab))
    assert np.max(np.abs(f_ab + f_ba)) <= 1e-12 * max(scale, 1e-300)


# -- pair force: oracle agreement --------------------------------------------


@pytest.mark.parametrize(
    "radius,sep",
    [(10e-3, 5e-3), (5e-3, 1e-3), (20e-3, 20e-3)],
)
def test_coaxial_loops_match_elliptic_oracle(radius, sep):
    c1 = discretize(single_loop(radius), 2000)
    c2 = discretize(single_loop(radius), 2000).translated((0.0, 0.0, sep))
    force = pair_force(c2, c1, 1.0)
    expected = coaxial_loop_force(radius, radius, sep)
    assert force[2] == pytest.approx(expected, rel=0.01)
    assert abs(force[0]) < 1e-6 * abs(expected)
    assert abs(force[1]) < 1e-6 * abs(expected)


# -- backends ----------------------------------------------------------------


def test_python_backend_agrees_with_compiled():
    if "compiled" not in available_backends():
        pytest.skip("compiled kernel not built")
    c1, c2 = _loop_pair(d=500)
    fc = pair_force(c2, c1, 874.0, backend="compiled")
    fp = pair_force(c2, c1, 874.0, backend="python")
    # vector-scale comparison: the lateral components are exact-zero by
    # symmetry and carry only summation noise
    assert np.max(np.abs(fp - fc)) <= 1e-12 * np.max(np.abs(fc))


@needs_compiled
def test_compiled_result_independent_of_thread_count():
    c1, c2 = _loop_pair(d=500)
    one = pair_force(c2, c1, 874.0, backend="compiled", num_threads=1)
    three = pair_force(c2, c1, 874.0, backend="compiled", num_threads=3)
    assert np.array_equal(one, three)


def test_backend_env_override(monkeypatch):
    monkeypatch.setenv("EMPIVOT_FORCE_BACKEND", "python")
    assert active_backend() == "python"
    monkeypatch.setenv("EMPIVOT_FORCE_BACKEND", "nonsense")
    with pytest.raises(ValueError):
        active_backend()


# -- permeability model -------------------------------------------------------


def test_default_permeability_anchors():
    mu = PermeabilityModel()
    assert mu(0.0) == pytest.approx(2000.0, rel=1e-12)
    assert mu(1.2) == pytest.approx(874.0, rel=1e-12)


def test_permeability_clamps_and_uses_magnitude():
    mu = PermeabilityModel()
    assert mu(5.0) == mu(1.2)
    assert mu(-0.7) == mu(0.7)


def test_permeability_monotone_non_increasing():
    mu = PermeabilityModel()
    grid = np.linspace(0.0, 1.2, 49)
    vals = mu(grid)
    assert np.all(np.diff(vals) <= 1e-9)
    assert np.all((vals > 1.0) & (vals <= 2000.0))


def test_permeability_validation():
    with pytest.raises(ValueError):
        PermeabilityModel(currents=(0.0, 1.0), values=(800.0, 900.0))  # increasing
    with pytest.raises(ValueError):
        PermeabilityModel(currents=(1.0, 0.0), values=(874.0, 2000.0))
    with pytest.raises(ValueError):
        PermeabilityModel(currents=(0.0, 1.0), values=(2500.0, 874.0))  # > 2000
    with pytest.raises(ValueError):
        PermeabilityModel(currents=(0.0,), values=(2000.0,))


# -- sweeps -------------------------------------------------------------------

_FAST_GAPS = (0.5e-3, 1e-3, 2e-3, 4e-3, 8e-3)


def test_distance_sweep_signs_and_polarity_flip():
    attract = force_distance_sweep(gaps=_FAST_GAPS, elements=900, relative_polarity=-1)
    repel = force_distance_sweep(gaps=_FAST_GAPS, elements=900, relative_polarity=+1)
    assert np.all(attract.force < 0)
    assert np.all(repel.force > 0)
    assert np.array_equal(repel.force, -attract.force)


def test_distance_sweep_attraction_weakens_with_gap():
    curve = force_distance_sweep(gaps=_FAST_GAPS, elements=900)
    mags = np.abs(curve.force)
    assert np.all(np.diff(mags) < 0)


def test_distance_sweep_metadata():
    curve = force_distance_sweep(gaps=_FAST_GAPS[:2], elements=900)
    assert curve.meta["mu_r"] == pytest.approx(874.0, rel=1e-12)
    assert curve.meta["elements"] == 900
    assert "R=0.001625" in curve.meta["spec_1"]


def test_distance_sweep_worker_count_does_not_change_bytes():
    serial = force_distance_sweep(gaps=_FAST_GAPS[:3], elements=900, workers=1)
    pooled = force_distance_sweep(gaps=_FAST_GAPS[:3], elements=900, workers=3)
    assert np.array_equal(serial.force, pooled.force)


def test_current_sweep_zero_current_zero_force():
    curve = force_current_sweep(elements=900, gap=0.5e-3)
    assert curve.abscissa[0] == 0.0
    assert curve.force[0] == 0.0


def test_current_sweep_exact_quadratic_under_fixed_mu():
    flat = PermeabilityModel(currents=(0.0, 1.2), values=(874.0, 874.0))
    curve = force_current_sweep(
        elements=900, currents=(0.25, 0.5, 1.0), mu_model=flat
    )
    assert curve.query(1.0) / curve.query(0.5) == 4.0
    assert curve.force[2] / curve.force[1] == 4.0


def test_current_sweep_saturation_bends_below_quadratic():
    curve = force_current_sweep(elements=900, currents=(0.3, 0.6, 0.9, 1.2))
    mags = np.abs(curve.force)
    # mu drops from 2000 toward 874, so the top-end ratio sits under I^2
    assert mags[3] / mags[1] < 4.0
    expected = 4.0 * 874.0 / float(PermeabilityModel()(0.6))
    assert mags[3] / mags[1] == pytest.approx(expected, rel=1e-12)


def test_current_sweep_concave_at_the_top():
    grid = np.round(np.arange(0.8, 1.2001, 0.05), 10)
    curve = force_current_sweep(elements=900, currents=grid)
    mags = np.abs(curve.force)
    assert np.all(np.diff(mags, 2) < 0)


def test_current_sweep_rejects_over_limit():
    with pytest.raises(ValueError):
        force_current_sweep(elements=900, currents=(0.5, 1.5))


# -- force curve container ----------------------------------------------------


def test_curve_requires_increasing_abscissa():
    with pytest.raises(ValueError):
        ForceCurve(np.array([1.0, 1.0, 2.0]), np.zeros(3))


def test_curve_roundtrip_is_lossless():
    curve = force_distance_sweep(gaps=_FAST_GAPS, elements=900)
    again = ForceCurve.loads(curve.dumps())
    assert np.array_equal(curve.abscissa, again.abscissa)
    assert np.array_equal(curve.force, again.force)
    assert again.meta["kind"] == "force_vs_gap"


def test_curve_query_interpolates_clamps_and_tapers():
    curve = force_distance_sweep(gaps=_FAST_GAPS, elements=900)
    # exact at samples
    assert curve.query(_FAST_GAPS[2]) == pytest.approx(curve.force[2], rel=1e-12)
    # below range clamps
    assert curve.query(1e-5) == curve.force[0]
    # beyond range: same sign, smaller magnitude, still shrinking
    far1, far2 = curve.query(12e-3), curve.query(20e-3)
    assert np.sign(far1) == np.sign(curve.force[-1])
    assert abs(far1) < abs(curve.force[-1])
    assert abs(far2) < abs(far1)
    # vector query matches scalar queries
    vec = curve.query(np.array([1e-3, 2e-3, 12e-3]))
    assert vec == pytest.approx(
        [curve.query(1e-3), curve.query(2e-3), curve.query(12e-3)], rel=1e-12
    )
