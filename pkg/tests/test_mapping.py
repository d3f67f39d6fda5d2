"""Boundary data wrapping and Poisson evaluation of the extremal maps."""

import dataclasses
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_schwarz import ProblemSpec, boundary_map
from harmonic_schwarz.mapping import (
    BoundaryMap,
    constant_map,
    constraint_residuals,
    eval_batch,
    eval_general,
    eval_on_axis,
    _positive_profiles,
)
from harmonic_schwarz.sphere import segmented_nodes


@lru_cache(maxsize=8)
def cached_map(n, m, r, a, b):
    return boundary_map(ProblemSpec(n=n, m=m, r=r, a=np.array(a), b=b))


def test_positive_branch_datum_lies_on_the_sphere():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    assert bm.branch == "positive_b"
    res_a, res_b = constraint_residuals(bm)
    assert res_a < 1e-10 and res_b < 1e-10
    t = np.linspace(-0.999, 0.999, 2001)
    comps = bm.components(t)
    np.testing.assert_allclose((comps**2).sum(axis=0), 1.0, atol=1e-12)
    assert np.all(comps[-1] > 0)  # last component keeps the sign of b


def test_negative_b_flips_only_the_last_component():
    pos = cached_map(3, 1, 0.5, (0.2,), 0.4)
    neg = cached_map(3, 1, 0.5, (0.2,), -0.4)
    t = np.linspace(-0.99, 0.99, 400)
    np.testing.assert_array_equal(pos.components(t)[0], neg.components(t)[0])
    np.testing.assert_array_equal(pos.components(t)[1], -neg.components(t)[1])
    ax_pos = eval_on_axis(pos, 0.3).value
    ax_neg = eval_on_axis(neg, 0.3).value
    assert ax_pos[0] == ax_neg[0]
    assert ax_pos[1] == -ax_neg[1]


def test_zero_branch_centered_datum_is_the_hemisphere_jump():
    bm = cached_map(2, 1, 0.5, (0.0,), 0.0)
    assert bm.branch == "zero_b"
    assert bm.solution.jump_point == pytest.approx(0.0, abs=1e-9)
    assert bm.breakpoints == (bm.solution.jump_point,)
    comps = bm.components(np.array([-0.5, 0.5]))
    np.testing.assert_array_equal(comps[0], [-1.0, 1.0])
    np.testing.assert_array_equal(comps[1], [0.0, 0.0])


def test_zero_branch_tail_datum_is_unimodular():
    bm = cached_map(3, 2, 0.4, (0.2, 0.3), 0.0)
    t = np.linspace(-0.99, 0.99, 500)
    comps = bm.components(t)
    np.testing.assert_allclose((comps[:2] ** 2).sum(axis=0), 1.0, atol=1e-12)
    assert np.all(comps[2] == 0.0)
    res_a, res_b = constraint_residuals(bm)
    assert res_a < 1e-8 and res_b < 1e-12


def test_center_evaluation_recovers_the_prescribed_value():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    np.testing.assert_allclose(eval_on_axis(bm, 0.0).value, [0.3, -0.2, 0.4], atol=1e-10)
    bz = cached_map(3, 2, 0.4, (0.2, 0.3), 0.0)
    np.testing.assert_allclose(eval_on_axis(bz, 0.0).value, [0.2, 0.3, 0.0], atol=1e-8)


@pytest.mark.parametrize("r", [0.3, 0.5, 0.8])
def test_planar_centered_axis_value_matches_arctan_formula(r):
    bm = cached_map(2, 1, r, (0.0,), 0.0)
    assert eval_on_axis(bm, r).value[0] == pytest.approx(
        (4.0 / np.pi) * np.arctan(r), abs=1e-10
    )


def test_three_dim_centered_axis_value_matches_closed_form():
    r = 0.5
    bm = cached_map(3, 1, r, (0.0,), 0.0)
    closed = (1.0 / r) * (1.0 - (1.0 - r * r) / np.sqrt(1.0 + r * r))
    assert eval_on_axis(bm, r).value[0] == pytest.approx(closed, abs=1e-12)


def test_general_evaluation_agrees_with_the_axis_reduction():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    np.testing.assert_allclose(eval_general(bm, np.zeros(3)).value, [0.3, -0.2, 0.4], atol=1e-12)
    rho = 0.42
    ax = eval_on_axis(bm, rho).value
    gen = eval_general(bm, np.array([0.0, 0.0, rho]))
    np.testing.assert_allclose(gen.value, ax, atol=1e-9)
    np.testing.assert_array_equal(gen.x, [0.0, 0.0, rho])


def test_batch_evaluation_matches_pointwise_calls():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    pts = np.array([[0.1, -0.2, 0.3], [0.0, 0.0, 0.42], [0.2, 0.1, -0.1]])
    batch = eval_batch(bm, pts)
    assert batch.shape == (3, 3)
    for k, x in enumerate(pts):
        np.testing.assert_allclose(batch[k], eval_general(bm, x).value, atol=1e-12)


def test_values_depend_only_on_radius_and_latitude():
    # harmonic extension of a zonal datum is invariant under rotations
    # fixing the pole axis
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    p1 = np.array([0.25, 0.1, 0.3])
    p2 = np.array([np.hypot(0.25, 0.1), 0.0, 0.3])
    out = eval_batch(bm, np.vstack([p1, p2]))
    np.testing.assert_allclose(out[0], out[1], atol=1e-14)


@given(
    rho=st.floats(min_value=0.0, max_value=0.95),
    cos_t=st.floats(min_value=-1.0, max_value=1.0),
)
@settings(max_examples=60, deadline=None)
def test_interior_values_stay_inside_the_ball(rho, cos_t):
    bm = cached_map(3, 1, 0.5, (0.2,), 0.4)
    sin_t = np.sqrt(max(1.0 - cos_t * cos_t, 0.0))
    x = rho * np.array([sin_t, 0.0, cos_t])
    assert np.linalg.norm(eval_batch(bm, x[None, :])[0]) < 1.0


def test_evaluation_input_validation():
    bm = cached_map(3, 1, 0.5, (0.2,), 0.4)
    with pytest.raises(ValueError):
        eval_on_axis(bm, 1.0)
    with pytest.raises(ValueError):
        eval_on_axis(bm, -0.1)
    with pytest.raises(ValueError):
        eval_general(bm, np.array([1.2, 0.0, 0.0]))
    with pytest.raises(ValueError):
        eval_general(bm, np.zeros(2))
    with pytest.raises(ValueError):
        eval_batch(bm, np.zeros((2, 4)))


def test_constraint_residuals_flag_unconverged_multipliers():
    spec = ProblemSpec(n=3, m=1, r=0.5, a=np.array([0.2]), b=0.4)
    bm = cached_map(3, 1, 0.5, (0.2,), 0.4)
    lam = bm.solution.lam.copy()
    lam[0] += 1e-3
    broken = dataclasses.replace(bm.solution, lam=lam)
    u_profiles, v_profile = _positive_profiles(spec, broken, sign=1)
    fake = BoundaryMap(spec, "positive_b", broken, u_profiles, v_profile, (), bm.rule)
    res_a, res_b = constraint_residuals(fake)
    assert res_a > 1e-4  # the diagnostic must see a multiplier this wrong


def test_constant_map_extends_to_its_own_center_value():
    spec = ProblemSpec(n=3, m=2, r=0.6, a=np.array([0.1, -0.3]), b=0.5)
    bm = constant_map(spec)
    assert constraint_residuals(bm) == (pytest.approx(0.0, abs=1e-14), pytest.approx(0.0, abs=1e-14))
    np.testing.assert_allclose(eval_on_axis(bm, 0.7).value, [0.1, -0.3, 0.5], atol=1e-12)
    np.testing.assert_allclose(
        eval_general(bm, np.array([0.2, -0.4, 0.1])).value, [0.1, -0.3, 0.5], atol=1e-12
    )


def test_axis_profile_grows_toward_the_bound():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    values = [eval_on_axis(bm, rho).value[0] for rho in np.linspace(0.0, 0.55, 12)]
    assert np.all(np.diff(values) > 0)


def test_high_cap_datum_splits_the_mass_correctly():
    bm = cached_map(3, 1, 0.4, (0.0,), 0.9)
    t, w = segmented_nodes(bm.rule, bm.breakpoints)
    comps = bm.components(t)
    assert w @ comps[0] == pytest.approx(0.0, abs=1e-12)
    assert w @ comps[1] == pytest.approx(0.9, abs=1e-10)


@pytest.mark.parametrize("n,a", [(3, (0.25,)), (2, (0.4,))])
def test_branch_continuity_small_b_to_zero(n, a):
    # the positive branch must join the degenerate one continuously
    near = boundary_map(ProblemSpec(n=n, m=1, r=0.3, a=np.array(a), b=1e-6))
    limit = boundary_map(ProblemSpec(n=n, m=1, r=0.3, a=np.array(a), b=0.0))
    gap = max(
        abs(float(eval_on_axis(near, rho).value[0]) - float(eval_on_axis(limit, rho).value[0]))
        for rho in np.linspace(0.0, 0.3, 7)
    )
    assert gap < 1e-3


def test_small_b_extension_carries_the_layer_partition():
    # without the graded breakpoints the center identity drifts by the
    # plain rule's staircase quantization, around 1e-3 at this order
    bm = boundary_map(ProblemSpec(n=3, m=1, r=0.5, a=np.array([0.25]), b=1e-6))
    assert bm.breakpoints
    assert bm.breakpoints == bm.solution.breakpoints
    np.testing.assert_allclose(eval_on_axis(bm, 0.0).value, [0.25, 1e-6], atol=1e-8)
    ev = eval_on_axis(bm, 0.5)
    assert ev.quadrature_error_estimate < 1e-8


def test_error_estimate_reported_for_smooth_data():
    bm = cached_map(3, 2, 0.55, (0.3, -0.2), 0.4)
    ev = eval_general(bm, np.array([0.1, -0.2, 0.3]))
    assert 0.0 <= ev.quadrature_error_estimate < 1e-8
