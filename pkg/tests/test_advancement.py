import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import prefix_sums
from trajadv.advancement import (
    EPS_V,
    AdvancementState,
    advance,
    decompose,
    psi_dot_update,
)
from trajadv.errors import ConfigError

vec6 = arrays(np.float64, 6, elements=st.floats(-1e3, 1e3))
E = np.eye(6)


# -- decomposition -----------------------------------------------------------


def test_axis_aligned_decomposition():
    d = decompose([2, 3, 0, 0, 0, 0], E[0])
    assert d.alpha == 2.0 and d.beta == 3.0
    np.testing.assert_array_equal(d.par_dir, E[0])
    np.testing.assert_array_equal(d.perp_dir, E[1])
    assert d.helpful


def test_orthogonal_input_has_no_parallel_part():
    v = np.array([0.0, 1.0, -2.0, 0.5, 0.0, 0.0])
    d = decompose(v, [1.0, 0, 0, 0, 0, 3.0])
    assert d.alpha == 0.0
    assert d.beta == pytest.approx(np.linalg.norm(v), rel=1e-15)
    assert not d.helpful


@pytest.mark.parametrize("c", [1e-6, 0.5, 3.0, 1e6])
def test_parallel_input_has_no_perpendicular_part(c):
    xdot_d = np.array([0.3, -0.1, 0.7, 0.0, 0.2, 0.0])
    d = decompose(c * xdot_d / np.linalg.norm(xdot_d), xdot_d)
    assert d.alpha == pytest.approx(c, rel=1e-14)
    assert d.beta <= 1e-12 * max(1.0, c)
    assert np.abs(d.par_dir @ d.perp_dir) <= 1e-12


def test_degenerate_desired_velocity():
    v = np.array([1.0, 2.0, 2.0, 0, 0, 0])
    d = decompose(v, np.full(6, EPS_V / 10))
    assert d.alpha == 0.0 and d.beta == 3.0
    np.testing.assert_array_equal(d.par_dir, 0.0)
    np.testing.assert_allclose(d.beta * d.perp_dir, v)


def test_zero_everything():
    d = decompose(np.zeros(6), np.zeros(6))
    assert d.alpha == 0.0 and d.beta == 0.0
    np.testing.assert_array_equal(d.perp_dir, 0.0)


@settings(max_examples=300, deadline=None)
@given(vec6, vec6)
def test_decomposition_reconstructs_and_is_orthogonal(omega_f, xdot_d):
    d = decompose(omega_f, xdot_d)
    scale = max(1.0, np.linalg.norm(omega_f))
    assert np.linalg.norm(d.alpha * d.par_dir + d.beta * d.perp_dir - omega_f) <= 1e-12 * scale
    assert abs(d.par_dir @ d.perp_dir) <= 1e-12
    assert d.beta >= 0
    if np.linalg.norm(xdot_d) > EPS_V:
        assert np.linalg.norm(d.par_dir) == pytest.approx(1.0, abs=1e-14)


# -- update rule ------------------------------------------------------------


def test_nominal_tracking_gives_unit_rate():
    d = np.array([0.05, 0, -0.02, 0, 0, 0])
    assert psi_dot_update(d, d, 2.0) == 1.0


def test_rate_scales_with_measured_velocity():
    d = np.array([1.0, 2.0, 0, 0, 0, 0])
    assert psi_dot_update(2 * d, d, 3.0) == 2.0


def test_clamp_arms():
    d = np.array([1.0, 2.0, 0, 0, 0, 0])
    assert psi_dot_update(5 * d, d, 3.0) == 3.0
    assert psi_dot_update(np.zeros(6), d, 3.0) == 1.0
    assert psi_dot_update(-d, d, 3.0) == 1.0


def test_zero_curve_derivative_is_neutral():
    assert psi_dot_update(np.ones(6), np.zeros(6), 2.0) == 1.0
    assert psi_dot_update(np.ones(6), np.full(6, 1e-11), 2.0) == 1.0


def test_upper_below_one_is_a_config_error():
    with pytest.raises(ConfigError):
        psi_dot_update(np.ones(6), np.ones(6), 0.5)


def test_batched_update_matches_scalar_calls():
    rng = np.random.default_rng(0)
    X, D, U = rng.normal(size=(50, 6)), rng.normal(size=(50, 6)), rng.uniform(1, 5, 50)
    batch = psi_dot_update(X, D, U)
    assert batch.shape == (50,)
    for i in range(50):
        assert batch[i] == psi_dot_update(X[i], D[i], U[i])


@settings(max_examples=300, deadline=None)
@given(vec6, vec6, st.floats(1.0, 5.0))
def test_rate_stays_in_clamp_range(xdot, deriv, upper):
    out = psi_dot_update(xdot, deriv, upper)
    assert 1.0 <= out <= upper


@settings(max_examples=200, deadline=None)
@given(vec6, vec6, st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_monotone_in_projection(xdot, deriv, a, b):
    # moving xdot further along deriv raises the projection; output must not drop
    lo, hi = sorted((a, b))
    assert psi_dot_update(xdot + lo * deriv, deriv, 3.0) <= psi_dot_update(xdot + hi * deriv, deriv, 3.0)


@settings(max_examples=200, deadline=None)
@given(vec6, vec6.filter(lambda v: np.linalg.norm(v) > 1e-3), st.floats(0.0, 20.0))
def test_scaling_of_measured_velocity(xdot, deriv, c):
    ratio = float(xdot @ deriv) / float(deriv @ deriv)
    upper = 4.0
    expected = min(upper, max(1.0, c * ratio))
    assert psi_dot_update(c * xdot, deriv, upper) == pytest.approx(expected, rel=1e-12, abs=1e-12)


# -- integration of psi -------------------------------------------------------


def test_single_step():
    s = advance(AdvancementState(0.0, 1.0, 2.0), 1.0, 0.01)
    assert s.psi == 0.01 and s.psi_dot == 1.0 and s.psi_dot_upper == 2.0


def test_unit_rate_accumulates_time():
    s = AdvancementState()
    dt = 0.01
    for k in range(1, 101):
        s = advance(s, 1.0, dt)
        assert s.psi == pytest.approx(k * dt, abs=1e-12)


def test_psi_is_prefix_sum_of_rates():
    rng = np.random.default_rng(4)
    rates = rng.uniform(1.0, 2.0, 500)
    dt = 1e-3
    s = AdvancementState()
    psis = []
    for r in rates:
        s = advance(s, r, dt)
        psis.append(s.psi)
    np.testing.assert_array_equal(psis, prefix_sums(rates, dt))
    assert np.all(np.diff(psis) > 0)


def test_state_validation():
    with pytest.raises(ConfigError):
        AdvancementState(psi_dot_upper=0.9)
