import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import PlanarChainOracle, central5
from trajadv import dynamics as dyn
from trajadv.errors import ContractError, NumericalError

ARM = dyn.planar_3link(
    masses=(1.2, 0.8, 0.5),
    lengths=(0.9, 0.7, 0.5),
    inertias=(0.08, 0.05, 0.02),
    contact_links=("link2", "link3"),
)
ORACLE = PlanarChainOracle(ARM.masses, ARM.lengths, ARM.inertias, ARM.gravity)

angles = st.lists(st.floats(-np.pi, np.pi), min_size=3, max_size=3)
rates = st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3)


def random_arm_state(rng):
    return dyn.GeneralizedState(rng.uniform(-np.pi, np.pi, 3), rng.uniform(-3, 3, 3))


def test_cartesian_mass_terms_at_rest():
    model = dyn.cartesian_mass(mass=1.0, inertia=0.5)
    state = dyn.GeneralizedState(np.arange(6.0), np.zeros(6))
    terms = dyn.compute_terms(model, state)
    np.testing.assert_array_equal(terms.M[:3, :3], np.eye(3))
    np.testing.assert_array_equal(terms.M[3:, 3:], 0.5 * np.eye(3))
    np.testing.assert_array_equal(terms.h, [0, 0, 9.81, 0, 0, 0])
    np.testing.assert_array_equal(terms.B, np.eye(6))


def test_planar_bias_equals_gravity_at_zero_velocity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = rng.uniform(-np.pi, np.pi, 3)
        terms = dyn.compute_terms(ARM, dyn.GeneralizedState(q, np.zeros(3)))
        np.testing.assert_allclose(terms.h, terms.G, rtol=0, atol=1e-14)


def test_planar_terms_match_energy_oracle():
    rng = np.random.default_rng(11)
    for _ in range(10):
        state = random_arm_state(rng)
        terms = dyn.compute_terms(ARM, state)
        M_ref = ORACLE.mass_matrix(state.q)
        h_ref = ORACLE.bias(state.q, state.nu)
        assert np.max(np.abs(terms.M - M_ref)) <= 1e-6 * max(1.0, np.max(np.abs(M_ref)))
        assert np.max(np.abs(terms.h - h_ref)) <= 1e-6 * max(1.0, np.max(np.abs(h_ref)))
        np.testing.assert_allclose(terms.G, ORACLE.gravity_vector(state.q), atol=1e-8)


@settings(max_examples=200, deadline=None)
@given(angles, rates)
def test_mass_matrix_symmetric_positive_definite(q, nu):
    M = dyn.compute_terms(ARM, dyn.GeneralizedState(q, nu)).M
    assert np.max(np.abs(M - M.T)) <= 1e-12
    np.linalg.cholesky(M)


def test_fixed_base_selector_and_floating_layout():
    np.testing.assert_array_equal(dyn.selector_matrix(3, floating=False), np.eye(3))
    B = dyn.selector_matrix(4, floating=True)
    assert B.shape == (10, 4)
    np.testing.assert_array_equal(B[:6], 0)
    np.testing.assert_array_equal(B[6:], np.eye(4))


def test_dimension_mismatch_is_a_contract_error():
    with pytest.raises(ContractError):
        dyn.compute_terms(ARM, dyn.GeneralizedState(np.zeros(6), np.zeros(6)))
    with pytest.raises(ContractError):
        dyn.forward_dynamics(ARM, dyn.GeneralizedState(np.zeros(3), np.zeros(3)), np.zeros(2))


def test_unknown_links_rejected():
    with pytest.raises(ContractError):
        dyn.link_jacobian(ARM, dyn.GeneralizedState(np.zeros(3), np.zeros(3)), "link7")
    with pytest.raises(ContractError):
        dyn.planar_3link(task_link="hand")
    state = dyn.GeneralizedState(np.zeros(3), np.zeros(3))
    with pytest.raises(ContractError):
        dyn.forward_dynamics(ARM, state, np.zeros(3), [("link1", np.ones(6))])


def test_invalid_parameters_rejected():
    with pytest.raises(ContractError):
        dyn.cartesian_mass(mass=0.0)
    with pytest.raises(ContractError):
        dyn.planar_3link(lengths=(1.0, -1.0, 1.0))
    with pytest.raises(NumericalError):
        dyn.GeneralizedState([np.nan, 0, 0], np.zeros(3))


# -- Jacobians ---------------------------------------------------------------


def test_cartesian_mass_jacobian_is_identity():
    model = dyn.cartesian_mass()
    J, Jdot_nu = dyn.task_jacobian(model, dyn.GeneralizedState(np.ones(6), np.ones(6)))
    np.testing.assert_array_equal(J, np.eye(6))
    np.testing.assert_array_equal(Jdot_nu, np.zeros(6))


def test_planar_jacobian_at_zero_configuration():
    # unit links, straight arm along +x: column i of the z-row is the
    # distance from joint i to the tip, x-row vanishes
    arm = dyn.planar_3link(lengths=(1.0, 1.0, 1.0))
    J, _ = dyn.task_jacobian(arm, dyn.GeneralizedState(np.zeros(3), np.zeros(3)))
    eps = 1e-6
    fd = np.column_stack(
        [
            (dyn.link_pose(arm, eps * e, "link3") - dyn.link_pose(arm, -eps * e, "link3")) / (2 * eps)
            for e in np.eye(3)
        ]
    )
    np.testing.assert_allclose(J, fd, atol=1e-6)
    np.testing.assert_allclose(J[2], [3.0, 2.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(J[0], 0.0, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(angles, rates)
def test_jacobian_matches_pose_finite_difference(q, nu):
    state = dyn.GeneralizedState(q, nu)
    nu = state.nu
    for link in ARM.link_ids:
        J, _ = dyn.link_jacobian(ARM, state, link)
        d = 1e-6
        fd = (dyn.link_pose(ARM, state.q + d * nu, link) - dyn.link_pose(ARM, state.q - d * nu, link)) / (2 * d)
        assert np.linalg.norm(J @ nu - fd) <= 1e-5


def test_jdot_nu_is_rate_of_change_of_jacobian():
    rng = np.random.default_rng(5)
    for _ in range(20):
        state = random_arm_state(rng)
        _, Jdot_nu = dyn.task_jacobian(ARM, state)

        def Jnu(e):
            return dyn.task_jacobian(ARM, dyn.GeneralizedState(state.q + e * state.nu, state.nu))[0] @ state.nu

        np.testing.assert_allclose(Jdot_nu, central5(Jnu, 1e-3), atol=1e-9)


def test_planar_tip_matches_oracle_kinematics():
    rng = np.random.default_rng(8)
    for _ in range(10):
        q = rng.uniform(-np.pi, np.pi, 3)
        pose = dyn.link_pose(ARM, q, "link3")
        np.testing.assert_allclose(pose[[0, 2]], ORACLE.tip(q), atol=1e-14)


def test_jacobian_reproduces_simulated_velocity():
    # consistency run: integrate a torque-driven arm and compare finite
    # differences of the tip pose with J nu
    dt = 1e-4
    state = dyn.GeneralizedState([0.3, 0.5, -0.4], [0.2, -0.1, 0.4])
    tau = np.array([5.0, 2.0, 0.5])
    for _ in range(200):
        prev_pose = dyn.link_pose(ARM, state.q, "link3")
        state = dyn.step(state, dyn.forward_dynamics(ARM, state, tau), dt)
        J, _ = dyn.task_jacobian(ARM, state)
        measured = (dyn.link_pose(ARM, state.q, "link3") - prev_pose) / dt
        # semi-implicit Euler: q moved with the new nu, to first order
        assert np.linalg.norm(J @ state.nu - measured) <= 1e-3


# -- forward dynamics and stepping ------------------------------------------


def test_free_body_without_inputs_does_not_accelerate():
    model = dyn.cartesian_mass(mass=2.0, gravity=0.0)
    state = dyn.GeneralizedState(np.zeros(6), np.zeros(6))
    np.testing.assert_array_equal(dyn.forward_dynamics(model, state, np.zeros(6)), np.zeros(6))


def test_newton_on_cartesian_mass():
    model = dyn.cartesian_mass(mass=2.0, gravity=0.0)
    state = dyn.GeneralizedState(np.zeros(6), np.zeros(6))
    acc = dyn.forward_dynamics(model, state, np.zeros(6), [("body", [2.0, 0, 0, 0, 0, 0])])
    np.testing.assert_allclose(acc, [1.0, 0, 0, 0, 0, 0])


def test_gravity_pulls_down():
    model = dyn.cartesian_mass(mass=3.0)
    acc = dyn.forward_dynamics(model, dyn.GeneralizedState(np.zeros(6), np.zeros(6)), np.zeros(6))
    np.testing.assert_allclose(acc, [0, 0, -9.81, 0, 0, 0])


def test_planar_forward_dynamics_matches_oracle_solve():
    rng = np.random.default_rng(21)
    for _ in range(10):
        state = random_arm_state(rng)
        tau = rng.normal(size=3)
        w2, w3 = rng.normal(size=6), rng.normal(size=6)
        acc = dyn.forward_dynamics(ARM, state, tau, [("link2", w2), ("link3", w3)])
        gen_f = sum(dyn.link_jacobian(ARM, state, l)[0].T @ w for l, w in (("link2", w2), ("link3", w3)))
        ref = np.linalg.solve(ORACLE.mass_matrix(state.q), tau + gen_f - ORACLE.bias(state.q, state.nu))
        np.testing.assert_allclose(acc, ref, rtol=1e-6, atol=1e-6)


def test_contact_jacobian_stacks_contact_links():
    state = dyn.GeneralizedState([0.1, 0.2, 0.3], np.zeros(3))
    Jc = dyn.contact_jacobian(ARM, state)
    assert Jc.shape == (12, 3)
    np.testing.assert_array_equal(Jc[6:], dyn.link_jacobian(ARM, state, "link3")[0])


def test_step_with_zero_acceleration():
    state = dyn.GeneralizedState(np.zeros(6), np.arange(6.0))
    new = dyn.step(state, np.zeros(6), 0.01)
    np.testing.assert_array_equal(new.nu, state.nu)
    np.testing.assert_allclose(new.q, 0.01 * np.arange(6.0))


def test_constant_acceleration_is_exact_for_euler():
    a = np.array([0.5, -1.0, 2.0, 0.0, 0.25, 1.0])
    dt = 0.01
    state = dyn.GeneralizedState(np.zeros(6), np.zeros(6))
    for k in range(1, 51):
        state = dyn.step(state, a, dt)
        np.testing.assert_allclose(state.nu, k * a * dt, rtol=1e-13, atol=1e-15)


def test_step_rejects_bad_inputs():
    state = dyn.GeneralizedState(np.zeros(3), np.zeros(3))
    with pytest.raises(ContractError):
        dyn.step(state, np.zeros(3), 0.0)
    with pytest.raises(NumericalError):
        dyn.step(state, [np.inf, 0, 0], 0.01)


def test_passive_arm_without_gravity_keeps_kinetic_energy():
    arm = dyn.planar_3link(masses=ARM.masses, lengths=ARM.lengths, inertias=ARM.inertias, gravity=0.0)
    state = dyn.GeneralizedState([0.4, -0.7, 0.9], [1.0, -0.5, 0.8])
    e0 = dyn.kinetic_energy(arm, state)
    worst = 0.0
    dt = 1e-4
    for k in range(50_000):
        state = dyn.step(state, dyn.forward_dynamics(arm, state, np.zeros(3)), dt)
        if k % 50 == 0:
            worst = max(worst, abs(dyn.kinetic_energy(arm, state) - e0))
    assert worst <= 0.01 * e0
