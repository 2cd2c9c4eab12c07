"""Rigid-body models and their equations of motion.

Every model is written in the form

    M(q) nu_dot + h(q, nu) = B tau + Jc(q)^T f

with h = C(q, nu) nu + G(q). Two desk-scale models are built in:

* ``cartesian-mass``: a single fully actuated rigid body (6 DoF, fixed base).
  Position coordinates are world-frame, rotation coordinates are an
  accumulated rotation vector and the rotational inertia is isotropic, so the
  mass matrix is constant and there are no gyroscopic terms.
* ``planar-3link``: a fixed-base RRR chain moving in the vertical x-z plane
  with gravity along -z. Joint angles are measured from the +x axis towards
  +z, which is a rotation of ``-phi`` about the world y axis.

Wrenches are 6-vectors (force, moment) in the world frame, applied at the
origin of a link frame. Task poses are (position, rotation vector).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NumericalError

CARTESIAN_MASS = "cartesian-mass"
PLANAR_3LINK = "planar-3link"
MODEL_KINDS = (CARTESIAN_MASS, PLANAR_3LINK)

DEFAULT_GRAVITY = 9.81
DEFAULT_DT = 1e-3


@dataclass
class GeneralizedState:
    """Configuration ``q`` and generalized velocity ``nu``."""

    q: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        self.q = np.array(self.q, dtype=float)
        self.nu = np.array(self.nu, dtype=float)
        if self.q.ndim != 1 or self.nu.ndim != 1:
            raise ContractError("q and nu must be 1-D vectors")
        if not (np.isfinite(self.q).all() and np.isfinite(self.nu).all()):
            raise NumericalError("generalized state contains non-finite entries")

    def copy(self) -> "GeneralizedState":
        return GeneralizedState(self.q.copy(), self.nu.copy())


@dataclass(frozen=True)
class DynamicsTerms:
    M: np.ndarray
    h: np.ndarray
    G: np.ndarray
    B: np.ndarray
    Jc: np.ndarray
    J: np.ndarray
    Jdot_nu: np.ndarray


@dataclass(frozen=True)
class RobotModel:
    """Parameters of one of the built-in models.

    Use :func:`cartesian_mass` or :func:`planar_3link` rather than
    constructing this directly.
    """

    kind: str
    masses: tuple
    lengths: tuple = ()
    inertias: tuple = ()
    gravity: float = DEFAULT_GRAVITY
    task_link: str = ""
    contact_links: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ContractError(f"unknown model kind {self.kind!r}")
        if any(not m > 0 for m in self.masses):
            raise ContractError("all masses must be > 0")
        if any(not l > 0 for l in self.lengths):
            raise ContractError("all lengths must be > 0")
        if any(not i > 0 for i in self.inertias):
            raise ContractError("all inertias must be > 0")
        if not np.isfinite(self.gravity):
            raise ContractError("gravity must be finite")
        if self.kind == CARTESIAN_MASS:
            if len(self.masses) != 1 or len(self.inertias) != 1 or self.lengths:
                raise ContractError("cartesian-mass takes one mass, one inertia and no lengths")
        else:
            if not (len(self.masses) == len(self.lengths) == len(self.inertias) == 3):
                raise ContractError("planar-3link takes three masses, lengths and inertias")
        if self.task_link not in self.link_ids:
            raise ContractError(f"unknown task link {self.task_link!r}")
        for link in self.contact_links:
            if link not in self.link_ids:
                raise ContractError(f"unknown contact link {link!r}")

    @property
    def link_ids(self) -> tuple:
        if self.kind == CARTESIAN_MASS:
            return ("body",)
        return ("link1", "link2", "link3")

    @property
    def nq(self) -> int:
        return 6 if self.kind == CARTESIAN_MASS else 3

    @property
    def nv(self) -> int:
        return self.nq

    @property
    def n_actuated(self) -> int:
        return self.nv

    @property
    def floating(self) -> bool:
        return False


def cartesian_mass(mass=1.0, inertia=1.0, gravity=DEFAULT_GRAVITY) -> RobotModel:
    return RobotModel(
        kind=CARTESIAN_MASS,
        masses=(float(mass),),
        inertias=(float(inertia),),
        gravity=float(gravity),
        task_link="body",
        contact_links=("body",),
    )


def planar_3link(
    masses=(1.0, 1.0, 1.0),
    lengths=(1.0, 1.0, 1.0),
    inertias=(0.1, 0.1, 0.1),
    gravity=DEFAULT_GRAVITY,
    task_link="link3",
    contact_links=("link3",),
) -> RobotModel:
    return RobotModel(
        kind=PLANAR_3LINK,
        masses=tuple(float(m) for m in masses),
        lengths=tuple(float(l) for l in lengths),
        inertias=tuple(float(i) for i in inertias),
        gravity=float(gravity),
        task_link=task_link,
        contact_links=tuple(contact_links),
    )


def selector_matrix(n_joints: int, floating: bool) -> np.ndarray:
    """B = (0_{n x 6}, 1_n)^T for a floating base, identity otherwise."""
    if not floating:
        return np.eye(n_joints)
    return np.vstack([np.zeros((6, n_joints)), np.eye(n_joints)])


def _check_state(model: RobotModel, state: GeneralizedState):
    if state.q.shape != (model.nq,) or state.nu.shape != (model.nv,):
        raise ContractError(
            f"{model.kind} expects q in R^{model.nq} and nu in R^{model.nv}, "
            f"got {state.q.shape} and {state.nu.shape}"
        )


def _link_index(model: RobotModel, link: str) -> int:
    try:
        return model.link_ids.index(link)
    except ValueError:
        raise ContractError(f"unknown link {link!r} for {model.kind}") from None


# -- planar chain kinematics -------------------------------------------------


def _planar_point(model, q, link_idx, dist):
    """x-z position of the point ``dist`` along link ``link_idx``."""
    phi = np.cumsum(q)
    lens = np.array(model.lengths[:link_idx] + (dist,))
    return np.array(
        [np.sum(lens * np.cos(phi[: link_idx + 1])), np.sum(lens * np.sin(phi[: link_idx + 1]))]
    )


def _planar_point_jacobian(model, q, nu, link_idx, dist):
    """2x3 linear Jacobian and 2-vector Jdot*nu of a point on a planar link."""
    phi = np.cumsum(q)
    phidot = np.cumsum(nu)
    lens = np.array(model.lengths[:link_idx] + (dist,))
    s, c = np.sin(phi[: link_idx + 1]), np.cos(phi[: link_idx + 1])
    Jv = np.zeros((2, 3))
    # column i sums the contributions of links i..link_idx
    Jv[0, : link_idx + 1] = -np.cumsum((lens * s)[::-1])[::-1]
    Jv[1, : link_idx + 1] = np.cumsum((lens * c)[::-1])[::-1]
    w2 = phidot[: link_idx + 1] ** 2
    bias = np.array([-np.sum(lens * w2 * c), -np.sum(lens * w2 * s)])
    return Jv, bias


def _planar_link_frame(model, q, nu, link_idx):
    """6xN Jacobian and 6-vector Jdot*nu of a link frame (distal end)."""
    Jv, bias = _planar_point_jacobian(model, q, nu, link_idx, model.lengths[link_idx])
    J = np.zeros((6, 3))
    J[0] = Jv[0]
    J[2] = Jv[1]
    J[4, : link_idx + 1] = -1.0
    Jdot_nu = np.zeros(6)
    Jdot_nu[0] = bias[0]
    Jdot_nu[2] = bias[1]
    return J, Jdot_nu


def com_positions(model: RobotModel, q) -> np.ndarray:
    """World positions (3-vectors) of every body's centre of mass."""
    q = np.asarray(q, dtype=float)
    if model.kind == CARTESIAN_MASS:
        return q[None, :3].copy()
    out = np.zeros((3, 3))
    for k in range(3):
        px, pz = _planar_point(model, q, k, 0.5 * model.lengths[k])
        out[k] = (px, 0.0, pz)
    return out


def body_angles(model: RobotModel, q) -> np.ndarray:
    """Planar absolute angles of each body (empty for the free body)."""
    if model.kind == CARTESIAN_MASS:
        return np.zeros(0)
    return np.cumsum(np.asarray(q, dtype=float))


def link_pose(model: RobotModel, q, link: str) -> np.ndarray:
    """6D pose (position, rotation vector) of a link frame."""
    idx = _link_index(model, link)
    q = np.asarray(q, dtype=float)
    if model.kind == CARTESIAN_MASS:
        return q.copy()
    px, pz = _planar_point(model, q, idx, model.lengths[idx])
    return np.array([px, 0.0, pz, 0.0, -np.sum(q[: idx + 1]), 0.0])


def link_jacobian(model: RobotModel, state: GeneralizedState, link: str):
    """Return (J, Jdot_nu) of a link frame; J maps nu to the 6D frame velocity."""
    _check_state(model, state)
    idx = _link_index(model, link)
    if model.kind == CARTESIAN_MASS:
        return np.eye(6), np.zeros(6)
    return _planar_link_frame(model, state.q, state.nu, idx)


def task_jacobian(model: RobotModel, state: GeneralizedState):
    return link_jacobian(model, state, model.task_link)


def contact_jacobian(model: RobotModel, state: GeneralizedState) -> np.ndarray:
    """Stacked (6 n_c) x nv Jacobian of ``model.contact_links``."""
    blocks = [link_jacobian(model, state, link)[0] for link in model.contact_links]
    if not blocks:
        return np.zeros((0, model.nv))
    return np.vstack(blocks)


# -- equations of motion -----------------------------------------------------


def _cartesian_mass_terms(model, state):
    m, inertia = model.masses[0], model.inertias[0]
    M = np.diag([m, m, m, inertia, inertia, inertia])
    G = np.array([0.0, 0.0, m * model.gravity, 0.0, 0.0, 0.0])
    return M, G.copy(), G


def _planar_terms(model, state):
    q, nu = state.q, state.nu
    M = np.zeros((3, 3))
    h = np.zeros(3)
    G = np.zeros(3)
    for k in range(3):
        m, inertia = model.masses[k], model.inertias[k]
        Jv, bias = _planar_point_jacobian(model, q, nu, k, 0.5 * model.lengths[k])
        Jw = np.zeros(3)
        Jw[: k + 1] = 1.0
        M += m * Jv.T @ Jv + inertia * np.outer(Jw, Jw)
        # planar rotation: angular Jacobian is constant, no gyroscopic term
        h += m * Jv.T @ bias
        G += m * model.gravity * Jv[1]
    M = 0.5 * (M + M.T)
    return M, h + G, G


def compute_terms(model: RobotModel, state: GeneralizedState) -> DynamicsTerms:
    """Evaluate M, h, G, B, Jc, J and Jdot*nu at ``state``."""
    _check_state(model, state)
    if model.kind == CARTESIAN_MASS:
        M, h, G = _cartesian_mass_terms(model, state)
    else:
        M, h, G = _planar_terms(model, state)
    J, Jdot_nu = task_jacobian(model, state)
    return DynamicsTerms(
        M=M,
        h=h,
        G=G,
        B=selector_matrix(model.n_actuated, model.floating),
        Jc=contact_jacobian(model, state),
        J=J,
        Jdot_nu=Jdot_nu,
    )


def generalized_external_force(model: RobotModel, state: GeneralizedState, fext) -> np.ndarray:
    """Sum of J_link^T w over the (link, wrench) pairs in ``fext``."""
    out = np.zeros(model.nv)
    for link, wrench in fext:
        if link not in model.contact_links:
            raise ContractError(f"{link!r} is not a contact link of this model")
        w = np.asarray(wrench, dtype=float)
        if w.shape != (6,) or not np.isfinite(w).all():
            raise ContractError("a wrench must be 6 finite values")
        J, _ = link_jacobian(model, state, link)
        out += J.T @ w
    return out


def forward_dynamics(model, state, tau, fext=(), terms=None) -> np.ndarray:
    """nu_dot = M^-1 (B tau + Jc^T f - h)."""
    _check_state(model, state)
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (model.n_actuated,):
        raise ContractError(f"expected {model.n_actuated} joint torques, got shape {tau.shape}")
    if terms is None:
        terms = compute_terms(model, state)
    rhs = terms.B @ tau + generalized_external_force(model, state, fext) - terms.h
    try:
        nu_dot = np.linalg.solve(terms.M, rhs)
    except np.linalg.LinAlgError:
        raise NumericalError("mass matrix is singular") from None
    if not np.isfinite(nu_dot).all():
        raise NumericalError("forward dynamics produced non-finite accelerations")
    return nu_dot


def step(state: GeneralizedState, nu_dot, dt: float) -> GeneralizedState:
    """Semi-implicit Euler: update nu first, then q with the new nu."""
    if not dt > 0:
        raise ContractError("dt must be > 0")
    nu_dot = np.asarray(nu_dot, dtype=float)
    if nu_dot.shape != state.nu.shape:
        raise ContractError("nu_dot does not match the velocity dimension")
    if not np.isfinite(nu_dot).all():
        raise NumericalError("non-finite acceleration passed to step")
    nu = state.nu + nu_dot * dt
    # fixed-base models only: the configuration manifold is flat
    q = state.q + nu * dt
    return GeneralizedState(q, nu)


def kinetic_energy(model: RobotModel, state: GeneralizedState) -> float:
    M = compute_terms(model, state).M
    return 0.5 * float(state.nu @ M @ state.nu)


def potential_energy(model: RobotModel, q) -> float:
    heights = com_positions(model, q)[:, 2]
    return float(model.gravity * np.dot(model.masses, heights))


def total_energy(model: RobotModel, state: GeneralizedState) -> float:
    return kinetic_energy(model, state) + potential_energy(model, state.q)
