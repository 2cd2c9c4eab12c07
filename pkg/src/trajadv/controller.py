"""Cartesian tracking objective and feedback-linearising torques.

Task acceleration under torques tau and an external wrench stack f is

    xddot = Delta tau + Omega f - Lambda,
    Delta = J M^-1 B,  Omega = J M^-1 Jc^T,  Lambda = J M^-1 h - Jdot nu.

``cancel-all`` picks tau so that xddot equals the objective whatever f is.
``retain-helpful`` additionally lets through the part of Omega f that points
along the desired velocity, when that part is positive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SingularityError

PINV_RTOL = 1e-8
INTEGRAL_BOUND = 10.0


class ControlMode(str, enum.Enum):
    CANCEL_ALL = "cancel-all"
    RETAIN_HELPFUL = "retain-helpful"


def _as_gain(value, name):
    k = np.asarray(value, dtype=float)
    if k.ndim == 0:
        k = float(k) * np.eye(6)
    elif k.ndim == 1:
        k = np.diag(k)
    if k.shape != (6, 6) or not np.isfinite(k).all():
        raise ConfigError(f"{name} must be a scalar, 6 diagonal entries or a 6x6 matrix")
    if np.max(np.abs(k - k.T)) > 1e-12:
        raise ConfigError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(k)) <= 0:
        raise ConfigError(f"{name} must be positive definite")
    return k


@dataclass(frozen=True)
class Gains:
    Kp: np.ndarray = field(default_factory=lambda: 25.0 * np.eye(6))
    Kd: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(6))

    def __post_init__(self):
        object.__setattr__(self, "Kp", _as_gain(self.Kp, "Kp"))
        object.__setattr__(self, "Kd", _as_gain(self.Kd, "Kd"))


@dataclass(frozen=True)
class TrackingState:
    int_err: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def reset(self) -> "TrackingState":
        return TrackingState()


def control_objective(kin, xdot, tracking: TrackingState, gains: Gains) -> np.ndarray:
    """xddot* = xddot_d - Kd (xdot - xdot_d) - Kp int_err."""
    err = np.asarray(xdot, dtype=float) - kin.xdot_d
    return kin.xddot_d - gains.Kd @ err - gains.Kp @ tracking.int_err


def integrate_error(tracking: TrackingState, xdot, xdot_d, dt: float, bound: float = INTEGRAL_BOUND) -> TrackingState:
    if not dt > 0:
        raise ConfigError("dt must be > 0")
    err = np.asarray(xdot, dtype=float) - np.asarray(xdot_d, dtype=float)
    int_err = tracking.int_err + err * dt
    if bound is not None:
        int_err = np.clip(int_err, -bound, bound)
    return TrackingState(int_err)


def truncated_pinv(A, rtol: float = PINV_RTOL):
    """SVD pseudoinverse dropping singular values below ``rtol * sigma_max``.

    Returns ``(pinv, singular_values)``.
    """
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > rtol * (s[0] if s.size else 0.0)
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (Vt.T * inv_s) @ U.T, s


def task_maps(terms):
    """Return (Delta, Omega, Lambda) for the given dynamics terms."""
    nb, nc = terms.B.shape[1], terms.Jc.shape[0]
    J_Minv = terms.J @ np.linalg.solve(terms.M, np.column_stack([terms.B, terms.Jc.T, terms.h]))
    Delta = J_Minv[:, :nb]
    Omega = J_Minv[:, nb : nb + nc]
    Lambda = J_Minv[:, -1] - terms.Jdot_nu
    return Delta, Omega, Lambda


def control_torques(
    terms,
    xddot_star,
    fext,
    mode=ControlMode.CANCEL_ALL,
    decomp=None,
    rtol: float = PINV_RTOL,
    allow_singular: bool = False,
    maps=None,
) -> np.ndarray:
    """tau = Delta^+ [xddot* - Omega f (+ max(alpha, 0) par_dir) + Lambda].

    ``fext`` is the wrench stack ordered like ``terms.Jc``. ``decomp`` is
    required in retain-helpful mode. Raises :class:`SingularityError` when
    Delta loses rank, unless ``allow_singular`` is set, in which case the
    truncated pseudoinverse is used as is. ``maps`` may carry a precomputed
    ``task_maps(terms)``.
    """
    mode = ControlMode(mode)
    Delta, Omega, Lambda = task_maps(terms) if maps is None else maps
    pinv, s = truncated_pinv(Delta, rtol)
    if not allow_singular and (s.size == 0 or s[-1] <= rtol * s[0]):
        raise SingularityError(s[-1] if s.size else 0.0, s[0] if s.size else 0.0)

    fext = np.asarray(fext, dtype=float).reshape(-1)
    target = np.asarray(xddot_star, dtype=float) - Omega @ fext + Lambda
    if mode is ControlMode.RETAIN_HELPFUL:
        if decomp is None:
            raise ConfigError("retain-helpful mode needs a wrench decomposition")
        if decomp.alpha > 0:
            target = target + decomp.alpha * decomp.par_dir
    return pinv @ target
