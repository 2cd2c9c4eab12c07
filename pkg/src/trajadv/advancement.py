"""Helpful-wrench decomposition and the free-parameter update law.

The reference curve is indexed by a free parameter psi instead of time.
Without assistance psi advances at unit rate; when the measured task
velocity runs ahead of the curve tangent, psi_dot grows up to a cap.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, ContractError

EPS_V = 1e-9
PSI_DOT_UPPER = 2.0
ZERO_RESIDUAL = 1e-12


@dataclass(frozen=True)
class AdvancementState:
    psi: float = 0.0
    psi_dot: float = 1.0
    psi_dot_upper: float = PSI_DOT_UPPER

    def __post_init__(self):
        if not self.psi >= 0:
            raise ContractError("psi must be >= 0")
        if not self.psi_dot_upper >= 1:
            raise ConfigError("psi_dot_upper must be >= 1")


@dataclass(frozen=True)
class WrenchDecomposition:
    """Split of a task acceleration into parts along / across the desired velocity.

    ``omega_f == alpha * par_dir + beta * perp_dir``; ``par_dir`` is the zero
    vector when the desired velocity is (numerically) zero.
    """

    alpha: float
    beta: float
    par_dir: np.ndarray
    perp_dir: np.ndarray

    @property
    def helpful(self) -> bool:
        return self.alpha > 0


def decompose(omega_f, xdot_d, eps_v: float = EPS_V) -> WrenchDecomposition:
    omega_f = np.asarray(omega_f, dtype=float)
    xdot_d = np.asarray(xdot_d, dtype=float)
    if not (np.isfinite(omega_f).all() and np.isfinite(xdot_d).all()):
        raise ContractError("decompose needs finite inputs")

    speed = np.linalg.norm(xdot_d)
    if speed <= eps_v:
        beta = float(np.linalg.norm(omega_f))
        perp = omega_f / beta if beta > ZERO_RESIDUAL else np.zeros_like(omega_f)
        return WrenchDecomposition(0.0, beta, np.zeros_like(omega_f), perp)

    par = xdot_d / speed
    alpha = float(par @ omega_f)
    residual = omega_f - alpha * par
    # second Gram-Schmidt pass keeps the residual orthogonal when it is tiny
    correction = float(par @ residual)
    alpha += correction
    residual = residual - correction * par
    beta = float(np.linalg.norm(residual))
    if beta <= ZERO_RESIDUAL:
        return WrenchDecomposition(alpha, beta, par, np.zeros_like(omega_f))
    return WrenchDecomposition(alpha, beta, par, residual / beta)


def psi_dot_update(xdot, curve_deriv, psi_dot_upper=PSI_DOT_UPPER, eps_v: float = EPS_V):
    """min(psi_dot_upper, max(1, xdot . x' / |x'|^2)), or 1 when |x'| <= eps_v.

    Broadcasts over leading dimensions: ``(..., 6)`` inputs give an array of
    rates, a single pair gives a float.
    """
    upper = np.asarray(psi_dot_upper, dtype=float)
    if not np.all(upper >= 1):
        raise ConfigError(f"psi_dot_upper must be >= 1, got {psi_dot_upper}")
    xdot = np.asarray(xdot, dtype=float)
    curve_deriv = np.asarray(curve_deriv, dtype=float)
    if not np.isfinite(curve_deriv).all():
        raise ContractError("curve derivative must be finite")
    norm_sq = np.einsum("...i,...i->...", curve_deriv, curve_deriv)
    proj = np.einsum("...i,...i->...", xdot, curve_deriv)
    moving = np.sqrt(norm_sq) > eps_v
    ratio = np.divide(proj, norm_sq, out=np.ones_like(proj), where=moving)
    out = np.where(moving, np.minimum(upper, np.maximum(1.0, ratio)), 1.0)
    return float(out) if out.ndim == 0 else out


def advance(state: AdvancementState, psi_dot: float, dt: float) -> AdvancementState:
    if not dt > 0:
        raise ContractError("dt must be > 0")
    return replace(state, psi=state.psi + psi_dot * dt, psi_dot=float(psi_dot))
