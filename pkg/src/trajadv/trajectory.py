"""Parametric reference curves x_d(psi) built from 6D waypoints."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ContractError


@dataclass(frozen=True)
class DesiredKinematics:
    x_d: np.ndarray
    xdot_d: np.ndarray
    xddot_d: np.ndarray


class ParamCurve:
    """Natural cubic spline through ``(psi_i, pose_i)`` waypoints.

    The curve is clamped past its last knot: the pose stays at the final
    waypoint and both derivatives vanish.
    """

    def __init__(self, knots, poses):
        knots = np.asarray(knots, dtype=float)
        poses = np.asarray(poses, dtype=float)
        if knots.ndim != 1 or len(knots) < 2:
            raise ContractError("a curve needs at least two waypoints")
        if poses.shape != (len(knots), 6):
            raise ContractError(f"poses must have shape ({len(knots)}, 6), got {poses.shape}")
        if not (np.isfinite(knots).all() and np.isfinite(poses).all()):
            raise ContractError("waypoints must be finite")
        if knots[0] != 0.0:
            raise ContractError("the first knot must be psi = 0")
        if np.any(np.diff(knots) <= 0):
            raise ContractError("knots must be strictly increasing")
        self.knots = knots
        self.poses = poses
        self._spline = CubicSpline(knots, poses, axis=0, bc_type="natural")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    @property
    def psi_end(self) -> float:
        return float(self.knots[-1])

    @property
    def waypoints(self):
        return list(zip(self.knots.tolist(), self.poses.copy()))

    def __repr__(self):
        return f"ParamCurve({len(self.knots)} waypoints, psi_end={self.psi_end})"


def build_curve(waypoints) -> ParamCurve:
    """Build a curve from ``(psi, pose)`` pairs or ``(psi, 6 pose values)`` rows."""
    waypoints = list(waypoints)
    if len(waypoints) < 2:
        raise ContractError("a curve needs at least two waypoints")
    knots, poses = [], []
    for row in waypoints:
        if len(row) == 2:
            psi, pose = row
        elif len(row) == 7:
            psi, pose = row[0], row[1:]
        else:
            raise ContractError("each waypoint is (psi, pose) or 7 numbers")
        knots.append(float(psi))
        poses.append(np.asarray(pose, dtype=float).reshape(-1))
    return ParamCurve(knots, np.vstack(poses))


def _check_psi(psi):
    if not psi >= 0:
        raise ContractError(f"psi must be >= 0, got {psi}")


def evaluate(curve: ParamCurve, psi: float) -> np.ndarray:
    _check_psi(psi)
    if psi >= curve.psi_end:
        return curve.poses[-1].copy()
    # exact waypoint at knots, so interpolation holds to the last bit
    i = np.searchsorted(curve.knots, psi)
    if curve.knots[i] == psi:
        return curve.poses[i].copy()
    return curve._spline(psi)


def deriv(curve: ParamCurve, psi: float) -> np.ndarray:
    _check_psi(psi)
    if psi >= curve.psi_end:
        return np.zeros(6)
    return curve._d1(psi)


def deriv2(curve: ParamCurve, psi: float) -> np.ndarray:
    _check_psi(psi)
    if psi >= curve.psi_end:
        return np.zeros(6)
    return curve._d2(psi)


def desired_kinematics(curve: ParamCurve, psi: float, psi_dot: float, dt: float | None = None) -> DesiredKinematics:
    """Chain rule with psi_ddot = 0: xdot_d = x' psi_dot, xddot_d = x'' psi_dot^2.

    With ``dt`` the acceleration is instead the one-step change of the
    desired velocity, ``(x'(psi + psi_dot dt) - x'(psi)) psi_dot / dt``, which
    an explicit integrator reproduces without lag. It falls back to the
    analytic value on the step that crosses the end of the curve.
    """
    if not psi_dot >= 0:
        raise ContractError(f"psi_dot must be >= 0, got {psi_dot}")
    d1 = deriv(curve, psi)
    psi_next = psi + psi_dot * dt if dt is not None else None
    if psi_next is not None and psi_next < curve.psi_end:
        xddot_d = (deriv(curve, psi_next) - d1) * (psi_dot / dt)
    else:
        xddot_d = deriv2(curve, psi) * psi_dot**2
    return DesiredKinematics(x_d=evaluate(curve, psi), xdot_d=d1 * psi_dot, xddot_d=xddot_d)


eval = evaluate  # noqa: A001
