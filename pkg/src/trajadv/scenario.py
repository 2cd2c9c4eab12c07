"""Sit-to-stand script: phase machine, wrench pulses and the CoM reference.

The robot starts seated (S1). A hand pull above ``hands_start`` moves it to
S2; feet load above ``feet_s3`` and then ``feet_s4`` moves it to S3 and S4.
Phases only ever move forward.

The CoM reference covers the three moving phases: seated -> forward (S2),
forward -> forward+up (S3), forward+up -> erect (S4), with knots at the
cumulative nominal phase durations so that psi = t replays the nominal motion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .trajectory import ParamCurve

HANDS = "hands"
FEET = "feet"
CHANNELS = (HANDS, FEET)


class StandUpPhase(enum.IntEnum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "StandUpPhase":
        for phase, name in _LABELS.items():
            if name == label:
                return phase
        raise ValueError(f"unknown phase label {label!r}")


_LABELS = {
    StandUpPhase.S1: "S1-ChairBalance",
    StandUpPhase.S2: "S2-ComForward",
    StandUpPhase.S3: "S3-ComForwardUp",
    StandUpPhase.S4: "S4-FullErect",
}


@dataclass(frozen=True)
class Thresholds:
    hands_start: float = 5.0
    feet_s3: float = 20.0
    feet_s4: float = 40.0

    def __post_init__(self):
        if min(self.hands_start, self.feet_s3, self.feet_s4) <= 0:
            raise ConfigError("thresholds must be > 0")
        if self.feet_s4 < self.feet_s3:
            raise ConfigError("feet_s4 must be >= feet_s3")


@dataclass(frozen=True)
class Pulse:
    """Constant wrench on one channel over [t_start, t_end], with linear ramps."""

    t_start: float
    t_end: float
    wrench: tuple
    channel: str = HANDS
    ramp: float = 0.0

    def __post_init__(self):
        w = tuple(float(v) for v in self.wrench)
        object.__setattr__(self, "wrench", w)
        if len(w) != 6 or not np.isfinite(w).all():
            raise ConfigError("pulse wrench must be 6 finite values")
        if self.channel not in CHANNELS:
            raise ConfigError(f"pulse channel must be one of {CHANNELS}, got {self.channel!r}")
        if not (0 <= self.t_start < self.t_end):
            raise ConfigError("pulse needs 0 <= t_start < t_end")
        if self.ramp < 0 or 2 * self.ramp > self.t_end - self.t_start:
            raise ConfigError("pulse ramp must be >= 0 and fit twice inside the pulse")

    def scale(self, t: float) -> float:
        if self.ramp == 0:
            return 1.0 if self.t_start <= t < self.t_end else 0.0
        s = min((t - self.t_start) / self.ramp, (self.t_end - t) / self.ramp, 1.0)
        return max(s, 0.0)


@dataclass(frozen=True)
class WrenchProfile:
    pulses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        for channel in CHANNELS:
            spans = sorted((p.t_start, p.t_end) for p in self.pulses if p.channel == channel)
            for (_, end), (start, _) in zip(spans, spans[1:]):
                if start < end:
                    raise ConfigError(f"overlapping pulses on the {channel} channel")


def wrench_at(profile: WrenchProfile, t: float, channel: str) -> np.ndarray:
    out = np.zeros(6)
    for p in profile.pulses:
        if p.channel == channel:
            s = p.scale(t)
            if s:
                out += s * np.asarray(p.wrench)
    return out


def force_norm(wrench) -> float:
    return float(np.linalg.norm(np.asarray(wrench, dtype=float)[:3]))


def update_phase(phase: StandUpPhase, hands_w, feet_w, th: Thresholds) -> StandUpPhase:
    """Advance at most one phase; thresholds compare force norms, inclusively."""
    phase = StandUpPhase(phase)
    if phase is StandUpPhase.S1 and force_norm(hands_w) >= th.hands_start:
        return StandUpPhase.S2
    if phase is StandUpPhase.S2 and force_norm(feet_w) >= th.feet_s3:
        return StandUpPhase.S3
    if phase is StandUpPhase.S3 and force_norm(feet_w) >= th.feet_s4:
        return StandUpPhase.S4
    return phase


@dataclass(frozen=True)
class StandUpWaypoints:
    seated: tuple = (0.0, 0.0, 0.4)
    forward: tuple = (0.1, 0.0, 0.4)
    forward_up: tuple = (0.15, 0.0, 0.55)
    erect: tuple = (0.15, 0.0, 0.65)
    durations: tuple = (2.0, 2.0, 2.0)
    orientation: tuple = (0.0, 0.0, 0.0)

    def poses(self) -> np.ndarray:
        rows = []
        for p in (self.seated, self.forward, self.forward_up, self.erect):
            if len(p) != 3:
                raise ConfigError("stand-up waypoints are 3D CoM positions")
            rows.append(tuple(p) + tuple(self.orientation))
        return np.array(rows, dtype=float)

    def knots(self) -> np.ndarray:
        if len(self.durations) != 3 or min(self.durations) <= 0:
            raise ConfigError("need three positive durations (S2, S3, S4)")
        return np.concatenate([[0.0], np.cumsum(self.durations)])


def build_standup_reference(cfg: StandUpWaypoints = StandUpWaypoints()) -> ParamCurve:
    """One curve through seated, forward, forward+up and erect CoM poses."""
    if len(cfg.orientation) != 3:
        raise ConfigError("orientation must have 3 entries")
    poses = cfg.poses()
    seated, forward, forward_up, erect = poses[:, :3]
    if not forward[0] > seated[0]:
        raise ConfigError("S2 must move the CoM forward (x increases)")
    if not (forward_up[0] > forward[0] and forward_up[2] > forward[2]):
        raise ConfigError("S3 must move the CoM forward and up")
    if not erect[2] > forward_up[2]:
        raise ConfigError("S4 must move the CoM up (z increases)")
    return ParamCurve(cfg.knots(), poses)


def phase_segments(cfg: StandUpWaypoints = StandUpWaypoints()) -> dict:
    """Nominal psi interval of each moving phase."""
    k = cfg.knots()
    return {
        StandUpPhase.S2: (k[0], k[1]),
        StandUpPhase.S3: (k[1], k[2]),
        StandUpPhase.S4: (k[2], k[3]),
    }
