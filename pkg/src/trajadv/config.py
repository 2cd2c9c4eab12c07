"""Simulation configuration: YAML file <-> :class:`SimConfig`.

Every section and key is optional except where noted; unknown keys are
rejected. See ``configs/standup.yaml`` and the README for the full schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import dynamics
from .advancement import EPS_V, PSI_DOT_UPPER
from .controller import INTEGRAL_BOUND, PINV_RTOL, ControlMode, Gains
from .errors import ConfigError, TrajAdvError
from .scenario import Pulse, StandUpWaypoints, Thresholds, WrenchProfile, build_standup_reference
from .trajectory import build_curve

SCHEMA = {
    "model": {"kind", "mass", "inertia", "masses", "lengths", "inertias", "gravity", "task_link", "contact_links"},
    "reference": {"standup", "waypoints"},
    "controller": {"kp", "kd", "mode", "pinv_rtol", "integral_bound", "allow_singular"},
    "advancement": {"enabled", "psi_dot_upper", "eps_v"},
    "simulation": {"dt", "duration", "goal_tolerance", "initial_q", "initial_nu"},
    "scenario": {"thresholds", "pulses", "ramp_time", "hands_link", "reset_integral_on_phase_change"},
    "output": {"directory"},
}
STANDUP_KEYS = {"seated", "forward", "forward_up", "erect", "durations", "orientation"}
THRESHOLD_KEYS = {"hands_start", "feet_s3", "feet_s4"}
PULSE_KEYS = {"t_start", "t_end", "wrench", "channel", "ramp"}


@dataclass(frozen=True)
class SimConfig:
    model: dynamics.RobotModel = field(default_factory=lambda: dynamics.cartesian_mass(mass=30.0, inertia=1.0))
    waypoints: tuple = ()
    standup: StandUpWaypoints | None = field(default_factory=StandUpWaypoints)
    gains: Gains = field(default_factory=Gains)
    mode: ControlMode = ControlMode.RETAIN_HELPFUL
    pinv_rtol: float = PINV_RTOL
    integral_bound: float = INTEGRAL_BOUND
    allow_singular: bool = False
    advancement: bool = True
    psi_dot_upper: float = PSI_DOT_UPPER
    eps_v: float = EPS_V
    dt: float = dynamics.DEFAULT_DT
    duration: float = 8.0
    goal_tolerance: float = 1e-3
    initial_q: tuple | None = None
    initial_nu: tuple | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    profile: WrenchProfile = field(default_factory=WrenchProfile)
    hands_link: str | None = None
    reset_integral_on_phase_change: bool = False
    output_dir: str = "out"

    def __post_init__(self):
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ConfigError("dt must be > 0")
        if not self.duration >= self.dt:
            raise ConfigError("duration must be >= dt")
        if not self.psi_dot_upper >= 1:
            raise ConfigError("psi_dot_upper must be >= 1")
        if not self.eps_v > 0:
            raise ConfigError("eps_v must be > 0")
        if not self.goal_tolerance > 0:
            raise ConfigError("goal_tolerance must be > 0")
        if not self.pinv_rtol > 0:
            raise ConfigError("pinv_rtol must be > 0")
        if self.standup is None and not self.waypoints:
            raise ConfigError("reference needs either standup poses or explicit waypoints")
        link = self.hands_link or self.model.task_link
        uses_hands = self.hands_link is not None or any(p.channel == "hands" for p in self.profile.pulses)
        if uses_hands and link not in self.model.contact_links:
            raise ConfigError(f"hands wrench link {link!r} is not a contact link of the model")
        if self.model.kind != dynamics.CARTESIAN_MASS and self.initial_q is None:
            raise ConfigError("planar-3link runs need simulation.initial_q")
        for name, v, n in (("initial_q", self.initial_q, self.model.nq), ("initial_nu", self.initial_nu, self.model.nv)):
            if v is not None and len(v) != n:
                raise ConfigError(f"{name} must have {n} entries")

    @property
    def hands_wrench_link(self) -> str:
        return self.hands_link or self.model.task_link

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def curve(self):
        if self.waypoints:
            return build_curve(self.waypoints)
        return build_standup_reference(self.standup)

    def with_overrides(self, **kw) -> "SimConfig":
        return replace(self, **kw)


def _check_keys(section: str, data, allowed):
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be a mapping")
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")
    return data


def _model_from(data) -> dynamics.RobotModel:
    kind = data.get("kind", dynamics.CARTESIAN_MASS)
    g = data.get("gravity", dynamics.DEFAULT_GRAVITY)
    if kind == dynamics.CARTESIAN_MASS:
        bad = {"masses", "lengths", "inertias"} & set(data)
        if bad:
            raise ConfigError(f"cartesian-mass does not take {', '.join(sorted(bad))}")
        model = dynamics.cartesian_mass(data.get("mass", 30.0), data.get("inertia", 1.0), g)
    elif kind == dynamics.PLANAR_3LINK:
        bad = {"mass", "inertia"} & set(data)
        if bad:
            raise ConfigError(f"planar-3link does not take {', '.join(sorted(bad))}")
        model = dynamics.planar_3link(
            data.get("masses", (1.0, 1.0, 1.0)),
            data.get("lengths", (1.0, 1.0, 1.0)),
            data.get("inertias", (0.1, 0.1, 0.1)),
            g,
        )
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    overrides = {}
    if "task_link" in data:
        overrides["task_link"] = data["task_link"]
    if "contact_links" in data:
        overrides["contact_links"] = tuple(data["contact_links"])
    return replace(model, **overrides) if overrides else model


def config_from_dict(raw: dict, base_dir: Path | None = None) -> SimConfig:
    """Build a :class:`SimConfig` from parsed YAML, rejecting unknown keys."""
    raw = _check_keys("config", raw or {}, SCHEMA)
    sec = {name: _check_keys(name, raw.get(name), keys) for name, keys in SCHEMA.items()}
    kw = {}
    try:
        if sec["model"]:
            kw["model"] = _model_from(sec["model"])

        ref = sec["reference"]
        if "standup" in ref and "waypoints" in ref:
            raise ConfigError("reference takes either standup or waypoints, not both")
        if "waypoints" in ref:
            rows = [tuple(float(v) for v in row) for row in ref["waypoints"]]
            if any(len(r) != 7 for r in rows):
                raise ConfigError("each waypoint row is psi followed by 6 pose values")
            kw["waypoints"] = tuple(rows)
            kw["standup"] = None
        elif "standup" in ref:
            su = _check_keys("reference.standup", ref["standup"], STANDUP_KEYS)
            kw["standup"] = StandUpWaypoints(**{k: tuple(float(x) for x in v) for k, v in su.items()})

        c = sec["controller"]
        if "kp" in c or "kd" in c:
            kw["gains"] = Gains(Kp=c.get("kp", 25.0), Kd=c.get("kd", 10.0))
        if "mode" in c:
            try:
                kw["mode"] = ControlMode(c["mode"])
            except ValueError:
                raise ConfigError(f"unknown controller mode {c['mode']!r}") from None
        for key in ("pinv_rtol", "integral_bound"):
            if key in c:
                kw[key] = float(c[key])
        if "allow_singular" in c:
            kw["allow_singular"] = bool(c["allow_singular"])

        a = sec["advancement"]
        if "enabled" in a:
            kw["advancement"] = bool(a["enabled"])
        for key in ("psi_dot_upper", "eps_v"):
            if key in a:
                kw[key] = float(a[key])

        s = sec["simulation"]
        for key in ("dt", "duration", "goal_tolerance"):
            if key in s:
                kw[key] = float(s[key])
        for key in ("initial_q", "initial_nu"):
            if key in s:
                kw[key] = tuple(float(v) for v in s[key])

        sc = sec["scenario"]
        if "thresholds" in sc:
            kw["thresholds"] = Thresholds(**_check_keys("scenario.thresholds", sc["thresholds"], THRESHOLD_KEYS))
        ramp = float(sc.get("ramp_time", 0.1))
        pulses = []
        for i, p in enumerate(sc.get("pulses") or []):
            p = _check_keys(f"scenario.pulses[{i}]", p, PULSE_KEYS)
            missing = {"t_start", "t_end", "wrench"} - set(p)
            if missing:
                raise ConfigError(f"scenario.pulses[{i}] is missing {', '.join(sorted(missing))}")
            pulses.append(
                Pulse(
                    t_start=float(p["t_start"]),
                    t_end=float(p["t_end"]),
                    wrench=tuple(p["wrench"]),
                    channel=p.get("channel", "hands"),
                    ramp=float(p.get("ramp", ramp)),
                )
            )
        kw["profile"] = WrenchProfile(tuple(pulses))
        if "hands_link" in sc:
            kw["hands_link"] = sc["hands_link"]
        if "reset_integral_on_phase_change" in sc:
            kw["reset_integral_on_phase_change"] = bool(sc["reset_integral_on_phase_change"])

        if "directory" in sec["output"]:
            out = Path(sec["output"]["directory"])
            if base_dir is not None and not out.is_absolute():
                out = base_dir / out
            kw["output_dir"] = str(out)

        cfg = SimConfig(**kw)
        cfg.curve()
    except TrajAdvError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration value: {exc}") from exc
    return cfg


def load_config(path) -> SimConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw, base_dir=path.parent)
