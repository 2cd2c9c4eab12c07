"""Closed-loop stand-up simulation: dynamics, controller, advancement, scenario."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import advancement, controller, dynamics, scenario, trajectory
from .config import SimConfig
from .errors import TrajAdvError

log = logging.getLogger(__name__)


@dataclass
class LogRow:
    t: float
    phase: scenario.StandUpPhase
    psi: float
    psi_dot: float
    x: np.ndarray
    x_d: np.ndarray
    xdot: np.ndarray
    xdot_d: np.ndarray
    f_hands: np.ndarray
    f_feet: np.ndarray
    alpha: float
    tau: np.ndarray


@dataclass
class Summary:
    final_psi: float
    time_to_goal: float | None
    max_psi_dot: float
    final_phase: scenario.StandUpPhase
    phase_times: dict
    steps: int

    def as_dict(self) -> dict:
        return {
            "final_psi": self.final_psi,
            "time_to_goal": self.time_to_goal,
            "max_psi_dot": self.max_psi_dot,
            "final_phase": self.final_phase.label,
            "phase_times": {p.label: t for p, t in self.phase_times.items()},
            "steps": self.steps,
        }


class StepError(TrajAdvError):
    """A module error raised inside the loop, tagged with the step index."""

    def __init__(self, step: int, t: float, cause: Exception):
        self.step = step
        self.t = t
        self.cause = cause
        super().__init__(f"step {step} (t={t:.6g}s): {type(cause).__name__}: {cause}")


def initial_state(cfg: SimConfig, curve) -> dynamics.GeneralizedState:
    """Start on the reference at psi = 0 with the nominal velocity, unless set."""
    model = cfg.model
    if cfg.initial_q is not None:
        q = np.array(cfg.initial_q)
    else:
        q = trajectory.evaluate(curve, 0.0)
    if cfg.initial_nu is not None:
        nu = np.array(cfg.initial_nu)
    elif model.kind == dynamics.CARTESIAN_MASS:
        nu = trajectory.deriv(curve, 0.0)
    else:
        nu = np.zeros(model.nv)
    return dynamics.GeneralizedState(q, nu)


def _stack_wrenches(model, hands_link, hands_w):
    f = np.zeros(6 * len(model.contact_links))
    if np.any(hands_w):
        i = model.contact_links.index(hands_link)
        f[6 * i : 6 * i + 6] = hands_w
    return f


def run_simulation(cfg: SimConfig):
    """Run the closed loop for ``cfg.duration`` seconds.

    Row k holds the state at t = k dt and the quantities computed from it;
    psi in row k is the value used for that step's reference.
    Returns ``(rows, summary)``.
    """
    model = cfg.model
    curve = cfg.curve()
    x_goal = curve.poses[-1]
    state = initial_state(cfg, curve)
    adv = advancement.AdvancementState(0.0, 1.0, cfg.psi_dot_upper)
    tracking = controller.TrackingState()
    phase = scenario.StandUpPhase.S1
    phase_times = {}
    hands_link = cfg.hands_wrench_link

    rows = []
    time_to_goal = None
    for k in range(cfg.n_steps):
        t = k * cfg.dt
        try:
            hands_w = scenario.wrench_at(cfg.profile, t, scenario.HANDS)
            feet_w = scenario.wrench_at(cfg.profile, t, scenario.FEET)
            new_phase = scenario.update_phase(phase, hands_w, feet_w, cfg.thresholds)
            if new_phase != phase:
                phase_times[new_phase] = t
                if cfg.reset_integral_on_phase_change:
                    tracking = tracking.reset()
                phase = new_phase

            terms = dynamics.compute_terms(model, state)
            x = dynamics.link_pose(model, state.q, model.task_link)
            xdot = terms.J @ state.nu
            fstack = _stack_wrenches(model, hands_link, hands_w)
            maps = controller.task_maps(terms)
            omega_f = maps[1] @ fstack

            if cfg.advancement:
                psi_dot = advancement.psi_dot_update(
                    xdot, trajectory.deriv(curve, adv.psi), cfg.psi_dot_upper, cfg.eps_v
                )
            else:
                psi_dot = 1.0
            kin = trajectory.desired_kinematics(curve, adv.psi, psi_dot, cfg.dt)
            decomp = advancement.decompose(omega_f, kin.xdot_d, cfg.eps_v)
            xdd_star = controller.control_objective(kin, xdot, tracking, cfg.gains)
            tau = controller.control_torques(
                terms, xdd_star, fstack, cfg.mode, decomp, cfg.pinv_rtol, cfg.allow_singular, maps
            )
            fext = [(hands_link, hands_w)] if np.any(hands_w) else []
            nu_dot = dynamics.forward_dynamics(model, state, tau, fext, terms=terms)
        except TrajAdvError as exc:
            raise StepError(k, t, exc) from exc

        rows.append(
            LogRow(
                t=t,
                phase=phase,
                psi=adv.psi,
                psi_dot=psi_dot,
                x=x,
                x_d=kin.x_d,
                xdot=xdot,
                xdot_d=kin.xdot_d,
                f_hands=hands_w,
                f_feet=feet_w,
                alpha=decomp.alpha,
                tau=tau,
            )
        )
        if time_to_goal is None and np.linalg.norm(x - x_goal) <= cfg.goal_tolerance:
            time_to_goal = t

        try:
            tracking = controller.integrate_error(tracking, xdot, kin.xdot_d, cfg.dt, cfg.integral_bound)
            state = dynamics.step(state, nu_dot, cfg.dt)
            adv = advancement.advance(adv, psi_dot, cfg.dt)
        except TrajAdvError as exc:
            raise StepError(k, t, exc) from exc

    summary = Summary(
        final_psi=adv.psi,
        time_to_goal=time_to_goal,
        max_psi_dot=max((r.psi_dot for r in rows), default=1.0),
        final_phase=phase,
        phase_times=phase_times,
        steps=len(rows),
    )
    log.debug("run finished: %s", summary.as_dict())
    return rows, summary
