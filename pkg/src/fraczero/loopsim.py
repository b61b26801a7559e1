"""Sampled unity-feedback loop simulation (gain -> FIR canceller -> plant)
and step-response metrics.

The digital path models a processor that computes during the sampling
period: the error at step k uses the plant output of step k-1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .discrete import DiscretePlant, FirFilter
from .errors import InstabilityError, MetricsUndefinedError

#: output magnitude treated as divergence
Y_LIMIT = 1e6
#: default simulation horizon, seconds
DEFAULT_T_FINAL = 30.0


@dataclass(frozen=True, eq=False)
class LoopConfig:
    """Closed-loop simulation setup; canceller ``None`` means a bare loop."""

    kp: float
    plant: DiscretePlant
    canceller: FirFilter | None = None
    t_final: float = DEFAULT_T_FINAL
    reference: float = 1.0

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.canceller is not None and self.canceller.period_T != self.plant.period_T:
            raise ValueError(
                f"canceller period {self.canceller.period_T} != plant period "
                f"{self.plant.period_T}"
            )


@dataclass(frozen=True, eq=False)
class StepTrajectory:
    """Sampled loop signals: reference, error, controller and canceller
    outputs, plant output."""

    t: np.ndarray
    r: np.ndarray
    e: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    y: np.ndarray
    period_T: float


@dataclass(frozen=True)
class StepMetrics:
    """Step-response figures of merit.

    Undershoot is the excursion opposite in sign to the steady state,
    overshoot the excess beyond it, both as percentages of the steady state.
    ``settled`` is False when the trajectory never stays inside the +-2% band
    (settling_time_s is then None) or the final 10% window still varies by
    more than 0.5%.
    """

    undershoot_pct: float
    overshoot_pct: float
    rise_time_s: float | None
    settling_time_s: float | None
    steady_state: float
    settled: bool

    def as_dict(self) -> dict:
        return {
            "undershoot_pct": self.undershoot_pct,
            "overshoot_pct": self.overshoot_pct,
            "rise_time_s": self.rise_time_s,
            "settling_time_s": self.settling_time_s,
            "steady_state": self.steady_state,
            "settled": self.settled,
        }


def _sample_count(t_final: float, period: float) -> int:
    return int(round(t_final / period)) + 1


def simulate_closed_step(cfg: LoopConfig) -> StepTrajectory:
    """Run the feedback loop against a reference step.

    Per sample: e[k] = r[k] - y[k-1]; u1 = kp*e; u2 = canceller FIR output
    (u1 when absent); y = plant recurrence output.
    """
    period = cfg.plant.period_T
    n = _sample_count(cfg.t_final, period)
    r = np.full(n, float(cfg.reference))
    taps = cfg.canceller.taps if cfg.canceller is not None else np.array([1.0])
    e, u1, u2, y, blow = kernels.closed_loop(
        cfg.plant.b, cfg.plant.a, taps, float(cfg.kp), r, Y_LIMIT
    )
    if blow >= 0:
        raise InstabilityError(blow * period)
    t = np.arange(n) * period
    return StepTrajectory(t, r, e, u1, u2, y, period)


def simulate_open_step(plant: DiscretePlant, t_final: float = DEFAULT_T_FINAL,
                       reference: float = 1.0) -> StepTrajectory:
    """Drive the plant directly with a step (no feedback)."""
    n = _sample_count(t_final, plant.period_T)
    u = np.full(n, float(reference))
    y, blow = kernels.iir_apply(plant.b, plant.a, u, Y_LIMIT)
    if blow >= 0:
        raise InstabilityError(blow * plant.period_T)
    t = np.arange(n) * plant.period_T
    return StepTrajectory(t, u, u - y, u, u, y, plant.period_T)


def step_metrics(traj: StepTrajectory) -> StepMetrics:
    """Metrics from a sampled step response.

    The steady state is the mean of the final 10% of samples; a steady state
    indistinguishable from zero leaves every percentage undefined.
    """
    y = traj.y
    t = traj.t
    tail = y[int(0.9 * y.size):]
    ss = float(tail.mean())
    if abs(ss) < 1e-12:
        raise MetricsUndefinedError("steady state is zero; metrics undefined")
    sgn = 1.0 if ss > 0 else -1.0
    yy = sgn * y  # orient so the steady state is positive
    ss_mag = abs(ss)

    undershoot = max(0.0, -float(yy.min())) / ss_mag * 100.0
    overshoot = max(0.0, float(yy.max()) - ss_mag) / ss_mag * 100.0

    above10 = np.nonzero(yy >= 0.1 * ss_mag)[0]
    above90 = np.nonzero(yy >= 0.9 * ss_mag)[0]
    rise = None
    if above10.size and above90.size:
        rise = float(t[above90[0]] - t[above10[0]])

    outside = np.abs(yy - ss_mag) > 0.02 * ss_mag
    if not outside.any():
        settling = float(t[0])
    else:
        last = int(np.max(np.nonzero(outside)[0]))
        settling = float(t[last + 1]) if last + 1 < t.size else None

    tail_variation = float(tail.max() - tail.min()) / ss_mag
    settled = settling is not None and tail_variation < 0.005
    if not settled:
        settling = None
    return StepMetrics(undershoot, overshoot, rise, settling, ss, settled)


def write_trajectory_csv(traj: StepTrajectory, path) -> None:
    """CSV: t_s, r, e, u1, u2, y."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "r", "e", "u1", "u2", "y"])
        for i in range(traj.t.size):
            w.writerow([repr(float(traj.t[i])), repr(float(traj.r[i])),
                        repr(float(traj.e[i])), repr(float(traj.u1[i])),
                        repr(float(traj.u2[i])), repr(float(traj.y[i]))])
