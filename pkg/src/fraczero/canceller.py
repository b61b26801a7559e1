"""Fractional-order canceller construction and the proportional-gain design
procedures built on it.

The canceller C(s) = 1 / sum_{k=1}^{n} (s/z)^((k-1)/n) turns the plant's
right-half-plane zero factor (1 - s/z) into the fractional term
(1 - (s/z)^(1/n)) without an exact RHP pole-zero cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NoSolutionError
from .fotf import FoTransferFunction, evaluate, series, scale
from .freqresp import MarginReport, margins

#: relative bisection tolerance on the proportional gain
KP_RTOL = 1e-6
#: controller gain search bracket
KP_BRACKET = (1e-3, 1e3)
#: largest cancellation order tried by the fixed-DC design search
N_MAX = 10


@dataclass(frozen=True)
class CancellerDesign:
    """Outcome of a canceller + proportional-gain design.

    ``kp1`` is the gain on the bare loop, ``kp2`` the gain used with the
    canceller; ``kp_increased`` records whether kp2 > kp1 (a requested PM
    boost can force it the other way).  ``kappa_plant`` is the heuristic
    |P(j w_u)| / P(0) of the raw plant.
    """

    n: int
    z_nmp: float
    kp1: float
    kp2: float
    report_before: MarginReport
    report_after: MarginReport
    kp_increased: bool
    kappa_plant: float | None

    @property
    def alpha(self) -> float:
        return 1.0 / self.n

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "z_nmp": self.z_nmp,
            "kp1": self.kp1,
            "kp2": self.kp2,
            "pm_before_deg": self.report_before.pm_deg,
            "pm_after_deg": self.report_after.pm_deg,
            "gm_before_db": self.report_before.gm_db,
            "gm_after_db": self.report_after.gm_db,
            "wgc_before": self.report_before.omega_gc,
            "wgc_after": self.report_after.omega_gc,
            "kappa": self.kappa_plant,
        }


def make_canceller(z_nmp: float, n: int) -> FoTransferFunction:
    """Canceller of order n for a zero at z_nmp; n = 1 gives the identity.

    In x = s^(1/n) the denominator is sum_k z^(-k/n) x^k, so every
    coefficient stays real and the DC gain is exactly 1.
    """
    if z_nmp <= 0:
        raise ValueError("z_nmp must be positive")
    if n < 1:
        raise ValueError("n must be a positive integer")
    den = z_nmp ** (-np.arange(n) / n)
    return FoTransferFunction(1.0, n, np.array([1.0]), den)


def fractional_zero_term(alpha: float, z_nmp: float) -> FoTransferFunction:
    """F(s) = 1 - (s/z)^alpha for rational alpha in (0, 1]."""
    if z_nmp <= 0:
        raise ValueError("z_nmp must be positive")
    frac = Fraction(alpha).limit_denominator(1000)
    if not 0 < frac <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    p, n = frac.numerator, frac.denominator
    num = np.zeros(p + 1)
    num[0] = 1.0
    num[p] = -z_nmp ** (-p / n)
    return FoTransferFunction(1.0, n, num, np.array([1.0]), nmp_zero=z_nmp)


def augmented_plant(plant: FoTransferFunction, n: int) -> FoTransferFunction:
    """Series connection canceller * plant, validated to vanish at the zero."""
    if not plant.nmp_zero:
        raise ValueError("plant carries no NMP-zero metadata (nmp_zero)")
    if n == 1:
        return plant
    aug = series(make_canceller(plant.nmp_zero, n), plant)
    residual = abs(evaluate(aug, complex(plant.nmp_zero)))
    if residual > 1e-9:
        raise AssertionError(
            f"augmented plant does not vanish at s = {plant.nmp_zero}: |value| = {residual:.3e}"
        )
    return aug


def _pm_of_gain(loop_tf: FoTransferFunction, kp: float) -> float | None:
    rep = margins(scale(loop_tf, kp))
    return rep.pm_deg


#: acceptable |achieved - target| PM mismatch after the gain bisection, degrees
PM_VERIFY_TOL = 0.01


def _solve_kp_for_pm(loop_tf: FoTransferFunction, pm_target: float,
                     loop_name: str, bracket=KP_BRACKET) -> float:
    """Bisection on kp for PM(kp * loop) = pm_target.

    PM is continuous and decreasing in kp wherever the gain crossover exists.
    Gains too small for a crossover (|loop| < 1 everywhere) sit on the
    unconditionally stable side and count as above any target, so targets
    close to the 180-degree limit still bracket correctly.  The result is
    verified against the target, which rejects convergence onto the
    crossover-existence boundary itself.
    """
    lo_k, hi_k = bracket

    def objective(kp: float) -> float:
        pm = _pm_of_gain(loop_tf, kp)
        return math.inf if pm is None else pm - pm_target

    grid = np.geomspace(lo_k, hi_k, 200)
    vals = [objective(float(k)) for k in grid]
    bracket_idx = None
    for i in range(grid.size - 1):
        if (vals[i] > 0) != (vals[i + 1] > 0) or 0.0 in (vals[i], vals[i + 1]):
            bracket_idx = i
            break
    if bracket_idx is None:
        raise NoSolutionError(
            f"no gain in [{lo_k:g}, {hi_k:g}] reaches PM = {pm_target:g} deg "
            f"on the {loop_name} loop",
            loop=loop_name,
        )
    lo, hi = float(grid[bracket_idx]), float(grid[bracket_idx + 1])
    flo = vals[bracket_idx]
    while (hi - lo) / lo > KP_RTOL:
        mid = math.sqrt(lo * hi)
        fm = objective(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    kp = math.sqrt(lo * hi)
    pm = _pm_of_gain(loop_tf, kp)
    if pm is None or abs(pm - pm_target) > PM_VERIFY_TOL:
        achieved = "no crossover" if pm is None else f"PM = {pm:.4f} deg"
        raise NoSolutionError(
            f"PM = {pm_target:g} deg is not attainable on the {loop_name} loop "
            f"(gain search converged to kp = {kp:.6g} with {achieved})",
            loop=loop_name,
        )
    return kp


def _design(plant, n, pm_target, pm_after_target, bracket):
    kp1 = _solve_kp_for_pm(plant, pm_target, "bare", bracket)
    aug = augmented_plant(plant, n)
    if n == 1:
        kp2 = kp1
    else:
        kp2 = _solve_kp_for_pm(aug, pm_after_target, "cancelled", bracket)
    before = margins(scale(plant, kp1))
    after = margins(scale(aug, kp2))
    kappa = margins(plant).kappa
    return CancellerDesign(
        n=n, z_nmp=float(plant.nmp_zero), kp1=kp1, kp2=kp2,
        report_before=before, report_after=after,
        kp_increased=kp2 > kp1, kappa_plant=kappa,
    )


def design_same_pm(plant: FoTransferFunction, pm_target_deg: float, n: int,
                   bracket=KP_BRACKET) -> CancellerDesign:
    """Raise the loop DC gain at constant phase margin.

    kp1 places the bare loop at the target PM; kp2 places the cancelled loop
    at the same PM.  When the target is reachable on both loops the cancelled
    loop always affords the larger gain.
    """
    if not plant.nmp_zero:
        raise ValueError("plant carries no NMP-zero metadata (nmp_zero)")
    return _design(plant, n, pm_target_deg, pm_target_deg, bracket)


def design_boost_both(plant: FoTransferFunction, pm_target_deg: float,
                      pm_increase_deg: float, n: int,
                      bracket=KP_BRACKET) -> CancellerDesign:
    """Raise DC gain and phase margin together: the cancelled loop is placed
    at pm_target + pm_increase.  ``kp_increased`` reports whether the boost
    still allowed a net gain increase."""
    if not plant.nmp_zero:
        raise ValueError("plant carries no NMP-zero metadata (nmp_zero)")
    if pm_increase_deg < 0:
        raise ValueError("pm_increase_deg must be non-negative")
    return _design(plant, n, pm_target_deg, pm_target_deg + pm_increase_deg, bracket)


def design_same_dc(plant: FoTransferFunction, kp: float, pm_min_deg: float,
                   n_max: int = N_MAX) -> CancellerDesign:
    """Raise the phase margin at fixed proportional gain (fixed DC gain).

    Returns the smallest order n whose cancelled loop clears pm_min_deg at
    gain kp; n = 1 when the bare loop already does.  The reports expose the
    bandwidth cost through their gain-crossover fields.
    """
    if not plant.nmp_zero:
        raise ValueError("plant carries no NMP-zero metadata (nmp_zero)")
    if kp <= 0:
        raise ValueError("kp must be positive")
    before = margins(scale(plant, kp))
    kappa = margins(plant).kappa

    def build(n, after):
        return CancellerDesign(
            n=n, z_nmp=float(plant.nmp_zero), kp1=kp, kp2=kp,
            report_before=before, report_after=after,
            kp_increased=False, kappa_plant=kappa,
        )

    if before.pm_deg is not None and before.pm_deg >= pm_min_deg:
        return build(1, before)
    best_pm = before.pm_deg
    for n in range(2, n_max + 1):
        after = margins(scale(augmented_plant(plant, n), kp))
        if after.pm_deg is not None:
            if after.pm_deg >= pm_min_deg:
                return build(n, after)
            if best_pm is None or after.pm_deg > best_pm:
                best_pm = after.pm_deg
    raise NoSolutionError(
        f"no order n <= {n_max} reaches PM >= {pm_min_deg:g} deg at kp = {kp:g}"
        + (f" (best achieved: {best_pm:.2f} deg)" if best_pm is not None else ""),
        best_pm_deg=best_pm,
    )
