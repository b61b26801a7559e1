"""Numerical inverse Laplace transform (Fourier-series method with
quotient-difference acceleration) and the closed-form half-order kernel used
to validate it.

The scaled complementary error function here is implemented from scratch
(Maclaurin series below x = 2, Laplace continued fraction above) so the
closed-form oracle shares no code with the numerical inversion it checks.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IltAccuracyWarning

#: default quotient-difference depth M (2M+1 transform evaluations per decade)
DEFAULT_DEGREE = 20
#: contour placement tolerance (sets the abscissa shift -log(tol)/(2T))
DEFAULT_TOL = 1e-9
#: relative gap between the last two Pade convergents that triggers a warning
WARN_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class TimeSamples:
    """Impulse-response samples h(t) on a strictly positive time grid."""

    t: np.ndarray
    h: np.ndarray
    warnings: tuple = ()

    def __post_init__(self):
        if self.t.size != self.h.size:
            raise ValueError("t and h must have equal length")
        if np.any(self.t <= 0) or np.any(np.diff(self.t) <= 0):
            raise ValueError("t must be strictly increasing and positive")
        if not np.isfinite(self.h).all():
            raise ValueError("h must be finite")


# ---------------------------------------------------------------------------
# scaled complementary error function, independent implementation
# ---------------------------------------------------------------------------

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_CF_DEPTH = 80
_SERIES_CUTOFF = 2.0


def _erfcx_series(x: float) -> float:
    # erf via Maclaurin series, then scale; safe for 0 <= x < 2
    term = x
    acc = x
    k = 0
    while True:
        k += 1
        term *= -x * x / k
        inc = term / (2 * k + 1)
        acc += inc
        if abs(inc) < 1e-18 * abs(acc) or k > 120:
            break
    return math.exp(x * x) * (1.0 - _TWO_OVER_SQRT_PI * acc)


def _erfcx_contfrac(x: float) -> float:
    # sqrt(pi)*exp(x^2)*erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    acc = 0.0
    for k in range(_CF_DEPTH, 0, -1):
        acc = (k / 2.0) / (x + acc)
    return 1.0 / (math.sqrt(math.pi) * (x + acc))


def erfcx(x) -> np.ndarray | float:
    """exp(x^2) * erfc(x) for x >= 0, numerically stable for large x."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("erfcx implemented for x >= 0 only")
    flat = np.ravel(arr)
    out = np.empty_like(flat)
    for i, v in enumerate(flat):
        out[i] = _erfcx_series(v) if v < _SERIES_CUTOFF else _erfcx_contfrac(v)
    if np.isscalar(x) or arr.shape == ():
        return float(out[0])
    return out.reshape(arr.shape)


def analytic_half_order(tau: float, t) -> np.ndarray | float:
    """Impulse response of 1/(1 + (tau s)^(1/2)):

        h(t) = (1/tau) * [1/sqrt(pi t/tau) - erfcx(sqrt(t/tau))].

    The erfcx form keeps the slowly-decaying tail finite where the naive
    exp(t/tau)*erfc(...) product overflows.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    tt = np.asarray(t, dtype=float) / tau
    if np.any(tt <= 0):
        raise ValueError("t must be strictly positive")
    val = (1.0 / np.sqrt(np.pi * tt) - erfcx(np.sqrt(tt))) / tau
    if np.isscalar(t):
        return float(val)
    return val


# ---------------------------------------------------------------------------
# Fourier-series inversion with quotient-difference acceleration
# ---------------------------------------------------------------------------

def _eval_transform(f, p: np.ndarray) -> np.ndarray:
    try:
        fp = np.asarray(f(p), dtype=complex)
        if fp.shape == p.shape:
            return fp
    except Exception:
        pass
    return np.array([complex(f(pi)) for pi in p])


def _qd_coefficients(fp: np.ndarray, degree: int) -> np.ndarray:
    """Continued-fraction coefficients from the quotient-difference scheme."""
    m = degree
    npts = 2 * m + 1
    e = np.zeros((npts, m + 1), dtype=complex)
    q = np.zeros((npts, m), dtype=complex)
    q[: 2 * m, 0] = fp[1:] / fp[:-1]
    q[0, 0] = fp[1] / (fp[0] / 2.0)
    for r in range(1, m + 1):
        mr = 2 * (m - r)
        e[: mr + 1, r] = q[1: mr + 2, r - 1] - q[: mr + 1, r - 1] + e[1: mr + 2, r - 1]
        if r < m:
            q[:mr, r] = q[1: mr + 1, r - 1] * e[1: mr + 1, r] / e[:mr, r]
    d = np.zeros(npts, dtype=complex)
    d[0] = fp[0] / 2.0
    d[1::2] = -q[0, :]
    d[2::2] = -e[0, 1:]
    return d


def invert(f, t_grid, sigma0: float = 0.0, degree: int = DEFAULT_DEGREE,
           tol: float = DEFAULT_TOL, warn_tol: float = WARN_TOL) -> TimeSamples:
    """Invert a Laplace-domain function on a positive time grid.

    Parameters
    ----------
    f : callable mapping complex s (scalar or ndarray) to F(s); must be
        analytic right of Re(s) = sigma0
    t_grid : strictly positive, strictly increasing times
    sigma0 : rightmost singularity abscissa of f
    degree : acceleration depth M; 2M+1 transform evaluations per time decade
    tol : contour placement tolerance
    warn_tol : convergence-estimate threshold; exceeding it attaches an
        accuracy warning to the result (and emits :class:`IltAccuracyWarning`)

    Times are processed one decade at a time: a shared contour across several
    orders of magnitude loses accuracy at the small end.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly positive and increasing")
    out = np.empty_like(t)
    notes = []
    logt = np.log10(t)
    for dec in range(int(math.floor(logt.min())), int(math.ceil(logt.max())) + 1):
        mask = (logt >= dec) & (logt < dec + 1)
        if not mask.any():
            continue
        ts = t[mask]
        period = 2.0 * ts.max()
        gamma = sigma0 - math.log(tol) / (2.0 * period)
        p = gamma + 1j * math.pi * np.arange(2 * degree + 1) / period
        fp = _eval_transform(f, p)
        d = _qd_coefficients(fp, degree)
        z = np.exp(1j * math.pi * ts / period)
        final, prev = kernels.pade_eval(d, z)
        vals = np.exp(gamma * ts) / period * final.real
        out[mask] = vals
        gap = np.abs(final - prev) / np.maximum(np.abs(final), 1e-300)
        worst = float(gap.max())
        if worst > warn_tol:
            notes.append(
                f"acceleration remainder {worst:.2e} above {warn_tol:.0e} "
                f"for t in [{ts.min():.3g}, {ts.max():.3g}] s"
            )
    if notes:
        warnings.warn("; ".join(notes), IltAccuracyWarning, stacklevel=2)
    return TimeSamples(t, out, tuple(notes))


def laplace_impulse(f, sigma0: float = 0.0, degree: int = DEFAULT_DEGREE,
                    tol: float = DEFAULT_TOL):
    """Wrap a Laplace-domain function as a time-domain impulse response
    callable h(t), suitable for :func:`fraczero.discrete.impulse_invariance`.

    Unsorted/duplicate evaluation points are handled by sorting internally.
    """

    def h(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        order = np.argsort(t)
        uniq, inverse = np.unique(t[order], return_inverse=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IltAccuracyWarning)
            samples = invert(f, uniq, sigma0=sigma0, degree=degree, tol=tol)
        res = np.empty_like(t)
        res[order] = samples.h[inverse]
        return res

    return h


def write_time_csv(samples: TimeSamples, path) -> None:
    """CSV: t_s, h_per_s."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "h_per_s"])
        for i in range(samples.t.size):
            w.writerow([repr(float(samples.t[i])), repr(float(samples.h[i]))])
