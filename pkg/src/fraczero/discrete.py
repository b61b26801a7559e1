"""Impulse-invariance FIR realization of the canceller and step-invariant
(zero-order-hold) discretization of rational plants.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.signal
from numpy.polynomial import legendre

from . import kernels
from .fotf import FoTransferFunction

#: sampling defaults used by the desk-scale experiments
DEFAULT_PERIOD = 0.05
DEFAULT_LENGTH = 100


@dataclass(frozen=True, eq=False)
class FirFilter:
    """Truncated discrete impulse response.

    ``dc_scale`` is the cumulative multiplier applied by DC renormalization;
    1.0 means the taps are raw.
    """

    taps: np.ndarray
    period_T: float
    dc_scale: float = 1.0

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps, dtype=float))
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "period_T", float(self.period_T))
        object.__setattr__(self, "dc_scale", float(self.dc_scale))
        if taps.size < 1 or not np.isfinite(taps).all():
            raise ValueError("taps must be a non-empty finite array")
        if self.period_T <= 0:
            raise ValueError("period_T must be positive")


@dataclass(frozen=True, eq=False)
class DiscretePlant:
    """Recurrence coefficients of a zero-order-hold discretized plant:

        a[0] y[k] = sum_j b[j] u[k-j] - sum_{j>=1} a[j] y[k-j],  a[0] = 1.
    """

    b: np.ndarray
    a: np.ndarray
    period_T: float

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        if a[0] != 1.0:
            b = b / a[0]
            a = a / a[0]
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "period_T", float(self.period_T))
        if self.period_T <= 0:
            raise ValueError("period_T must be positive")
        if a.size > 1:
            zpoles = np.roots(a)
            if np.any(np.abs(zpoles) >= 1.0 + 1e-12):
                raise ValueError("discrete poles must lie inside the unit circle")


_GAUSS_NODES, _GAUSS_WEIGHTS = legendre.leggauss(16)


def impulse_invariance(h, period_T: float, length: int) -> FirFilter:
    """FIR taps from a continuous impulse response, DC-renormalized.

    Each tap is the integral of h over its sample cell,
    taps[k] = integral_{kT}^{(k+1)T} h(t) dt, evaluated with Gauss-Legendre
    quadrature under the substitution t = v^2 -- for smooth kernels this is
    T*h((k+1/2)T) to O(T^3), and it stays finite for kernels with an
    integrable 1/sqrt(t) singularity at t = 0 (the fractional canceller),
    where a point sample at t = 0 would be undefined.  The raw tap sum then
    estimates the integral of h over the filter span, and
    :func:`normalize_dc` absorbs the truncated-tail deficit.
    """
    if period_T <= 0:
        raise ValueError("period_T must be positive")
    if length < 1:
        raise ValueError("length must be >= 1")
    edges = np.sqrt(np.arange(length + 1) * period_T)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    v = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    hv = np.asarray(h(np.ravel(v * v)), dtype=float).reshape(v.shape)
    taps = np.sum(_GAUSS_WEIGHTS[None, :] * 2.0 * v * hv, axis=1) * half
    if not np.isfinite(taps).all():
        raise ValueError("impulse response not evaluable over the filter span")
    return normalize_dc(FirFilter(taps, period_T))


def normalize_dc(fir: FirFilter) -> FirFilter:
    """Scale taps so they sum to exactly unity; records the multiplier."""
    s = float(np.sum(fir.taps))
    if s == 0.0:
        raise ZeroDivisionError("tap sum is zero; cannot normalize DC gain")
    return FirFilter(fir.taps / s, fir.period_T, fir.dc_scale / s)


def fir_apply(fir: FirFilter, u) -> np.ndarray:
    """Causal convolution with zero initial history."""
    u = np.asarray(u, dtype=float)
    return kernels.fir_apply(fir.taps, u)


def fir_freq_response(fir: FirFilter, omega) -> np.ndarray:
    """Frequency response sum_k taps[k] exp(-j w k T) at z = exp(j w T)."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    k = np.arange(fir.taps.size)
    return np.exp(-1j * np.outer(w, k) * fir.period_T) @ fir.taps


def zoh_discretize(plant: FoTransferFunction, period_T: float) -> DiscretePlant:
    """Step-invariant equivalent of a rational (base order 1) plant.

    The discrete step response equals the continuous one at every sample
    instant.  Poles must lie strictly in the left half-plane.
    """
    if plant.base_order_den != 1:
        raise ValueError("zero-order-hold discretization requires base order 1")
    if period_T <= 0:
        raise ValueError("period_T must be positive")
    num = plant.gain * plant.num[::-1]
    den = plant.den[::-1]
    if num.size > den.size:
        raise ValueError("plant must be proper (num degree <= den degree)")
    poles = np.roots(den)
    if np.any(poles.real >= 0):
        raise ValueError("plant has unstable or imaginary-axis poles")
    bd, ad, _ = scipy.signal.cont2discrete((num, den), period_T, method="zoh")
    return DiscretePlant(np.squeeze(bd), np.squeeze(ad), period_T)


def canceller_fir(z_nmp: float, n: int, period_T: float = DEFAULT_PERIOD,
                  length: int = DEFAULT_LENGTH, degree: int | None = None) -> FirFilter:
    """FIR realization of the order-n canceller for a zero at z_nmp.

    Order 1 is the identity (single unit tap); higher orders go through the
    numerical inverse Laplace transform of the canceller and
    :func:`impulse_invariance`.
    """
    from .canceller import make_canceller
    from .fotf import evaluate_grid
    from .ilt import DEFAULT_DEGREE, laplace_impulse

    if n == 1:
        return FirFilter(np.array([1.0]), period_T, 1.0)
    tf = make_canceller(z_nmp, n)
    h = laplace_impulse(lambda s: evaluate_grid(tf, s),
                        degree=degree or DEFAULT_DEGREE)
    return impulse_invariance(h, period_T, length)


def write_fir_csv(fir: FirFilter, path) -> None:
    """CSV of taps with the sampling configuration in header comments, so the
    filter table can be rebuilt bit-for-bit from the file."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# period_T={fir.period_T!r}\n")
        fh.write(f"# length={fir.taps.size}\n")
        fh.write(f"# dc_scale={fir.dc_scale!r}\n")
        w = csv.writer(fh)
        w.writerow(["index", "tap"])
        for i, tap in enumerate(fir.taps):
            w.writerow([i, repr(float(tap))])
