"""Frequency response, crossover detection, stability margins, and the
closed-form properties of the partly-cancelled zero term F(s) = 1 - (s/z)^a.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleHitError
from .fotf import FoTransferFunction, dc_gain, evaluate_grid, denominator_on_grid

#: default crossover search window, as multiples of the characteristic frequency
SEARCH_WINDOW = (1e-4, 1e4)
#: log-spaced bracketing points across the window
SEARCH_POINTS = 400
#: relative bisection tolerance on crossover frequencies
CROSSOVER_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class FrequencySeries:
    """Sampled frequency response with unwrapped phase.

    ``phase_deg`` is continuous in omega and anchored at the s -> 0+ limit
    (0 degrees for positive DC gain), so reflex margins like PM = 175 deg
    are representable.
    """

    omega: np.ndarray
    response: np.ndarray
    phase_deg: np.ndarray

    def __post_init__(self):
        if self.omega.size != self.response.size or self.omega.size < 2:
            raise ValueError("omega and response must have equal length >= 2")
        if np.any(np.diff(self.omega) <= 0) or self.omega[0] <= 0:
            raise ValueError("omega must be strictly increasing and positive")

    @property
    def magnitude_db(self) -> np.ndarray:
        return 20.0 * np.log10(np.abs(self.response))


@dataclass(frozen=True)
class MarginReport:
    """Crossovers and margins; absent crossovers propagate as ``None``.

    ``gm_db`` is None when the phase never reaches -180 deg (infinite gain
    margin); ``kappa`` is the high-frequency controllability heuristic
    |L(j w_u)| / |L(0)|.
    """

    omega_gc: float | None
    omega_u: float | None
    pm_deg: float | None
    gm_db: float | None
    kappa: float | None
    dc_gain: float

    def as_dict(self) -> dict:
        return {
            "omega_gc": self.omega_gc,
            "omega_u": self.omega_u,
            "pm_deg": self.pm_deg,
            "gm_db": self.gm_db,
            "kappa": self.kappa,
            "dc_gain": self.dc_gain,
        }


# ---------------------------------------------------------------------------
# closed forms for F(s) = 1 - (s/z)^alpha at s = j*z
# ---------------------------------------------------------------------------

def nmp_mag_at_zero_freq(alpha: float) -> float:
    """|F(j z)| = sqrt(2 - 2 cos(pi*alpha/2)), independent of z."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return math.sqrt(2.0 - 2.0 * math.cos(math.pi * alpha / 2.0))


def nmp_phase_at_zero_freq(alpha: float) -> float:
    """angle F(j z) = -pi/2 + pi*alpha/4, in radians."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return -math.pi / 2.0 + math.pi * alpha / 4.0


def gain_reduction_at_zero_freq(alpha: float) -> float:
    """Open-loop magnitude drop at the zero frequency caused by partial
    cancellation: sqrt(2) * (1 - sqrt(1 - cos(pi*alpha/2)))."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return math.sqrt(2.0) * (1.0 - math.sqrt(1.0 - math.cos(math.pi * alpha / 2.0)))


def omega_min(alpha: float, z_nmp: float) -> float:
    """Upper edge of the frequency band on which |F(jw)| decreases:

        w_min = cos(pi*alpha/2)**(1/alpha) * z_nmp.

    Returns 0.0 for alpha = 1 (no decreasing region: an integer-order zero's
    magnitude grows monotonically).
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if z_nmp <= 0:
        raise ValueError("z_nmp must be positive")
    if alpha == 1.0:
        return 0.0
    return math.cos(math.pi * alpha / 2.0) ** (1.0 / alpha) * z_nmp


# ---------------------------------------------------------------------------
# response sampling
# ---------------------------------------------------------------------------

def _anchor_phase(tf: FoTransferFunction) -> float:
    try:
        g = dc_gain(tf)
    except Exception:
        return 0.0
    return 0.0 if g >= 0 else -math.pi


def _unwrapped_phase(tf: FoTransferFunction, omega: np.ndarray,
                     response: np.ndarray) -> np.ndarray:
    ph = np.unwrap(np.angle(response))
    anchor = _anchor_phase(tf)
    ph += 2.0 * math.pi * round((anchor - ph[0]) / (2.0 * math.pi))
    return ph


def freq_response(tf: FoTransferFunction, omega_grid) -> FrequencySeries:
    """Sample tf along s = j*omega; raises :class:`PoleHitError` naming the
    first grid frequency that lands on a pole."""
    omega = np.asarray(omega_grid, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("all frequencies must be positive")
    s = 1j * omega
    pd, scale_ = denominator_on_grid(tf, s)
    hit = np.abs(pd) <= 1e-12 * np.maximum(scale_, 1e-300)
    if hit.any():
        raise PoleHitError(omega[int(np.argmax(hit))],
                           f"pole on the imaginary axis at omega = {omega[int(np.argmax(hit))]:.9g} rad/s")
    resp = evaluate_grid(tf, s)
    ph = np.degrees(_unwrapped_phase(tf, omega, resp))
    return FrequencySeries(omega, resp, ph)


def characteristic_frequency(tf: FoTransferFunction) -> float:
    """Frequency scale for search windows: the NMP-zero location when known,
    otherwise the frequency where the extreme denominator terms balance."""
    if tf.nmp_zero:
        return float(tf.nmp_zero)
    d = tf.den
    k = d.size - 1
    if k == 0 or d[k] == 0 or d[0] == 0:
        return 1.0
    return float(abs(d[0] / d[k]) ** (tf.base_order_den / k))


def _search_grid(tf, window, points):
    f0 = characteristic_frequency(tf)
    lo, hi = (window if window is not None else SEARCH_WINDOW)
    if window is None:
        lo, hi = lo * f0, hi * f0
    return np.geomspace(lo, hi, points)


def gain_crossover(tf: FoTransferFunction, window=None,
                   points: int = SEARCH_POINTS) -> float | None:
    """Lowest frequency with |tf(jw)| = 1, by log-grid bracketing plus
    bisection; ``None`` when the magnitude never crosses unity inside the
    window."""
    grid = _search_grid(tf, window, points)
    mag = np.abs(evaluate_grid(tf, 1j * grid))
    f = np.log(mag)  # crossing of 0
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    exact = np.nonzero(f == 0.0)[0]
    if exact.size and (idx.size == 0 or exact[0] <= idx[0]):
        return float(grid[exact[0]])
    if idx.size == 0:
        return None
    lo, hi = grid[idx[0]], grid[idx[0] + 1]
    flo = f[idx[0]]
    while (hi - lo) / lo > CROSSOVER_RTOL:
        mid = math.sqrt(lo * hi)
        fm = math.log(abs(complex(evaluate_grid(tf, np.array([1j * mid]))[0])))
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return float(math.sqrt(lo * hi))


def _phase_grid(tf, grid):
    resp = evaluate_grid(tf, 1j * grid)
    return _unwrapped_phase(tf, grid, resp)


def phase_crossover(tf: FoTransferFunction, window=None,
                    points: int = SEARCH_POINTS) -> float | None:
    """Lowest frequency where the unwrapped phase reaches -180 deg; ``None``
    when it never does (infinite gain margin)."""
    grid = _search_grid(tf, window, points)
    ph = _phase_grid(tf, grid)
    f = ph + math.pi
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    exact = np.nonzero(f == 0.0)[0]
    if exact.size and (idx.size == 0 or exact[0] <= idx[0]):
        return float(grid[exact[0]])
    if idx.size == 0:
        return None
    i = idx[0]
    lo, hi = grid[i], grid[i + 1]
    plo, phi_ = ph[i], ph[i + 1]
    while (hi - lo) / lo > CROSSOVER_RTOL:
        mid = math.sqrt(lo * hi)
        val = complex(evaluate_grid(tf, np.array([1j * mid]))[0])
        raw = math.atan2(val.imag, val.real)
        # re-anchor the raw angle onto the continuous branch of the bracket
        target = 0.5 * (plo + phi_)
        pmid = raw + 2.0 * math.pi * round((target - raw) / (2.0 * math.pi))
        if pmid + math.pi == 0.0:
            return mid
        if ((pmid + math.pi) < 0) == ((plo + math.pi) < 0):
            lo, plo = mid, pmid
        else:
            hi, phi_ = mid, pmid
    return float(math.sqrt(lo * hi))


def phase_at(tf: FoTransferFunction, omega: float, window=None,
             points: int = SEARCH_POINTS) -> float:
    """Unwrapped phase (radians) at a single frequency, tracked continuously
    from the low edge of the search window."""
    f0 = characteristic_frequency(tf)
    lo = (window[0] if window is not None else SEARCH_WINDOW[0] * f0)
    lo = min(lo, omega / 2.0)
    decades = max(math.log10(omega / lo), 0.1)
    npts = max(int(decades * points / 8.0), 16)
    grid = np.geomspace(lo, omega, npts)
    grid[-1] = omega
    return float(_phase_grid(tf, grid)[-1])


def margins(tf: FoTransferFunction, window=None,
            points: int = SEARCH_POINTS) -> MarginReport:
    """Gain/phase crossovers, PM, GM, and kappa in one report."""
    g = dc_gain(tf)
    wgc = gain_crossover(tf, window, points)
    wu = phase_crossover(tf, window, points)
    pm = None
    if wgc is not None:
        pm = 180.0 + math.degrees(phase_at(tf, wgc, window, points))
    gm = None
    kappa = None
    if wu is not None:
        mag_u = abs(complex(evaluate_grid(tf, np.array([1j * wu]))[0]))
        gm = -20.0 * math.log10(mag_u)
        kappa = float(mag_u / abs(g))
    return MarginReport(wgc, wu, pm, gm, kappa, g)


def write_series_csv(series: FrequencySeries, path) -> None:
    """Bode/Nyquist CSV: omega_rad_s, re, im, mag_db, phase_deg."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["omega_rad_s", "re", "im", "mag_db", "phase_deg"])
        mdb = series.magnitude_db
        for i in range(series.omega.size):
            w.writerow([repr(float(series.omega[i])),
                        repr(float(series.response[i].real)),
                        repr(float(series.response[i].imag)),
                        repr(float(mdb[i])),
                        repr(float(series.phase_deg[i]))])
