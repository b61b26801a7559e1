"""Commensurate fractional-order LTI transfer functions.

A transfer function is stored as ``gain * num(x) / den(x)`` with
``x = s**(1/n)`` evaluated on the principal branch (``arg s`` in (-pi, pi]),
coefficients ascending in powers of x.  Integer-order systems are the n = 1
case.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BranchCutError, PlantSpecError, PoleAtOriginError, PoleHitError

#: relative threshold below which a denominator evaluation counts as a pole hit
POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FoTransferFunction:
    """Fractional-order rational transfer function in x = s**(1/base_order_den).

    Parameters
    ----------
    gain : overall multiplier
    base_order_den : n, so the base order q equals 1/n (n >= 1)
    num, den : real coefficient arrays of x**k, ascending k
    nmp_zero : location of a known right-half-plane zero (rad/s), carried as
        metadata by plants constructed with :func:`benchmark_plant`
    """

    gain: float
    base_order_den: int
    num: np.ndarray
    den: np.ndarray
    nmp_zero: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gain", float(self.gain))
        object.__setattr__(self, "base_order_den", int(self.base_order_den))
        num = np.atleast_1d(np.asarray(self.num, dtype=float))
        den = np.atleast_1d(np.asarray(self.den, dtype=float))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if self.base_order_den < 1:
            raise ValueError("base_order_den must be a positive integer")
        if not math.isfinite(self.gain):
            raise ValueError("gain must be finite")
        if not (np.isfinite(num).all() and np.isfinite(den).all()):
            raise ValueError("coefficients must be finite")
        if den.size == 0 or not den.any():
            raise ValueError("denominator must be nonzero")

    @property
    def q(self) -> float:
        """Base order 1/n."""
        return 1.0 / self.base_order_den

    def __repr__(self):
        return (
            f"FoTransferFunction(gain={self.gain!r}, n={self.base_order_den}, "
            f"num={self.num.tolist()}, den={self.den.tolist()})"
        )


@dataclass(frozen=True)
class PlantParams:
    """RC time constants of the benchmark circuit (seconds)."""

    r2c2: float = 1.5e3 * 330e-6
    r3c3: float = 820.0 * 200e-6

    def __post_init__(self):
        if not (self.r2c2 > 0 and self.r3c3 > 0):
            raise ValueError("time constants must be strictly positive")


def _principal_power(s: complex, n: int) -> complex:
    """s**(1/n) on the principal branch; rejects the cut for n > 1."""
    s = complex(s)
    if n == 1:
        return s
    if s.imag == 0.0 and s.real < 0.0:
        raise BranchCutError(
            f"s = {s} lies on the negative real axis (branch cut for order 1/{n})"
        )
    return s ** (1.0 / n)


def evaluate(tf: FoTransferFunction, s: complex) -> complex:
    """Evaluate ``tf`` at a single complex point on the principal branch."""
    x = _principal_power(s, tf.base_order_den)
    pn, pd = kernels.rational_eval(
        tf.gain, tf.num, tf.den, np.array([x], dtype=complex)
    )
    scale_ = float(np.sum(np.abs(tf.den) * np.abs(x) ** np.arange(tf.den.size)))
    if abs(pd[0]) <= POLE_TOL * max(scale_, 1e-300):
        raise PoleHitError(s)
    return complex(pn[0] / pd[0])


def evaluate_grid(tf: FoTransferFunction, s: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` over an array of complex points.

    Branch-cut and pole checks are the caller's responsibility on the grid
    path; :func:`fraczero.freqresp.freq_response` performs them for jw grids.
    """
    s = np.asarray(s, dtype=complex)
    n = tf.base_order_den
    x = s if n == 1 else s ** (1.0 / n)
    pn, pd = kernels.rational_eval(tf.gain, tf.num, tf.den, np.ravel(x))
    return (pn / pd).reshape(s.shape)


def denominator_on_grid(tf: FoTransferFunction, s: np.ndarray):
    """Denominator values plus their coefficient scale, for pole-hit checks."""
    s = np.asarray(s, dtype=complex)
    n = tf.base_order_den
    x = np.ravel(s if n == 1 else s ** (1.0 / n))
    _, pd = kernels.rational_eval(1.0, tf.num, tf.den, x)
    ax = np.abs(x)
    scale_ = np.zeros(ax.size)
    power = np.ones_like(ax)
    for c in np.abs(tf.den):
        scale_ += c * power
        power *= ax
    return pd, scale_


def _upsample(coeffs: np.ndarray, ratio: int) -> np.ndarray:
    if ratio == 1:
        return coeffs
    out = np.zeros((coeffs.size - 1) * ratio + 1)
    out[::ratio] = coeffs
    return out


def series(a: FoTransferFunction, b: FoTransferFunction) -> FoTransferFunction:
    """Series (product) connection on a common base order 1/lcm(n_a, n_b)."""
    n = math.lcm(a.base_order_den, b.base_order_den)
    num = np.convolve(_upsample(a.num, n // a.base_order_den),
                      _upsample(b.num, n // b.base_order_den))
    den = np.convolve(_upsample(a.den, n // a.base_order_den),
                      _upsample(b.den, n // b.base_order_den))
    if a.nmp_zero is not None and b.nmp_zero is not None and a.nmp_zero != b.nmp_zero:
        zmeta = None
    else:
        zmeta = a.nmp_zero if a.nmp_zero is not None else b.nmp_zero
    return FoTransferFunction(a.gain * b.gain, n, num, den, nmp_zero=zmeta)


def scale(tf: FoTransferFunction, k: float) -> FoTransferFunction:
    """Multiply by a constant gain (proportional controller)."""
    if not math.isfinite(k):
        raise ValueError("gain factor must be finite")
    return FoTransferFunction(tf.gain * k, tf.base_order_den, tf.num, tf.den,
                              nmp_zero=tf.nmp_zero)


def dc_gain(tf: FoTransferFunction) -> float:
    """gain * num[0] / den[0]; a pole at the origin is signalled, not returned."""
    if tf.den[0] == 0.0:
        raise PoleAtOriginError("transfer function has a pole at s = 0 (infinite DC gain)")
    return float(tf.gain * tf.num[0] / tf.den[0])


def benchmark_plant(params: PlantParams | None = None) -> FoTransferFunction:
    """Two-pole plant with one right-half-plane zero and unit DC gain:

        P(s) = (1 - t_z s) / ((1 + t_z s)(1 + t_p s)),  t_z = r2c2, t_p = r3c3.

    The zero at s = 1/r2c2 is recorded as ``nmp_zero`` metadata.
    """
    p = params or PlantParams()
    num = np.array([1.0, -p.r2c2])
    den = np.convolve([1.0, p.r2c2], [1.0, p.r3c3])
    return FoTransferFunction(1.0, 1, num, den, nmp_zero=1.0 / p.r2c2)


UNIT = FoTransferFunction(1.0, 1, np.array([1.0]), np.array([1.0]))


# ---------------------------------------------------------------------------
# plant JSON interface
# ---------------------------------------------------------------------------

def plant_from_dict(spec: dict) -> FoTransferFunction:
    """Build a transfer function from its JSON description.

    Either the explicit form ``{"gain", "base_order_den", "num", "den"}``
    (optionally with ``"nmp_zero"``) or the shorthand
    ``{"benchmark": {"r2c2": ..., "r3c3": ...}}``.
    """
    if not isinstance(spec, dict):
        raise PlantSpecError(f"plant spec must be an object, got {type(spec).__name__}")
    if "benchmark" in spec:
        bench = spec["benchmark"]
        if not isinstance(bench, dict):
            raise PlantSpecError('field "benchmark" must be an object')
        try:
            return benchmark_plant(PlantParams(**bench))
        except (TypeError, ValueError) as exc:
            raise PlantSpecError(f'bad "benchmark" parameters: {exc}') from exc
    missing = [k for k in ("gain", "base_order_den", "num", "den") if k not in spec]
    if missing:
        raise PlantSpecError(f"plant spec missing field(s): {', '.join(missing)}")
    try:
        return FoTransferFunction(
            spec["gain"], spec["base_order_den"],
            np.asarray(spec["num"], dtype=float),
            np.asarray(spec["den"], dtype=float),
            nmp_zero=spec.get("nmp_zero"),
        )
    except (TypeError, ValueError) as exc:
        raise PlantSpecError(f"bad plant spec: {exc}") from exc


def load_plant(path: str) -> FoTransferFunction:
    """Read a plant JSON file; parse errors carry line/column context."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlantSpecError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    try:
        return plant_from_dict(spec)
    except PlantSpecError as exc:
        raise PlantSpecError(f"{path}: {exc}") from exc
