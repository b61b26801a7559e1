"""Numeric hot loops with a numba fast path and a numpy/Python fallback.

Every kernel exists in two functionally identical flavours; the module-level
names are bound to the flavour selected by :mod:`fraczero._backend`.  Both
flavours stay importable through :data:`IMPLEMENTATIONS` so the test suite
and ``benchmarks/bench_backends.py`` can compare them directly.
"""

import math

import numpy as np
import scipy.signal

from ._backend import BACKEND, USE_NUMBA

if USE_NUMBA:
    from numba import njit


# ---------------------------------------------------------------------------
# pure numpy / Python flavour
# ---------------------------------------------------------------------------

def _rational_eval_np(gain, num, den, x):
    """Evaluate gain*num(x)/den(x) on a complex grid.

    Returns (numerator*gain, denominator) separately so callers can detect
    pole hits before dividing.
    """
    pn = np.zeros_like(x)
    for c in num[::-1]:
        pn = pn * x + c
    pd = np.zeros_like(x)
    for c in den[::-1]:
        pd = pd * x + c
    return gain * pn, pd


def _fir_apply_np(taps, u):
    """Causal FIR with zero initial history: y[k] = sum taps[m]*u[k-m]."""
    return np.convolve(u, taps)[: u.size]


def _iir_apply_np(b, a, u, y_limit):
    """Direct-form recurrence y = (b/a) u with divergence detection.

    Returns (y, blowup_index); blowup_index is -1 when the output stayed
    within +-y_limit and finite.
    """
    y = scipy.signal.lfilter(b, a, u)
    bad = ~np.isfinite(y) | (np.abs(y) > y_limit)
    if bad.any():
        k = int(np.argmax(bad))
        return y, k
    return y, -1


def _closed_loop_np(b, a, taps, kp, r, y_limit):
    """Unity-feedback loop: gain -> FIR -> plant, one-sample readback delay.

    e[k] = r[k] - y[k-1]; u1 = kp*e; u2 = FIR(u1); y = plant(u2).
    The recurrence is inherently sequential (loop-carried dependency), so the
    fallback is a plain Python loop.
    """
    n = r.size
    e = np.zeros(n)
    u1 = np.zeros(n)
    u2 = np.zeros(n)
    y = np.zeros(n)
    nb, na, nt = b.size, a.size, taps.size
    for i in range(n):
        e[i] = r[i] - (y[i - 1] if i > 0 else 0.0)
        u1[i] = kp * e[i]
        acc = 0.0
        for m in range(min(i + 1, nt)):
            acc += taps[m] * u1[i - m]
        u2[i] = acc
        acc = 0.0
        for j in range(min(i + 1, nb)):
            acc += b[j] * u2[i - j]
        for j in range(1, min(i + 1, na)):
            acc -= a[j] * y[i - j]
        y[i] = acc
        if not math.isfinite(acc) or abs(acc) > y_limit:
            return e, u1, u2, y, i
    return e, u1, u2, y, -1


def _pade_eval_np(d, z):
    """de Hoog continued-fraction (diagonal Pade) evaluation.

    ``d`` are the 2M+1 continued-fraction coefficients, ``z`` the power-series
    base exp(i*pi*t/T) per requested time.  Returns the Pade value A/B per
    time point.
    """
    n = d.size  # 2M + 1
    m2 = n - 1  # 2M
    a_prev = np.zeros_like(z)
    a_cur = np.full_like(z, d[0])
    b_prev = np.ones_like(z)
    b_cur = np.ones_like(z)
    for i in range(1, m2):
        a_nxt = a_cur + d[i] * z * a_prev
        b_nxt = b_cur + d[i] * z * b_prev
        a_prev, a_cur = a_cur, a_nxt
        b_prev, b_cur = b_cur, b_nxt
    brem = (1.0 + (d[m2 - 1] - d[m2]) * z) / 2.0
    rem = -brem * (1.0 - np.sqrt(1.0 + d[m2] * z / brem**2))
    a_fin = a_cur + rem * a_prev
    b_fin = b_cur + rem * b_prev
    return a_fin / b_fin, a_cur / b_cur


# ---------------------------------------------------------------------------
# numba flavour (same arithmetic, explicit loops)
# ---------------------------------------------------------------------------

def _rational_eval_loops(gain, num, den, x):
    n = x.size
    pn = np.zeros(n, dtype=np.complex128)
    pd = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        xv = x[i]
        accn = 0.0 + 0.0j
        for k in range(num.size - 1, -1, -1):
            accn = accn * xv + num[k]
        accd = 0.0 + 0.0j
        for k in range(den.size - 1, -1, -1):
            accd = accd * xv + den[k]
        pn[i] = gain * accn
        pd[i] = accd
    return pn, pd


def _fir_apply_loops(taps, u):
    n = u.size
    nt = taps.size
    y = np.zeros(n)
    for i in range(n):
        acc = 0.0
        mmax = i + 1 if i + 1 < nt else nt
        for m in range(mmax):
            acc += taps[m] * u[i - m]
        y[i] = acc
    return y


def _iir_apply_loops(b, a, u, y_limit):
    n = u.size
    nb, na = b.size, a.size
    y = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(min(i + 1, nb)):
            acc += b[j] * u[i - j]
        for j in range(1, min(i + 1, na)):
            acc -= a[j] * y[i - j]
        y[i] = acc
        if not math.isfinite(acc) or abs(acc) > y_limit:
            return y, i
    return y, -1


def _pade_eval_loops(d, z):
    n = d.size
    m2 = n - 1
    nt = z.size
    out = np.zeros(nt, dtype=np.complex128)
    prev = np.zeros(nt, dtype=np.complex128)
    for k in range(nt):
        zv = z[k]
        a_prev = 0.0 + 0.0j
        a_cur = d[0]
        b_prev = 1.0 + 0.0j
        b_cur = 1.0 + 0.0j
        for i in range(1, m2):
            a_nxt = a_cur + d[i] * zv * a_prev
            b_nxt = b_cur + d[i] * zv * b_prev
            a_prev, a_cur = a_cur, a_nxt
            b_prev, b_cur = b_cur, b_nxt
        brem = (1.0 + (d[m2 - 1] - d[m2]) * zv) / 2.0
        rem = -brem * (1.0 - np.sqrt(1.0 + d[m2] * zv / brem**2))
        out[k] = (a_cur + rem * a_prev) / (b_cur + rem * b_prev)
        prev[k] = a_cur / b_cur
    return out, prev


IMPLEMENTATIONS = {
    "numpy": {
        "rational_eval": _rational_eval_np,
        "fir_apply": _fir_apply_np,
        "iir_apply": _iir_apply_np,
        "closed_loop": _closed_loop_np,
        "pade_eval": _pade_eval_np,
    }
}

if USE_NUMBA:
    _jit = njit(cache=True)
    IMPLEMENTATIONS["numba"] = {
        "rational_eval": _jit(_rational_eval_loops),
        "fir_apply": _jit(_fir_apply_loops),
        "iir_apply": _jit(_iir_apply_loops),
        "closed_loop": _jit(_closed_loop_np),
        "pade_eval": _jit(_pade_eval_loops),
    }

_active = IMPLEMENTATIONS[BACKEND]

rational_eval = _active["rational_eval"]
fir_apply = _active["fir_apply"]
iir_apply = _active["iir_apply"]
closed_loop = _active["closed_loop"]
pade_eval = _active["pade_eval"]
