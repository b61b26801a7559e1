import numpy as np
import pytest

import fraczero as fz

# benchmark time constants used throughout
TZ = 0.495
TP = 0.164
Z_NMP = 1.0 / TZ


@pytest.fixture(scope="session")
def plant():
    return fz.benchmark_plant()


@pytest.fixture(scope="session")
def discrete_plant(plant):
    return fz.zoh_discretize(plant, 0.05)


@pytest.fixture(scope="session")
def fir_n2():
    """Standard canceller FIR: n=2, tau=0.495, T=0.05, 100 taps."""
    return fz.canceller_fir(Z_NMP, 2, 0.05, 100)


def analytic_step(t):
    """Unit-step response of the benchmark plant by partial fractions.

    Independent oracle: y(t) = 1 + B exp(-t/tz) + C exp(-t/tp) with residues
    computed from the pole locations, sharing no code with the package.
    """
    a, b = 1.0 / TZ, 1.0 / TP
    B = -2.0 / (TP * (b - a))
    C = (a + b) / (TP * (-b) * (a - b))
    return 1.0 + B * np.exp(-a * np.asarray(t)) + C * np.exp(-b * np.asarray(t))


def bare_loop_phase(w):
    """Continuous phase of the benchmark plant in radians (closed form)."""
    w = np.asarray(w, dtype=float)
    return -2.0 * np.arctan(TZ * w) - np.arctan(TP * w)


def bare_loop_mag(w, kp=1.0):
    """|kp P(jw)| via the all-pass structure: kp / sqrt(1 + (tp w)^2)."""
    w = np.asarray(w, dtype=float)
    return kp / np.sqrt(1.0 + (TP * w) ** 2)


def cancelled_loop_mag(w, kp=1.0):
    """|kp Cc(jw) P(jw)| for the n=2 canceller, closed form."""
    u = np.sqrt(TZ * np.asarray(w, dtype=float))
    return bare_loop_mag(w, kp) / np.sqrt(1.0 + np.sqrt(2.0) * u + u * u)


def cancelled_loop_phase(w):
    """Continuous phase of Cc(n=2) P in radians, wrap-free closed form."""
    w = np.asarray(w, dtype=float)
    u = np.sqrt(TZ * w)
    c = np.cos(np.pi / 4.0)
    return -np.arctan2(u * c, 1.0 + u * c) + bare_loop_phase(w)
