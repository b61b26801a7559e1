"""Kernel backend selection.

Hot numeric loops in :mod:`fraczero.kernels` are compiled with numba when it
is available.  The environment variable ``FRACZERO_BACKEND`` overrides the
choice:

* ``auto`` (default) -- use numba if importable, else pure numpy/Python,
* ``numba``          -- require numba, fail loudly if missing,
* ``numpy``          -- force the pure numpy/Python fallback.
"""

import os

_CHOICES = ("auto", "numba", "numpy")

_requested = os.environ.get("FRACZERO_BACKEND", "auto").strip().lower()
if _requested not in _CHOICES:
    raise RuntimeError(
        f"FRACZERO_BACKEND={_requested!r} not understood; expected one of {_CHOICES}"
    )

HAS_NUMBA = False
njit = None

if _requested != "numpy":
    try:
        from numba import njit  # noqa: F401
        HAS_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise ImportError(
                "FRACZERO_BACKEND=numba but numba is not installed"
            ) from None

USE_NUMBA = HAS_NUMBA and _requested in ("auto", "numba")
BACKEND = "numba" if USE_NUMBA else "numpy"
