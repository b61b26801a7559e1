"""fraczero: fractional-order partial cancellation of non-minimum-phase zeros.

Frequency-domain analysis, canceller design, FIR realization, and sampled
closed-loop simulation for feedback loops whose plant carries a right-half-
plane zero.
"""

from ._backend import BACKEND, HAS_NUMBA
from .canceller import (
    CancellerDesign,
    augmented_plant,
    design_boost_both,
    design_same_dc,
    design_same_pm,
    fractional_zero_term,
    make_canceller,
)
from .discrete import (
    DiscretePlant,
    FirFilter,
    canceller_fir,
    fir_apply,
    fir_freq_response,
    impulse_invariance,
    normalize_dc,
    zoh_discretize,
)
from .errors import (
    BranchCutError,
    FracZeroError,
    IltAccuracyWarning,
    InstabilityError,
    MetricsUndefinedError,
    NoSolutionError,
    PlantSpecError,
    PoleAtOriginError,
    PoleHitError,
)
from .fotf import (
    FoTransferFunction,
    PlantParams,
    benchmark_plant,
    dc_gain,
    evaluate,
    evaluate_grid,
    load_plant,
    plant_from_dict,
    scale,
    series,
)
from .freqresp import (
    FrequencySeries,
    MarginReport,
    freq_response,
    gain_crossover,
    gain_reduction_at_zero_freq,
    margins,
    nmp_mag_at_zero_freq,
    nmp_phase_at_zero_freq,
    omega_min,
    phase_crossover,
)
from .ilt import TimeSamples, analytic_half_order, erfcx, invert, laplace_impulse
from .loopsim import (
    LoopConfig,
    StepMetrics,
    StepTrajectory,
    simulate_closed_step,
    simulate_open_step,
    step_metrics,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAS_NUMBA",
    "BranchCutError",
    "CancellerDesign",
    "DiscretePlant",
    "FirFilter",
    "FoTransferFunction",
    "FracZeroError",
    "FrequencySeries",
    "IltAccuracyWarning",
    "InstabilityError",
    "LoopConfig",
    "MarginReport",
    "MetricsUndefinedError",
    "NoSolutionError",
    "PlantParams",
    "PlantSpecError",
    "PoleAtOriginError",
    "PoleHitError",
    "StepMetrics",
    "StepTrajectory",
    "TimeSamples",
    "analytic_half_order",
    "augmented_plant",
    "benchmark_plant",
    "canceller_fir",
    "dc_gain",
    "design_boost_both",
    "design_same_dc",
    "design_same_pm",
    "erfcx",
    "evaluate",
    "evaluate_grid",
    "fir_apply",
    "fir_freq_response",
    "fractional_zero_term",
    "freq_response",
    "gain_crossover",
    "gain_reduction_at_zero_freq",
    "impulse_invariance",
    "invert",
    "laplace_impulse",
    "load_plant",
    "make_canceller",
    "margins",
    "nmp_mag_at_zero_freq",
    "nmp_phase_at_zero_freq",
    "normalize_dc",
    "omega_min",
    "phase_crossover",
    "plant_from_dict",
    "scale",
    "series",
    "simulate_closed_step",
    "simulate_open_step",
    "step_metrics",
    "zoh_discretize",
]
