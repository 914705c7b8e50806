"""FX option pricing under a Markov-regime-switching jump diffusion.

The pipeline: describe per-state market parameters and the regime chain
(:mod:`fxregime.markov`), pick a jump-size law (:mod:`fxregime.jumps`), solve
the exponential-tilt parameters that make the discounted rate a martingale
and assemble the risk-neutral model (:mod:`fxregime.esscher`), then price
European calls by a Poisson-weighted Black-Scholes series averaged over exact
occupation-time draws (:mod:`fxregime.pricing`).  :mod:`fxregime.calibration`
estimates a three-state transition matrix from candle opens and embeds it as
a generator; :mod:`fxregime.cli` exposes everything as subcommands.
"""

from .calibration import (
    EURUSD_REFERENCE_MATRIX,
    CalibrationConfig,
    CandleSeries,
    TransitionEstimate,
    classify_states,
    embed_generator,
    estimate_transition_matrix,
    read_opens_csv,
)
from .errors import (
    DegenerateDataError,
    DivergenceError,
    FxRegimeError,
    InconsistencyError,
    InputError,
    InvalidModelError,
    NoSolutionError,
)
from .esscher import (
    EsscherParameters,
    RiskNeutralModel,
    build_risk_neutral_model,
    mean_jump_size,
    risk_neutral_intensity,
    solve_theta_c,
    solve_theta_j,
    solve_theta_j_bisection,
    transform_jump_law,
)
from .jumps import Custom, DoubleExponential, JumpDistribution, Normal
from .markov import (
    MarkovRegimeModel,
    OccupationTimes,
    RegimeParameters,
    occupation_char_function,
    regime_value_at,
    simulate_occupation,
    simulate_occupation_batch,
    stationary_distribution,
)
from .modelfile import default_model, parse_model_file, parse_model_text, write_model_file
from .pricing import (
    OccupationStatistics,
    PricingRequest,
    black_scholes_call,
    martingale_self_test,
    merton_series_price,
    occupation_statistics,
    poisson_weights,
    price_european_call,
    std_error,
)
from .sweeps import PriceRow, SweepConfig, ThetaRow, run_price_sweep, run_theta_sweep

__version__ = "0.1.0"

__all__ = [
    "CalibrationConfig",
    "CandleSeries",
    "Custom",
    "DegenerateDataError",
    "DivergenceError",
    "DoubleExponential",
    "EURUSD_REFERENCE_MATRIX",
    "EsscherParameters",
    "FxRegimeError",
    "InconsistencyError",
    "InputError",
    "InvalidModelError",
    "JumpDistribution",
    "MarkovRegimeModel",
    "NoSolutionError",
    "Normal",
    "OccupationStatistics",
    "OccupationTimes",
    "PriceRow",
    "PricingRequest",
    "RegimeParameters",
    "RiskNeutralModel",
    "SweepConfig",
    "ThetaRow",
    "TransitionEstimate",
    "black_scholes_call",
    "build_risk_neutral_model",
    "classify_states",
    "default_model",
    "embed_generator",
    "estimate_transition_matrix",
    "martingale_self_test",
    "mean_jump_size",
    "merton_series_price",
    "occupation_char_function",
    "occupation_statistics",
    "parse_model_file",
    "parse_model_text",
    "poisson_weights",
    "price_european_call",
    "read_opens_csv",
    "regime_value_at",
    "risk_neutral_intensity",
    "run_price_sweep",
    "run_theta_sweep",
    "simulate_occupation",
    "simulate_occupation_batch",
    "solve_theta_c",
    "solve_theta_j",
    "solve_theta_j_bisection",
    "stationary_distribution",
    "std_error",
    "transform_jump_law",
    "write_model_file",
]
