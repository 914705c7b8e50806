"""Experiment sweeps: price vs S/K curves and price vs jump-tail parameters.

All curves within one sweep share a single batch of occupation-time draws
(common random numbers), so orderings between curves are pathwise rather than
statistical: a curve with more jump variance dominates at every grid point,
not merely in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergenceError,
    FxRegimeError,
    InconsistencyError,
    InvalidModelError,
    NoSolutionError,
)
from .esscher import build_risk_neutral_model
from .jumps import DoubleExponential, Normal
from .markov import MarkovRegimeModel, RegimeParameters, simulate_occupation_batch
from .pricing import _merton_series_batch, std_error

CURVE_NAMES = ("double_exponential", "normal", "no_jump")

#: Series truncation used by every sweep.
SERIES_TOL = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    """Grid and model settings for one experiment run."""

    s0: float = 1.0
    maturity: float = 0.5
    sk_min: float = 0.8
    sk_max: float = 1.25
    sk_step: float = 0.05
    theta1: float = 10.0
    theta2: float = 10.0
    p: float = 0.5
    mean_normal: float = 0.0
    sigma_normal: float = 0.1
    approx_num: int = 10_000
    steps_num: int = 1
    curves: tuple[str, ...] = CURVE_NAMES
    seed: int = 0

    def __post_init__(self):
        if self.s0 <= 0.0 or self.maturity <= 0.0:
            raise InvalidModelError("s0 and maturity must be positive")
        if not (self.sk_min <= self.sk_max and self.sk_step > 0.0):
            raise InvalidModelError("require sk_min <= sk_max and sk_step > 0")
        if self.approx_num < 1 or self.steps_num < 1:
            raise InvalidModelError("approx_num and steps_num must be >= 1")
        unknown = [c for c in self.curves if c not in CURVE_NAMES]
        if unknown:
            raise InvalidModelError(f"unknown curves {unknown}; expected subset of {CURVE_NAMES}")
        object.__setattr__(self, "curves", tuple(self.curves))

    def sk_grid(self) -> np.ndarray:
        count = int(math.floor((self.sk_max - self.sk_min) / self.sk_step + 1e-9)) + 1
        return np.round(self.sk_min + self.sk_step * np.arange(count), 10)


@dataclass(frozen=True)
class PriceRow:
    s_over_k: float
    curve: str
    price: float
    std_error: float


@dataclass(frozen=True)
class ThetaRow:
    theta1: float
    theta2: float
    price: float
    std_error: float
    error: str = ""


def _curve_model(cfg: SweepConfig, curve: str, params: RegimeParameters, chain: MarkovRegimeModel):
    if curve == "double_exponential":
        return build_risk_neutral_model(params, chain, DoubleExponential(cfg.theta1, cfg.theta2, cfg.p))
    if curve == "normal":
        return build_risk_neutral_model(params, chain, Normal(cfg.mean_normal, cfg.sigma_normal))
    # the jump law is irrelevant once every intensity is zero
    no_jump = RegimeParameters(
        mu=params.mu, sigma=params.sigma, lam=np.zeros(params.n_states), r_d=params.r_d, r_f=params.r_f
    )
    return build_risk_neutral_model(no_jump, chain, Normal(0.0, 0.01))


def run_price_sweep(
    cfg: SweepConfig, params: RegimeParameters, chain: MarkovRegimeModel
) -> list[PriceRow]:
    """Price every requested curve on the S/K grid under common random numbers.

    Rows are ordered by grid point first, then by the order of ``cfg.curves``.
    """
    rng = np.random.default_rng(cfg.seed)
    occupation, _ = simulate_occupation_batch(chain, cfg.maturity, cfg.approx_num, rng)
    weights = occupation / cfg.maturity
    r_avg = weights @ (params.r_d - params.r_f)
    u_avg = weights @ params.sigma**2

    per_curve = {}
    for curve in cfg.curves:
        model = _curve_model(cfg, curve, params, chain)
        per_curve[curve] = (weights @ model.lambda_q, model.jump_q.variance())

    rows: list[PriceRow] = []
    for sk in cfg.sk_grid():
        strike = cfg.s0 / sk
        for curve in cfg.curves:
            lam_avg, sigma_j_sq = per_curve[curve]
            values = _merton_series_batch(
                cfg.s0, strike, cfg.maturity, r_avg, u_avg, lam_avg, sigma_j_sq, SERIES_TOL
            )
            rows.append(PriceRow(float(sk), curve, float(values.mean()), std_error(values)))
    return rows


def run_theta_sweep(
    cfg: SweepConfig,
    params: RegimeParameters,
    chain: MarkovRegimeModel,
    theta1_values,
    theta2_values,
) -> list[ThetaRow]:
    """Price the double-exponential model at S/K = 1 over a (theta1, theta2) grid.

    Grid points whose tilt is inadmissible (theta1 <= 1, empty root interval,
    or a solver failure) are emitted with an error code instead of aborting
    the sweep.
    """
    rng = np.random.default_rng(cfg.seed)
    occupation, _ = simulate_occupation_batch(chain, cfg.maturity, cfg.approx_num, rng)
    weights = occupation / cfg.maturity
    r_avg = weights @ (params.r_d - params.r_f)
    u_avg = weights @ params.sigma**2

    rows: list[ThetaRow] = []
    for t1 in np.atleast_1d(theta1_values):
        for t2 in np.atleast_1d(theta2_values):
            t1f, t2f = float(t1), float(t2)
            if t1f <= 1.0:
                rows.append(ThetaRow(t1f, t2f, math.nan, math.nan, "theta1-not-above-1"))
                continue
            try:
                model = build_risk_neutral_model(params, chain, DoubleExponential(t1f, t2f, cfg.p))
            except (DivergenceError, NoSolutionError, InconsistencyError, InvalidModelError) as exc:
                rows.append(ThetaRow(t1f, t2f, math.nan, math.nan, _error_code(exc)))
                continue
            values = _merton_series_batch(
                cfg.s0,
                cfg.s0,
                cfg.maturity,
                r_avg,
                u_avg,
                weights @ model.lambda_q,
                model.jump_q.variance(),
                SERIES_TOL,
            )
            rows.append(ThetaRow(t1f, t2f, float(values.mean()), std_error(values)))
    return rows


def _error_code(exc: FxRegimeError) -> str:
    return {
        DivergenceError: "divergence",
        NoSolutionError: "no-solution",
        InconsistencyError: "inconsistent",
        InvalidModelError: "invalid-model",
    }.get(type(exc), "error")


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid used by the CLI flags."""
    if hi < lo or step <= 0.0:
        raise InvalidModelError("require hi >= lo and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 10)
