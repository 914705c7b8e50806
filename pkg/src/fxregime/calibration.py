"""Three-state (up / down / sideway) transition-matrix estimation from candle opens.

Each bar is labeled by looking back: *up* when the open rose by at least the
backward up-threshold over the up lookback window, then *down* (overwriting
up) when it fell by at least the backward down-threshold over the down
lookback window, else *sideway*; bars inside the warm-up prefix stay sideway.
For every bar before the forward boundary the successor regime is classified
from the forward windows -- up first, else down, else sideway -- and the 3x3
count matrix is row-normalized into transition probabilities.

Thresholds are quoted in pips and divided by 10^4 before comparison.  The
reference procedure this reproduces scales only its forward thresholds and
then reuses those same scaled values in the backward tests, never touching
its two backward-threshold arguments; ``verbatim_appendix=True`` reproduces
that exact behavior, while the default applies each named threshold (scaled)
to its own test.  The two modes coincide whenever the four thresholds are
equal, as in the canonical 30-bar/10-pip run.

The discrete matrix is bridged to a continuous-time generator by the
first-order embedding ``Q = (P - I) / dt`` with ``dt`` the bar interval in
years.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, InputError, InvalidModelError
from .markov import MarkovRegimeModel, _frozen_array

#: Row/column order of every matrix produced here.
STATE_NAMES = ("up", "down", "sideway")

#: One pip of quote-currency price.
PIP = 1e-4

#: Probability matrix reported for a 13-year EURUSD daily-candle run of this
#: procedure with 30-bar windows and 10-pip thresholds (rows/columns ordered
#: up, down, sideway).  The underlying data file is not distributed, so this
#: is a documentation fixture: useful as a realistic input, not reproducible
#: from shipped data.
EURUSD_REFERENCE_MATRIX = np.array(
    [
        [0.4408, 0.4527, 0.1065],
        [0.4818, 0.4149, 0.1033],
        [0.4820, 0.4119, 0.1061],
    ]
)
EURUSD_REFERENCE_MATRIX.setflags(write=False)


@dataclass(frozen=True)
class CandleSeries:
    """Ordered candle open prices with their bar spacing (years per bar)."""

    opens: np.ndarray
    bar_interval: float = 1.0 / 252.0

    def __post_init__(self):
        opens = np.asarray(self.opens, dtype=float)
        if opens.ndim != 1 or opens.size < 2:
            raise InputError("opens must be a 1-D sequence with at least two values")
        if not np.all(np.isfinite(opens)) or opens.min() <= 0.0:
            raise InputError("all opens must be finite and strictly positive")
        if self.bar_interval <= 0.0:
            raise InputError("bar_interval must be positive")
        object.__setattr__(self, "opens", _frozen_array(opens))

    def __len__(self) -> int:
        return self.opens.size


@dataclass(frozen=True)
class CalibrationConfig:
    """Window lengths (bars) and thresholds (pips) for regime classification."""

    candles_back_up: int = 30
    candles_back_down: int = 30
    delta_back_up: float = 10.0
    delta_back_down: float = 10.0
    candles_up: int = 30
    candles_down: int = 30
    delta_up: float = 10.0
    delta_down: float = 10.0
    verbatim_appendix: bool = False

    def __post_init__(self):
        for name in ("candles_back_up", "candles_back_down", "candles_up", "candles_down"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be >= 1")
        for name in ("delta_back_up", "delta_back_down", "delta_up", "delta_down"):
            if getattr(self, name) < 0.0:
                raise InputError(f"{name} must be >= 0")

    def backward_thresholds(self) -> tuple[float, float]:
        """Scaled thresholds used by the backward (labeling) tests."""
        if self.verbatim_appendix:
            return self.delta_up * PIP, self.delta_down * PIP
        return self.delta_back_up * PIP, self.delta_back_down * PIP

    def forward_thresholds(self) -> tuple[float, float]:
        return self.delta_up * PIP, self.delta_down * PIP


@dataclass(frozen=True)
class TransitionEstimate:
    """Row-stochastic 3x3 matrix with the raw transition counts behind it."""

    matrix: np.ndarray
    counts: np.ndarray
    bar_interval: float

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        counts = np.asarray(self.counts)
        if matrix.shape != (3, 3) or counts.shape != (3, 3):
            raise InvalidModelError("matrix and counts must both be 3x3")
        if counts.min() < 0:
            raise InvalidModelError("counts must be non-negative")
        row_sums = counts.sum(axis=1)
        if (row_sums == 0).any():
            raise DegenerateDataError(
                f"rows {[STATE_NAMES[i] for i in np.flatnonzero(row_sums == 0)]} have no observations"
            )
        if np.abs(matrix.sum(axis=1) - 1.0).max() > 1e-12:
            raise InvalidModelError("matrix rows must sum to 1")
        if np.abs(matrix - counts / row_sums[:, None]).max() > 1e-12:
            raise InvalidModelError("matrix must equal the row-normalized counts")
        if self.bar_interval <= 0.0:
            raise InvalidModelError("bar_interval must be positive")
        object.__setattr__(self, "matrix", _frozen_array(matrix))
        object.__setattr__(self, "counts", _frozen_array(counts, dtype=np.int64))


def classify_states(series: CandleSeries, cfg: CalibrationConfig) -> np.ndarray:
    """Label every bar +1 (up), -1 (down) or 0 (sideway).

    Bars before ``max(candles_back_up, candles_back_down)`` keep the sideway
    label.  When both backward tests pass, down wins (the tests run in
    sequence and the down test overwrites).
    """
    opens = series.opens
    n = opens.size
    warm = max(cfg.candles_back_up, cfg.candles_back_down)
    if n < warm + 1:
        raise InputError(f"series of length {n} is too short for lookback {warm}")
    threshold_up, threshold_down = cfg.backward_thresholds()
    labels = np.zeros(n, dtype=np.int8)
    tail = slice(warm, n)
    rose = opens[tail] - opens[warm - cfg.candles_back_up : n - cfg.candles_back_up] >= threshold_up
    fell = opens[warm - cfg.candles_back_down : n - cfg.candles_back_down] - opens[tail] >= threshold_down
    labels[tail] = np.where(fell, -1, np.where(rose, 1, 0))
    return labels


def estimate_transition_matrix(series: CandleSeries, cfg: CalibrationConfig) -> TransitionEstimate:
    """Count regime transitions over the forward windows and row-normalize.

    Every bar up to ``len(series) - max(candles_up, candles_down)`` is
    counted, including the sideway-labeled warm-up prefix.  A regime with no
    observations would divide by zero and raises ``DegenerateDataError``.
    """
    opens = series.opens
    n = opens.size
    warm = max(cfg.candles_back_up, cfg.candles_back_down)
    forward = max(cfg.candles_up, cfg.candles_down)
    if n < warm + forward + 1:
        raise InputError(
            f"series of length {n} is too short for lookback {warm} plus forward window {forward}"
        )
    labels = classify_states(series, cfg)
    threshold_up, threshold_down = cfg.forward_thresholds()
    upper = n - forward
    idx = np.arange(upper)
    goes_up = opens[idx + cfg.candles_up] - opens[idx] >= threshold_up
    goes_down = ~goes_up & (opens[idx] - opens[idx + cfg.candles_down] >= threshold_down)
    col = np.where(goes_up, 0, np.where(goes_down, 1, 2))
    lab = labels[:upper]
    row = np.where(lab == 1, 0, np.where(lab == -1, 1, 2))
    counts = np.bincount(row * 3 + col, minlength=9).reshape(3, 3)
    row_sums = counts.sum(axis=1)
    if (row_sums == 0).any():
        missing = [STATE_NAMES[i] for i in np.flatnonzero(row_sums == 0)]
        raise DegenerateDataError(f"no transitions observed out of state(s) {missing}")
    matrix = counts / row_sums[:, None]
    return TransitionEstimate(matrix=matrix, counts=counts, bar_interval=series.bar_interval)


def embed_generator(est, rate_cap: float = 1e6, bar_interval: float | None = None) -> MarkovRegimeModel:
    """First-order embedding Q = (P - I) / dt of a transition-probability matrix.

    ``est`` is a :class:`TransitionEstimate` or a plain row-stochastic matrix
    (then ``bar_interval`` must be given).  The diagonal is completed so rows
    sum to zero exactly.  The initial distribution of the returned chain is
    the stationary vector (identical for P and for Q, since pi P = pi iff
    pi Q = 0).  Rates above ``rate_cap`` (per year) are rejected: they signal
    a bar interval far too small for the matrix being embedded.
    """
    if isinstance(est, TransitionEstimate):
        p = np.asarray(est.matrix, dtype=float)
        dt = est.bar_interval
    else:
        p = np.asarray(est, dtype=float)
        if bar_interval is None:
            raise InputError("bar_interval is required when embedding a plain matrix")
        dt = float(bar_interval)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise InputError(f"matrix must be square, got shape {p.shape}")
    if dt <= 0.0:
        raise InputError("bar_interval must be positive")
    if p.min() < 0.0 or p.max() > 1.0 + 1e-12 or np.abs(p.sum(axis=1) - 1.0).max() > 1e-8:
        raise InputError("matrix must be row-stochastic")
    generator = p / dt
    np.fill_diagonal(generator, 0.0)
    np.fill_diagonal(generator, -generator.sum(axis=1))
    n = p.shape[0]
    if generator[~np.eye(n, dtype=bool)].min() < 0.0:
        raise InputError("embedding produced a negative off-diagonal rate")
    if np.abs(generator).max() > rate_cap:
        raise InputError(
            f"embedded rates reach {np.abs(generator).max():.3e}/year, above the cap {rate_cap:.3e}"
        )
    return MarkovRegimeModel(generator=generator)


def read_opens_csv(path) -> np.ndarray:
    """Read a single-column CSV of open prices; a non-numeric first line is a header."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"could not read {path}: {exc}") from exc
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip().strip(",")
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            if lineno == 1:
                continue
            raise InputError(f"{path}: line {lineno}: could not parse {raw!r} as a price") from None
    if not values:
        raise InputError(f"{path}: no numeric open prices found")
    return np.asarray(values)
