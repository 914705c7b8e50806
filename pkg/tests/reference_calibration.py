"""Independent scalar-loop oracle for the candle calibration tests.

Deliberately written as plain sequential loops (mirroring the original
procedure's control flow) so it shares nothing with the vectorized package
code it cross-checks.
"""

import numpy as np

from fxregime.calibration import CalibrationConfig, CandleSeries


def reference_trace(opens, cfg: CalibrationConfig):
    n = len(opens)
    du = cfg.delta_up / 10_000.0
    dd = cfg.delta_down / 10_000.0
    if cfg.verbatim_appendix:
        bu, bd = du, dd
    else:
        bu = cfg.delta_back_up / 10_000.0
        bd = cfg.delta_back_down / 10_000.0
    before = [0] * n
    for i in range(max(cfg.candles_back_up, cfg.candles_back_down), n):
        if opens[i] - opens[i - cfg.candles_back_up] >= bu:
            before[i] = 1
        if opens[i - cfg.candles_back_down] - opens[i] >= bd:
            before[i] = -1
    counts = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for i in range(n - max(cfg.candles_up, cfg.candles_down)):
        row = 0 if before[i] == 1 else (1 if before[i] == -1 else 2)
        if opens[i + cfg.candles_up] - opens[i] >= du:
            col = 0
        elif opens[i] - opens[i + cfg.candles_down] >= dd:
            col = 1
        else:
            col = 2
        counts[row][col] += 1
    return before, counts


def pip_series(pips, bar_interval=1.0 / 252.0) -> CandleSeries:
    return CandleSeries(opens=1.0 + np.asarray(pips, dtype=float) * 1e-4, bar_interval=bar_interval)


def planted_200_bar_fixture():
    """Seeded 200-bar walk plus the window/threshold settings used with it."""
    rng = np.random.default_rng(7)
    pips = np.cumsum(rng.choice([-16, -4, 4, 16], p=[0.2, 0.3, 0.3, 0.2], size=200))
    cfg = CalibrationConfig(
        candles_back_up=3, candles_back_down=2, delta_back_up=10.0, delta_back_down=8.0,
        candles_up=2, candles_down=3, delta_up=10.0, delta_down=8.0,
    )
    return pip_series(pips), cfg
