"""Command-line front end: price sweeps, tail-parameter sweeps, calibration.

Sweeps emit CSV (full double precision unless ``--round`` is given) and can
render the same table to a PNG with ``--plot``.  Output is deterministic for
a fixed configuration and seed: identical invocations produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calibration import (
    STATE_NAMES,
    CalibrationConfig,
    CandleSeries,
    embed_generator,
    estimate_transition_matrix,
    read_opens_csv,
)
from .errors import FxRegimeError
from .esscher import build_risk_neutral_model
from .jumps import DoubleExponential, Normal
from .markov import stationary_distribution
from .modelfile import default_model, parse_model_file, write_model_file
from .pricing import martingale_self_test
from .sweeps import CURVE_NAMES, SweepConfig, grid_values, run_price_sweep, run_theta_sweep


def _load_model(args):
    if args.config:
        return parse_model_file(args.config)
    return default_model()


def _fmt(value, round_digits) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    if round_digits is not None:
        value = round(value, round_digits)
    return repr(value)


def _emit_table(header, rows, out_path, round_digits) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(cell, round_digits) for cell in row))
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="model file with per-state parameters and the generator")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="CSV output path (default: stdout)")
    parser.add_argument("--round", type=int, default=None, dest="round_digits", metavar="N",
                        help="round emitted numbers to N decimals (default: full precision)")
    parser.add_argument("--plot", help="also render the sweep to this PNG file")


def _add_jump_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta1", type=float, default=10.0, help="double-exponential right tail rate")
    parser.add_argument("--theta2", type=float, default=10.0, help="double-exponential left tail rate")
    parser.add_argument("--p", type=float, default=0.5, help="double-exponential up-jump probability")
    parser.add_argument("--mean-normal", type=float, default=0.0, help="normal jump mean")
    parser.add_argument("--sigma-normal", type=float, default=0.1, help="normal jump deviation")


def _cmd_price_sweep(args) -> int:
    params, chain = _load_model(args)
    cfg = SweepConfig(
        s0=args.s0,
        maturity=args.maturity,
        sk_min=args.sk_min,
        sk_max=args.sk_max,
        sk_step=args.sk_step,
        theta1=args.theta1,
        theta2=args.theta2,
        p=args.p,
        mean_normal=args.mean_normal,
        sigma_normal=args.sigma_normal,
        approx_num=args.approx_num,
        steps_num=args.steps_num,
        curves=tuple(args.curves.split(",")),
        seed=args.seed,
    )
    rows = run_price_sweep(cfg, params, chain)
    _emit_table(
        ("s_over_k", "curve", "price", "std_error"),
        [(r.s_over_k, r.curve, r.price, r.std_error) for r in rows],
        args.out,
        args.round_digits,
    )
    if args.plot:
        from .plotting import render_price_sweep

        render_price_sweep(rows, args.plot, title=f"T = {cfg.maturity:g}, S0 = {cfg.s0:g}")
    return 0


def _cmd_theta_sweep(args) -> int:
    params, chain = _load_model(args)
    cfg = SweepConfig(
        s0=args.s0,
        maturity=args.maturity,
        p=args.p,
        approx_num=args.approx_num,
        steps_num=args.steps_num,
        seed=args.seed,
    )
    theta1_values = grid_values(args.theta1_min, args.theta1_max, args.theta1_step)
    theta2_values = grid_values(args.theta2_min, args.theta2_max, args.theta2_step)
    rows = run_theta_sweep(cfg, params, chain, theta1_values, theta2_values)
    _emit_table(
        ("theta1", "theta2", "price", "std_error", "error"),
        [(r.theta1, r.theta2, r.price, r.std_error, r.error) for r in rows],
        args.out,
        args.round_digits,
    )
    if args.plot:
        from .plotting import render_theta_sweep

        render_theta_sweep(rows, args.plot, title=f"S/K = 1, T = {cfg.maturity:g}")
    return 0 if all(not r.error for r in rows) else 1


def _cmd_calibrate(args) -> int:
    opens = read_opens_csv(args.input)
    series = CandleSeries(opens=opens, bar_interval=args.bar_interval)
    cfg = CalibrationConfig(
        candles_back_up=args.candles_back_up,
        candles_back_down=args.candles_back_down,
        delta_back_up=args.delta_back_up,
        delta_back_down=args.delta_back_down,
        candles_up=args.candles_up,
        candles_down=args.candles_down,
        delta_up=args.delta_up,
        delta_down=args.delta_down,
        verbatim_appendix=args.verbatim_appendix,
    )
    est = estimate_transition_matrix(series, cfg)
    chain = embed_generator(est)

    def show(title, matrix, fmt):
        print(title)
        for name, row in zip(STATE_NAMES, matrix):
            cells = "  ".join(fmt % v for v in row)
            print(f"  {name:<8} {cells}")

    show("transition counts:", est.counts, "%6d")
    show("probability matrix:", est.matrix, "%.4f")
    show("generator (1/year):", chain.generator, "%12.6f")
    pi = stationary_distribution(chain.generator)
    print("stationary distribution: " + "  ".join(f"{v:.6f}" for v in pi))
    if args.write_model:
        params, _ = default_model()
        if params.n_states != chain.n_states:
            raise FxRegimeError("default parameters do not match the calibrated state count")
        write_model_file(args.write_model, params, chain)
        print(f"model written to {args.write_model} (calibrated chain, illustrative default parameters)")
    return 0


def _cmd_selftest(args) -> int:
    params, chain = _load_model(args)
    if args.jump == "normal":
        dist = Normal(args.mean_normal, args.sigma_normal)
    else:
        dist = DoubleExponential(args.theta1, args.theta2, args.p)
    model = build_risk_neutral_model(params, chain, dist)
    estimate, std_error = martingale_self_test(
        model, args.maturity, args.paths, args.steps_num, args.seed
    )
    deviation = abs(estimate - 1.0)
    passed = deviation <= 3.0 * std_error
    print(f"martingale self-test ({args.jump}, T={args.maturity:g}, {args.paths} paths)")
    print(f"  estimate  = {estimate!r}")
    print(f"  std_error = {std_error!r}")
    print(f"  |estimate - 1| = {deviation:.3e} vs 3*std_error = {3.0 * std_error:.3e}")
    print(f"  {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fxregime",
        description="Regime-switching jump-diffusion FX option pricing experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("price-sweep", help="price curves over an S/K grid")
    _add_model_flags(ps)
    ps.add_argument("--s0", type=float, default=1.0, help="spot FX rate at time zero")
    ps.add_argument("--maturity", type=float, default=0.5, help="maturity in years")
    ps.add_argument("--sk-min", type=float, default=0.8)
    ps.add_argument("--sk-max", type=float, default=1.25)
    ps.add_argument("--sk-step", type=float, default=0.05)
    _add_jump_flags(ps)
    ps.add_argument("--approx-num", type=int, default=10_000, help="occupation-time Monte Carlo samples")
    ps.add_argument("--steps-num", type=int, default=1, help="time steps (interface parity; see docs)")
    ps.add_argument("--curves", default=",".join(CURVE_NAMES),
                    help="comma-separated subset of: " + ", ".join(CURVE_NAMES))
    _add_output_flags(ps)
    ps.set_defaults(func=_cmd_price_sweep)

    ts = sub.add_parser("theta-sweep", help="price at S/K = 1 over a (theta1, theta2) grid")
    _add_model_flags(ts)
    ts.add_argument("--s0", type=float, default=1.0)
    ts.add_argument("--maturity", type=float, default=0.5)
    ts.add_argument("--p", type=float, default=0.5)
    ts.add_argument("--theta1-min", type=float, default=2.0)
    ts.add_argument("--theta1-max", type=float, default=20.0)
    ts.add_argument("--theta1-step", type=float, default=1.0)
    ts.add_argument("--theta2-min", type=float, default=10.0)
    ts.add_argument("--theta2-max", type=float, default=10.0)
    ts.add_argument("--theta2-step", type=float, default=1.0)
    ts.add_argument("--approx-num", type=int, default=10_000)
    ts.add_argument("--steps-num", type=int, default=1)
    _add_output_flags(ts)
    ts.set_defaults(func=_cmd_theta_sweep)

    cal = sub.add_parser("calibrate", help="estimate the 3-state transition matrix from candle opens")
    cal.add_argument("--input", required=True, help="single-column CSV of open prices")
    cal.add_argument("--candles-back-up", type=int, default=30)
    cal.add_argument("--candles-back-down", type=int, default=30)
    cal.add_argument("--delta-back-up", type=float, default=10.0, help="backward up threshold (pips)")
    cal.add_argument("--delta-back-down", type=float, default=10.0, help="backward down threshold (pips)")
    cal.add_argument("--candles-up", type=int, default=30)
    cal.add_argument("--candles-down", type=int, default=30)
    cal.add_argument("--delta-up", type=float, default=10.0, help="forward up threshold (pips)")
    cal.add_argument("--delta-down", type=float, default=10.0, help="forward down threshold (pips)")
    cal.add_argument("--bar-interval", type=float, default=1.0 / 252.0, help="years per candle (default 1/252)")
    cal.add_argument("--verbatim-appendix", action="store_true",
                     help="reproduce the reference script exactly: backward tests reuse the scaled forward thresholds")
    cal.add_argument("--write-model", help="write a model file with the embedded generator")
    cal.set_defaults(func=_cmd_calibrate)

    st = sub.add_parser("selftest", help="martingale check of the measure change")
    _add_model_flags(st)
    st.add_argument("--jump", choices=("double_exponential", "normal"), default="double_exponential")
    _add_jump_flags(st)
    st.add_argument("--maturity", type=float, default=0.5)
    st.add_argument("--paths", type=int, default=100_000)
    st.add_argument("--steps-num", type=int, default=1)
    st.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FxRegimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
