"""Command-line entry point.

Exit codes: 0 success, 2 bad input (usage, config, channel file), 3 solver
failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .channel import dbm_to_watts, read_channel_csv, watts_to_dbm
from .dc_combining import optimize_dc, svd_transmit_baseline
from .errors import ConfigurationError, InvalidInputError, MimoWptError
from .rectenna import make_coefficients, pout_dc_combining
from .rf_combining import AnalogConfig, optimize_rf_analog, optimize_rf_svd
from .scaling_laws import ScalingInputs, analytic_average, monte_carlo_average

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

SCALING_HEADER = ("antennas", "scheme", "analytic_w", "montecarlo_w", "n_samples")


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimowpt",
        description="MIMO wireless power transfer beamforming with a nonlinear rectenna model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p, out=True):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key (repeatable)")
        if out:
            p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("optimize", help="optimize beamformers for one channel")
    p.add_argument("--channel", required=True, help="channel CSV (rows: receive antennas, re,im pairs)")
    p.add_argument("--scheme", required=True, choices=harness.SCHEMES)
    p.add_argument("--power-dbm", type=float, default=None,
                   help="transmit power in dBm (default: transmit_power_dbm from config)")
    p.add_argument("--seed", type=_u64, default=0, help="randomization seed")
    add_config(p, out=False)

    p = sub.add_parser("montecarlo", help="Monte Carlo sweep over the (M, Q) grid")
    add_config(p)
    p.add_argument("--seed", type=_u64, default=None, help="master seed override")
    p.add_argument("--threads", type=_positive_int, default=1)

    p = sub.add_parser("scaling", help="closed-form averages versus Monte Carlo")
    add_config(p)
    p.add_argument("--seed", type=_u64, default=None, help="master seed override")

    p = sub.add_parser("tightness", help="rank-1 and randomization ratios of analog beamforming")
    add_config(p)
    p.add_argument("--seed", type=_u64, default=None, help="master seed override")
    p.add_argument("--threads", type=_positive_int, default=1)
    return parser


def _settings(args):
    settings = harness.load_settings(args.config, args.overrides)
    if getattr(args, "seed", None) is not None and args.command != "optimize":
        settings["seed"] = args.seed
    return settings


def _vec(v) -> str:
    return " ".join(f"{float(z.real)!r}{float(z.imag):+}j" for z in np.asarray(v, dtype=complex))


def cmd_optimize(args) -> int:
    settings = _settings(args)
    cfg = harness.experiment_from_settings(settings)
    H = read_channel_csv(args.channel)
    power_dbm = settings["transmit_power_dbm"] if args.power_dbm is None else args.power_dbm
    P = dbm_to_watts(power_dbm)
    coeffs = make_coefficients(cfg.rectenna)
    r_load = cfg.rectenna.r_load
    lines = [f"scheme {args.scheme}", f"shape {H.shape[0]}x{H.shape[1]}",
             f"power_w {P!r}"]
    if args.scheme == "dc_svd":
        w_T = svd_transmit_baseline(H, P)
        p_out = pout_dc_combining(H, w_T, coeffs, r_load)
        lines.append(f"w_T {_vec(w_T)}")
    elif args.scheme == "dc_opt":
        res = optimize_dc(H, P, coeffs, replace(cfg.dc_opt, randomization_seed=args.seed), r_load)
        p_out = res.p_out
        lines += [f"w_T {_vec(res.w_T)}", f"iterations {res.iterations}",
                  f"converged {res.converged}", f"r1 {res.r1_ratio!r}",
                  f"extraction {res.extraction}"]
    else:
        if args.scheme == "rf_abf":
            acfg = AnalogConfig(l_randomizations=cfg.dc_opt.l_randomizations, seed=args.seed)
            res = optimize_rf_analog(H, P, coeffs, acfg, r_load)
        else:
            res = optimize_rf_svd(H, P, coeffs, r_load)
        p_out = res.p_out
        lines += [f"w_T {_vec(res.w_T)}", f"w_R {_vec(res.w_R)}"]
        if res.combiner is not None:
            lines.append("theta " + " ".join(repr(float(t)) for t in res.combiner.phases))
            lines += [f"r1 {res.r1_ratio!r}", f"r2 {res.r2_ratio!r}"]
    lines += [f"p_out_w {p_out!r}", f"p_out_dbm {watts_to_dbm(p_out)!r}"]
    print("\n".join(lines))
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    cfg = harness.experiment_from_settings(_settings(args))
    summary = harness.run_experiment(cfg, threads=args.threads)
    harness.emit_csv(summary, args.out)
    return EXIT_OK


def cmd_tightness(args) -> int:
    cfg = harness.experiment_from_settings(_settings(args))
    cfg = replace(cfg, schemes=("rf_abf",))
    summary = harness.run_experiment(cfg, threads=args.threads)
    harness.emit_csv(summary, args.out)
    return EXIT_OK


def scaling_rows(settings) -> list[tuple]:
    """Analytic and Monte Carlo averages for every scheme and antenna count."""
    cfg = harness.experiment_from_settings(settings)
    coeffs = make_coefficients(replace(cfg.rectenna, r_load=1.0))
    P = settings["scaling_power_w"]
    n = settings["scaling_samples"]
    trunc = settings["scaling_truncation"]
    if n < 1:
        raise ConfigurationError("scaling_samples must be at least 1")
    plan = [("miso_mrt", settings["scaling_miso_m"]),
            ("simo_dc", settings["scaling_simo_q"]),
            ("simo_rf_mrc", settings["scaling_simo_q"]),
            ("simo_rf_analog", settings["scaling_analog_q"])]
    rows = []
    for scheme, counts in plan:
        for k in counts:
            x = ScalingInputs.from_coefficients(k, P, coeffs, trunc)
            mc, _ = monte_carlo_average(scheme, k, P, coeffs, n, seed=cfg.seed, truncation=trunc)
            rows.append((k, scheme, analytic_average(scheme, x), mc, n))
    return rows


def cmd_scaling(args) -> int:
    rows = scaling_rows(_settings(args))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCALING_HEADER)
        for k, scheme, a, mc, n in rows:
            writer.writerow([k, scheme, format(a, ".16e"), format(mc, ".16e"), n])
    return EXIT_OK


_COMMANDS = {
    "optimize": cmd_optimize,
    "montecarlo": cmd_montecarlo,
    "scaling": cmd_scaling,
    "tightness": cmd_tightness,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigurationError, InvalidInputError) as exc:
        print(f"mimowpt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MimoWptError as exc:
        print(f"mimowpt {args.command}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"mimowpt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
