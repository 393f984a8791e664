"""Command-line entry point: ``rsrde {simulate,analytic,budget,rde-surface}``.

Settings come from an INI file with an ``[experiment]`` section, overridden
by ``--set key=value``. Exit codes: 0 success, 2 configuration error,
3 infeasible (R, D) target, 4 Arimoto non-convergence.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from . import harness
from .channels import AwgnBpskChannel, build_error_model, reliability_from_awgn, transmit_awgn_bpsk
from .galois import encode
from .rde import ArimotoConvergenceError, InfeasibleTarget, mbm_distortion, rde_surface, write_surface_csv

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NONCONVERGENCE = 4


def _grid(text):
    """``start:stop:count`` or a comma-separated list."""
    if ":" in text:
        a, b, c = text.split(":")
        return np.linspace(float(a), float(b), int(c))
    return np.array([float(x) for x in text.split(",")])


def _overrides(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise harness.ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(args) -> harness.ExperimentConfig:
    values = _overrides(args.set)
    if args.output:
        values["output"] = args.output
    if getattr(args, "workers", None):
        values["workers"] = str(args.workers)
    if args.config:
        return harness.ExperimentConfig.from_file(args.config, values)
    return harness.ExperimentConfig.from_mapping(values)


@contextlib.contextmanager
def _sink(path):
    if path and path != "-":
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def surface_model(cfg: harness.ExperimentConfig):
    """Error-pattern model behind ``rde-surface``: the m-SC rows, or frame 0
    of the first AWGN point."""
    if cfg.channel == "msc":
        return harness.msc_model(cfg, cfg.params[0])
    code = cfg.code
    ch = AwgnBpskChannel(cfg.params[0], cfg.bits, cfg.k / cfg.n)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0, 1, 0)).spawn(2)[0])
    cw = encode(rng.integers(0, code.field.m, code.k), code)
    return build_error_model(reliability_from_awgn(transmit_awgn_bpsk(cw, ch, rng), ch), cfg.ell)


def cmd_simulate(args):
    cfg = load_config(args)
    points = harness.run_experiment(cfg)
    with _sink(cfg.output) as fh:
        harness.write_curve(points, cfg, fh, "simulate")


def cmd_analytic(args):
    cfg = load_config(args)
    points = harness.analytic_curve(cfg)
    with _sink(cfg.output) as fh:
        harness.write_curve(points, cfg, fh, "analytic")


def cmd_budget(args):
    cfg = load_config(args)
    rows = harness.attempts_budget_report(cfg, args.exponents, args.steps)
    with _sink(cfg.output) as fh:
        harness.write_header(cfg, fh, "budget")
        fh.write("channel_param,target_f,required_r,attempts\n")
        for p, F, R, A in rows:
            fh.write(f"{p!r},{F!r},{R!r},{A!r}\n")


def cmd_surface(args):
    cfg = load_config(args)
    model = surface_model(cfg)
    rows = rde_surface(model, mbm_distortion(cfg.ell), _grid(args.s), _grid(args.t), args.method)
    with _sink(cfg.output) as fh:
        harness.write_header(cfg, fh, "rde-surface")
        write_surface_csv(rows, fh)


def build_parser():
    ap = argparse.ArgumentParser(prog="rsrde", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", help="INI file with an [experiment] section")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a setting")
        p.add_argument("-o", "--output", help="CSV path (default: stdout)")
        return p

    p = common(sub.add_parser("simulate", help="Monte-Carlo frame error rate"))
    p.add_argument("-j", "--workers", type=int, help="worker threads (does not change results)")
    p.set_defaults(func=cmd_simulate)
    p = common(sub.add_parser("analytic", help="2^-F approximation on the m-SC"))
    p.set_defaults(func=cmd_analytic)
    p = common(sub.add_parser("budget", help="attempts needed per target exponent"))
    p.add_argument("--exponents", help="comma-separated target exponents (default: a grid)")
    p.add_argument("--steps", type=int, default=11, help="grid size when --exponents is omitted")
    p.set_defaults(func=cmd_budget)
    p = common(sub.add_parser("rde-surface", help="dump (s, t, R, D, F) over a grid"))
    p.add_argument("--s", default="0:4:9", help="s grid, start:stop:count or a list")
    p.add_argument("--t", default="-6:-0.25:9", help="t grid, start:stop:count or a list")
    p.add_argument("--method", choices=("auto", "closed", "arimoto"), default="auto")
    p.set_defaults(func=cmd_surface)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InfeasibleTarget as exc:
        print(f"infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ArimotoConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (harness.ConfigError, ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
