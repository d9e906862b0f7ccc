"""Command-line interface: ``stirap {simulate,sweep,efficiency,check,reproduce}``.

A JSON config is read from a path (``-`` for stdin); flags override its keys.
Without a config the linear-sine defaults (Omega0=2, T0=40, gamma=2) apply.
Exit codes: 0 success, 1 configuration error, 2 numeric-certification failure.
"""

import argparse
import json
import sys
from pathlib import Path

from . import experiments, reduced
from .config import AXES, ENGINES, parse_config
from .errors import ConfigError, NumericFailure, StirapError
from .protocols import KINDS, LINEAR_SINE

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

_DEFAULT_CONFIG = {"protocol": {"type": LINEAR_SINE, "omega0": 2.0, "t0": 40.0}, "gamma": 2.0}


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _engines(text):
    return [e.strip() for e in text.split(",") if e.strip()]


def _add_config_args(p, sweep=False):
    p.add_argument("config", nargs="?", help="JSON config file, or - for stdin")
    p.add_argument("--protocol", choices=KINDS)
    p.add_argument("--omega0", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--t-width", type=float)
    p.add_argument("--free-width", action="store_true", default=None)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-stride", type=int)
    p.add_argument("--engines", type=_engines, help=f"comma list from {','.join(ENGINES)}")
    if sweep:
        p.add_argument("--axis", choices=AXES)
        p.add_argument("--values", type=_floats)


def _read_config(args):
    if args.config is None:
        data = json.loads(json.dumps(_DEFAULT_CONFIG))
    else:
        try:
            text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    proto = data.setdefault("protocol", {})
    if not isinstance(proto, dict):
        raise ConfigError("protocol must be an object")
    if args.protocol is not None and args.protocol != proto.get("type"):
        proto["type"] = args.protocol
        if args.protocol == LINEAR_SINE:
            for k in ("tau", "t_width", "free_width"):
                proto.pop(k, None)
    for flag, key in (("omega0", "omega0"), ("t0", "t0"), ("tau", "tau"),
                      ("t_width", "t_width"), ("free_width", "free_width")):
        v = getattr(args, flag)
        if v is not None:
            proto[key] = v
    if args.t0 is not None and args.t_width is None and not proto.get("free_width"):
        proto.pop("t_width", None)
    for key in ("gamma", "delta"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    for flag, key in (("dt", "dt"), ("sample_stride", "sample_stride")):
        if getattr(args, flag) is not None:
            data.setdefault("integrator", {})[key] = getattr(args, flag)
    if args.engines is not None:
        data["engines"] = args.engines
    if getattr(args, "axis", None) is not None or getattr(args, "values", None) is not None:
        sweep = data.setdefault("sweep", {})
        if args.axis is not None:
            sweep["axis"] = args.axis
        if args.values is not None:
            sweep["values"] = args.values
    return parse_config(data)


def _margin_advisory(margins):
    for name, v in zip(("theta_dot/Omega", "3*pi*gamma*theta_dot/Omega^2"), margins):
        if v > experiments.MARGIN_ADVISORY:
            print(f"advisory: adiabaticity margin {name} = {v:.4g} > {experiments.MARGIN_ADVISORY}",
                  file=sys.stderr)


def cmd_simulate(args):
    run = _read_config(args)
    rec = experiments.run_single(run.sim, run.engines, out_dir=args.out, full=args.full)
    print(f"{'engine':<10} {'rho33_final':>20} {'rho_dd_final':>20}")
    for e, r in rec.engines.items():
        print(f"{e:<10} {experiments.fmt(r.rho33_final):>20} {experiments.fmt(r.rho_dd_final):>20}")
    for k, v in rec.equivalence.items():
        print(f"{k}: {v:.3e}")
    _margin_advisory(rec.margins)
    return EXIT_OK


def cmd_sweep(args):
    run = _read_config(args)
    spec = run.sweep()
    rows = experiments.run_sweep(spec, workers=args.workers)
    path = Path(args.out) / f"sweep_{spec.axis}.csv"
    experiments.write_sweep(rows, path)
    print(path.read_text(), end="")
    return EXIT_OK


def cmd_efficiency(args):
    run = _read_config(args)
    p = run.sim.protocol
    if p.kind != LINEAR_SINE:
        raise ConfigError("efficiency is the closed form for the linear_sine protocol only")
    rep = reduced.transfer_efficiency(run.sim.gamma, p.omega0, p.t0)
    print(json.dumps(rep.__dict__, indent=2))
    _margin_advisory((rep.adiabatic_margin_1, rep.adiabatic_margin_2))
    return EXIT_OK


def cmd_check(args):
    run = _read_config(args)
    results = experiments.check_config(run.sim)
    for name, ok, value, bound in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {value:.3e} (bound {bound:g})")
    return EXIT_OK if all(r[1] for r in results) else EXIT_NUMERIC


def cmd_reproduce(args):
    grids = {}
    for item in args.grid or []:
        axis, _, values = item.partition("=")
        if axis not in ("gamma", "omega0", "t0"):
            raise ConfigError(f"--grid axis must be gamma, omega0 or t0, got {axis!r}")
        grids[axis] = tuple(_floats(values))
    files = experiments.reproduce_figures(args.out, grids, workers=args.workers)
    for f in files:
        print(f)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="stirap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run engines on one configuration")
    _add_config_args(p)
    p.add_argument("--out", default="out")
    p.add_argument("--full", action="store_true", help="also dump the full complex density matrix")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="final values along one parameter axis")
    _add_config_args(p, sweep=True)
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("efficiency", help="closed-form transfer efficiency (instant)")
    _add_config_args(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("check", help="run the invariant suite on a configuration")
    _add_config_args(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", help="write the sinusoidal and gaussian figure bundles")
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int)
    p.add_argument("--grid", action="append", metavar="AXIS=V1,V2,...",
                   help="override a gaussian sweep grid")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StirapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
