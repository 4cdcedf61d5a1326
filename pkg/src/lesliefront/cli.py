"""Command-line entry point: ``lesliefront <command> <config> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical fault.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import ConfigError, DomainError, IntegrationFault, NoMonotoneFrontError, PreconditionError, \
    TruncationError
from .harness import fmt, parse_config, parse_sweep, run_single, run_sweep, summary_csv
from .waves import asymptotic_speed, minimal_wave_speed, semi_wave_slope, solve_wavefront, speed_function

EXIT_OK, EXIT_CONFIG, EXIT_FAULT = 0, 2, 3


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", key=None) from None


def _say(args, *lines):
    if not args.quiet:
        for line in lines:
            print(line)


def cmd_simulate(args):
    cfg = parse_config(_read(args.config))
    rec = run_single(cfg, out_dir=args.out, snapshots=args.snapshots)
    c = rec.classification
    _say(args, f"run_id   {rec.run_id}", f"verdict  {c['verdict']}", f"h_final  {fmt(c['h_final'])}"
         if c.get("h_final") is not None else "h_final  -")
    if c.get("speed") and c["speed"].get("slope") is not None:
        sp = c["speed"]
        _say(args, f"slope    {fmt(sp['slope'])}  bracket [{fmt(sp['bracket'][0])}, {fmt(sp['bracket'][1])}]"
                   f"  within={sp['within_bracket']}")
    if rec.error:
        print(rec.error, file=sys.stderr)
        return EXIT_FAULT
    return EXIT_OK


def cmd_thresholds(args):
    from .dichotomy import thresholds

    cfg = parse_config(_read(args.config))
    th = thresholds(cfg.params, cfg.profile, cfg.theta)
    for k, v in th.as_dict().items():
        print(f"{k:8s} {'-' if v is None else fmt(v)}")
    for note in th.notes:
        _say(args, f"# {note}")
    return EXIT_OK


def cmd_semiwave(args):
    cfg = parse_config(_read(args.config))
    p = cfg.params
    s_star = asymptotic_speed(p)
    print(f"s_star {fmt(s_star)}")
    print(f"residual {fmt(speed_function(p, s_star, None))}")
    c0 = 2.0 * np.sqrt(p.D * p.kappa)
    print("s,slope")
    for s in np.linspace(0.0, 0.95 * c0, args.samples):
        print(f"{fmt(s)},{fmt(semi_wave_slope(p.D, p.kappa, p.alpha, float(s)))}")
    return EXIT_OK


def cmd_waveprofile(args):
    cfg = parse_config(_read(args.config))
    p = cfg.params
    from .model import apriori_bounds

    M1 = apriori_bounds(p, cfg.profile).M1
    s = minimal_wave_speed(p) if args.speed is None else args.speed
    prof = solve_wavefront(p.D, p.kappa, M1, p.alpha, s)
    lines = ["component,xi,value"]
    lines += [f"U,{fmt(x)},{fmt(y)}" for x, y in zip(prof.xi_u, prof.U)]
    lines += [f"V,{fmt(x)},{fmt(y)}" for x, y in zip(prof.xi_v, prof.V)]
    text = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"wavefront_{fmt(s)}.csv")
        with open(path, "w", newline="") as fh:
            fh.write(text)
        _say(args, f"wrote {path}", f"residuals U {fmt(prof.residual_u)}  V {fmt(prof.residual_v)}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args):
    spec = parse_sweep(_read(args.config))
    if args.workers:
        spec = type(spec)(axes=spec.axes, base=spec.base, workers=args.workers, max_points=spec.max_points)
    rows, _ = run_sweep(spec, out_dir=args.out)
    if not args.quiet:
        sys.stdout.write(summary_csv(spec, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lesliefront", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="flat key = value configuration file")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress informational output")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="run one simulation and classify it")
    p.add_argument("--snapshots", type=int, metavar="K", help="number of profile snapshots to store")
    p.set_defaults(func=cmd_simulate)
    sub.add_parser("thresholds", parents=[common], help="print the analytic thresholds").set_defaults(
        func=cmd_thresholds)
    p = sub.add_parser("semiwave", parents=[common], help="print s* and a table of semi-wave slopes")
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=cmd_semiwave)
    p = sub.add_parser("waveprofile", parents=[common], help="compute a monotone wavefront")
    p.add_argument("--speed", type=float, help="wave speed (default: minimal speed)")
    p.set_defaults(func=cmd_waveprofile)
    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    p.add_argument("--workers", type=int, help="override sweep.workers")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, PreconditionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationFault, TruncationError, NoMonotoneFrontError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
