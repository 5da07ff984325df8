"""Command-line driver: solve | sweep | lift | verify | extend.

Exit status: 0 success, 2 monitor or check failure, 3 aborted run or bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import continuation, verify
from .io import ConfigError, emit_trajectory_csv, parse_config, write_snapshot
from .spectral import GridSpec, harmonic_extension
from .stepper import RunAborted, run

EXIT_OK, EXIT_MONITOR, EXIT_ABORT = 0, 2, 3


def _ladder(text: str) -> list:
    return [float(s) for s in text.split(",") if s.strip()]


def _overrides(args) -> dict:
    return {"eps": args.eps, "tau0": args.tau0, "t_end": args.t_end}


def _out_dir(args, cfg) -> Path:
    out = Path(args.out or cfg.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args) -> int:
    cfg = parse_config(args.config, _overrides(args))
    out = _out_dir(args, cfg)
    status = EXIT_OK
    try:
        traj = run(cfg)
    except RunAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        traj, status = exc.trajectory, EXIT_ABORT
    emit_trajectory_csv(traj, out / "trajectory.csv")
    write_snapshot(traj.final, out / "final.snap", cfg.model, traj.times[-1])
    if status == EXIT_OK and not traj.monitors_ok:
        status = EXIT_MONITOR
    print(f"{len(traj.reports)} steps to t={traj.times[-1]:.6g}; "
          f"monitors {'ok' if traj.monitors_ok else 'FAILED'}")
    return status


def _report_json(report: continuation.ContinuationReport, name: str) -> dict:
    runs = []
    for r in report.per_run:
        entry = {name: r.parameter, "status": r.status, "min_u": r.min_u, "max_u": r.max_u,
                 "holder": r.holder, "monitors": r.monitors}
        entry.update({k: v for k, v in r.extra.items()})
        runs.append(entry)
    return {"ladder": report.parameter_ladder, "cauchy_l2": report.cauchy_l2,
            "cauchy_uniform": report.cauchy_uniform, "partial": report.partial,
            "runs": runs}


def _continuation(args, kind: str) -> int:
    cfg = parse_config(args.config, _overrides(args))
    out = _out_dir(args, cfg)
    if kind == "eps":
        report = continuation.eps_sweep(cfg, _ladder(args.eps_ladder), args.workers)
    else:
        report = continuation.delta_lift(cfg, _ladder(args.delta_ladder), workers=args.workers)
    for i, r in enumerate(report.per_run):
        emit_trajectory_csv(r.trajectory, out / f"run_{i:02d}_{kind}_{r.parameter:g}.csv")
    (out / f"{kind}_report.json").write_text(json.dumps(_report_json(report, kind), indent=2))
    for r in report.per_run:
        print(f"{kind}={r.parameter:g}: status={r.status} min_u={r.min_u:.4g} "
              f"max_u={r.max_u:.4g} holder={r.holder:.4g}")
    print("cauchy_l2:", " ".join(f"{d:.3e}" for d in report.cauchy_l2))
    if report.partial:
        return EXIT_ABORT
    return EXIT_OK if report.monitors_ok else EXIT_MONITOR


def cmd_sweep(args) -> int:
    return _continuation(args, "eps")


def cmd_lift(args) -> int:
    return _continuation(args, "delta")


def cmd_verify(args) -> int:
    grid = parse_config(args.config).grid if args.config else GridSpec(128)
    checks = verify.identity_suite(grid, args.count)
    print(verify.format_table(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_MONITOR


def cmd_extend(args) -> int:
    cfg = parse_config(args.config, _overrides(args))
    u0 = cfg.initial_field()
    out = _out_dir(args, cfg)
    xs = np.linspace(0.0, 1.0, args.nx)
    ys = np.linspace(0.0, args.ymax, args.ny)
    path = out / "extension.csv"
    with open(path, "w") as fh:
        fh.write("x,y,v\n")
        for y in ys:
            v = harmonic_extension(u0, xs, np.full_like(xs, y))
            for x, val in zip(xs, v):
                fh.write(f"{float(x)!r},{float(y)!r},{float(val)!r}\n")
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thinfilm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("config", nargs=None if config_required else "?")
        sp.add_argument("--eps", type=float)
        sp.add_argument("--tau0", type=float)
        sp.add_argument("--t-end", type=float, dest="t_end")
        sp.add_argument("--out")

    sp = sub.add_parser("solve", help="single run; writes trajectory.csv and final.snap")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="eps continuation ladder")
    common(sp)
    sp.add_argument("--eps-ladder", required=True)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("lift", help="delta-lifted initial data ladder")
    common(sp)
    sp.add_argument("--delta-ladder", required=True)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("verify", help="operator identities and inequality checks")
    common(sp, config_required=False)
    sp.add_argument("--count", type=int, default=200)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("extend", help="harmonic extension of u0 on a rectangle grid")
    common(sp)
    sp.add_argument("--nx", type=int, default=101)
    sp.add_argument("--ny", type=int, default=51)
    sp.add_argument("--ymax", type=float, default=1.0)
    sp.set_defaults(func=cmd_extend)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
