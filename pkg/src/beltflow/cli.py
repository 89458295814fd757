# cli.py
"""Command-line interface: simulate, check, constants, diff.

Exit codes: 0 ok, 1 usage/config error, 2 diagnostic hard-failure, 3 IO error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import build_scenario, initial_fields, parse_config
from .diagnostics import compute_constants
from .errors import ConfigError
from .io import read_snapshot_csv
from .run import run
from .scenario import validate_assumptions

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIAGNOSTIC = 2
EXIT_IO = 3


def _load_config(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    try:
        return parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    try:
        archive = run(config, progress=args.progress)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        f"simulated {archive.steps} steps, {len(archive.times)} snapshots, "
        f"{len(archive.failures)} diagnostic failures"
    )
    if archive.failures:
        for f in archive.failures[:20]:
            print(f"diagnostic failure: {f}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def cmd_check(args) -> int:
    config = _load_config(args.config)
    try:
        scenario = build_scenario(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = validate_assumptions(scenario)
    print(report)
    return EXIT_OK if report.passed else EXIT_CONFIG


def cmd_constants(args) -> int:
    config = _load_config(args.config)
    try:
        scenario = build_scenario(config)
        fields = initial_fields(config, scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    bc = compute_constants(
        scenario,
        fields,
        cutoff_stddevs=config.values["kernel.cutoff_stddevs"],
        mollify_vstat=config.values["diagnostics.mollify_vstat"],
    )
    t = scenario.t_end
    out = {
        "L_H": bc.L_H,
        "v_inf": bc.v_inf,
        "dv_inf": bc.dv_inf,
        "d2v_inf": bc.d2v_inf,
        "grad_tilde": bc.grad_tilde,
        "r_omega0_l1": bc.r_omega0_l1,
        "classes": {},
    }
    for cid, cc in bc.per_class.items():
        out["classes"][str(cid)] = {
            "epsilon": cc.epsilon,
            "C_inf": cc.c_inf,
            "K1": cc.k1,
            "K2": cc.k2,
            "c1": cc.c1,
            "c2": cc.c2,
            "tv0": cc.tv0,
            "rho0_l1": cc.rho0_l1,
            "rho0_linf": cc.rho0_linf,
            "log_Cx_at_t_end": bc.log_cx(t, cid),
            "log_Cxt_at_t_end": bc.log_cxt(t, cid),
        }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_diff(args) -> int:
    a, b = Path(args.archive_a), Path(args.archive_b)
    try:
        names_a = {p.name for p in a.glob("snapshot_*.csv")}
        names_b = {p.name for p in b.glob("snapshot_*.csv")}
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    common = sorted(names_a & names_b)
    if not common:
        print("error: no common snapshots between the archives", file=sys.stderr)
        return EXIT_CONFIG
    print("t,snapshot," + "dist_class_all")
    for name in common:
        try:
            ta, arrs_a = read_snapshot_csv(a / name)
            tb, arrs_b = read_snapshot_csv(b / name)
        except (OSError, ValueError) as exc:
            print(f"io error: {exc}", file=sys.stderr)
            return EXIT_IO
        if len(arrs_a) != len(arrs_b) or not math.isclose(ta, tb, rel_tol=1e-12, abs_tol=1e-15):
            print(f"error: incompatible snapshots in {name}", file=sys.stderr)
            return EXIT_CONFIG
        dists = [
            float(np.abs(xa - xb).sum()) for xa, xb in zip(arrs_a, arrs_b)
        ]
        cols = ",".join(f"{d:.17g}" for d in dists)
        print(f"{ta:.17g},{name},{cols}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="beltflow",
        description="Finite-volume solver for non-local conveyor-belt flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a simulation to t_end")
    p.add_argument("config")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check", help="validate a configuration")
    p.add_argument("config")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("constants", help="print the bound constants as JSON")
    p.add_argument("config")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("diff", help="cellwise L1 distances between two archives")
    p.add_argument("archive_a")
    p.add_argument("archive_b")
    p.set_defaults(fn=cmd_diff)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
