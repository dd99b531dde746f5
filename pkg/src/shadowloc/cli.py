"""Command-line entry point: ``shadowloc <subcommand> ...``.

Exit codes: 0 success, 1 error (diagnostic on stderr), 2 localization check failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .engine import Mode, check_localizable, construct_incremental, propagate
from .errors import ShadowLocError
from .experiment import SweepConfig, generate_instance, place_kernel, run_sweep
from .graph import NodeRecord
from .geometry import Point2
from .render import render_svg

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAIL = 0, 1, 2


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi < lo:
        raise ValueError(f"bad grid {lo}..{hi} step {step}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # rounding strips float noise from the step sums; the lower bound is kept verbatim
    return [lo] + [round(lo + k * step, 10) for k in range(1, count)]


def cmd_gen(args) -> int:
    g = generate_instance(args.nodes, args.radius, args.seed)
    io.write_graph(g, args.out)
    return EXIT_OK


def cmd_localize(args) -> int:
    g = propagate(io.read_graph(args.inp).reset_states(), Mode(args.algo))
    io.write_graph(g, args.out)
    print(f"localized {len(g.localized_ids())}/{g.n} nodes, {len(g.shadow_edges)} shadow edges")
    return EXIT_OK


def cmd_check(args) -> int:
    res = check_localizable(io.read_graph(args.inp))
    if res:
        print("success")
        return EXIT_OK
    print(f"fail: {res.reason}")
    return EXIT_CHECK_FAIL


def cmd_construct(args) -> int:
    kernel_ss, body_ss = np.random.SeedSequence(args.seed).spawn(2)
    tri = place_kernel(np.random.default_rng(kernel_ss), args.radius)
    seed = [NodeRecord(k, Point2(float(tri[k, 0]), float(tri[k, 1])), True) for k in range(3)]
    res = construct_incremental(seed, args.nodes, args.radius, np.random.default_rng(body_ss))
    io.write_graph(res.graph, args.out)
    print(
        f"admitted {res.accepted}, rejected {res.rejected}, "
        f"localized {len(res.graph.localized_ids())}/{res.graph.n}, "
        f"{len(res.graph.shadow_edges)} shadow edges"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        rho_grid=_grid(args.rho_min, args.rho_max, args.rho_step),
        n_grid=[int(v) for v in _grid(args.n_min, args.n_max, args.n_step)],
        runs=args.runs,
        base_seed=args.seed,
        mode=args.mode,
    )
    res = run_sweep(cfg, jobs=args.jobs)
    with open(args.out, "w", newline="") as fh:
        io.write_sweep_csv(res.rows, fh)
    if args.summary:
        with open(args.summary, "w", newline="") as fh:
            io.write_summary_csv(res.cells, fh)
    if res.skipped:
        side = Path(args.out).with_suffix(".skipped.csv")
        with open(side, "w", newline="") as fh:
            io.write_skipped_csv(res.skipped, fh)
        print(f"{len(res.skipped)} run(s) skipped, see {side}", file=sys.stderr)
    return EXIT_OK


def cmd_render(args) -> int:
    g = io.read_graph(args.inp)
    Path(args.out).write_text(render_svg(g, all_shadow_edges=args.all_shadow_edges))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shadowloc", description="Shadow-edge sensor network localization")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="generate a random unit-disk instance")
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("localize", help="close a graph under TNC or shadow-edge localization")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--algo", choices=[m.value for m in Mode], default="shadow")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_localize)

    s = sub.add_parser("check", help="graph localization check (exit 0 success, 2 fail)")
    s.add_argument("--in", dest="inp", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("construct", help="grow a localized network incrementally")
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("sweep", help="Monte-Carlo sweep over rho and N")
    s.add_argument("--rho-min", type=float, default=0.10)
    s.add_argument("--rho-max", type=float, default=0.50)
    s.add_argument("--rho-step", type=float, default=0.05)
    s.add_argument("--n-min", type=int, default=10)
    s.add_argument("--n-max", type=int, default=100)
    s.add_argument("--n-step", type=int, default=10)
    s.add_argument("--runs", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["both", "tnc", "shadow"], default="both")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--summary", help="also write per-cell means to this CSV")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("render", help="draw a graph as SVG")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--all-shadow-edges", action="store_true",
                   help="draw every qualifying shadow anchor, not only the one used")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ShadowLocError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"shadowloc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
