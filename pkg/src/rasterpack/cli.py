"""Command line interface: solve, nfp, oracle, render, bench."""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from pathlib import Path

from . import _kernels, oracle
from .driver import SolverConfig, gcdh
from .errors import (EmptyRaster, NoValidPosition, ParseError,
                     PieceExceedsWidth, RasterpackError, ValidationError)
from .instances import InstanceFile, build_problem, parse_instance
from .nfp import build_nfp
from .raster import rotate_and_rasterize
from .results import load_result, result_from_run

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RASTER = 3


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width-px", type=int, required=True, help="container width in pixels")
    p.add_argument("--time-limit", type=float, default=60.0, help="search seconds")
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--rdec", type=float, default=0.02, help="shrink ratio")
    p.add_argument("--rinc", type=float, default=0.005, help="extend ratio")
    p.add_argument("--kmax", type=int, default=200,
                   help="non-improving CDH calls before a restart")
    p.add_argument("--corner-reduction", choices=("on", "off"), default="on",
                   help="reduce line-search candidates via detected corners")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rasterpack",
                                 description="Raster-model strip packing solver")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="pack one instance")
    sp.add_argument("--instance", required=True)
    _add_solver_flags(sp)
    sp.add_argument("--out", help="result file path (JSON)")
    sp.add_argument("--svg", help="layout drawing path (SVG)")

    np_ = sub.add_parser("nfp", help="dump one pair's no-fit set as a portable bitmap")
    np_.add_argument("--instance", required=True)
    np_.add_argument("--width-px", type=int, required=True)
    np_.add_argument("--shape-a", required=True)
    np_.add_argument("--rot-a", type=int, default=0)
    np_.add_argument("--shape-b", required=True)
    np_.add_argument("--rot-b", type=int, default=0)
    np_.add_argument("--out", required=True)

    op = sub.add_parser("oracle", help="brute-force self-checks of the engine")
    op.add_argument("--runs", type=int, default=200, help="random shape pairs")
    op.add_argument("--seed", type=int, default=0)
    op.add_argument("--grid-max", type=int, default=16, help="max shape dimension (<=32)")
    op.add_argument("--corrupt", action="store_true",
                    help="fault-injection hook: corrupt one NFP to prove mismatches are caught")

    rp = sub.add_parser("render", help="draw a stored result as SVG")
    rp.add_argument("--result", required=True)
    rp.add_argument("--instance", required=True)
    rp.add_argument("--svg", required=True)

    bp = sub.add_parser("bench", help="run a directory of instances")
    bp.add_argument("--instance", required=True, help="directory of instance files")
    _add_solver_flags(bp)
    bp.add_argument("--runs", type=int, default=1, help="seeds per instance")
    bp.add_argument("--out", required=True, help="CSV summary path; figures go alongside")
    bp.add_argument("--corner-reduction-mode", choices=("on", "off", "both"),
                    default=None, help="overrides --corner-reduction for paired runs")
    return ap


def run_solve(inst: InstanceFile, config: SolverConfig):
    """Shared solve path: preprocess (timed separately), search, package result."""
    t0 = time.monotonic()
    problem = build_problem(inst, config.width_px)
    preprocess = time.monotonic() - t0
    best, record = gcdh(problem, config)
    record.preprocess_seconds = preprocess
    shape_ids = [problem.class_shape_ids[problem.piece_class[i]]
                 for i in range(problem.n)]
    orientations = [problem.orientation_degrees(i, int(best.opos[i]))
                    for i in range(problem.n)]
    cfg_echo = {
        "seed": config.seed,
        "r_dec": config.r_dec,
        "r_inc": config.r_inc,
        "k_max": config.k_max,
        "time_limit": config.time_limit,
        "corner_reduction": config.corner_reduction,
        "width_px": config.width_px,
    }
    result = result_from_run(inst.name, problem, best, record, cfg_echo,
                             shape_ids, orientations)
    return problem, best, record, result


def _cmd_solve(args) -> int:
    try:
        inst = parse_instance(args.instance)
    except (ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    config = SolverConfig(width_px=args.width_px, r_dec=args.rdec, r_inc=args.rinc,
                          k_max=args.kmax, time_limit=args.time_limit,
                          seed=args.seed,
                          corner_reduction=args.corner_reduction == "on")
    try:
        problem, best, record, result = run_solve(inst, config)
    except (EmptyRaster, PieceExceedsWidth, NoValidPosition) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RASTER
    if args.out:
        result.save(args.out)
    if args.svg:
        from .render import render_svg
        Path(args.svg).write_text(render_svg(result, inst))
    print(f"{inst.name}: L*={record.best_length}px "
          f"density={record.density_percent:.2f}% "
          f"cdh_calls={record.cdh_calls} "
          f"time_to_best={record.time_to_best:.2f}s "
          f"preprocess={record.preprocess_seconds:.2f}s")
    return EXIT_OK


def _cmd_nfp(args) -> int:
    try:
        inst = parse_instance(args.instance)
    except (ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    by_id = {s.id: s for s in inst.shapes}
    for sid in (args.shape_a, args.shape_b):
        if sid not in by_id:
            print(f"error: unknown shape id {sid!r}", file=sys.stderr)
            return EXIT_INPUT
    scale = args.width_px / inst.container_width
    try:
        a = rotate_and_rasterize(by_id[args.shape_a].outline, args.rot_a, scale)
        b = rotate_and_rasterize(by_id[args.shape_b].outline, args.rot_b, scale)
    except EmptyRaster as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RASTER
    nfp = build_nfp(a, b)
    Path(args.out).write_text(nfp_to_pbm(nfp))
    print(f"wrote {args.out}: bbox {nfp.bbox}, {nfp.m} strips, "
          f"{len(nfp.corners)} corners")
    return EXIT_OK


def nfp_to_pbm(nfp) -> str:
    """P1 portable bitmap of the no-fit set, one bit per relative offset.

    The header comment records the offset-space origin of the top-left bit;
    rows run from the top (max y) down.
    """
    x0, y0, x1, y1 = nfp.bbox
    w = x1 - x0 + 1
    h = y1 - y0 + 1
    lines = ["P1", f"# origin {x0} {y1}", f"{w} {h}"]
    for y in range(y1, y0 - 1, -1):
        row = ["0"] * w
        for a, b in nfp.ds.row_strips(y):
            for x in range(a, b + 1):
                row[x - x0] = "1"
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"


def _cmd_oracle(args) -> int:
    if args.grid_max > 32:
        print("error: --grid-max must be <= 32", file=sys.stderr)
        return EXIT_INPUT
    rng = random.Random(args.seed)
    checks = failures = 0
    corrupt_target = rng.randrange(args.runs) if args.corrupt else -1
    depth_checks = 0
    for trial in range(args.runs):
        sa = oracle.random_shape(rng, args.grid_max)
        sb = oracle.random_shape(rng, args.grid_max)
        ca, cb = sa.cell_set(), sb.cell_set()
        nfp = build_nfp(sa, sb)
        engine = set(map(tuple, nfp.cell_array().tolist()))
        if trial == corrupt_target:
            victim = next(iter(engine))
            engine = engine - {victim}
        brute = oracle.brute_nfp(ca, cb)
        checks += 1
        if engine != brute:
            failures += 1
            print(f"nfp mismatch on pair {trial}")
            continue
        inside = sorted(brute)
        for _ in range(3):
            u = inside[rng.randrange(len(inside))]
            for axis in ("horizontal", "vertical"):
                depth_checks += 1
                checks += 1
                if nfp.penetration_depth(u, axis) != oracle.brute_depth(ca, cb, u, axis):
                    failures += 1
                    print(f"depth mismatch on pair {trial} at {u} ({axis})")
    # layout feasibility: engine zero-penalty claim vs brute force
    for trial in range(max(1, args.runs // 10)):
        shapes = [oracle.random_shape(rng, args.grid_max) for _ in range(4)]
        W = rng.randint(args.grid_max, 2 * args.grid_max)
        L = rng.randint(args.grid_max, 3 * args.grid_max)
        placed = []
        ok = True
        for s in shapes:
            if s.l > L or s.w > W:
                ok = False
                break
            x = rng.randint(s.l // 2, L - (s.l - s.l // 2))
            y = rng.randint(s.w // 2, W - (s.w - s.w // 2))
            placed.append((s, (x, y)))
        if not ok:
            continue
        engine_feasible = True
        for i in range(len(placed)):
            for j in range(i + 1, len(placed)):
                si, (xi, yi) = placed[i]
                sj, (xj, yj) = placed[j]
                if build_nfp(si, sj).pair_penalty((xj - xi, yj - yi)) > 0:
                    engine_feasible = False
        brute_feasible = oracle.layout_feasible(
            [(s.cell_set(), pos) for s, pos in placed], W, L)
        checks += 1
        if engine_feasible != brute_feasible:
            failures += 1
            print(f"feasibility mismatch on layout {trial}")
    print(f"oracle: {checks} checks, {failures} failures "
          f"({args.runs} NFP pairs, {depth_checks} depth queries)")
    return EXIT_OK if failures == 0 else 1


def _cmd_render(args) -> int:
    try:
        inst = parse_instance(args.instance)
        result = load_result(args.result)
    except (ParseError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    from .render import render_svg
    try:
        Path(args.svg).write_text(render_svg(result, inst))
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {args.svg}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    directory = Path(args.instance)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    files = sorted(directory.glob("*.json"))
    mode = args.corner_reduction_mode or args.corner_reduction
    modes = [True, False] if mode == "both" else [mode == "on"]
    rows = []
    figure_runs: dict[str, list] = {}
    for path in files:
        try:
            inst = parse_instance(path)
        except (ParseError, ValidationError) as e:
            print(f"skipping {path}: {e}", file=sys.stderr)
            continue
        for reduction in modes:
            for run in range(args.runs):
                seed = args.seed + run
                config = SolverConfig(width_px=args.width_px, r_dec=args.rdec,
                                      r_inc=args.rinc, k_max=args.kmax,
                                      time_limit=args.time_limit, seed=seed,
                                      corner_reduction=reduction)
                _, best, record, result = run_solve(inst, config)
                rows.append({
                    "instance": inst.name,
                    "seed": seed,
                    "corner_reduction": int(reduction),
                    "width_px": args.width_px,
                    "length_px": record.best_length,
                    "density_percent": round(record.density_percent, 4),
                    "cdh_calls": record.cdh_calls,
                    "preprocess_s": round(record.preprocess_seconds, 3),
                    "search_s": round(record.search_seconds, 3),
                    "time_to_best_s": round(record.time_to_best, 3),
                })
                figure_runs.setdefault(inst.name, []).append({
                    "seed": seed,
                    "corner_reduction": reduction,
                    "events": record.events,
                    "total_area": record.total_area,
                    "width": args.width_px,
                })
    out = Path(args.out)
    fields = ["instance", "seed", "corner_reduction", "width_px", "length_px",
              "density_percent", "cdh_calls", "preprocess_s", "search_s",
              "time_to_best_s"]
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    from .render import save_density_figure
    figures = []
    for name, runs in figure_runs.items():
        fig_path = out.with_name(f"{out.stem}_{name}.png")
        save_density_figure(fig_path, name, runs)
        figures.append(fig_path)
    _print_bench_summary(rows, mode == "both")
    print(f"wrote {out}" + (f" and {len(figures)} figure(s)" if figures else ""))
    return EXIT_OK


def _print_bench_summary(rows, paired: bool) -> None:
    by_key: dict[tuple, list] = {}
    for r in rows:
        by_key.setdefault((r["instance"], r["corner_reduction"]), []).append(r)
    names = sorted({r["instance"] for r in rows})
    header = f"{'instance':<16}{'mode':<6}{'best%':>8}{'avg%':>8}{'avg#CDH':>12}"
    print(header)
    for name in names:
        for reduction in (1, 0):
            group = by_key.get((name, reduction))
            if not group:
                continue
            dens = [g["density_percent"] for g in group]
            calls = [g["cdh_calls"] for g in group]
            print(f"{name:<16}{'on' if reduction else 'off':<6}"
                  f"{max(dens):>8.2f}{sum(dens) / len(dens):>8.2f}"
                  f"{sum(calls) / len(calls):>12.1f}")
        if paired:
            on = by_key.get((name, 1))
            off = by_key.get((name, 0))
            if on and off:
                on_avg = sum(g["cdh_calls"] for g in on) / len(on)
                off_avg = sum(g["cdh_calls"] for g in off) / len(off)
                ratio = on_avg / off_avg if off_avg else float("inf")
                print(f"{name:<16}{'ratio':<6}{'':>8}{'':>8}{ratio:>12.2f}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _kernels.warmup()
    handlers = {
        "solve": _cmd_solve,
        "nfp": _cmd_nfp,
        "oracle": _cmd_oracle,
        "render": _cmd_render,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except RasterpackError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
