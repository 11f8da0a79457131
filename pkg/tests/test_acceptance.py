"""Acceptance criteria, one test per criterion, one printed line each.

The density and speedup runs are real solver executions at their stated
budgets, so this module takes on the order of fifteen minutes.
"""

import json
import random
import time

import numpy as np
import pytest

import conftest
from rasterpack import oracle
from rasterpack.cli import main, run_solve
from rasterpack.driver import (SolverConfig, extend_length, gcdh, nfdh_levels,
                               shrink_length)
from rasterpack.instances import build_problem, parse_instance
from rasterpack.nfp import build_nfp
from rasterpack.raster import decode, encode
from rasterpack.results import load_result
from rasterpack.solver import Layout, PenaltyState, make_problem, update_weights

from conftest import INSTANCES, MINI_INSTANCE, rect


def report(num: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    assert ok, line


def brute_feasible_layout(problem, layout) -> bool:
    placed = [(problem.oriented[int(layout.oc[i])].cell_set(),
               (int(layout.xs[i]), int(layout.ys[i])))
              for i in range(problem.n)]
    return oracle.layout_feasible(placed, problem.W, layout.L)


def test_01_nfp_oracle_equivalence():
    rng = random.Random(20260801)
    t0 = time.monotonic()
    mismatches = 0
    for _ in range(200):
        a = oracle.random_shape(rng, 16)
        b = oracle.random_shape(rng, 16)
        engine = set(map(tuple, build_nfp(a, b).cell_array().tolist()))
        if engine != oracle.brute_nfp(a.cell_set(), b.cell_set()):
            mismatches += 1
    elapsed = time.monotonic() - t0
    report(1, mismatches == 0 and elapsed < 30.0,
           f"200 pairs, {mismatches} mismatches, {elapsed:.1f}s (< 30s)")


def test_02_penetration_depth_oracle():
    rng = random.Random(20260802)
    mismatches = 0
    per_axis = 100
    for axis in ("horizontal", "vertical"):
        done = 0
        while done < per_axis:
            a = oracle.random_shape(rng, 12)
            b = oracle.random_shape(rng, 12)
            nfp = build_nfp(a, b)
            inside = nfp.cell_array()
            if len(inside) == 0:
                continue
            u = tuple(inside[rng.randrange(len(inside))].tolist())
            if nfp.penetration_depth(u, axis) != oracle.brute_depth(
                    a.cell_set(), b.cell_set(), u, axis):
                mismatches += 1
            done += 1
    report(2, mismatches == 0,
           f"{per_axis} overlapping configurations per axis, {mismatches} mismatches")


def test_03_scanline_round_trip():
    rng = random.Random(20260803)
    bad = 0
    for _ in range(500):
        s = oracle.random_shape(rng, 32)
        ds = encode(s)
        rows = set(map(tuple, ds.cells_from_rows().tolist()))
        cols = set(map(tuple, ds.cells_from_cols().tolist()))
        if decode(ds) != s or rows != cols or rows != s.cell_set():
            bad += 1
    report(3, bad == 0, f"500 random shapes, {bad} round-trip failures")


def test_04_candidate_soundness_and_endpoint_optimality():
    rng = random.Random(20260804)
    violations = 0
    checked = 0
    while checked < 100:
        a = oracle.random_shape(rng, 12)
        b = oracle.random_shape(rng, 12)
        nfp = build_nfp(a, b)
        x0, y0, x1, y1 = nfp.bbox
        row = rng.randint(y0, y1)
        strips = nfp.ds.row_strips(row)
        if not strips:
            continue
        cands = nfp.candidate_offsets(row, "horizontal")
        overlap = [x for x in range(x0, x1 + 1) if nfp.contains((x, row))]
        if not set(cands) <= set(overlap):
            violations += 1
        depths = [nfp.penetration_depth((x, row), "horizontal") for x in overlap]
        endpoint_min = min(
            nfp.penetration_depth((e, row), "horizontal")
            for lo, hi in strips for e in (lo, hi))
        if min(depths) != endpoint_min:
            violations += 1
        checked += 1
    report(4, violations == 0, f"100 NFP sweep lines, {violations} violations")


def test_05_feasibility_soundness():
    rng = random.Random(20260805)
    checked = 0
    bad = 0
    for trial in range(6):
        specs = []
        for ci in range(rng.randint(2, 3)):
            shape = oracle.random_shape(rng, 5)
            specs.append((f"s{ci}", rng.randint(1, 3), [0], [shape]))
        problem = make_problem(10, specs)
        best, rec = gcdh(problem, SolverConfig(
            width_px=10, time_limit=2.0, seed=trial))
        checked += 1
        if not brute_feasible_layout(problem, best):
            bad += 1
    report(5, bad == 0,
           f"{checked} solver-reported-feasible layouts brute-force verified, {bad} bad")


def test_06_weight_update_exactness():
    rng = random.Random(20260806)
    bad = 0
    for _ in range(50):
        n = rng.randint(3, 8)
        specs = [(f"s{i}", 1, [0], [rect(1, 1)]) for i in range(n)]
        problem = make_problem(4, specs)
        layout = Layout.zeros(problem, 4)
        state = PenaltyState(problem, layout)
        f = np.zeros((n, n), dtype=np.int64)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for i, j in pairs:
            f[i, j] = f[j, i] = rng.randint(0, 9)
        if f.max() == 0:
            f[0, 1] = f[1, 0] = 1
        state.f = f
        before = state.alpha.copy()
        update_weights(state)
        mi, mj = np.unravel_index(np.argmax(f), f.shape)
        if state.alpha[mi, mj] != before[mi, mj] + 1.0:
            bad += 1
        zero = f == 0
        if not np.array_equal(state.alpha[zero], before[zero]):
            bad += 1
    report(6, bad == 0, f"50 randomized penalty matrices, {bad} inexact updates")


def test_07_nfdh_hand_trace():
    problem = make_problem(4, [
        ("a", 1, [0], [rect(3, 2)]),
        ("b", 1, [0], [rect(3, 2)]),
        ("c", 1, [0], [rect(2, 3)]),
    ])
    lay = nfdh_levels(problem)
    got = [(int(lay.xs[i]), int(lay.ys[i])) for i in range(3)]
    ok = got == [(1, 1), (1, 3), (4, 1)] and lay.L == 5
    report(7, ok, f"positions {got}, L={lay.L} (expected [(1,1),(1,3),(4,1)], L=5)")


DENSITY_TARGETS = [("fu", 85.0), ("dighe2", 88.0), ("shapes0", 60.0)]


def test_08_desk_scale_density():
    seeds = (1, 2, 3)
    lines = []
    ok = True
    for name, target in DENSITY_TARGETS:
        inst = parse_instance(INSTANCES / f"{name}.json")
        problem = build_problem(inst, 128)
        best_density = 0.0
        max_wall = 0.0
        for seed in seeds:
            t0 = time.monotonic()
            layout, rec = gcdh(problem, SolverConfig(
                width_px=128, time_limit=60.0, seed=seed))
            wall = time.monotonic() - t0
            max_wall = max(max_wall, wall)
            best_density = max(best_density, rec.density_percent)
            if not brute_feasible_layout(problem, layout):
                ok = False
                lines.append(f"{name}: infeasible best layout (seed {seed})")
        ok = ok and best_density >= target and max_wall <= 70.0
        lines.append(f"{name} best {best_density:.2f}% (target {target}%), "
                     f"max wall {max_wall:.0f}s")
    report(8, ok, "; ".join(lines))


def test_09_corner_reduction_speedup():
    inst = parse_instance(INSTANCES / "albano.json")
    problem = build_problem(inst, 512)
    calls = {}
    for reduction in (True, False):
        total = 0
        for seed in (1,):
            _, rec = gcdh(problem, SolverConfig(
                width_px=512, time_limit=120.0, seed=seed,
                corner_reduction=reduction))
            total += rec.cdh_calls
        calls[reduction] = total
    ratio = calls[True] / max(1, calls[False])
    report(9, ratio >= 2.0,
           f"albano W=512, 120s: {calls[True]} vs {calls[False]} CDH calls, "
           f"ratio {ratio:.2f} (target >= 2.0)")


def test_10_cli_determinism(tmp_path):
    inst_path = tmp_path / "mini.json"
    inst_path.write_text(json.dumps(MINI_INSTANCE))
    results = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        code = main(["solve", "--instance", str(inst_path), "--width-px", "8",
                     "--time-limit", "30", "--seed", "99", "--out", str(out)])
        assert code == 0
        results.append(load_result(out))
    same_bytes = results[0].result_bytes() == results[1].result_bytes()
    same_calls = results[0].cdh_calls == results[1].cdh_calls
    same_layout = results[0].pieces == results[1].pieces
    report(10, same_bytes and same_calls and same_layout,
           f"identical result sections={same_bytes}, layouts={same_layout}, "
           f"cdh_calls {results[0].cdh_calls}=={results[1].cdh_calls}")


def test_11_gcdh_progress_and_stall_guard():
    inst = parse_instance(INSTANCES / "fu.json")
    problem = build_problem(inst, 64)
    _, rec = gcdh(problem, SolverConfig(width_px=64, time_limit=10.0, seed=5))
    feas = [L for _, L, okk in rec.events if okk]
    strictly_decreasing = all(b < a for a, b in zip(feas, feas[1:]))
    guard = all(shrink_length(L, 0.02) < L and extend_length(L, 0.005) > L
                for L in range(1, 201))
    report(11, strictly_decreasing and guard and len(feas) >= 2,
           f"{len(feas)} feasible lengths strictly decreasing={strictly_decreasing}, "
           f"stall guard on L=1..200: {guard}")
