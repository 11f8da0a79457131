import math
import random

import numpy as np
import pytest

from rasterpack import oracle
from rasterpack.driver import (SolverConfig, compact, construct, extend_length,
                               gcdh, nfdh_levels, relocate_protruding,
                               shrink_length)
from rasterpack.errors import PieceExceedsWidth
from rasterpack.solver import Layout, make_problem

from conftest import rect


def cell_problem(width, specs, orients=None):
    out = []
    for i, (c, s) in enumerate(specs):
        if orients is None:
            out.append((f"s{i}", c, [0], [s]))
        else:
            rasters = [s.grid_rotate(d) for d in orients]
            out.append((f"s{i}", c, list(orients), rasters))
    return make_problem(width, out)


def brute_feasible(problem, layout):
    placed = [(problem.oriented[int(layout.oc[i])].cell_set(),
               (int(layout.xs[i]), int(layout.ys[i])))
              for i in range(problem.n)]
    return oracle.layout_feasible(placed, problem.W, layout.L)


class TestConstruct:
    def test_three_piece_level_trace(self):
        p = cell_problem(4, [(1, rect(3, 2)), (1, rect(3, 2)), (1, rect(2, 3))])
        lay = nfdh_levels(p)
        assert (lay.xs[0], lay.ys[0]) == (1, 1)
        assert (lay.xs[1], lay.ys[1]) == (1, 3)
        assert (lay.xs[2], lay.ys[2]) == (4, 1)
        assert lay.L == 5

    def test_single_piece(self):
        p = cell_problem(5, [(1, rect(3, 3))])
        lay = construct(p)
        assert (lay.xs[0], lay.ys[0]) == (1, 1)
        assert lay.L == 3

    def test_piece_exceeds_width(self):
        p = cell_problem(2, [(1, rect(1, 3))])
        with pytest.raises(PieceExceedsWidth):
            construct(p)

    def test_construct_is_feasible(self):
        rng = random.Random(3)
        shapes = [(2, oracle.random_shape(rng, 5)) for _ in range(3)]
        p = cell_problem(8, shapes)
        lay = construct(p)
        assert brute_feasible(p, lay)


class TestCompact:
    def test_lone_piece_slides_to_corner(self):
        p = cell_problem(6, [(1, rect(3, 3))])
        lay = Layout.zeros(p, 9)
        lay.xs[0], lay.ys[0] = 6, 3
        compact(p, lay, 0)
        assert (lay.xs[0], lay.ys[0]) == (1, 1)

    def test_wall_blocks_horizontal_slide(self):
        # flush against a full-height wall: only the vertical slide can act
        p = cell_problem(4, [(1, rect(2, 4)), (1, rect(2, 2))])
        lay = Layout.zeros(p, 8)
        lay.xs[:] = [1, 3]
        lay.ys[:] = [2, 3]
        compact(p, lay, 1)
        assert (lay.xs[1], lay.ys[1]) == (3, 1)

    def test_flush_piece_unchanged(self):
        p = cell_problem(4, [(1, rect(2, 2))])
        lay = Layout.zeros(p, 6)
        lay.xs[0], lay.ys[0] = 1, 1
        compact(p, lay, 0)
        assert (lay.xs[0], lay.ys[0]) == (1, 1)


class TestLengthSchedule:
    def test_shrink_example(self):
        assert shrink_length(100, 0.02) == 98

    def test_extend_stall_guard(self):
        # floor(1.005 * 98) = 98 would stall; the guard forces 99
        assert math.floor(1.005 * 98) == 98
        assert extend_length(98, 0.005) == 99

    def test_strict_progress_for_all_small_lengths(self):
        for L in range(1, 201):
            assert shrink_length(L, 0.02) < L
            assert extend_length(L, 0.005) > L


class TestRelocation:
    def test_protruding_pieces_land_inside(self):
        p = cell_problem(6, [(3, rect(3, 2))])
        lay = Layout.zeros(p, 20)
        lay.xs[:] = [18, 10, 2]
        lay.ys[:] = [1, 1, 1]
        lay.L = 6
        relocate_protruding(p, lay, random.Random(0))
        for i in range(p.n):
            assert lay.contained(p, i)

    def test_orientation_preserved_when_it_fits(self):
        p = cell_problem(6, [(2, rect(4, 2))], orients=[0, 90])
        lay = Layout.zeros(p, 12)
        lay.set_orientation(p, 0, 1)
        lay.xs[:] = [11, 2]
        lay.ys[:] = [2, 1]
        lay.L = 6
        relocate_protruding(p, lay, random.Random(1))
        assert lay.opos[0] == 1
        assert lay.contained(p, 0)


class TestGcdh:
    def test_time_limit_zero_returns_construct(self):
        p = cell_problem(2, [(4, rect(2, 1))])
        best, rec = gcdh(p, SolverConfig(width_px=2, time_limit=0.0, seed=1))
        assert rec.cdh_calls == 0
        assert rec.best_length == construct(p).L

    def test_short_run_progress_and_feasibility(self):
        p = cell_problem(4, [(4, rect(3, 2)), (2, rect(2, 2))],
                         orients=[0, 90])
        best, rec = gcdh(p, SolverConfig(width_px=4, time_limit=5.0, seed=2))
        assert brute_feasible(p, best)
        feas = [L for _, L, ok in rec.events if ok]
        assert feas == sorted(feas, reverse=True)
        assert len(set(feas)) == len(feas)  # strictly decreasing
        assert rec.best_length == feas[-1]
        assert rec.density_percent * rec.width * rec.best_length == \
            pytest.approx(100.0 * rec.total_area)

    def test_corner_flag_does_not_change_feasibility(self):
        for reduction in (True, False):
            p = cell_problem(4, [(4, rect(3, 2))])
            best, rec = gcdh(p, SolverConfig(width_px=4, time_limit=2.0,
                                             seed=3, corner_reduction=reduction))
            assert brute_feasible(p, best)

    def test_optimal_stop_before_deadline(self):
        # four dominoes tile a 2x4 container exactly; the run ends at the
        # area lower bound, not at the time limit
        p = cell_problem(2, [(4, rect(2, 1))], orients=[0, 90])
        best, rec = gcdh(p, SolverConfig(width_px=2, time_limit=30.0, seed=4))
        assert rec.best_length == p.min_feasible_length() == 4
        assert rec.search_seconds < 5.0

    def test_deterministic_runs(self):
        p1 = cell_problem(2, [(4, rect(2, 1))], orients=[0, 90])
        b1, r1 = gcdh(p1, SolverConfig(width_px=2, time_limit=30.0, seed=9))
        p2 = cell_problem(2, [(4, rect(2, 1))], orients=[0, 90])
        b2, r2 = gcdh(p2, SolverConfig(width_px=2, time_limit=30.0, seed=9))
        assert r1.cdh_calls == r2.cdh_calls
        assert b1.xs.tolist() == b2.xs.tolist()
        assert b1.ys.tolist() == b2.ys.tolist()
        assert b1.opos.tolist() == b2.opos.tolist()
