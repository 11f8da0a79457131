"""Outer strip-packing loop: construction, compaction, shrink/extend driver."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NoValidPosition, PieceExceedsWidth
from .solver import (HORIZONTAL, VERTICAL, Layout, Problem, RunStats, gls,
                     line_search)


@dataclass
class SolverConfig:
    width_px: int
    r_dec: float = 0.02
    r_inc: float = 0.005
    k_max: int = 200
    time_limit: float = 60.0
    seed: int = 0
    corner_reduction: bool = True

    def __post_init__(self):
        if not (0.0 < self.r_dec < 1.0):
            raise ValueError("r_dec must be in (0, 1)")
        if self.r_inc <= 0.0:
            raise ValueError("r_inc must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")


@dataclass
class RunRecord:
    """Run bookkeeping: best length, density, timings and the event log."""

    best_length: int = 0
    total_area: int = 0
    width: int = 0
    density_percent: float = 0.0
    time_to_best: float = 0.0
    cdh_calls: int = 0
    events: list = field(default_factory=list)  # (elapsed_s, L, feasible)
    preprocess_seconds: float = 0.0
    search_seconds: float = 0.0

    def set_best(self, problem: Problem, layout: Layout, elapsed: float) -> None:
        self.best_length = int(layout.L)
        self.total_area = layout.total_area(problem)
        self.width = problem.W
        self.density_percent = 100.0 * self.total_area / (self.width * self.best_length)
        self.time_to_best = elapsed


def shrink_length(L: int, r_dec: float) -> int:
    """Next shorter container length; strictly decreases even when the floor stalls."""
    return min(L - 1, math.floor((1.0 - r_dec) * L))


def extend_length(L: int, r_inc: float) -> int:
    """Next longer container length; strictly increases even when the floor stalls."""
    return max(L + 1, math.floor((1.0 + r_inc) * L))


def layout_extent(problem: Problem, layout: Layout) -> int:
    l = problem.oc_l[layout.oc]
    return int(np.max(layout.xs + (l - l // 2)))


def compact(problem: Problem, layout: Layout, k: int) -> None:
    """Slide piece k left and down alternately to overlap-free positions.

    A move is taken only when the found translation is negative and lands on
    a zero-overlap position; x and y never increase.
    """

    def slide(axis: str) -> bool:
        free, t, _, _ = line_search(problem, layout, None, k,
                                    int(layout.opos[k]), axis, True,
                                    (int(layout.xs[k]), int(layout.ys[k])))
        if free and t < 0:
            if axis == HORIZONTAL:
                layout.xs[k] += t
            else:
                layout.ys[k] += t
            return True
        return False

    slide(HORIZONTAL)
    axis = VERTICAL
    while slide(axis):
        axis = HORIZONTAL if axis == VERTICAL else VERTICAL


def _sorted_by_length(problem: Problem):
    n = problem.n
    l0 = np.empty(n, dtype=np.int64)
    w0 = np.empty(n, dtype=np.int64)
    for i in range(n):
        l0[i], w0[i] = problem.dims(i, 0)
        if w0[i] > problem.W:
            raise PieceExceedsWidth(i + 1, int(w0[i]), problem.W)
    order = sorted(range(n), key=lambda i: (-l0[i], -w0[i], i))
    return order, l0, w0


def nfdh_levels(problem: Problem) -> Layout:
    """Next-fit-decreasing-height placement at orientation 0, no compaction.

    Levels fill bottom to top in y and advance along x; the layout's L is the
    tight occupied extent.
    """
    order, l0, w0 = _sorted_by_length(problem)
    layout = Layout.zeros(problem, L=int(l0.sum()))
    level_x = 0
    bar_l = 0
    bar_w = 0
    for i in order:
        if bar_w + w0[i] > problem.W:
            level_x += bar_l
            bar_w = 0
            bar_l = 0
        layout.xs[i] = level_x + l0[i] // 2
        layout.ys[i] = bar_w + w0[i] // 2
        bar_w += int(w0[i])
        bar_l = max(bar_l, int(l0[i]))
    layout.L = layout_extent(problem, layout)
    return layout


def construct(problem: Problem) -> Layout:
    """Level construction by decreasing bounding-box length, then compaction."""
    layout = nfdh_levels(problem)
    order, _, _ = _sorted_by_length(problem)
    for i in order:
        compact(problem, layout, i)
    layout.L = layout_extent(problem, layout)
    return layout


def relocate_protruding(problem: Problem, layout: Layout, rng: random.Random) -> None:
    """Redraw positions of pieces that violate containment at the current L.

    Orientation is preserved unless the piece cannot fit at it at all, in
    which case a random fitting orientation is drawn first.
    """
    for i in range(problem.n):
        if layout.contained(problem, i):
            continue
        l, w = problem.dims(i, int(layout.opos[i]))
        if l > layout.L or w > problem.W:
            fitting = [op for op in range(len(problem.class_orients[problem.piece_class[i]]))
                       if problem.dims(i, op)[0] <= layout.L
                       and problem.dims(i, op)[1] <= problem.W]
            if not fitting:
                raise NoValidPosition(f"piece {i} cannot fit a container of length {layout.L}")
            layout.set_orientation(problem, i, fitting[rng.randrange(len(fitting))])
            l, w = problem.dims(i, int(layout.opos[i]))
        layout.xs[i] = rng.randint(l // 2, layout.L - (l - l // 2))
        layout.ys[i] = rng.randint(w // 2, problem.W - (w - w // 2))


def gcdh(problem: Problem, config: SolverConfig):
    """Container shrink/extend driver around GLS.

    Returns (best_layout, RunRecord).  The best layout is always feasible;
    its L only decreases over the run.
    """
    stats = RunStats()
    rng = random.Random(config.seed)
    t0 = time.monotonic()
    layout = construct(problem)
    best = layout.copy()
    record = RunRecord()
    record.set_best(problem, best, time.monotonic() - t0)
    record.events.append((record.time_to_best, best.L, True))
    L_star = best.L
    L_min = problem.min_feasible_length()
    deadline = t0 + config.time_limit
    if config.time_limit <= 0 or L_star <= L_min:
        record.cdh_calls = stats.cdh_calls
        record.search_seconds = time.monotonic() - t0
        return best, record
    L = max(L_min, shrink_length(L_star, config.r_dec))
    layout.L = L
    relocate_protruding(problem, layout, rng)
    while time.monotonic() < deadline:
        result, F = gls(problem, layout, rng, stats, config.k_max,
                        config.corner_reduction, deadline)
        layout = result
        layout.L = L
        elapsed = time.monotonic() - t0
        if F == 0:
            L_star = L
            best = layout.copy()
            record.set_best(problem, best, elapsed)
            record.events.append((elapsed, L, True))
            if L_star <= L_min:
                break
            L = max(L_min, shrink_length(L_star, config.r_dec))
            layout.L = L
            relocate_protruding(problem, layout, rng)
        else:
            record.events.append((elapsed, L, False))
            L = extend_length(L, config.r_inc)
            if L >= L_star:
                L = max(L_min, shrink_length(L_star, config.r_dec))
                layout = best.copy()
                layout.L = L
                relocate_protruding(problem, layout, rng)
            else:
                layout.L = L
    record.cdh_calls = stats.cdh_calls
    record.search_seconds = time.monotonic() - t0
    return best, record
