"""Overlap minimization: weighted penalties, axis line search, CDH and GLS.

The search state is a layout (integer reference-point positions plus an
orientation index per piece) and a penalty state (pairwise weights alpha and
cached pairwise penalties f).  All weighted-penalty comparisons go through
weighted_sum so that float accumulation order is identical everywhere;
mixing accumulation orders could flip strict comparisons by one ulp and
stall the descent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import _kernels
from .errors import NoValidPosition
from .nfp import NfpTable
from .raster import PixelShape

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@njit(cache=True)
def weighted_sum(alphas, fs):
    """Sum of alpha*f in ascending pair order; the one true accumulation."""
    s = 0.0
    for p in range(len(fs)):
        if fs[p] != 0:
            s += alphas[p] * fs[p]
    return s


class Problem:
    """Immutable piece set at one raster resolution plus the shared NFP table."""

    def __init__(self, width_px: int, piece_class, class_shape_ids,
                 class_orients, oriented_shapes, oc_index):
        self.W = int(width_px)
        self.piece_class = np.asarray(piece_class, dtype=np.int64)
        self.n = len(self.piece_class)
        self.class_shape_ids = list(class_shape_ids)
        self.class_orients = [list(o) for o in class_orients]
        self.oriented: list[PixelShape] = list(oriented_shapes)
        self.oc_index = np.asarray(oc_index, dtype=np.int64)
        self.oc_l = np.array([s.l for s in self.oriented], dtype=np.int64)
        self.oc_w = np.array([s.w for s in self.oriented], dtype=np.int64)
        self.oc_area = np.array([s.area for s in self.oriented], dtype=np.int64)
        self.table = NfpTable(self.oriented)

    def oc_of(self, class_idx: int, opos: int) -> int:
        return int(self.oc_index[class_idx, opos])

    def dims(self, piece: int, opos: int) -> tuple[int, int]:
        oc = self.oc_of(self.piece_class[piece], opos)
        return int(self.oc_l[oc]), int(self.oc_w[oc])

    def orientation_degrees(self, piece: int, opos: int) -> int:
        return self.class_orients[self.piece_class[piece]][opos]

    def min_feasible_length(self) -> int:
        """Below this no layout fits: longest unavoidable piece, area bound."""
        per_piece = []
        min_area = 0
        for i in range(self.n):
            c = self.piece_class[i]
            ls = []
            areas = []
            for op in range(len(self.class_orients[c])):
                oc = self.oc_of(c, op)
                areas.append(int(self.oc_area[oc]))
                if self.oc_w[oc] <= self.W:
                    ls.append(int(self.oc_l[oc]))
            per_piece.append(min(ls) if ls else 0)
            min_area += min(areas)
        lb_len = max(per_piece) if per_piece else 1
        lb_area = -(-min_area // self.W)
        return max(1, lb_len, lb_area)


def make_problem(width_px: int, class_specs) -> Problem:
    """Assemble a Problem from per-class piece data.

    class_specs: iterable of (shape_id, count, orientation_degrees, rasters)
    where rasters[i] is the PixelShape at orientation_degrees[i].
    """
    piece_class = []
    shape_ids = []
    class_orients = []
    oriented = []
    oc_rows = []
    for ci, (shape_id, count, degrees, rasters) in enumerate(class_specs):
        if count < 1:
            raise ValueError(f"shape {shape_id}: count must be >= 1")
        if len(degrees) != len(rasters):
            raise ValueError(f"shape {shape_id}: one raster per orientation required")
        shape_ids.append(shape_id)
        class_orients.append(list(degrees))
        row = []
        for r in rasters:
            row.append(len(oriented))
            oriented.append(r)
        oc_rows.append(row)
        piece_class.extend([ci] * count)
    width = max(len(r) for r in oc_rows)
    oc_index = np.full((len(oc_rows), width), -1, dtype=np.int64)
    for ci, row in enumerate(oc_rows):
        oc_index[ci, :len(row)] = row
    return Problem(width_px, piece_class, shape_ids, class_orients, oriented,
                   oc_index)


class Layout:
    """Positions, orientation indices and the current container length."""

    __slots__ = ("xs", "ys", "opos", "oc", "L")

    def __init__(self, xs, ys, opos, oc, L):
        self.xs = xs
        self.ys = ys
        self.opos = opos
        self.oc = oc
        self.L = int(L)

    @classmethod
    def zeros(cls, problem: Problem, L: int) -> "Layout":
        n = problem.n
        opos = np.zeros(n, dtype=np.int64)
        oc = problem.oc_index[problem.piece_class, 0].astype(np.int64)
        return cls(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64),
                   opos, oc, L)

    def copy(self) -> "Layout":
        return Layout(self.xs.copy(), self.ys.copy(), self.opos.copy(),
                      self.oc.copy(), self.L)

    def set_orientation(self, problem: Problem, k: int, opos: int) -> None:
        self.opos[k] = opos
        self.oc[k] = problem.oc_index[problem.piece_class[k], opos]

    def x_range(self, problem: Problem, k: int, opos=None) -> tuple[int, int]:
        l, _ = problem.dims(k, int(self.opos[k] if opos is None else opos))
        return l // 2, self.L - (l - l // 2)

    def y_range(self, problem: Problem, k: int, opos=None) -> tuple[int, int]:
        _, w = problem.dims(k, int(self.opos[k] if opos is None else opos))
        return w // 2, problem.W - (w - w // 2)

    def contained(self, problem: Problem, k: int) -> bool:
        lo, hi = self.x_range(problem, k)
        if not (lo <= self.xs[k] <= hi):
            return False
        lo, hi = self.y_range(problem, k)
        return bool(lo <= self.ys[k] <= hi)

    def total_area(self, problem: Problem) -> int:
        return int(problem.oc_area[self.oc].sum())


@dataclass
class RunStats:
    cdh_calls: int = 0
    moves: int = 0
    check_every: int = 1000


class PenaltyState:
    """Pairwise weights and cached penalties supporting incremental updates."""

    def __init__(self, problem: Problem, layout: Layout):
        n = problem.n
        self.alpha = np.ones((n, n), dtype=np.float64)
        np.fill_diagonal(self.alpha, 0.0)
        self.f = np.zeros((n, n), dtype=np.int64)
        for k in range(n):
            row = pair_fs(problem, layout, k,
                          int(layout.xs[k]), int(layout.ys[k]),
                          int(layout.opos[k]))
            self.f[k] = row
        self.F = int(self.f.sum()) // 2

    def piece_weighted(self, k: int) -> float:
        return weighted_sum(self.alpha[k], self.f[k])

    def weighted_total(self) -> float:
        n = len(self.f)
        iu = np.triu_indices(n, 1)
        return float(np.sum(self.alpha[iu] * self.f[iu]))

    def overlapping(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.f[k])

    def recompute_F(self) -> int:
        return int(self.f.sum()) // 2


def _pair_arrays(problem: Problem, layout: Layout, k: int, oc_k: int,
                 x0: int, y0: int, alpha_row=None):
    n = problem.n
    others = np.concatenate([np.arange(k, dtype=np.int64),
                             np.arange(k + 1, n, dtype=np.int64)])
    qs = layout.oc[others] * problem.table.n_oriented + oc_k
    dxs = x0 - layout.xs[others]
    dys = y0 - layout.ys[others]
    if alpha_row is None:
        alph = np.ones(n - 1, dtype=np.float64)
    else:
        alph = alpha_row[others]
    return others, qs, dxs, dys, alph


def pair_fs(problem: Problem, layout: Layout, k: int,
            x0: int, y0: int, opos: int) -> np.ndarray:
    """Penalties of piece k against every other piece, as a length-n row."""
    oc_k = problem.oc_of(problem.piece_class[k], opos)
    others, qs, dxs, dys, _ = _pair_arrays(problem, layout, k, oc_k, x0, y0)
    out = np.zeros(problem.n - 1, dtype=np.int64)
    _kernels.point_fs(qs, dxs, dys, out, *problem.table.strip_arrays)
    row = np.zeros(problem.n, dtype=np.int64)
    row[others] = out
    return row


def piece_penalty(problem: Problem, layout: Layout, state: PenaltyState,
                  k: int, pos: tuple[int, int], opos: int) -> tuple[float, int]:
    """(weighted, unweighted) overlap penalty of piece k at a candidate pose."""
    row = pair_fs(problem, layout, k, int(pos[0]), int(pos[1]), opos)
    return weighted_sum(state.alpha[k], row), int(row.sum())


def line_search(problem: Problem, layout: Layout, alpha_row, k: int,
                opos: int, axis: str, corner_reduction: bool,
                pos: tuple[int, int]):
    """Best move of piece k along one axis from pos at orientation opos.

    Returns (free, t, weighted, unweighted): free means an overlap-free t
    exists and t is the minimum one; otherwise t minimizes the weighted
    penalty over the reduced candidate set (which always contains t=0).
    Raises NoValidPosition when containment admits no t at all.
    """
    x0, y0 = int(pos[0]), int(pos[1])
    l, w = problem.dims(k, opos)
    if axis == HORIZONTAL:
        lo = l // 2 - x0
        hi = (layout.L - (l - l // 2)) - x0
    else:
        lo = w // 2 - y0
        hi = (problem.W - (w - w // 2)) - y0
    if lo > hi:
        raise NoValidPosition(f"piece {k} does not fit the container along {axis}")
    oc_k = problem.oc_of(problem.piece_class[k], opos)
    _, qs, dxs, dys, alph = _pair_arrays(problem, layout, k, oc_k, x0, y0,
                                         alpha_row)
    free, tfree, tbest, wbest, fbest = _kernels.line_search_kernel(
        axis == HORIZONTAL, corner_reduction, lo, hi,
        qs, dxs, dys, alph,
        *problem.table.strip_arrays, *problem.table.corner_arrays)
    if free:
        return True, int(tfree), 0.0, 0
    return False, int(tbest), float(wbest), int(fbest)


def neighbor_search(problem: Problem, layout: Layout, state: PenaltyState,
                    k: int, opos: int, corner_reduction: bool):
    """Alternating axis descent of piece k at a tentative orientation.

    One mandatory horizontal pass, then vertical/horizontal alternation,
    moving only on strict weighted improvement, until a pass yields none.
    Returns (x, y, weighted, unweighted) of the final pose; the caller
    decides whether the whole move is an improvement.
    """
    l, w = problem.dims(k, opos)
    if l > layout.L or w > problem.W:
        raise NoValidPosition(f"piece {k} does not fit the container at this orientation")
    x = min(max(int(layout.xs[k]), l // 2), layout.L - (l - l // 2))
    y = min(max(int(layout.ys[k]), w // 2), problem.W - (w - w // 2))
    row = pair_fs(problem, layout, k, x, y, opos)
    cur_w = weighted_sum(state.alpha[k], row)
    cur_f = int(row.sum())

    free, t, wp, fp = line_search(problem, layout, state.alpha[k], k, opos,
                                  HORIZONTAL, corner_reduction, (x, y))
    if wp < cur_w:
        x += t
        cur_w, cur_f = wp, fp
    axis = VERTICAL
    while True:
        free, t, wp, fp = line_search(problem, layout, state.alpha[k], k, opos,
                                      axis, corner_reduction, (x, y))
        if wp < cur_w:
            if axis == HORIZONTAL:
                x += t
            else:
                y += t
            cur_w, cur_f = wp, fp
            axis = HORIZONTAL if axis == VERTICAL else VERTICAL
        else:
            break
    return x, y, cur_w, cur_f


def apply_move(problem: Problem, layout: Layout, state: PenaltyState,
               k: int, x: int, y: int, opos: int, stats: RunStats) -> None:
    """Commit a move of piece k and refresh the pairwise caches."""
    layout.xs[k] = x
    layout.ys[k] = y
    layout.set_orientation(problem, k, opos)
    old = state.f[k].copy()
    row = pair_fs(problem, layout, k, x, y, int(opos))
    state.f[k] = row
    state.f[:, k] = row
    state.F += int(row.sum()) - int(old.sum())
    stats.moves += 1
    if stats.check_every and stats.moves % stats.check_every == 0:
        full = state.recompute_F()
        if full != state.F:
            raise AssertionError(
                f"penalty cache drifted: incremental {state.F} != full {full}")


def cdh(problem: Problem, layout: Layout, state: PenaltyState,
        rng, stats: RunStats, corner_reduction: bool = True):
    """One coordinate-descent pass with fast-local-search bookkeeping.

    Returns ((best_layout, best_F), weighted_best_layout); layout/state are
    left at the weighted-best solution.  Deterministic for a given rng.
    """
    stats.cdh_calls += 1
    best = layout.copy()
    best_F = state.F
    if state.F == 0:
        return (best, 0), layout.copy()
    n = problem.n
    active = np.ones(n, dtype=bool)
    while active.any():
        act = np.flatnonzero(active)
        k = int(act[rng.randrange(len(act))])
        c = problem.piece_class[k]
        untried = list(range(len(problem.class_orients[c])))
        while untried:
            opos = untried.pop(rng.randrange(len(untried)))
            try:
                x, y, wp, fp = neighbor_search(problem, layout, state, k, opos,
                                               corner_reduction)
            except NoValidPosition:
                continue
            cur_row = state.f[k]
            cur_f = int(cur_row.sum())
            cur_w = weighted_sum(state.alpha[k], cur_row)
            new_F = state.F - cur_f + fp
            if new_F < best_F:
                best = layout.copy()
                best.xs[k] = x
                best.ys[k] = y
                best.opos[k] = opos
                best.oc[k] = problem.oc_index[c, opos]
                best_F = new_F
                if best_F == 0:
                    return (best, 0), layout.copy()
            if wp < cur_w:
                before = state.overlapping(k)
                apply_move(problem, layout, state, k, x, y, opos, stats)
                after = state.overlapping(k)
                active[before] = True
                active[after] = True
        active[k] = False
    return (best, best_F), layout.copy()


def update_weights(state: PenaltyState) -> None:
    """Raise each pair's weight by its share of the worst current overlap."""
    fmax = int(state.f.max())
    if fmax <= 0:
        raise ValueError("update_weights requires at least one overlapping pair")
    state.alpha += state.f / fmax


def gls(problem: Problem, layout: Layout, rng, stats: RunStats, k_max: int,
        corner_reduction: bool = True, deadline: float | None = None):
    """Guided local search around CDH; returns (best_layout, best_F).

    Weights reset to 1.0 on entry; stops after k_max consecutive CDH calls
    without improving the unweighted best, immediately on feasibility, or at
    the deadline (checked between CDH calls).
    """
    state = PenaltyState(problem, layout)
    if state.F == 0:
        return layout.copy(), 0
    best = layout.copy()
    best_F = state.F
    k = 0
    while k < k_max:
        if deadline is not None and time.monotonic() >= deadline:
            break
        (b, bF), _ = cdh(problem, layout, state, rng, stats, corner_reduction)
        if bF < best_F:
            best, best_F = b, bF
            k = 0
            if best_F == 0:
                return best, 0
        update_weights(state)
        k += 1
    return best, best_F
