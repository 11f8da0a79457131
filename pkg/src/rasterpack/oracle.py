"""Brute-force reference checks, deliberately independent of the engine.

Everything here works on plain Python sets of cells and exhaustive scans, so
it is only usable on small shapes, but it is the ground truth the scanline
engine is validated against.
"""

from __future__ import annotations

import random

import numpy as np

from .raster import PixelShape


def cells_of(shape: PixelShape) -> frozenset:
    return shape.cell_set()


def shifted(cells: frozenset, u) -> frozenset:
    ux, uy = int(u[0]), int(u[1])
    return frozenset((x + ux, y + uy) for x, y in cells)


def overlap(a: frozenset, b: frozenset, u) -> bool:
    """Whether b placed at relative offset u intersects a."""
    return not a.isdisjoint(shifted(b, u))


def brute_nfp(a: frozenset, b: frozenset, pad: int = 1) -> set:
    """All relative offsets in the padded bounding window where a and b meet."""
    ax = [p[0] for p in a]
    ay = [p[1] for p in a]
    bx = [p[0] for p in b]
    by = [p[1] for p in b]
    out = set()
    for ux in range(min(ax) - max(bx) - pad, max(ax) - min(bx) + pad + 1):
        for uy in range(min(ay) - max(by) - pad, max(ay) - min(by) + pad + 1):
            if overlap(a, b, (ux, uy)):
                out.add((ux, uy))
    return out


def brute_depth(a: frozenset, b: frozenset, u, axis: str) -> int:
    """min |s| with a disjoint from b shifted by u + s*d, found by scanning s."""
    d = (1, 0) if axis == "horizontal" else (0, 1)
    if not overlap(a, b, u):
        return 0
    span = (max(p[0] for p in a | b) - min(p[0] for p in a | b)
            + max(p[1] for p in a | b) - min(p[1] for p in a | b)) + 2
    for s in range(1, 2 * span + 2):
        for sign in (1, -1):
            v = (u[0] + sign * s * d[0], u[1] + sign * s * d[1])
            if not overlap(a, b, v):
                return s
    raise AssertionError("separation not found within scan bound")


def brute_pair_penalty(a: frozenset, b: frozenset, u) -> int:
    if not overlap(a, b, u):
        return 0
    return min(brute_depth(a, b, u, "horizontal"), brute_depth(a, b, u, "vertical"))


def brute_segment_corners(cells: frozenset) -> set:
    """Reference segment-test corner detector on a cell set.

    Mirrors the documented rule: contour cells whose radius-3 circle of 16
    cells has a contiguous arc of >= 9 outside samples, with cells beyond the
    bounding box treated as outside; shapes smaller than the circle in both
    dimensions return the whole contour.
    """
    from .nfp import CIRCLE16, SEGMENT_ARC

    xs = [p[0] for p in cells]
    ys = [p[1] for p in cells]
    l = max(xs) - min(xs) + 1
    w = max(ys) - min(ys) + 1
    contour = {
        (x, y) for (x, y) in cells
        if any((x + dx, y + dy) not in cells
               for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    }
    if l < 7 and w < 7:
        return contour
    out = set()
    for (x, y) in contour:
        ring = [(x + int(dx), y + int(dy)) not in cells for dx, dy in CIRCLE16]
        ring = ring + ring
        for s in range(16):
            if all(ring[s:s + SEGMENT_ARC]):
                out.add((x, y))
                break
    return out


def random_shape(rng: random.Random, max_dim: int = 16) -> PixelShape:
    """Connected random blob within a max_dim square, at least one cell."""
    w = rng.randint(1, max_dim)
    h = rng.randint(1, max_dim)
    n_target = rng.randint(1, max(1, (w * h) // 2))
    start = (rng.randrange(w), rng.randrange(h))
    cells = {start}
    frontier = [start]
    while len(cells) < n_target and frontier:
        x, y = frontier[rng.randrange(len(frontier))]
        nbrs = [(x + dx, y + dy) for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                if 0 <= x + dx < w and 0 <= y + dy < h and (x + dx, y + dy) not in cells]
        if not nbrs:
            frontier.remove((x, y))
            continue
        c = nbrs[rng.randrange(len(nbrs))]
        cells.add(c)
        frontier.append(c)
    return PixelShape.from_local_cells(np.array(sorted(cells), dtype=np.int64))


def layout_feasible(placed: list[tuple[frozenset, tuple[int, int]]],
                    container_w: int, container_l: int) -> bool:
    """All-pairs pixel-overlap and containment check on placed cell sets."""
    absolute = []
    for cells, (x, y) in placed:
        cs = shifted(cells, (x, y))
        for cx, cy in cs:
            if not (0 <= cx < container_l and 0 <= cy < container_w):
                return False
        absolute.append(cs)
    for i in range(len(absolute)):
        for j in range(i + 1, len(absolute)):
            if not absolute[i].isdisjoint(absolute[j]):
                return False
    return True
