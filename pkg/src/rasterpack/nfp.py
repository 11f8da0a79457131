"""No-fit polygons on the raster grid: construction, queries, corner detection.

NFP(A, B) is the set of relative offsets u = v_B - v_A at which the two
rasters intersect.  It is stored as a double scanline (per-row and per-column
maximal strips), which makes directional penetration-depth queries a row or
column lookup plus a binary search.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

import numpy as np

from . import _kernels
from .raster import DoubleScanline, PixelShape

# Radius-3 Bresenham circle used by the segment-test corner detector,
# in circular order.
CIRCLE16 = np.array(
    [(0, 3), (1, 3), (2, 2), (3, 1), (3, 0), (3, -1), (2, -2), (1, -3),
     (0, -3), (-1, -3), (-2, -2), (-3, -1), (-3, 0), (-3, 1), (-2, 2), (-1, 3)],
    dtype=np.int64,
)
SEGMENT_ARC = 9
_CIRCLE_R = 3


class Nfp:
    """One ordered oriented pair's no-fit set plus its detected corners."""

    __slots__ = ("ds", "corners", "corner_xs", "corner_ys",
                 "y_monotone", "x_monotone", "bbox")

    def __init__(self, ds: DoubleScanline):
        self.ds = ds
        self.bbox = (ds.x0, ds.y0, ds.x0 + ds.ncols - 1, ds.y0 + ds.nrows - 1)
        self.corners = detect_corners(ds)
        if len(self.corners):
            self.corner_xs = np.unique(self.corners[:, 0])
            self.corner_ys = np.unique(self.corners[:, 1])
        else:
            self.corner_xs = np.empty(0, dtype=np.int64)
            self.corner_ys = np.empty(0, dtype=np.int64)
        self.y_monotone = _monotone(ds.row_ptr, ds.hx0, ds.hx1)
        self.x_monotone = _monotone(ds.col_ptr, ds.vy0, ds.vy1)

    @property
    def m(self) -> int:
        return self.ds.m

    def contains(self, u) -> bool:
        """Whether the pair overlaps at relative offset u."""
        strips = self.ds.row_strips(int(u[1]))
        if not strips:
            return False
        x = int(u[0])
        i = bisect_right(strips, (x, np.iinfo(np.int64).max)) - 1
        return i >= 0 and strips[i][0] <= x <= strips[i][1]

    def penetration_depth(self, u, axis: str) -> int:
        """Minimum |s| with u + s*d outside the set, 0 if already outside."""
        x, y = int(u[0]), int(u[1])
        if axis == "horizontal":
            strips = self.ds.row_strips(y)
            c = x
        elif axis == "vertical":
            strips = self.ds.col_strips(x)
            c = y
        else:
            raise ValueError(f"unknown axis {axis!r}")
        if not strips:
            return 0
        i = bisect_right(strips, (c, np.iinfo(np.int64).max)) - 1
        if i < 0 or c > strips[i][1]:
            return 0
        lo, hi = strips[i]
        # strips are maximal, so the cell just past either end is outside
        return min(c - lo, hi - c) + 1

    def pair_penalty(self, u) -> int:
        dh = self.penetration_depth(u, "horizontal")
        if dh == 0:
            return 0
        return min(dh, self.penetration_depth(u, "vertical"))

    def candidate_offsets(self, row_or_col: int, axis: str) -> list[int]:
        """Reduced line-search positions on one sweep line, in offset coords.

        Union of the strip endpoints on the line and the in-strip projections
        of the detected corners; always a subset of the overlap positions.
        """
        if axis == "horizontal":
            strips = self.ds.row_strips(row_or_col)
            proj = self.corner_xs
        elif axis == "vertical":
            strips = self.ds.col_strips(row_or_col)
            proj = self.corner_ys
        else:
            raise ValueError(f"unknown axis {axis!r}")
        out: set[int] = set()
        for lo, hi in strips:
            out.add(lo)
            out.add(hi)
            i = bisect_left(proj, lo)
            while i < len(proj) and proj[i] <= hi:
                out.add(int(proj[i]))
                i += 1
        return sorted(out)

    def cell_array(self) -> np.ndarray:
        return self.ds.cells_from_rows()


def _monotone(ptr, lo, hi) -> bool:
    counts = np.diff(ptr)
    if not np.all(counts == 1):
        return False
    if len(lo) < 2:
        return True
    a = np.maximum(lo[:-1], lo[1:])
    b = np.minimum(hi[:-1], hi[1:])
    return bool(np.all(a <= b + 1))


def _mask_from_rows(ds: DoubleScanline, pad: int) -> np.ndarray:
    h = ds.nrows + 2 * pad
    w = ds.ncols + 2 * pad
    mask = np.zeros((h, w), dtype=bool)
    for r in range(ds.nrows):
        p0, p1 = ds.row_ptr[r], ds.row_ptr[r + 1]
        for p in range(p0, p1):
            a = ds.hx0[p] - ds.x0 + pad
            b = ds.hx1[p] - ds.x0 + pad
            mask[r + pad, a:b + 1] = True
    return mask


def detect_corners(ds: DoubleScanline) -> np.ndarray:
    """Segment-test corners of a strip-encoded binary shape.

    Contour cells (a 4-neighbor outside the set) are kept when the radius-3
    circle of 16 cells around them carries a contiguous arc of at least 9
    cells outside the shape; cells beyond the bounding box count as outside.
    Contour centers are inside the shape, so on a binary image only the
    outside arc can clear an intensity threshold; an inside-arc branch would
    fire on every straight-edge cell and reduce nothing.  Shapes smaller than
    the test circle in both dimensions return their full contour.
    """
    pad = _CIRCLE_R
    mask = _mask_from_rows(ds, pad)
    core = mask[pad:-pad, pad:-pad] if pad else mask
    h, w = core.shape
    inner = core.copy()
    inner &= mask[pad - 1:pad - 1 + h, pad:pad + w]
    inner &= mask[pad + 1:pad + 1 + h, pad:pad + w]
    inner &= mask[pad:pad + h, pad - 1:pad - 1 + w]
    inner &= mask[pad:pad + h, pad + 1:pad + 1 + w]
    contour = core & ~inner
    cy, cx = np.nonzero(contour)
    if len(cx) == 0:
        return np.empty((0, 2), dtype=np.int64)
    if ds.ncols < 2 * _CIRCLE_R + 1 and ds.nrows < 2 * _CIRCLE_R + 1:
        keep = np.ones(len(cx), dtype=bool)
    else:
        samples = np.empty((16, len(cx)), dtype=bool)
        for i, (dx, dy) in enumerate(CIRCLE16):
            samples[i] = mask[cy + pad + dy, cx + pad + dx]
        keep = _segment_test(samples)
    pts = np.stack([cx[keep] + ds.x0, cy[keep] + ds.y0], axis=1)
    return pts.astype(np.int64)


def _segment_test(samples: np.ndarray) -> np.ndarray:
    """Arc of >= SEGMENT_ARC contiguous outside samples on the 16-cell circle."""
    outs = ~samples
    doubled = np.concatenate([outs, outs], axis=0)
    keep = np.zeros(samples.shape[1], dtype=bool)
    for s in range(16):
        keep |= doubled[s:s + SEGMENT_ARC].all(axis=0)
    return keep


def build_nfp(a: PixelShape, b: PixelShape) -> Nfp:
    """No-fit set of the ordered pair (a, b) over offsets u = v_b - v_a.

    Row strips come from convolving the two row encodings, column strips from
    the column encodings; the two derivations must decode identically, which
    the test suite checks against a brute-force oracle.
    """
    sa, sb = a.scanlines, b.scanlines
    ry0, rptr, rlo, rhi = _kernels.convolve_strips(
        sa.y0, sa.row_ptr, sa.hx0, sa.hx1, sb.y0, sb.row_ptr, sb.hx0, sb.hx1)
    cx0, cptr, clo, chi = _kernels.convolve_strips(
        sa.x0, sa.col_ptr, sa.vy0, sa.vy1, sb.x0, sb.col_ptr, sb.vy0, sb.vy1)
    ds = DoubleScanline(ry0, len(rptr) - 1, rptr, rlo, rhi,
                        cx0, len(cptr) - 1, cptr, clo, chi)
    return Nfp(ds)


class NfpTable:
    """Shared table of NFPs for every ordered pair of oriented shape classes.

    Pieces reference their (shape class, orientation) slot, so pieces sharing
    a shape reuse one NFP.  The same data is packed into flat CSR arrays for
    the solver kernels.
    """

    def __init__(self, oriented_shapes: list[PixelShape]):
        self.shapes = oriented_shapes
        c = len(oriented_shapes)
        self.n_oriented = c
        self.nfps: list[Nfp] = []
        for sa in oriented_shapes:
            for sb in oriented_shapes:
                self.nfps.append(build_nfp(sa, sb))
        self._pack()

    def pair_index(self, a: int, b: int) -> int:
        return a * self.n_oriented + b

    def get(self, a: int, b: int) -> Nfp:
        return self.nfps[self.pair_index(a, b)]

    def _pack(self) -> None:
        q = len(self.nfps)
        self.row_y0 = np.empty(q, dtype=np.int64)
        self.row_n = np.empty(q, dtype=np.int64)
        self.rptr_base = np.empty(q, dtype=np.int64)
        self.col_x0 = np.empty(q, dtype=np.int64)
        self.col_n = np.empty(q, dtype=np.int64)
        self.cptr_base = np.empty(q, dtype=np.int64)
        self.cx_base = np.empty(q, dtype=np.int64)
        self.cx_n = np.empty(q, dtype=np.int64)
        self.cy_base = np.empty(q, dtype=np.int64)
        self.cy_n = np.empty(q, dtype=np.int64)
        row_ptr_parts = []
        col_ptr_parts = []
        hlo_parts, hhi_parts, vlo_parts, vhi_parts = [], [], [], []
        cx_parts, cy_parts = [], []
        rp = cp = hs = vs = cxs_n = cys_n = 0
        for i, nfp in enumerate(self.nfps):
            ds = nfp.ds
            self.row_y0[i] = ds.y0
            self.row_n[i] = ds.nrows
            self.rptr_base[i] = rp
            row_ptr_parts.append(ds.row_ptr + hs)
            rp += len(ds.row_ptr)
            hlo_parts.append(ds.hx0)
            hhi_parts.append(ds.hx1)
            hs += len(ds.hx0)
            self.col_x0[i] = ds.x0
            self.col_n[i] = ds.ncols
            self.cptr_base[i] = cp
            col_ptr_parts.append(ds.col_ptr + vs)
            cp += len(ds.col_ptr)
            vlo_parts.append(ds.vy0)
            vhi_parts.append(ds.vy1)
            vs += len(ds.vy0)
            self.cx_base[i] = cxs_n
            self.cx_n[i] = len(nfp.corner_xs)
            cx_parts.append(nfp.corner_xs)
            cxs_n += len(nfp.corner_xs)
            self.cy_base[i] = cys_n
            self.cy_n[i] = len(nfp.corner_ys)
            cy_parts.append(nfp.corner_ys)
            cys_n += len(nfp.corner_ys)
        self.row_ptr = np.concatenate(row_ptr_parts)
        self.hlo = np.concatenate(hlo_parts)
        self.hhi = np.concatenate(hhi_parts)
        self.col_ptr = np.concatenate(col_ptr_parts)
        self.vlo = np.concatenate(vlo_parts)
        self.vhi = np.concatenate(vhi_parts)
        self.cxs = np.concatenate(cx_parts) if cx_parts else np.empty(0, np.int64)
        self.cys = np.concatenate(cy_parts) if cy_parts else np.empty(0, np.int64)

    @property
    def strip_arrays(self) -> tuple:
        """Argument bundle for the strip-query kernels."""
        return (self.row_y0, self.row_n, self.rptr_base, self.row_ptr,
                self.hlo, self.hhi,
                self.col_x0, self.col_n, self.cptr_base, self.col_ptr,
                self.vlo, self.vhi)

    @property
    def corner_arrays(self) -> tuple:
        return (self.cx_base, self.cx_n, self.cxs,
                self.cy_base, self.cy_n, self.cys)
