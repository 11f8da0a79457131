"""Pixel-set shapes: rasterization of vector outlines and scanline encodings.

Shapes are finite sets of grid cells stored relative to a reference point,
the floored center of the tight bounding box.  A cell at local bounding-box
coordinate (a, b), 0 <= a < l, 0 <= b < w, is stored as the offset
(a - l//2, b - w//2).  Cell (i, j) of the ambient grid covers the unit square
[i, i+1) x [j, j+1); its center is (i + 0.5, j + 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRaster, InconsistentEncoding, ValidationError

# Chord deviation budget for arc flattening, in pixels.  Below half a pixel
# so the raster does not depend on flattening order.
ARC_CHORD_TOL_PX = 0.25

_CLOSE_TOL = 1e-9


@dataclass(frozen=True)
class LineTo:
    """Straight boundary segment; starts where the previous segment ended."""

    end: tuple[float, float]


@dataclass(frozen=True)
class ArcTo:
    """Circular arc from start_deg to end_deg around center.

    The implied start point center + radius*dir(start_deg) must coincide with
    the previous segment's endpoint.  ccw selects the sweep direction.
    """

    center: tuple[float, float]
    radius: float
    start_deg: float
    end_deg: float
    ccw: bool = True

    @property
    def end(self) -> tuple[float, float]:
        a = math.radians(self.end_deg)
        return (
            self.center[0] + self.radius * math.cos(a),
            self.center[1] + self.radius * math.sin(a),
        )

    def start(self) -> tuple[float, float]:
        a = math.radians(self.start_deg)
        return (
            self.center[0] + self.radius * math.cos(a),
            self.center[1] + self.radius * math.sin(a),
        )

    def sweep_rad(self) -> float:
        """Signed sweep angle in radians (positive ccw), in (0, 2*pi]."""
        s = math.radians(self.start_deg)
        e = math.radians(self.end_deg)
        if self.ccw:
            d = (e - s) % (2 * math.pi)
            return d if d > 0 else 2 * math.pi
        d = (s - e) % (2 * math.pi)
        return -(d if d > 0 else 2 * math.pi)


@dataclass
class Outline:
    """Closed boundary chain (lines and arcs) plus at most one level of holes."""

    segments: list
    holes: list["Outline"] = field(default_factory=list)

    def validate(self) -> None:
        if not self.segments:
            raise ValidationError("outline has no segments")
        pts = self.vertices()
        # Each segment starts at the previous endpoint; the chain is closed by
        # construction for lines, so only arc start points can break continuity.
        for seg, start in zip(self.segments, [pts[-1]] + pts[:-1]):
            if isinstance(seg, ArcTo) and _dist(seg.start(), start) > _CLOSE_TOL * 1e3:
                raise ValidationError("arc start point does not meet previous endpoint")
        outer_poly = self.flatten(1.0)
        if abs(_shoelace(outer_poly)) <= 0.0:
            raise ValidationError("outer boundary has zero area")
        for hole in self.holes:
            if hole.holes:
                raise ValidationError("nested holes beyond depth 1 are not supported")
            hole.validate()
            for p in hole.flatten(1.0):
                if not _point_strictly_inside(p, outer_poly):
                    raise ValidationError("hole is not strictly inside the outer boundary")

    def vertices(self) -> list[tuple[float, float]]:
        """Endpoints of every segment, in chain order."""
        return [tuple(seg.end) for seg in self.segments]

    def flatten(self, scale: float) -> list[tuple[float, float]]:
        """Polygonal approximation of the outer chain, scaled to pixel units.

        Arcs are split so the chord deviation stays below ARC_CHORD_TOL_PX
        after scaling.
        """
        pts: list[tuple[float, float]] = []
        for seg in self.segments:
            if isinstance(seg, LineTo):
                pts.append((seg.end[0] * scale, seg.end[1] * scale))
            else:
                r_px = seg.radius * scale
                sweep = seg.sweep_rad()
                if r_px <= ARC_CHORD_TOL_PX:
                    n = 1
                else:
                    max_step = 2.0 * math.acos(max(-1.0, 1.0 - ARC_CHORD_TOL_PX / r_px))
                    n = max(1, math.ceil(abs(sweep) / max_step))
                a0 = math.radians(seg.start_deg)
                for i in range(1, n + 1):
                    a = a0 + sweep * i / n
                    pts.append(
                        (
                            (seg.center[0] + seg.radius * math.cos(a)) * scale,
                            (seg.center[1] + seg.radius * math.sin(a)) * scale,
                        )
                    )
        return pts

    def bbox(self) -> tuple[float, float, float, float]:
        poly = self.flatten(1.0)
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        return min(xs), min(ys), max(xs), max(ys)

    def rotated(self, degrees: float) -> "Outline":
        """Rotate the outline about its bounding-box center in real coordinates."""
        x0, y0, x1, y1 = self.bbox()
        cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        c = math.cos(math.radians(degrees))
        s = math.sin(math.radians(degrees))

        def rot(p):
            dx, dy = p[0] - cx, p[1] - cy
            return (cx + c * dx - s * dy, cy + s * dx + c * dy)

        segs = []
        for seg in self.segments:
            if isinstance(seg, LineTo):
                segs.append(LineTo(rot(seg.end)))
            else:
                segs.append(
                    ArcTo(
                        center=rot(seg.center),
                        radius=seg.radius,
                        start_deg=seg.start_deg + degrees,
                        end_deg=seg.end_deg + degrees,
                        ccw=seg.ccw,
                    )
                )
        return Outline(segs, [h.rotated_about(degrees, (cx, cy)) for h in self.holes])

    def rotated_about(self, degrees: float, center: tuple[float, float]) -> "Outline":
        c = math.cos(math.radians(degrees))
        s = math.sin(math.radians(degrees))
        cx, cy = center

        def rot(p):
            dx, dy = p[0] - cx, p[1] - cy
            return (cx + c * dx - s * dy, cy + s * dx + c * dy)

        segs = []
        for seg in self.segments:
            if isinstance(seg, LineTo):
                segs.append(LineTo(rot(seg.end)))
            else:
                segs.append(
                    ArcTo(rot(seg.center), seg.radius, seg.start_deg + degrees,
                          seg.end_deg + degrees, seg.ccw)
                )
        return Outline(segs, [h.rotated_about(degrees, center) for h in self.holes])


def polygon_outline(points: list[tuple[float, float]],
                    holes: list["Outline"] | None = None) -> Outline:
    """Outline made of straight segments through the given vertices."""
    segs = [LineTo(tuple(map(float, p))) for p in points[1:]] + [
        LineTo(tuple(map(float, points[0])))
    ]
    return Outline(segs, list(holes) if holes else [])


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _shoelace(poly) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _point_strictly_inside(p, poly) -> bool:
    """Even-odd test; points within 1e-9 of an edge count as not inside."""
    x, y = p
    inside = False
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        # distance to segment
        dx, dy = x1 - x0, y1 - y0
        ll = dx * dx + dy * dy
        t = 0.0 if ll == 0 else max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / ll))
        if _dist(p, (x0 + t * dx, y0 + t * dy)) <= 1e-9:
            return False
        if (y0 <= y < y1) or (y1 <= y < y0):
            xc = x0 + (y - y0) * dx / dy
            if x < xc:
                inside = not inside
    return inside


def _fill_rows(poly: list[tuple[float, float]]) -> dict[int, list[tuple[int, int]]]:
    """Cells whose center lies inside the polygon, as per-row half-open runs.

    Centers exactly on a boundary count as inside iff the boundary is a
    bottom or left edge (half-open crossing rule).
    """
    ys = [p[1] for p in poly]
    jmin = math.floor(min(ys) - 0.5)
    jmax = math.ceil(max(ys))
    rows: dict[int, list[tuple[int, int]]] = {}
    edges = list(zip(poly, poly[1:] + poly[:1]))
    for j in range(jmin, jmax + 1):
        yc = j + 0.5
        xs: list[float] = []
        for (x0, y0), (x1, y1) in edges:
            if (y0 <= yc < y1) or (y1 <= yc < y0):
                xs.append(x0 + (yc - y0) * (x1 - x0) / (y1 - y0))
        if not xs:
            continue
        xs.sort()
        runs = []
        for a, b in zip(xs[::2], xs[1::2]):
            i0 = math.ceil(a - 0.5)   # first center >= a
            i1 = math.ceil(b - 0.5)   # first center >= b (exclusive)
            if i1 > i0:
                runs.append((i0, i1))
        if runs:
            rows[j] = _merge_runs(runs)
    return rows


def _merge_runs(runs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    runs.sort()
    out = [runs[0]]
    for a, b in runs[1:]:
        if a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _subtract_runs(base: list[tuple[int, int]],
                   cuts: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for a, b in base:
        segs = [(a, b)]
        for c, d in cuts:
            nxt = []
            for s, e in segs:
                if d <= s or c >= e:
                    nxt.append((s, e))
                    continue
                if s < c:
                    nxt.append((s, c))
                if d < e:
                    nxt.append((d, e))
            segs = nxt
        out.extend(segs)
    return out


class PixelShape:
    """Nonempty set of grid cells relative to the bounding-box-center reference."""

    __slots__ = ("cells", "l", "w", "area", "_scan")

    def __init__(self, cells: np.ndarray):
        """cells: (N, 2) int array of offsets, already reference-centered."""
        cells = np.asarray(cells, dtype=np.int64)
        if cells.size == 0:
            raise EmptyRaster("shape has no cells")
        order = np.lexsort((cells[:, 0], cells[:, 1]))
        self.cells = cells[order]
        xmin, ymin = self.cells.min(axis=0)
        xmax, ymax = self.cells.max(axis=0)
        self.l = int(xmax - xmin + 1)
        self.w = int(ymax - ymin + 1)
        self.area = int(len(self.cells))
        if xmin != -(self.l // 2) or ymin != -(self.w // 2):
            raise ValueError("cells are not reference-centered")
        self._scan = None

    @classmethod
    def from_local_cells(cls, cells) -> "PixelShape":
        """Build from arbitrary integer cells; re-centers to the reference convention."""
        arr = np.asarray(list(cells) if not isinstance(cells, np.ndarray) else cells,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size == 0:
            raise EmptyRaster("shape has no cells")
        xmin, ymin = arr.min(axis=0)
        xmax, ymax = arr.max(axis=0)
        l = int(xmax - xmin + 1)
        w = int(ymax - ymin + 1)
        ref = np.array([xmin + l // 2, ymin + w // 2], dtype=np.int64)
        return cls(arr - ref)

    @property
    def ref_offset(self) -> tuple[int, int]:
        """Reference position within the local bounding box."""
        return (self.l // 2, self.w // 2)

    def cell_set(self) -> frozenset:
        return frozenset(map(tuple, self.cells.tolist()))

    @property
    def scanlines(self) -> "DoubleScanline":
        if self._scan is None:
            self._scan = encode(self)
        return self._scan

    def grid_rotate(self, degrees: int) -> "PixelShape":
        """Exact cell rotation for multiples of 90 degrees."""
        d = degrees % 360
        if d % 90 != 0:
            raise ValueError("grid_rotate requires a multiple of 90 degrees")
        a = self.cells[:, 0] + self.l // 2   # local coords
        b = self.cells[:, 1] + self.w // 2
        if d == 0:
            return self
        if d == 90:
            la, lb = self.w - 1 - b, a
        elif d == 180:
            la, lb = self.l - 1 - a, self.w - 1 - b
        else:
            la, lb = b, self.l - 1 - a
        return PixelShape.from_local_cells(np.stack([la, lb], axis=1))

    def __eq__(self, other) -> bool:
        return isinstance(other, PixelShape) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.l, self.w, self.area, self.cells.tobytes()))


class DoubleScanline:
    """A cell set encoded twice: maximal per-row and per-column strips.

    Rows: for each y in [y0, y0+nrows), strips (x_start, x_end) inclusive,
    stored CSR-style.  Columns symmetric.  Strip bounds are inclusive.
    """

    __slots__ = ("y0", "nrows", "row_ptr", "hx0", "hx1",
                 "x0", "ncols", "col_ptr", "vy0", "vy1")

    def __init__(self, y0, nrows, row_ptr, hx0, hx1, x0, ncols, col_ptr, vy0, vy1):
        self.y0 = int(y0)
        self.nrows = int(nrows)
        self.row_ptr = np.asarray(row_ptr, dtype=np.int64)
        self.hx0 = np.asarray(hx0, dtype=np.int64)
        self.hx1 = np.asarray(hx1, dtype=np.int64)
        self.x0 = int(x0)
        self.ncols = int(ncols)
        self.col_ptr = np.asarray(col_ptr, dtype=np.int64)
        self.vy0 = np.asarray(vy0, dtype=np.int64)
        self.vy1 = np.asarray(vy1, dtype=np.int64)

    @property
    def m(self) -> int:
        """Number of horizontal strips."""
        return len(self.hx0)

    def row_strips(self, y: int) -> list[tuple[int, int]]:
        r = y - self.y0
        if r < 0 or r >= self.nrows:
            return []
        p0, p1 = self.row_ptr[r], self.row_ptr[r + 1]
        return list(zip(self.hx0[p0:p1].tolist(), self.hx1[p0:p1].tolist()))

    def col_strips(self, x: int) -> list[tuple[int, int]]:
        c = x - self.x0
        if c < 0 or c >= self.ncols:
            return []
        p0, p1 = self.col_ptr[c], self.col_ptr[c + 1]
        return list(zip(self.vy0[p0:p1].tolist(), self.vy1[p0:p1].tolist()))

    def cells_from_rows(self) -> np.ndarray:
        xs = []
        ys = []
        for r in range(self.nrows):
            y = self.y0 + r
            for p in range(self.row_ptr[r], self.row_ptr[r + 1]):
                run = np.arange(self.hx0[p], self.hx1[p] + 1, dtype=np.int64)
                xs.append(run)
                ys.append(np.full(len(run), y, dtype=np.int64))
        if not xs:
            return np.empty((0, 2), dtype=np.int64)
        return np.stack([np.concatenate(xs), np.concatenate(ys)], axis=1)

    def cells_from_cols(self) -> np.ndarray:
        xs = []
        ys = []
        for c in range(self.ncols):
            x = self.x0 + c
            for p in range(self.col_ptr[c], self.col_ptr[c + 1]):
                run = np.arange(self.vy0[p], self.vy1[p] + 1, dtype=np.int64)
                ys.append(run)
                xs.append(np.full(len(run), x, dtype=np.int64))
        if not xs:
            return np.empty((0, 2), dtype=np.int64)
        return np.stack([np.concatenate(xs), np.concatenate(ys)], axis=1)


def _runs_from_sorted(primary: np.ndarray, secondary: np.ndarray):
    """Strip boundaries of cells sorted by (primary, secondary).

    Returns (keys, ptr, lo, hi): for each distinct primary value in
    [keys0, keys0+n), ptr gives the CSR slice of (lo, hi) inclusive runs.
    """
    n = len(primary)
    new_run = np.ones(n, dtype=bool)
    if n > 1:
        same = (primary[1:] == primary[:-1]) & (secondary[1:] == secondary[:-1] + 1)
        new_run[1:] = ~same
    starts = np.flatnonzero(new_run)
    ends = np.append(starts[1:], n) - 1
    run_key = primary[starts]
    lo = secondary[starts]
    hi = secondary[ends]
    k0 = int(primary[0])
    nk = int(primary[-1]) - k0 + 1
    counts = np.zeros(nk, dtype=np.int64)
    np.add.at(counts, run_key - k0, 1)
    ptr = np.zeros(nk + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return k0, nk, ptr, lo, hi


def encode(shape: PixelShape) -> DoubleScanline:
    """Double scanline encoding of a shape; strips are maximal by construction."""
    cells = shape.cells  # sorted by (y, x)
    y0, nrows, row_ptr, hx0, hx1 = _runs_from_sorted(cells[:, 1], cells[:, 0])
    order = np.lexsort((cells[:, 1], cells[:, 0]))
    cx = cells[order]
    x0, ncols, col_ptr, vy0, vy1 = _runs_from_sorted(cx[:, 0], cx[:, 1])
    return DoubleScanline(y0, nrows, row_ptr, hx0, hx1, x0, ncols, col_ptr, vy0, vy1)


def decode(ds: DoubleScanline) -> PixelShape:
    """Inverse of encode; raises InconsistentEncoding if rows and cols disagree."""
    rc = ds.cells_from_rows()
    cc = ds.cells_from_cols()
    if rc.size == 0:
        raise EmptyRaster("scanline encoding is empty")
    key = np.lexsort((rc[:, 0], rc[:, 1]))
    rc = rc[key]
    key = np.lexsort((cc[:, 0], cc[:, 1]))
    cc = cc[key]
    if rc.shape != cc.shape or not np.array_equal(rc, cc):
        raise InconsistentEncoding("row and column scanlines decode differently")
    return PixelShape(rc)


def rasterize(outline: Outline, scale: float) -> PixelShape:
    """Cells whose center lies inside the scaled outer boundary and outside holes.

    Raises EmptyRaster when no pixel center is covered (resolution too low).
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    rows = _fill_rows(outline.flatten(scale))
    hole_rows = [_fill_rows(h.flatten(scale)) for h in outline.holes]
    cells_x = []
    cells_y = []
    for j in sorted(rows):
        runs = rows[j]
        for hr in hole_rows:
            if j in hr:
                runs = _subtract_runs(runs, hr[j])
        for a, b in runs:
            run = np.arange(a, b, dtype=np.int64)
            cells_x.append(run)
            cells_y.append(np.full(len(run), j, dtype=np.int64))
    if not cells_x:
        raise EmptyRaster("no pixel center inside shape at this scale")
    arr = np.stack([np.concatenate(cells_x), np.concatenate(cells_y)], axis=1)
    if arr.size == 0:
        raise EmptyRaster("no pixel center inside shape at this scale")
    return PixelShape.from_local_cells(arr)


def rotate_and_rasterize(outline: Outline, degrees: int, scale: float) -> PixelShape:
    """Raster of the outline rotated about its bounding-box center.

    Multiples of 90 degrees are exact grid rotations of the base raster;
    other angles re-rasterize the rotated outline to avoid compounding
    raster error.
    """
    d = degrees % 360
    if d % 90 == 0:
        return rasterize(outline, scale).grid_rotate(d)
    return rasterize(outline.rotated(d), scale)
