import random

import numpy as np
import pytest

from rasterpack import oracle
from rasterpack.nfp import NfpTable, build_nfp, detect_corners
from rasterpack.raster import PixelShape, encode

from conftest import rect

SINGLE = rect(1, 1)
BLOCK3 = rect(3, 3)


class TestBuildNfp:
    def test_single_cell_pair(self):
        n = build_nfp(SINGLE, SINGLE)
        assert set(map(tuple, n.cell_array().tolist())) == {(0, 0)}

    def test_two_by_one_vs_single(self):
        a = rect(2, 1)  # offsets (-1,0),(0,0)
        n = build_nfp(a, SINGLE)
        got = set(map(tuple, n.cell_array().tolist()))
        assert got == oracle.brute_nfp(a.cell_set(), SINGLE.cell_set())
        assert got == {(-1, 0), (0, 0)}

    def test_3x3_pair_is_5x5(self):
        n = build_nfp(BLOCK3, BLOCK3)
        got = set(map(tuple, n.cell_array().tolist()))
        assert got == {(x, y) for x in range(-2, 3) for y in range(-2, 3)}
        assert got == oracle.brute_nfp(BLOCK3.cell_set(), BLOCK3.cell_set())

    def test_rows_and_columns_decode_identically(self):
        rng = random.Random(21)
        for _ in range(40):
            a = oracle.random_shape(rng, 12)
            b = oracle.random_shape(rng, 12)
            ds = build_nfp(a, b).ds
            rows = set(map(tuple, ds.cells_from_rows().tolist()))
            cols = set(map(tuple, ds.cells_from_cols().tolist()))
            assert rows == cols

    def test_oracle_equivalence_random(self):
        rng = random.Random(42)
        for _ in range(60):
            a = oracle.random_shape(rng, 14)
            b = oracle.random_shape(rng, 14)
            nfp = build_nfp(a, b)
            engine = set(map(tuple, nfp.cell_array().tolist()))
            assert engine == oracle.brute_nfp(a.cell_set(), b.cell_set())

    def test_symmetry(self):
        rng = random.Random(77)
        for _ in range(25):
            a = oracle.random_shape(rng, 10)
            b = oracle.random_shape(rng, 10)
            nab = build_nfp(a, b)
            nba = build_nfp(b, a)
            x0, y0, x1, y1 = nab.bbox
            for _ in range(40):
                u = (rng.randint(x0 - 1, x1 + 1), rng.randint(y0 - 1, y1 + 1))
                assert nab.contains(u) == nba.contains((-u[0], -u[1]))


class TestQueries:
    def test_contains_examples(self):
        n = build_nfp(BLOCK3, BLOCK3)
        assert n.contains((0, 0))
        assert not n.contains((3, 0))
        assert n.contains((2, 2))

    def test_depth_examples(self):
        assert build_nfp(SINGLE, SINGLE).penetration_depth((0, 0), "horizontal") == 1
        n = build_nfp(BLOCK3, BLOCK3)
        assert n.penetration_depth((0, 0), "horizontal") == 3
        assert n.penetration_depth((0, 0), "vertical") == 3
        assert n.penetration_depth((9, 9), "horizontal") == 0
        # brute-force confirmation of the coincident case
        assert oracle.brute_depth(BLOCK3.cell_set(), BLOCK3.cell_set(),
                                  (0, 0), "horizontal") == 3

    def test_pair_penalty_examples(self):
        assert build_nfp(BLOCK3, BLOCK3).pair_penalty((0, 0)) == 3
        bar = rect(3, 1)
        n = build_nfp(bar, SINGLE)
        assert n.pair_penalty((0, 0)) == 1
        assert n.pair_penalty((0, 0)) == oracle.brute_pair_penalty(
            bar.cell_set(), SINGLE.cell_set(), (0, 0))
        assert n.pair_penalty((5, 5)) == 0

    def test_depth_oracle_random(self):
        rng = random.Random(13)
        done = 0
        while done < 40:
            a = oracle.random_shape(rng, 10)
            b = oracle.random_shape(rng, 10)
            nfp = build_nfp(a, b)
            inside = sorted(map(tuple, nfp.cell_array().tolist()))
            if not inside:
                continue
            u = inside[rng.randrange(len(inside))]
            for axis in ("horizontal", "vertical"):
                assert nfp.penetration_depth(u, axis) == oracle.brute_depth(
                    a.cell_set(), b.cell_set(), u, axis)
            done += 1


class TestCorners:
    def test_square_8x8(self):
        n = build_nfp(rect(8, 8), SINGLE)
        got = set(map(tuple, n.corners.tolist()))
        assert got == oracle.brute_segment_corners(
            set(map(tuple, n.cell_array().tolist())))
        x0, y0, x1, y1 = n.bbox
        extremes = {(x0, y0), (x0, y1), (x1, y0), (x1, y1)}
        assert extremes <= got
        # straight-edge midpoints must be rejected
        midx = (x0 + x1) // 2
        midy = (y0 + y1) // 2
        assert (midx, y0) not in got and (x0, midy) not in got
        # corners live on the contour
        cells = set(map(tuple, n.cell_array().tolist()))
        for c in got:
            assert c in cells
            assert any((c[0] + dx, c[1] + dy) not in cells
                       for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)))

    def test_bar_20x1(self):
        ds = encode(rect(20, 1))
        got = set(map(tuple, detect_corners(ds).tolist()))
        assert got == oracle.brute_segment_corners(rect(20, 1).cell_set())
        assert (-10, 0) in got and (9, 0) in got
        assert (0, 0) not in got and (-1, 0) not in got

    def test_single_cell_is_its_own_corner(self):
        assert set(map(tuple, detect_corners(encode(SINGLE)).tolist())) == {(0, 0)}

    def test_random_agreement_with_brute_force(self):
        rng = random.Random(31)
        for _ in range(30):
            s = oracle.random_shape(rng, 14)
            got = set(map(tuple, detect_corners(encode(s)).tolist()))
            assert got == oracle.brute_segment_corners(s.cell_set())


class TestCandidates:
    def test_square_middle_row(self):
        n = build_nfp(rect(8, 8), SINGLE)
        x0, y0, x1, y1 = n.bbox
        row = (y0 + y1) // 2
        cands = n.candidate_offsets(row, "horizontal")
        raw = [x for x in range(x0, x1 + 1) if n.contains((x, row))]
        assert set(cands) <= set(raw)
        assert {x0, x1} <= set(cands)
        assert len(cands) < len(raw)

    def test_row_outside_is_empty(self):
        n = build_nfp(rect(8, 8), SINGLE)
        assert n.candidate_offsets(10 ** 6, "horizontal") == []

    def test_u_shape_row_with_two_strips(self):
        u = PixelShape.from_local_cells([(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)])
        n = build_nfp(u, SINGLE)
        two_strip_rows = [n.ds.y0 + r for r in range(n.ds.nrows)
                          if len(n.ds.row_strips(n.ds.y0 + r)) == 2]
        assert two_strip_rows
        row = two_strip_rows[0]
        strips = n.ds.row_strips(row)
        cands = n.candidate_offsets(row, "horizontal")
        for lo, hi in strips:
            assert lo in cands and hi in cands
        assert all(n.contains((x, row)) for x in cands)

    def test_vertical_axis_candidates(self):
        n = build_nfp(rect(8, 8), SINGLE)
        x0, y0, x1, y1 = n.bbox
        col = (x0 + x1) // 2
        cands = n.candidate_offsets(col, "vertical")
        raw = [y for y in range(y0, y1 + 1) if n.contains((col, y))]
        assert cands and set(cands) <= set(raw)
        assert {y0, y1} <= set(cands)

    def test_soundness_and_endpoint_optimality_random(self):
        rng = random.Random(55)
        checked = 0
        while checked < 60:
            a = oracle.random_shape(rng, 12)
            b = oracle.random_shape(rng, 12)
            nfp = build_nfp(a, b)
            x0, y0, x1, y1 = nfp.bbox
            row = rng.randint(y0, y1)
            strips = nfp.ds.row_strips(row)
            if not strips:
                continue
            cands = nfp.candidate_offsets(row, "horizontal")
            overlaps = [x for x in range(x0, x1 + 1) if nfp.contains((x, row))]
            assert set(cands) <= set(overlaps)
            depths = {x: nfp.penetration_depth((x, row), "horizontal")
                      for x in overlaps}
            endpoints = [e for lo, hi in strips for e in (lo, hi)]
            assert min(depths.values()) == min(depths[e] for e in endpoints)
            checked += 1


class TestMonotoneFlags:
    def test_convex_block_is_monotone(self):
        n = build_nfp(BLOCK3, BLOCK3)
        assert n.y_monotone and n.x_monotone

    def test_split_rows_are_not_y_monotone(self):
        # two distant cells produce an NFP with a two-strip row
        a = PixelShape.from_local_cells([(0, 0), (6, 0)])
        n = build_nfp(a, SINGLE)
        assert not n.y_monotone


class TestTable:
    def test_shared_entries(self):
        shapes = [rect(2, 1), rect(1, 2), rect(2, 2)]
        table = NfpTable(shapes)
        assert len(table.nfps) == 9
        assert table.get(0, 1) is table.nfps[table.pair_index(0, 1)]
        # the packed arrays answer queries identically to the objects
        from rasterpack._kernels import point_fs
        rng = random.Random(3)
        for _ in range(200):
            a = rng.randrange(3)
            b = rng.randrange(3)
            u = (rng.randint(-4, 4), rng.randint(-4, 4))
            out = np.zeros(1, dtype=np.int64)
            point_fs(np.array([table.pair_index(a, b)], dtype=np.int64),
                     np.array([u[0]], dtype=np.int64),
                     np.array([u[1]], dtype=np.int64),
                     out, *table.strip_arrays)
            assert int(out[0]) == table.get(a, b).pair_penalty(u)
