"""JIT-compiled hot paths: strip convolution, depth queries, line search.

All strip tables use a CSR layout.  Per shape q:
  row_y0[q], row_n[q]   : first row index and row count of the bounding box
  rptr_base[q]          : base of the row-pointer slice in row_ptr
  row_ptr[...]          : absolute offsets into hlo/hhi (inclusive strip bounds)
and symmetrically col_x0/col_n/cptr_base/col_ptr/vlo/vhi for columns.
Corner projections are sorted per shape in cxs (x values) and cys (y values)
with base/count arrays.
"""

import numpy as np
from numba import njit

INT = np.int64


@njit(cache=True, inline="always")
def _depth_at(q, ux, uy,
              row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
              col_x0, col_n, cptr_base, col_ptr, vlo, vhi):
    """min(horizontal, vertical) penetration depth at relative offset (ux, uy)."""
    rr = uy - row_y0[q]
    if rr < 0 or rr >= row_n[q]:
        return 0
    s0 = row_ptr[rptr_base[q] + rr]
    s1 = row_ptr[rptr_base[q] + rr + 1]
    a = s0
    b = s1
    while a < b:
        mid = (a + b) >> 1
        if hlo[mid] <= ux:
            a = mid + 1
        else:
            b = mid
    i = a - 1
    if i < s0 or ux > hhi[i]:
        return 0
    dh = hhi[i] - ux + 1
    t = ux - hlo[i] + 1
    if t < dh:
        dh = t
    cc = ux - col_x0[q]
    c0 = col_ptr[cptr_base[q] + cc]
    c1 = col_ptr[cptr_base[q] + cc + 1]
    a = c0
    b = c1
    while a < b:
        mid = (a + b) >> 1
        if vlo[mid] <= uy:
            a = mid + 1
        else:
            b = mid
    j = a - 1
    if j < c0 or uy > vhi[j]:
        # row and column encodings disagree; should be unreachable
        return dh
    dv = vhi[j] - uy + 1
    t = uy - vlo[j] + 1
    if t < dv:
        dv = t
    return dh if dh < dv else dv


@njit(cache=True)
def point_fs(qs, uxs, uys, out,
             row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
             col_x0, col_n, cptr_base, col_ptr, vlo, vhi):
    """Pairwise penalties at one relative offset per pair; fills out."""
    for p in range(len(qs)):
        out[p] = _depth_at(qs[p], uxs[p], uys[p],
                           row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
                           col_x0, col_n, cptr_base, col_ptr, vlo, vhi)


@njit(cache=True)
def line_search_kernel(horizontal, reduce_cands, lo, hi,
                       qs, dxs, dys, alphas,
                       row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
                       col_x0, col_n, cptr_base, col_ptr, vlo, vhi,
                       cx_base, cx_n, cxs, cy_base, cy_n, cys):
    """Best translation t in [lo, hi] along one axis for a moving piece.

    Pair p pins the moving piece against a fixed piece through shape qs[p] at
    base offset (dxs[p], dys[p]); the moving piece sits at relative offset
    (dxs[p] + t, dys[p]) for a horizontal sweep, (dxs[p], dys[p] + t) vertical.

    Returns (free_found, free_t, best_t, best_weighted, best_unweighted):
    if any overlap-free t exists, the minimum such t is reported with
    free_found = 1; otherwise the (weighted-) penalty-minimizing candidate,
    ties broken by smallest |t| then smaller t.  t = 0 is always a candidate.
    """
    npairs = len(qs)

    # overlap intervals in t-space
    cap = 64
    ilo = np.empty(cap, INT)
    ihi = np.empty(cap, INT)
    m = 0
    for p in range(npairs):
        q = qs[p]
        if horizontal:
            rr = dys[p] - row_y0[q]
            if rr < 0 or rr >= row_n[q]:
                continue
            s0 = row_ptr[rptr_base[q] + rr]
            s1 = row_ptr[rptr_base[q] + rr + 1]
            shift = dxs[p]
            slo = hlo
            shi = hhi
        else:
            cc = dxs[p] - col_x0[q]
            if cc < 0 or cc >= col_n[q]:
                continue
            s0 = col_ptr[cptr_base[q] + cc]
            s1 = col_ptr[cptr_base[q] + cc + 1]
            shift = dys[p]
            slo = vlo
            shi = vhi
        for s in range(s0, s1):
            a = slo[s] - shift
            b = shi[s] - shift
            if a < lo:
                a = lo
            if b > hi:
                b = hi
            if a > b:
                continue
            if m >= cap:
                cap *= 2
                nlo = np.empty(cap, INT)
                nhi = np.empty(cap, INT)
                nlo[:m] = ilo[:m]
                nhi[:m] = ihi[:m]
                ilo = nlo
                ihi = nhi
            ilo[m] = a
            ihi[m] = b
            m += 1

    if m == 0:
        return 1, lo, lo, 0.0, 0

    order = np.argsort(ilo[:m])
    cur = lo
    for oi in range(m):
        i = order[oi]
        if ilo[i] > cur:
            break
        if ihi[i] >= cur:
            cur = ihi[i] + 1
            if cur > hi:
                break
    if cur <= hi:
        return 1, cur, cur, 0.0, 0

    # candidate positions (t-space)
    ccap = 256
    cands = np.empty(ccap, INT)
    nc = 0
    cands[0] = 0
    nc = 1
    for p in range(npairs):
        q = qs[p]
        if horizontal:
            rr = dys[p] - row_y0[q]
            if rr < 0 or rr >= row_n[q]:
                continue
            s0 = row_ptr[rptr_base[q] + rr]
            s1 = row_ptr[rptr_base[q] + rr + 1]
            shift = dxs[p]
            slo = hlo
            shi = hhi
            pbase = cx_base[q]
            pcnt = cx_n[q]
            proj = cxs
        else:
            cc = dxs[p] - col_x0[q]
            if cc < 0 or cc >= col_n[q]:
                continue
            s0 = col_ptr[cptr_base[q] + cc]
            s1 = col_ptr[cptr_base[q] + cc + 1]
            shift = dys[p]
            slo = vlo
            shi = vhi
            pbase = cy_base[q]
            pcnt = cy_n[q]
            proj = cys
        for s in range(s0, s1):
            a = slo[s]
            b = shi[s]
            if a < lo + shift:
                a = lo + shift
            if b > hi + shift:
                b = hi + shift
            if a > b:
                continue
            if reduce_cands:
                need = 2
                # corners projected inside this strip
                la = pbase
                lb = pbase + pcnt
                while la < lb:
                    mid = (la + lb) >> 1
                    if proj[mid] < a:
                        la = mid + 1
                    else:
                        lb = mid
                c_first = la
                c_last = c_first
                while c_last < pbase + pcnt and proj[c_last] <= b:
                    c_last += 1
                need += c_last - c_first
                while nc + need > ccap:
                    ccap *= 2
                    nbuf = np.empty(ccap, INT)
                    nbuf[:nc] = cands[:nc]
                    cands = nbuf
                cands[nc] = a - shift
                cands[nc + 1] = b - shift
                nc += 2
                for ci in range(c_first, c_last):
                    cands[nc] = proj[ci] - shift
                    nc += 1
            else:
                need = b - a + 1
                while nc + need > ccap:
                    ccap *= 2
                    nbuf = np.empty(ccap, INT)
                    nbuf[:nc] = cands[:nc]
                    cands = nbuf
                for x in range(a, b + 1):
                    cands[nc] = x - shift
                    nc += 1

    ts = np.sort(cands[:nc])
    nt = 1
    for i in range(1, nc):
        if ts[i] != ts[nt - 1]:
            ts[nt] = ts[i]
            nt += 1

    w = np.zeros(nt, np.float64)
    fu = np.zeros(nt, INT)
    for p in range(npairs):
        q = qs[p]
        alpha = alphas[p]
        if horizontal:
            rr = dys[p] - row_y0[q]
            if rr < 0 or rr >= row_n[q]:
                continue
            uy = dys[p]
            for ti in range(nt):
                f = _depth_at(q, dxs[p] + ts[ti], uy,
                              row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
                              col_x0, col_n, cptr_base, col_ptr, vlo, vhi)
                if f > 0:
                    w[ti] += alpha * f
                    fu[ti] += f
        else:
            cc = dxs[p] - col_x0[q]
            if cc < 0 or cc >= col_n[q]:
                continue
            ux = dxs[p]
            for ti in range(nt):
                f = _depth_at(q, ux, dys[p] + ts[ti],
                              row_y0, row_n, rptr_base, row_ptr, hlo, hhi,
                              col_x0, col_n, cptr_base, col_ptr, vlo, vhi)
                if f > 0:
                    w[ti] += alpha * f
                    fu[ti] += f

    bi = 0
    for ti in range(1, nt):
        if w[ti] < w[bi]:
            bi = ti
        elif w[ti] == w[bi]:
            ta = ts[ti] if ts[ti] >= 0 else -ts[ti]
            tb = ts[bi] if ts[bi] >= 0 else -ts[bi]
            if ta < tb or (ta == tb and ts[ti] < ts[bi]):
                bi = ti
    return 0, lo, ts[bi], w[bi], fu[bi]


@njit(cache=True)
def convolve_strips(a_y0, a_ptr, a_lo, a_hi, b_y0, b_ptr, b_lo, b_hi):
    """Strip form of {a - b} per difference row.

    Inputs are one axis of two scanline encodings (rows against rows or
    columns against columns).  Row r of the output collects the merged,
    maximal intervals [a_lo - b_hi, a_hi - b_lo] over all row pairs whose
    indices differ by r.
    """
    a_n = len(a_ptr) - 1
    b_n = len(b_ptr) - 1
    r_min = a_y0 - (b_y0 + b_n - 1)
    n_rows = (a_y0 + a_n - 1) - b_y0 - r_min + 1
    out_ptr = np.zeros(n_rows + 1, INT)
    ocap = 1024
    out_lo = np.empty(ocap, INT)
    out_hi = np.empty(ocap, INT)
    total = 0
    scap = 256
    raw_lo = np.empty(scap, INT)
    raw_hi = np.empty(scap, INT)
    for rr in range(n_rows):
        r = r_min + rr
        ya0 = a_y0 if a_y0 > b_y0 + r else b_y0 + r
        ya1 = a_y0 + a_n - 1
        t = b_y0 + b_n - 1 + r
        if t < ya1:
            ya1 = t
        cnt = 0
        for ya in range(ya0, ya1 + 1):
            ia0 = a_ptr[ya - a_y0]
            ia1 = a_ptr[ya - a_y0 + 1]
            ib0 = b_ptr[ya - r - b_y0]
            ib1 = b_ptr[ya - r - b_y0 + 1]
            for i in range(ia0, ia1):
                for j in range(ib0, ib1):
                    if cnt >= scap:
                        scap *= 2
                        nlo = np.empty(scap, INT)
                        nhi = np.empty(scap, INT)
                        nlo[:cnt] = raw_lo[:cnt]
                        nhi[:cnt] = raw_hi[:cnt]
                        raw_lo = nlo
                        raw_hi = nhi
                    raw_lo[cnt] = a_lo[i] - b_hi[j]
                    raw_hi[cnt] = a_hi[i] - b_lo[j]
                    cnt += 1
        if cnt > 0:
            order = np.argsort(raw_lo[:cnt])
            cur_lo = raw_lo[order[0]]
            cur_hi = raw_hi[order[0]]
            for oi in range(1, cnt):
                i = order[oi]
                if raw_lo[i] <= cur_hi + 1:
                    if raw_hi[i] > cur_hi:
                        cur_hi = raw_hi[i]
                else:
                    if total >= ocap:
                        ocap *= 2
                        nlo = np.empty(ocap, INT)
                        nhi = np.empty(ocap, INT)
                        nlo[:total] = out_lo[:total]
                        nhi[:total] = out_hi[:total]
                        out_lo = nlo
                        out_hi = nhi
                    out_lo[total] = cur_lo
                    out_hi[total] = cur_hi
                    total += 1
                    cur_lo = raw_lo[i]
                    cur_hi = raw_hi[i]
            if total >= ocap:
                ocap *= 2
                nlo = np.empty(ocap, INT)
                nhi = np.empty(ocap, INT)
                nlo[:total] = out_lo[:total]
                nhi[:total] = out_hi[:total]
                out_lo = nlo
                out_hi = nhi
            out_lo[total] = cur_lo
            out_hi[total] = cur_hi
            total += 1
        out_ptr[rr + 1] = total
    return r_min, out_ptr, out_lo[:total].copy(), out_hi[:total].copy()


def warmup():
    """Force JIT compilation of all kernels on tiny inputs."""
    z = np.zeros(1, INT)
    one = np.ones(1, INT)
    ptr = np.array([0, 1], INT)
    convolve_strips(0, ptr, z, z, 0, ptr, z, z)
    tbl = (z, one, z, np.array([0, 1], INT), z, z,
           z, one, z, np.array([0, 1], INT), z, z)
    corners = (z, one, np.zeros(1, INT), z, one, np.zeros(1, INT))
    out = np.zeros(1, INT)
    point_fs(z, z, z, out, *tbl)
    for horiz in (True, False):
        for red in (True, False):
            line_search_kernel(horiz, red, -2, 2, z, z, z, np.ones(1, np.float64),
                               *tbl, *corners)
