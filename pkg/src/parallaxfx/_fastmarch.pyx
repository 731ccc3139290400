# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fast-marching and Telea fill kernels.

Mirrors ``_fastmarch_py`` expression for expression; results are bitwise equal.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs, INFINITY
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

cdef double EPS_DIR = 1e-6


cdef struct Heap:
    double *key
    Py_ssize_t *idx
    Py_ssize_t size
    Py_ssize_t cap


cdef inline bint _less(double ka, Py_ssize_t ia, double kb, Py_ssize_t ib) nogil:
    return ka < kb or (ka == kb and ia < ib)


cdef int _heap_init(Heap *hp, Py_ssize_t cap) except -1:
    if cap < 16:
        cap = 16
    hp.key = <double *> malloc(cap * sizeof(double))
    hp.idx = <Py_ssize_t *> malloc(cap * sizeof(Py_ssize_t))
    if hp.key == NULL or hp.idx == NULL:
        raise MemoryError()
    hp.size = 0
    hp.cap = cap
    return 0


cdef void _heap_free(Heap *hp) noexcept:
    free(hp.key)
    free(hp.idx)


cdef int _heap_push(Heap *hp, double k, Py_ssize_t i) except -1:
    cdef Py_ssize_t pos, parent
    cdef double *nk
    cdef Py_ssize_t *ni
    if hp.size == hp.cap:
        nk = <double *> realloc(hp.key, 2 * hp.cap * sizeof(double))
        if nk == NULL:
            raise MemoryError()
        hp.key = nk
        ni = <Py_ssize_t *> realloc(hp.idx, 2 * hp.cap * sizeof(Py_ssize_t))
        if ni == NULL:
            raise MemoryError()
        hp.idx = ni
        hp.cap *= 2
    pos = hp.size
    hp.size += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if _less(k, i, hp.key[parent], hp.idx[parent]):
            hp.key[pos] = hp.key[parent]
            hp.idx[pos] = hp.idx[parent]
            pos = parent
        else:
            break
    hp.key[pos] = k
    hp.idx[pos] = i
    return 0


cdef void _heap_pop(Heap *hp, double *k, Py_ssize_t *i) noexcept nogil:
    cdef Py_ssize_t pos = 0, child, n
    cdef double lk
    cdef Py_ssize_t li
    k[0] = hp.key[0]
    i[0] = hp.idx[0]
    hp.size -= 1
    n = hp.size
    if n == 0:
        return
    lk = hp.key[n]
    li = hp.idx[n]
    while True:
        child = 2 * pos + 1
        if child >= n:
            break
        if child + 1 < n and _less(hp.key[child + 1], hp.idx[child + 1], hp.key[child], hp.idx[child]):
            child += 1
        if _less(hp.key[child], hp.idx[child], lk, li):
            hp.key[pos] = hp.key[child]
            hp.idx[pos] = hp.idx[child]
            pos = child
        else:
            break
    hp.key[pos] = lk
    hp.idx[pos] = li


cdef inline double _solve(double[:, ::1] t, unsigned char[:, ::1] frozen,
                          Py_ssize_t r, Py_ssize_t c, Py_ssize_t h, Py_ssize_t w) noexcept nogil:
    cdef double a = INFINITY, b = INFINITY, d
    if r > 0 and frozen[r - 1, c]:
        a = t[r - 1, c]
    if r + 1 < h and frozen[r + 1, c] and t[r + 1, c] < a:
        a = t[r + 1, c]
    if c > 0 and frozen[r, c - 1]:
        b = t[r, c - 1]
    if c + 1 < w and frozen[r, c + 1] and t[r, c + 1] < b:
        b = t[r, c + 1]
    if a == INFINITY:
        return b + 1.0
    if b == INFINITY:
        return a + 1.0
    d = a - b
    if d >= 1.0 or d <= -1.0:
        return (a if a < b else b) + 1.0
    return 0.5 * (a + b + sqrt(2.0 - d * d))


def fmm_march(hole):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] inside_arr = np.ascontiguousarray(hole, dtype=np.uint8)
    cdef unsigned char[:, ::1] inside = inside_arr
    cdef Py_ssize_t h = inside.shape[0], w = inside.shape[1]
    t_arr = np.where(inside_arr != 0, np.inf, 0.0)
    cdef double[:, ::1] t = t_arr
    frozen_arr = (inside_arr == 0).astype(np.uint8)
    cdef unsigned char[:, ::1] frozen = frozen_arr
    seeded_arr = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] seeded = seeded_arr
    order_arr = np.empty(h * w, dtype=np.int64)
    cdef cnp.int64_t[::1] order = order_arr
    cdef Py_ssize_t r, c, nr, nc, idx, n_order = 0, q
    cdef double tv, nt, last = 0.0
    cdef Heap hp
    cdef Py_ssize_t dr[4]
    cdef Py_ssize_t dc[4]
    dr[0] = -1; dr[1] = 1; dr[2] = 0; dr[3] = 0
    dc[0] = 0; dc[1] = 0; dc[2] = -1; dc[3] = 1

    _heap_init(&hp, h * w // 4 + 16)
    try:
        for r in range(h):
            for c in range(w):
                if not inside[r, c]:
                    continue
                if ((r > 0 and not inside[r - 1, c]) or (r + 1 < h and not inside[r + 1, c])
                        or (c > 0 and not inside[r, c - 1]) or (c + 1 < w and not inside[r, c + 1])):
                    t[r, c] = 1.0
                    seeded[r, c] = 1
                    _heap_push(&hp, 1.0, r * w + c)

        while hp.size > 0:
            _heap_pop(&hp, &tv, &idx)
            r = idx // w
            c = idx - r * w
            if frozen[r, c]:
                continue
            if tv < last:
                raise RuntimeError("fast marching popped a decreasing arrival time")
            last = tv
            frozen[r, c] = 1
            order[n_order] = idx
            n_order += 1
            for q in range(4):
                nr = r + dr[q]
                nc = c + dc[q]
                if 0 <= nr < h and 0 <= nc < w and not frozen[nr, nc] and not seeded[nr, nc]:
                    nt = _solve(t, frozen, nr, nc, h, w)
                    if nt < t[nr, nc]:
                        t[nr, nc] = nt
                        _heap_push(&hp, nt, nr * w + nc)
    finally:
        _heap_free(&hp)
    return t_arr, order_arr[:n_order].copy()


def telea_fill(image, hole, t_in, order_in, double radius):
    out_arr = np.array(image, dtype=np.uint8, copy=True, order="C")
    cdef unsigned char[:, :, ::1] px = out_arr
    cdef Py_ssize_t h = px.shape[0], w = px.shape[1], nch = px.shape[2]
    cdef double[:, ::1] t = np.ascontiguousarray(t_in, dtype=np.float64)
    avail_arr = (np.asarray(hole, dtype=bool) == 0).astype(np.uint8)
    cdef unsigned char[:, ::1] avail = avail_arr
    cdef cnp.int64_t[::1] order = np.ascontiguousarray(order_in, dtype=np.int64)
    cdef Py_ssize_t reach = <Py_ssize_t> floor(radius)
    cdef double rad2 = radius * radius
    cdef Py_ssize_t n_off = 0, i, k, oi, r, c, qr, qc, idx, ddr, ddc
    cdef Py_ssize_t side = 2 * reach + 1
    off_r_arr = np.empty(side * side, dtype=np.intp)
    off_c_arr = np.empty(side * side, dtype=np.intp)
    off_d2_arr = np.empty(side * side, dtype=np.float64)
    off_d_arr = np.empty(side * side, dtype=np.float64)
    cdef Py_ssize_t[::1] off_r = off_r_arr, off_c = off_c_arr
    cdef double[::1] off_d2 = off_d2_arr, off_d = off_d_arr
    cdef Py_ssize_t d2i
    for ddr in range(-reach, reach + 1):
        for ddc in range(-reach, reach + 1):
            d2i = ddr * ddr + ddc * ddc
            if d2i == 0 or <double> d2i > rad2:
                continue
            off_r[n_off] = ddr
            off_c[n_off] = ddc
            off_d2[n_off] = <double> d2i
            off_d[n_off] = sqrt(<double> d2i)
            n_off += 1

    acc_arr = np.zeros(nch, dtype=np.float64)
    cdef double[::1] acc = acc_arr
    cdef double tp, gx, gy, wsum, direction, wgt, v
    cdef bint left, right, up, down

    for i in range(order.shape[0]):
        idx = order[i]
        r = idx // w
        c = idx - r * w
        tp = t[r, c]
        left = c > 0 and avail[r, c - 1]
        right = c + 1 < w and avail[r, c + 1]
        if left and right:
            gx = (t[r, c + 1] - t[r, c - 1]) * 0.5
        elif right:
            gx = t[r, c + 1] - tp
        elif left:
            gx = tp - t[r, c - 1]
        else:
            gx = 0.0
        up = r > 0 and avail[r - 1, c]
        down = r + 1 < h and avail[r + 1, c]
        if up and down:
            gy = (t[r + 1, c] - t[r - 1, c]) * 0.5
        elif down:
            gy = t[r + 1, c] - tp
        elif up:
            gy = tp - t[r - 1, c]
        else:
            gy = 0.0

        wsum = 0.0
        for k in range(nch):
            acc[k] = 0.0
        for oi in range(n_off):
            qr = r + off_r[oi]
            qc = c + off_c[oi]
            if qr < 0 or qr >= h or qc < 0 or qc >= w or not avail[qr, qc]:
                continue
            direction = (gx * <double> (-off_c[oi]) + gy * <double> (-off_r[oi])) / off_d[oi]
            if direction < EPS_DIR:
                direction = EPS_DIR
            wgt = direction / off_d2[oi] / (1.0 + fabs(tp - t[qr, qc]))
            wsum += wgt
            for k in range(nch):
                acc[k] += wgt * px[qr, qc, k]
        for k in range(nch):
            v = floor(acc[k] / wsum + 0.5)
            if v < 0.0:
                v = 0.0
            elif v > 255.0:
                v = 255.0
            px[r, c, k] = <unsigned char> v
        avail[r, c] = 1
    return out_arr
