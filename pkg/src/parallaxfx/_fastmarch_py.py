"""Pure-Python fast-marching and Telea fill kernels.

Reference twin of the compiled ``_fastmarch`` module. Both evaluate the same
floating-point expressions in the same order, so their outputs agree bit for
bit; keep them in lockstep when editing either one.
"""
import heapq
import math

import numpy as np

EPS_DIR = 1e-6


def _solve(t, frozen, r, c, h, w):
    # upwind eikonal update from frozen neighbours, one axis at a time
    a = math.inf
    if r > 0 and frozen[r - 1][c]:
        a = t[r - 1][c]
    if r + 1 < h and frozen[r + 1][c] and t[r + 1][c] < a:
        a = t[r + 1][c]
    b = math.inf
    if c > 0 and frozen[r][c - 1]:
        b = t[r][c - 1]
    if c + 1 < w and frozen[r][c + 1] and t[r][c + 1] < b:
        b = t[r][c + 1]
    if a == math.inf:
        return b + 1.0
    if b == math.inf:
        return a + 1.0
    d = a - b
    if d >= 1.0 or d <= -1.0:
        return (a if a < b else b) + 1.0
    return 0.5 * (a + b + math.sqrt(2.0 - d * d))


def fmm_march(hole):
    """Arrival times inside ``hole`` and the order in which hole pixels were frozen.

    ``hole`` is a 2-D uint8/bool array containing at least one zero. Hole
    pixels 4-adjacent to a known pixel get T = 1; the rest are solved from
    frozen hole neighbours. Returns ``(T, order)`` with ``order`` holding flat
    indices ``row * width + col``.
    """
    hole = np.asarray(hole, dtype=bool)
    h, w = hole.shape
    inside = hole.tolist()
    frozen = [[not v for v in row] for row in inside]
    t = [[0.0 if not v else math.inf for v in row] for row in inside]
    seeded = [[False] * w for _ in range(h)]
    heap = []
    for r in range(h):
        for c in range(w):
            if not inside[r][c]:
                continue
            if ((r > 0 and not inside[r - 1][c]) or (r + 1 < h and not inside[r + 1][c])
                    or (c > 0 and not inside[r][c - 1]) or (c + 1 < w and not inside[r][c + 1])):
                t[r][c] = 1.0
                seeded[r][c] = True
                heap.append((1.0, r * w + c))
    heapq.heapify(heap)

    order = []
    last = 0.0
    while heap:
        tv, idx = heapq.heappop(heap)
        r, c = divmod(idx, w)
        if frozen[r][c]:
            continue
        if tv < last:
            raise RuntimeError("fast marching popped a decreasing arrival time")
        last = tv
        frozen[r][c] = True
        order.append(idx)
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < h and 0 <= nc < w and not frozen[nr][nc] and not seeded[nr][nc]:
                nt = _solve(t, frozen, nr, nc, h, w)
                if nt < t[nr][nc]:
                    t[nr][nc] = nt
                    heapq.heappush(heap, (nt, nr * w + nc))
    return np.array(t, dtype=np.float64), np.array(order, dtype=np.int64)


def telea_fill(image, hole, t, order, radius):
    """Fill hole pixels of ``image`` (h, w, ch uint8) in ``order``.

    Each pixel becomes the weighted mean of known or already filled pixels
    within ``radius``; weight = direction * 1/dist^2 * 1/(1 + |dT|).
    """
    out = np.array(image, dtype=np.uint8, copy=True)
    h, w, nch = out.shape
    tt = np.asarray(t, dtype=np.float64).tolist()
    avail = (~np.asarray(hole, dtype=bool)).tolist()
    px = out.tolist()
    reach = int(math.floor(radius))
    rad2 = float(radius) * float(radius)
    offsets = []
    for dr in range(-reach, reach + 1):
        for dc in range(-reach, reach + 1):
            d2 = dr * dr + dc * dc
            if d2 == 0 or d2 > rad2:
                continue
            offsets.append((dr, dc, float(d2), math.sqrt(d2)))

    for idx in np.asarray(order).tolist():
        r, c = divmod(idx, w)
        tp = tt[r][c]
        left = c > 0 and avail[r][c - 1]
        right = c + 1 < w and avail[r][c + 1]
        if left and right:
            gx = (tt[r][c + 1] - tt[r][c - 1]) * 0.5
        elif right:
            gx = tt[r][c + 1] - tp
        elif left:
            gx = tp - tt[r][c - 1]
        else:
            gx = 0.0
        up = r > 0 and avail[r - 1][c]
        down = r + 1 < h and avail[r + 1][c]
        if up and down:
            gy = (tt[r + 1][c] - tt[r - 1][c]) * 0.5
        elif down:
            gy = tt[r + 1][c] - tp
        elif up:
            gy = tp - tt[r - 1][c]
        else:
            gy = 0.0

        wsum = 0.0
        acc = [0.0] * nch
        for dr, dc, d2, d in offsets:
            qr = r + dr
            qc = c + dc
            if qr < 0 or qr >= h or qc < 0 or qc >= w or not avail[qr][qc]:
                continue
            # p - q = (-dr, -dc)
            direction = (gx * -dc + gy * -dr) / d
            if direction < EPS_DIR:
                direction = EPS_DIR
            wgt = direction / d2 / (1.0 + abs(tp - tt[qr][qc]))
            wsum += wgt
            q = px[qr][qc]
            for k in range(nch):
                acc[k] += wgt * q[k]
        dst = px[r][c]
        for k in range(nch):
            v = math.floor(acc[k] / wsum + 0.5)
            dst[k] = 0 if v < 0 else (255 if v > 255 else v)
        avail[r][c] = True
    return np.array(px, dtype=np.uint8).reshape(h, w, nch)
