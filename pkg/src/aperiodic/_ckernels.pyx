# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same signatures and results."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()


def close_pairs(pos, double radius):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(pos, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], d = p.shape[1]
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.argsort(p[:, 0], kind="stable").astype(np.int64)
    cdef double r2 = radius * radius
    cdef Py_ssize_t a, b, k, i, j
    cdef double acc, diff
    cdef list out_i = [], out_j = []
    for a in range(n):
        i = order[a]
        for b in range(a + 1, n):
            j = order[b]
            if p[j, 0] - p[i, 0] > radius:
                break
            acc = 0.0
            for k in range(d):
                diff = p[j, k] - p[i, k]
                acc += diff * diff
            if acc <= r2:
                if i < j:
                    out_i.append(i); out_j.append(j)
                else:
                    out_i.append(j); out_j.append(i)
    res = np.empty((len(out_i), 2), dtype=np.int64)
    if len(out_i):
        res[:, 0] = out_i
        res[:, 1] = out_j
        res = res[np.lexsort((res[:, 1], res[:, 0]))]
    return res


def raster_pullback(masks, origin, double eps, q, targets, sources, offsets, double sample=0.5):
    cdef cnp.ndarray[cnp.uint8_t, ndim=3] mk = np.ascontiguousarray(masks, dtype=np.uint8)
    cdef Py_ssize_t m = mk.shape[0], ny = mk.shape[1], nx = mk.shape[2]
    cdef cnp.ndarray[cnp.uint8_t, ndim=3] out = np.zeros_like(mk)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] qq = np.ascontiguousarray(q, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tg = np.ascontiguousarray(targets, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sr = np.ascontiguousarray(sources, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] off = np.ascontiguousarray(offsets, dtype=np.float64).reshape(-1, 2)
    cdef double ox = origin[0], oy = origin[1]
    cdef Py_ssize_t nb = tg.shape[0], b, iy, ix, jx, jy
    cdef double x, y, zx, zy
    for iy in range(ny):
        y = oy + (iy + sample) * eps
        for ix in range(nx):
            x = ox + (ix + sample) * eps
            zx = qq[0, 0] * x + qq[0, 1] * y
            zy = qq[1, 0] * x + qq[1, 1] * y
            for b in range(nb):
                if out[tg[b], iy, ix]:
                    continue
                jx = <Py_ssize_t>floor((zx - off[b, 0] - ox) / eps)
                jy = <Py_ssize_t>floor((zy - off[b, 1] - oy) / eps)
                if 0 <= jx < nx and 0 <= jy < ny and mk[sr[b], jy, jx]:
                    out[tg[b], iy, ix] = 1
    return out
