"""Reference implementations of the hot kernels (numpy/scipy only)."""
import numpy as np
from scipy.spatial import cKDTree


def close_pairs(pos, radius):
    """Index pairs ``(i, j)``, ``i < j``, with ``|pos[i] - pos[j]| <= radius``."""
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if len(pos) < 2:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = cKDTree(pos).query_pairs(radius, output_type="ndarray")
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    pairs.sort(axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def raster_pullback(masks, origin, eps, q, targets, sources, offsets, sample=0.5):
    """One step of the raster adjoint iteration in the plane.

    Cell ``c`` of type ``t`` is set when ``Q x_c - d`` falls in a set cell of
    type ``s`` for some branch ``(t, s, d)``; ``x_c`` sits at fraction ``sample``
    of the cell along each axis.
    """
    m, ny, nx = masks.shape
    out = np.zeros_like(masks)
    iy, ix = np.mgrid[0:ny, 0:nx]
    xs = origin[0] + (ix + sample) * eps
    ys = origin[1] + (iy + sample) * eps
    qx = q[0, 0] * xs + q[0, 1] * ys
    qy = q[1, 0] * xs + q[1, 1] * ys
    for t, s, (dx, dy) in zip(targets, sources, offsets):
        jx = np.floor((qx - dx - origin[0]) / eps).astype(np.int64)
        jy = np.floor((qy - dy - origin[1]) / eps).astype(np.int64)
        ok = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny)
        hit = np.zeros((ny, nx), dtype=bool)
        hit[ok] = masks[s][jy[ok], jx[ok]] != 0
        out[t] |= hit.astype(out.dtype)
    return out
