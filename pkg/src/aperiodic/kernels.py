"""Kernel dispatch: compiled extension when importable, numpy/scipy otherwise.

Set ``APERIODIC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if not os.environ.get("APERIODIC_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def close_pairs(pos, radius):
    return _impl.close_pairs(pos, float(radius))


def raster_pullback(masks, origin, eps, q, targets, sources, offsets, sample=0.5):
    import numpy as np

    masks = np.ascontiguousarray(masks, dtype=np.uint8)
    return _impl.raster_pullback(
        masks,
        np.asarray(origin, dtype=float),
        float(eps),
        np.asarray(q, dtype=float),
        np.asarray(targets, dtype=np.int64),
        np.asarray(sources, dtype=np.int64),
        np.asarray(offsets, dtype=float).reshape(-1, 2),
        float(sample),
    )
