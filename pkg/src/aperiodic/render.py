"""Deterministic SVG pictures of point sets and tile patches, and PBM raster masks."""
from __future__ import annotations

import numpy as np

from .delone import MSet
from .tiling import Patch, Prototile

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
CANVAS = 800.0


class RenderError(ValueError):
    pass


def _num(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _View:
    """Affine map from data coordinates to the canvas (y pointing up in data)."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, d: int):
        span = np.maximum(hi - lo, 1e-9)
        lo = lo - 0.05 * span
        hi = hi + 0.05 * span
        self.d = d
        self.lo, self.hi = lo, hi
        self.scale = CANVAS / float(np.max(hi - lo))
        self.width = float((hi[0] - lo[0]) * self.scale)
        self.height = float((hi[1] - lo[1]) * self.scale) if d == 2 else 60.0

    def x(self, v: float) -> float:
        return (v - self.lo[0]) * self.scale

    def y(self, v: float) -> float:
        return (self.hi[1] - v) * self.scale if self.d == 2 else 30.0


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" height="{_num(height)}" viewBox="0 0 {_num(width)} {_num(height)}">',
    ]


def _empty() -> str:
    return "\n".join(_header(100, 30) + ['<text x="4" y="18" font-size="10">empty dataset</text>', "</svg>"]) + "\n"


def svg_points(x: MSet, radius: float | None = None) -> str:
    """Points as circles of radius ``r / 4`` coloured by color index."""
    if x.d > 2:
        raise RenderError("only d <= 2 can be drawn; export CSV instead")
    if len(x) == 0:
        return _empty()
    pos = x.support_positions()
    view = _View(pos.min(axis=0), pos.max(axis=0), x.d)
    if radius is None:
        if x.r is not None:
            radius = x.r
        elif len(pos) > 1:
            from scipy.spatial import cKDTree

            dist, _ = cKDTree(pos).query(pos, k=2)
            radius = float(dist[:, 1].min()) / 2
        else:
            radius = 1.0
    rad = max(radius / 4 * view.scale, 0.5)
    out = _header(view.width, view.height)
    for i in range(x.m):
        p = x.positions(i)
        if not len(p):
            continue
        order = np.lexsort(tuple(p.T[::-1]))
        out.append(f'<g fill="{PALETTE[i % len(PALETTE)]}">')
        for row in p[order]:
            cy = row[1] if x.d == 2 else 0.0
            out.append(f'<circle cx="{_num(view.x(row[0]))}" cy="{_num(view.y(cy))}" r="{_num(rad)}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _mask_path(tile: Prototile, shift: np.ndarray, view: _View) -> str:
    """Row runs of the raster as one path."""
    parts = []
    ny, nx = tile.mask.shape
    for iy in range(ny):
        row = tile.mask[iy]
        if not row.any():
            continue
        edges = np.diff(np.concatenate([[0], row.astype(np.int8), [0]]))
        starts, stops = np.nonzero(edges == 1)[0], np.nonzero(edges == -1)[0]
        y0 = tile.origin[1] + tile.eps * iy + shift[1]
        y1 = y0 + tile.eps
        for a, b in zip(starts, stops):
            x0 = tile.origin[0] + tile.eps * a + shift[0]
            x1 = tile.origin[0] + tile.eps * b + shift[0]
            parts.append(
                f"M{_num(view.x(x0))} {_num(view.y(y0))}H{_num(view.x(x1))}V{_num(view.y(y1))}H{_num(view.x(x0))}Z"
            )
    return "".join(parts)


def svg_patch(patch: Patch) -> str:
    """One element per placed tile: rectangles in 1D, raster paths in 2D."""
    x = patch.placements
    if x.d > 2:
        raise RenderError("only d <= 2 can be drawn; export CSV instead")
    if len(x) == 0:
        return _empty()
    boxes = []
    for i in range(x.m):
        p = x.positions(i)
        if len(p):
            lo, hi = patch.tiles[i].bounds()
            boxes.append((p.min(axis=0) + lo, p.max(axis=0) + hi))
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    view = _View(lo, hi, x.d)
    out = _header(view.width, view.height)
    for i in range(x.m):
        p = x.positions(i)
        if not len(p):
            continue
        color = PALETTE[i % len(PALETTE)]
        tile = patch.tiles[i]
        order = np.lexsort(tuple(p.T[::-1]))
        out.append(f'<g fill="{color}" stroke="#000000" stroke-width="0.5">')
        for row in p[order]:
            if x.d == 1:
                segs = []
                for a, b in tile.float_intervals():
                    x0, x1 = view.x(row[0] + a), view.x(row[0] + b)
                    segs.append(f"M{_num(x0)} 15H{_num(x1)}V45H{_num(x0)}Z")
                out.append(f'<path d="{"".join(segs)}"/>')
            else:
                out.append(f'<path d="{_mask_path(tile, row, view)}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def pbm(mask: np.ndarray) -> str:
    """Plain PBM (P1) with the first mask row at the bottom of the picture."""
    m = np.asarray(mask, dtype=bool)[::-1]
    ny, nx = m.shape
    lines = ["P1", f"{nx} {ny}"]
    for row in m:
        bits = "".join("1" if v else "0" for v in row)
        lines.extend(bits[k : k + 70] for k in range(0, len(bits), 70))
    return "\n".join(lines) + "\n"
