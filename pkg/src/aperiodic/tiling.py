"""Prototiles from the adjoint system, tilings from m-sets and back, control points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, ndimage

from . import kernels
from .algebra.field import FieldElement, solve_exact
from .delone import TAU, Box, DeloneError, MSet
from .substitution import MSetSubstitution, SubstitutionError


class TilingError(ValueError):
    pass


@dataclass
class Prototile:
    """Support of one tile type.

    In one dimension ``intervals`` holds closed intervals (exact field elements
    when the adjoint system was solved exactly, floats otherwise).  In the plane
    ``mask`` is a raster over ``origin + eps * (ix, iy)``; ``inner``/``outer`` are
    the one-cell erosion and dilation.
    """

    index: int
    intervals: list = field(default_factory=list)
    mask: np.ndarray | None = None
    origin: np.ndarray | None = None
    eps: float = 0.0
    volume: float = 0.0
    volume_error: float = 0.0
    exact: bool = False
    empty_interior: bool = False

    @property
    def inner(self) -> np.ndarray:
        return ndimage.binary_erosion(self.mask, border_value=0)

    @property
    def outer(self) -> np.ndarray:
        return ndimage.binary_dilation(self.mask)

    def float_intervals(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in self.intervals]

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if self.mask is None:
            iv = self.float_intervals()
            return np.array([min(a for a, _ in iv)]), np.array([max(b for _, b in iv)])
        iy, ix = np.nonzero(self.mask)
        lo = self.origin + self.eps * np.array([ix.min(), iy.min()])
        hi = self.origin + self.eps * np.array([ix.max() + 1, iy.max() + 1])
        return lo, hi

    def contains(self, p: np.ndarray) -> bool:
        p = np.asarray(p, dtype=float)
        if self.mask is None:
            return any(a - TAU <= p[0] <= b + TAU for a, b in self.float_intervals())
        ix, iy = np.floor((p - self.origin) / self.eps).astype(int)
        ny, nx = self.mask.shape
        return 0 <= ix < nx and 0 <= iy < ny and bool(self.mask[iy, ix])

    def centroid(self) -> np.ndarray:
        if self.mask is None:
            iv = self.float_intervals()
            w = sum(b - a for a, b in iv)
            return np.array([sum((a + b) / 2 * (b - a) for a, b in iv) / w])
        iy, ix = np.nonzero(self.mask)
        return self.origin + self.eps * np.array([ix.mean() + 0.5, iy.mean() + 0.5])


@dataclass
class AdjointResult:
    tiles: list[Prototile]
    volumes: np.ndarray
    rate: float
    iterations: int
    steps: list[float]
    exact: bool


# -- adapted norm ---------------------------------------------------------------------------


def adapted_contraction(qf: np.ndarray) -> tuple[float, np.ndarray]:
    """Rate ``c < 1`` and Gram matrix ``P`` with ``|Q^{-1} x|_P <= c |x|_P``."""
    a = np.linalg.inv(qf)
    if np.max(np.abs(np.linalg.eigvals(a))) >= 1:
        raise TilingError("Q is not expanding; no contracting adapted norm")
    p = linalg.solve_discrete_lyapunov(a.T, np.eye(len(qf)))
    p = (p + p.T) / 2
    # |A x|_P^2 = x^T A^T P A x = x^T (P - I) x <= (1 - 1/lmax(P)) |x|_P^2
    c = math.sqrt(max(0.0, 1 - 1 / float(np.linalg.eigvalsh(p).max())))
    if not c < 1:
        raise TilingError("adapted norm is not contracting")
    return c, p


def _invariant_radius(phi: MSetSubstitution, c: float, p: np.ndarray) -> float:
    """Radius of a ``P``-ball about 0 mapped into itself by every branch."""
    dmax = 0.0
    for i in range(phi.m):
        for j in range(phi.m):
            for dv in phi.digit_positions(i, j):
                dmax = max(dmax, math.sqrt(float(dv @ p @ dv)))
    qinv = np.linalg.inv(phi.qf)
    # |Q^{-1}(d + x)|_P <= c (|d|_P + rho) <= rho  iff rho >= c dmax / (1 - c)
    return c * dmax / (1 - c) + 1e-9 * (1 + dmax) if np.any(qinv) else 0.0


MAX_PIECES = 1 << 16
# off-centre sample point inside each raster cell (used alternately with its
# mirror); irrational so that integer expansions never send it onto a grid line
SAMPLE = 0.5 - math.sqrt(2) / 64

# -- one dimension --------------------------------------------------------------------------


def _merge(iv: list[tuple[float, float]], tol: float = 0.0) -> list[tuple[float, float]]:
    iv = sorted(iv)
    out: list[list[float]] = []
    for a, b in iv:
        if out and a <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _dist_to_union(p: np.ndarray, iv: np.ndarray) -> np.ndarray:
    """Distance from each ``p`` to a sorted union of disjoint closed intervals."""
    k = np.clip(np.searchsorted(iv[:, 0], p, side="right") - 1, 0, len(iv) - 1)
    left = np.maximum(iv[k, 0] - p, 0) + np.maximum(p - iv[k, 1], 0)
    k2 = np.clip(k + 1, 0, len(iv) - 1)
    right = np.maximum(iv[k2, 0] - p, 0) + np.maximum(p - iv[k2, 1], 0)
    return np.minimum(left, right)


def _hausdorff_1d(x: list[tuple[float, float]], y: list[tuple[float, float]]) -> float:
    # for unions of intervals the Hausdorff distance is attained at endpoints
    xa, ya = np.array(x, dtype=float), np.array(y, dtype=float)
    return float(max(_dist_to_union(xa.ravel(), ya).max(), _dist_to_union(ya.ravel(), xa).max()))


def _exact_hull(phi: MSetSubstitution, float_tiles: list[list[tuple[float, float]]]):
    """Try ``A_j = [lo_j, hi_j]`` exactly; return field intervals or ``None``.

    The branch attaining each endpoint is read off the float attractor; the
    endpoints then solve a linear system over the field, and the hull family
    is accepted only if it satisfies the adjoint equations exactly.
    """
    f = phi.frame.field
    q = phi.q[0][0]
    qf = float(q)
    m = phi.m
    digits = [[[phi.frame.exact_position(dv)[0] for dv in phi.digits[i][j].tolist()] for j in range(m)] for i in range(m)]
    fl = [(min(a for a, _ in t), max(b for _, b in t)) for t in float_tiles]
    n = 2 * m  # unknowns lo_0..lo_{m-1}, hi_0..hi_{m-1}
    rows, rhs = [], []
    for j in range(m):
        for end in (0, 1):
            # Q A_j endpoint = extreme over i, d of d + (lo_i or hi_i)
            want_max = (end == 1) == (qf > 0)
            best = None
            for i in range(m):
                for dv, dfl in zip(digits[i][j], phi.digit_positions(i, j)[:, 0]):
                    for e2 in (0, 1):
                        val = dfl[()] + fl[i][e2] if np.ndim(dfl) == 0 else dfl + fl[i][e2]
                        key = val if want_max else -val
                        if best is None or key > best[0] + 1e-12:
                            best = (key, i, e2, dv)
            if best is None:
                return None
            _, i, e2, dv = best
            row = [f.zero() for _ in range(n)]
            row[end * m + j] = row[end * m + j] + q
            row[e2 * m + i] = row[e2 * m + i] - f.one()
            rows.append(row)
            rhs.append(dv)
    sol = solve_exact(rows, rhs)
    if sol is None:
        return None
    lo, hi = sol[:m], sol[m:]
    if any(not (lo[j] < hi[j]) for j in range(m)):
        return None
    # verify Q [lo_j, hi_j] = U_i (D_ij + [lo_i, hi_i]) exactly
    for j in range(m):
        pieces = [(dv + lo[i], dv + hi[i]) for i in range(m) for dv in digits[i][j]]
        pieces.sort(key=lambda ab: float(ab[0]))
        target = (q * lo[j], q * hi[j]) if qf > 0 else (q * hi[j], q * lo[j])
        if not pieces or pieces[0][0] != target[0]:
            return None
        reach = pieces[0][1]
        for a, b in pieces[1:]:
            if a > reach:
                return None
            if b > reach:
                reach = b
        if reach != target[1]:
            return None
    return [[(lo[j], hi[j])] for j in range(m)]


def _solve_1d(phi: MSetSubstitution, eps: float, max_iter: int) -> AdjointResult:
    c, p = adapted_contraction(phi.qf)
    rho = _invariant_radius(phi, c, p) / math.sqrt(p[0, 0])
    qf = float(phi.qf[0, 0])
    tiles = [[(-rho, rho)] for _ in range(phi.m)]
    steps = []
    measures = [sum(b - a for a, b in t) for t in tiles]
    ratio = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        new = []
        for j in range(phi.m):
            pieces = []
            for i in range(phi.m):
                for dv in phi.digit_positions(i, j)[:, 0]:
                    for a, b in tiles[i]:
                        lo, hi = sorted(((dv + a) / qf, (dv + b) / qf))
                        pieces.append((lo, hi))
            new.append(_merge(pieces, tol=eps * 1e-3))
        steps.append(max(_hausdorff_1d(x, y) for x, y in zip(tiles, new)))
        tiles = new
        total = sum(b - a for t in tiles for a, b in t)
        ratio = total / sum(measures) if sum(measures) else 0.0
        measures = [sum(b - a for a, b in t) for t in tiles]
        if steps[-1] < eps * 1e-3 or sum(len(t) for t in tiles) > MAX_PIECES:
            break
    exact = _exact_hull(phi, tiles)
    out = []
    for j in range(phi.m):
        if exact is not None:
            iv = exact[j]
            vol = float(sum(b - a for a, b in iv))
            out.append(Prototile(j, iv, volume=vol, exact=True))
        else:
            vol = sum(b - a for a, b in tiles[j])
            pieces = len(tiles[j])
            # measure still shrinking geometrically, or no wider than the resolution reached
            empty = ratio < 0.99 or vol <= 10 * steps[-1] * pieces
            out.append(Prototile(j, tiles[j], volume=vol, volume_error=2 * eps * pieces, empty_interior=empty))
    return AdjointResult(out, np.array([t.volume for t in out]), c, it, steps, exact is not None)


# -- plane ----------------------------------------------------------------------------------


def _solve_2d(phi: MSetSubstitution, eps: float | None, max_iter: int) -> AdjointResult:
    c, p = adapted_contraction(phi.qf)
    rho = _invariant_radius(phi, c, p)
    # bounding box of the P-ellipse of radius rho
    half = rho * np.sqrt(np.diag(np.linalg.inv(p)))
    if eps is None:
        eps = float(2 * half.max()) / 256
    # dyadic pitch on a grid through the origin keeps integer translates cell-aligned
    eps = 2.0 ** math.floor(math.log2(eps))
    origin = np.floor(-half / eps) * eps - eps
    n = np.ceil((half - origin) / eps).astype(int) + 1
    nx, ny = int(n[0]), int(n[1])
    iy, ix = np.mgrid[0:ny, 0:nx]
    cx = origin[0] + (ix + 0.5) * eps
    cy = origin[1] + (iy + 0.5) * eps
    pts = np.stack([cx, cy], axis=-1)
    inside = np.einsum("...i,ij,...j->...", pts, p, pts) <= rho * rho
    masks = np.repeat(inside[None].astype(np.uint8), phi.m, axis=0)
    targets, sources, offsets = [], [], []
    for i in range(phi.m):
        for j in range(phi.m):
            for dv in phi.digit_positions(i, j):
                targets.append(j)
                sources.append(i)
                offsets.append(dv)
    steps = []
    limit = max_iter
    cap = int(math.ceil(math.log(eps / (2 * rho)) / math.log(c))) + 5 if rho > 0 else 1
    limit = min(limit, max(cap, 1))
    it = 0
    quiet = 0
    for it in range(1, limit + 1):
        # alternate the sample offset so cells that only sustain themselves through
        # a shared grid edge are pruned from both sides
        sample = SAMPLE if it % 2 else 1 - SAMPLE
        new = kernels.raster_pullback(masks, origin, eps, phi.qf, targets, sources, offsets, sample)
        changed = new != masks
        dist = 0.0
        for j in range(phi.m):
            if changed[j].any():
                dt_new = ndimage.distance_transform_edt(new[j] == 0) * eps if new[j].any() else np.full(new[j].shape, np.inf)
                dt_old = ndimage.distance_transform_edt(masks[j] == 0) * eps
                dist = max(dist, float(dt_new[changed[j] & (masks[j] == 1)].max(initial=0)), float(dt_old[changed[j] & (new[j] == 1)].max(initial=0)))
        steps.append(dist)
        masks = new
        quiet = quiet + 1 if not changed.any() else 0
        if quiet >= 2:
            break
    out = []
    cell = eps * eps
    for j in range(phi.m):
        mk = masks[j].astype(bool)
        inner = ndimage.binary_erosion(mk, border_value=0)
        outer = ndimage.binary_dilation(mk)
        vol = float(mk.sum()) * cell
        err = float(outer.sum() - inner.sum()) * cell
        out.append(Prototile(j, mask=mk, origin=origin.copy(), eps=eps, volume=vol, volume_error=err, empty_interior=not inner.any()))
    return AdjointResult(out, np.array([t.volume for t in out]), c, it, steps, False)


def solve_adjoint(phi: MSetSubstitution, eps: float | None = None, max_iter: int = 200) -> AdjointResult:
    """Attractor of ``A_j = Q^{-1} U_i (D_ij + A_i)``.

    Iteration starts from a ball about the origin that every branch maps into
    itself (in the norm adapted to ``Q^{-1}``), so the iterates decrease to the
    attractor at rate ``rate``.  One-dimensional supports are then confirmed
    exactly when they are intervals.
    """
    if phi.d == 1:
        return _solve_1d(phi, 1e-12 if eps is None else eps, max_iter)
    if phi.d == 2:
        return _solve_2d(phi, eps, max_iter)
    raise TilingError("prototiles are computed in dimension 1 and 2 only")


# -- tilings from m-sets --------------------------------------------------------------------


@dataclass
class Patch:
    """Tiles ``x + A_i`` for every ``x`` in color ``i`` of ``placements``."""

    placements: MSet
    tiles: list[Prototile]

    def __len__(self):
        return len(self.placements)


@dataclass
class CoverageReport:
    uncovered: float
    overlap: float
    tolerance: float
    exact: bool

    @property
    def consistent(self) -> bool:
        return self.uncovered <= self.tolerance and self.overlap <= self.tolerance


def _exact_spans(x: MSet, tiles: list[Prototile]):
    spans = []
    for i in range(x.m):
        for coords in x.colors[i].tolist():
            p = x.frame.exact_position(coords)[0]
            for a, b in tiles[i].intervals:
                spans.append((p + a, p + b))
    spans.sort(key=lambda ab: (float(ab[0]), float(ab[1])))
    return spans


def _coverage_1d(x: MSet, tiles: list[Prototile], region: Box) -> CoverageReport:
    """Gap and overlap length inside ``region``; gaps between exact spans are decided exactly."""
    exact = all(t.exact for t in tiles)
    if exact:
        spans = [(float(a), float(b), a, b) for a, b in _exact_spans(x, tiles)]
    else:
        spans = sorted((p + a, p + b, None, None) for i in range(x.m) for p in x.positions(i)[:, 0] for a, b in tiles[i].float_intervals())
    lo_r, hi_r = region.lo[0], region.hi[0]
    uncovered = overlap = 0.0
    end, end_exact = lo_r, None
    for af, bf, a, b in spans:
        if bf <= lo_r:
            continue
        if af >= hi_r:
            break
        if end_exact is not None:
            g = a - end_exact
            touching = g.is_zero()
        else:
            touching = af == end
        if not touching:
            if af > end:
                uncovered += min(af, hi_r) - max(end, lo_r)
            else:
                overlap += max(0.0, min(end, bf, hi_r) - max(af, lo_r))
        if bf > end:
            end, end_exact = bf, b
    if end < hi_r:
        uncovered += hi_r - max(end, lo_r)
    tol = 0.0 if exact else 2 * TAU * max(len(spans), 1)
    return CoverageReport(uncovered, overlap, tol, exact)


def _coverage_2d(x: MSet, tiles: list[Prototile], region: Box, eps: float) -> CoverageReport:
    origin = np.array(region.lo)
    n = np.ceil(region.widths / eps).astype(int)
    count = np.zeros((n[1], n[0]), dtype=np.int32)
    perim = 0.0
    for i in range(x.m):
        t = tiles[i]
        ty, tx = np.nonzero(t.mask)
        tile_perim = float((ndimage.binary_dilation(t.mask) & ~t.mask).sum()) * t.eps
        for p in x.positions(i):
            gx = np.floor((t.origin[0] + (tx + 0.5) * t.eps + p[0] - origin[0]) / eps).astype(int)
            gy = np.floor((t.origin[1] + (ty + 0.5) * t.eps + p[1] - origin[1]) / eps).astype(int)
            ok = (gx >= 0) & (gx < n[0]) & (gy >= 0) & (gy < n[1])
            if ok.any():
                cells = np.unique(np.stack([gy[ok], gx[ok]], axis=1), axis=0)
                count[cells[:, 0], cells[:, 1]] += 1
                perim += tile_perim
    cell = eps * eps
    uncovered = float((count == 0).sum()) * cell
    overlap = float((count >= 2).sum()) * cell
    return CoverageReport(uncovered, overlap, perim * eps, False)


def mset_to_tiling(phi: MSetSubstitution, x: MSet, tiles: list[Prototile] | AdjointResult, region: Box, eps: float | None = None) -> tuple[Patch, CoverageReport]:
    """Place ``A_i`` at every point of color ``i``; measure gaps and overlaps on ``region``."""
    if isinstance(tiles, AdjointResult):
        tiles = tiles.tiles
    if len(tiles) != x.m:
        raise TilingError("one prototile per color is required")
    patch = Patch(x, tiles)
    if x.d == 1:
        return patch, _coverage_1d(x, tiles, region)
    if eps is None:
        eps = tiles[0].eps
    return patch, _coverage_2d(x, tiles, region, eps)


# -- control points -------------------------------------------------------------------------


@dataclass
class ControlPoints:
    offsets: list[list[FieldElement]]
    interior: list[bool]
    tile_map: list[tuple[int, int]]

    def float_offsets(self) -> np.ndarray:
        return np.array([[float(v) for v in c] for c in self.offsets])


def control_points(
    phi: MSetSubstitution,
    tile_map: Sequence[tuple[int, int]],
    tiles: list[Prototile] | None = None,
    require_interior: bool = False,
) -> ControlPoints:
    """Per-type offsets ``c_j`` with ``Q c_j = a_j + c_{i(j)}``.

    ``tile_map[j] = (i, k)`` picks the ``k``-th digit of ``D_ij``: the child of
    type ``i`` placed at ``Q x + a_j`` inside the inflated tile of type ``j``.
    With ``tiles`` each offset is flagged as interior or not; boundary points
    are an error only under ``require_interior``.
    """
    f = phi.frame.field
    m, d = phi.m, phi.d
    if len(tile_map) != m:
        raise TilingError("tile map needs one choice per type")
    rows, rhs = [], []
    for j, (i, k) in enumerate(tile_map):
        dij = phi.digits[i][j]
        if not 0 <= k < len(dij):
            raise TilingError(f"tile map selects digit {k} of the empty or short set D[{i}][{j}]")
        a = phi.frame.exact_position(dij[k].tolist())
        for r in range(d):
            row = [f.zero() for _ in range(m * d)]
            for col in range(d):
                row[j * d + col] = row[j * d + col] + phi.q[r][col]
            row[i * d + r] = row[i * d + r] - f.one()
            rows.append(row)
            rhs.append(a[r])
    sol = solve_exact(rows, rhs)
    if sol is None:
        raise TilingError("control-point system is singular")
    offsets = [sol[j * d : (j + 1) * d] for j in range(m)]
    if tiles is None:
        interior = [False] * m
    else:
        interior = [_interior(tiles[j], offsets[j]) for j in range(m)]
        if require_interior and not all(interior):
            bad = [phi.names[j] for j in range(m) if not interior[j]]
            raise TilingError(f"control point not interior for type(s) {', '.join(bad)}")
    return ControlPoints(offsets, interior, list(tile_map))


def _interior(tile: Prototile, c: Sequence[FieldElement]) -> bool:
    if tile.mask is None:
        if tile.exact:
            return any(a < c[0] < b for a, b in tile.intervals)
        v = float(c[0])
        return any(a + TAU < v < b - TAU for a, b in tile.float_intervals())
    p = np.array([float(v) for v in c])
    ix, iy = np.floor((p - tile.origin) / tile.eps).astype(int)
    inner = tile.inner
    ny, nx = inner.shape
    return 0 <= ix < nx and 0 <= iy < ny and bool(inner[iy, ix])


def control_point_mset(x: MSet, cps: ControlPoints) -> MSet:
    """The m-set of control points of the tiles ``x + A_i``."""
    cols = []
    for i in range(x.m):
        shift = x.frame.coords_of(cps.offsets[i])
        cols.append(x.colors[i] + shift)
    return MSet(x.frame, cols)


def tiling_to_mset(patch: Patch, q: Sequence[Sequence], markers: Sequence[Sequence] | None = None) -> tuple[MSet, MSetSubstitution]:
    """Marker m-set of a fixed-point tiling patch and the digit sets read off it.

    A tile ``y + A_i`` is a child of ``x + A_j`` when its centroid lies in
    ``Q(x + A_j)``; only parents whose inflation lies inside the hull of the
    placements are read.
    ``D_ij`` must come out the same for every parent of type ``j``, and the
    resulting Phi must reproduce the interior of the patch exactly.
    """
    x = patch.placements
    frame = x.frame
    if markers is not None:
        shifts = [frame.coords_of(mk) for mk in markers]
        x = MSet(frame, [c + s for c, s in zip(x.colors, shifts)])
    else:
        shifts = [np.zeros(frame.s, dtype=np.int64)] * x.m
    qq = [[frame.field(v) if not isinstance(v, FieldElement) else v for v in row] for row in q]
    mmat = frame.expansion_matrix(qq)
    qf = np.array([[float(v) for v in row] for row in qq])
    tiles = patch.tiles
    tags, coords = x.tagged()
    base = np.array([c - shifts[t] for t, c in zip(tags, coords)]).reshape(-1, frame.s)
    pos = frame.embed(base)
    # a parent is read only when its inflated tile stays inside the hull of the
    # placements, so every child placement it covers is part of the patch
    hull = Box.around(pos)
    cents = np.array([pos[n] + tiles[tags[n]].centroid() for n in range(len(tags))])
    qinv = np.linalg.inv(qf)
    found: dict[int, set] = {}
    digit_sets: list[list[set | None]] = [[None] * x.m for _ in range(x.m)]
    for pidx in range(len(tags)):
        j = int(tags[pidx])
        lo, hi = tiles[j].bounds()
        corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(pos[pidx] + lo, pos[pidx] + hi)], indexing="ij")).reshape(frame.d, -1).T
        img = corners @ qf.T
        if not (hull.contains(img.min(axis=0)[None])[0] and hull.contains(img.max(axis=0)[None])[0]):
            continue
        pulled = (cents - (qf @ pos[pidx])) @ qinv.T
        children = [n for n in range(len(tags)) if tiles[j].contains(pulled[n])]
        per_i: dict[int, set] = {i: set() for i in range(x.m)}
        for n in children:
            per_i[int(tags[n])].add(tuple((base[n] - mmat @ base[pidx]).tolist()))
        for i in range(x.m):
            if digit_sets[i][j] is None:
                digit_sets[i][j] = per_i[i]
            elif digit_sets[i][j] != per_i[i]:
                raise TilingError(f"digit set D[{i}][{j}] differs between parents: patch is not substitution-consistent")
        found[j] = found.get(j, 0) + 1
    if len(found) != x.m:
        raise TilingError("every tile type needs a parent whose inflation lies inside the patch")
    digits = [[np.array(sorted(digit_sets[i][j]), dtype=np.int64).reshape(-1, frame.s) for j in range(x.m)] for i in range(x.m)]
    phi = MSetSubstitution(frame, qq, digits)
    placed = MSet(frame, [base[tags == i] for i in range(x.m)])
    image = phi.step(placed)[0]
    inner = hull.shrunk(float(np.max(np.abs(np.linalg.eigvals(qf)))) * max(float(np.max(np.abs(np.concatenate(t.bounds())))) for t in tiles) + TAU)
    if inner.volume > 0 and not image.restrict(inner).is_subset_of(placed):
        raise TilingError("read-off digits do not reproduce the patch")
    return x, phi
