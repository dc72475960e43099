"""Probes of the translation dynamics: big-ball metric, cluster frequencies, almost-periods, eigenvalues."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .algebra.field import FieldElement
from .delone import TAU, Box, DeloneError, MSet

CAP = 2**-0.5


# -- van Hove sequences ---------------------------------------------------------------------


@dataclass(frozen=True)
class VanHoveSequence:
    """Regions ``F_n``: centred cubes ``[-n, n]^d`` or balls of radius ``n``."""

    d: int
    kind: str = "cube"

    def __post_init__(self):
        if self.kind not in ("cube", "ball"):
            raise ValueError("kind is 'cube' or 'ball'")

    def volume(self, n: float) -> float:
        if self.kind == "cube":
            return (2.0 * n) ** self.d
        return math.pi ** (self.d / 2) / math.gamma(self.d / 2 + 1) * n**self.d

    def contains(self, pos: np.ndarray, n: float, center=None, tol: float = 0.0) -> np.ndarray:
        p = np.atleast_2d(pos) - (0 if center is None else np.asarray(center, float))
        if self.kind == "cube":
            return np.all(np.abs(p) <= n + tol, axis=1)
        return np.linalg.norm(p, axis=1) <= n + tol

    def bounding_box(self, n: float, center=None) -> Box:
        c = np.zeros(self.d) if center is None else np.asarray(center, float)
        return Box(tuple(c - n), tuple(c + n))

    def boundary_ratio(self, n: float, r: float) -> float:
        """``vol((dF_n)^{+r}) / vol(F_n)``, exact for cubes and balls."""
        inner = max(n - r, 0.0)
        return (self.volume(n + r) - self.volume(inner)) / self.volume(n)


# -- big-ball metric ------------------------------------------------------------------------


def _ball(tree: cKDTree, center: np.ndarray, radius: float) -> np.ndarray:
    return np.array(sorted(tree.query_ball_point(center, radius)), dtype=np.int64)


def _match(a_tags, a_coords, a_pos, b_tags, b_coords, b_pos, exact: bool) -> bool:
    if len(a_tags) != len(b_tags):
        return False
    if not len(a_tags):
        return True
    if exact:
        ka = np.column_stack([a_tags, a_coords])
        kb = np.column_stack([b_tags, b_coords])
        return bool(np.array_equal(np.unique(ka, axis=0), np.unique(kb, axis=0)))
    oa = np.lexsort(tuple(a_pos.T[::-1]) + (a_tags,))
    ob = np.lexsort(tuple(b_pos.T[::-1]) + (b_tags,))
    if not np.array_equal(a_tags[oa], b_tags[ob]):
        return False
    return bool(np.all(np.abs(a_pos[oa] - b_pos[ob]) <= 1e3 * TAU))


@dataclass
class _Side:
    tags: np.ndarray
    coords: np.ndarray
    pos: np.ndarray
    tree: cKDTree

    @classmethod
    def of(cls, x: MSet) -> "_Side":
        tags, coords = x.tagged()
        pos = x.frame.embed(coords)
        return cls(tags, coords, pos, cKDTree(pos))


def _agree(s1: _Side, s2: _Side, t: np.ndarray, t_coords, y: np.ndarray, radius: float) -> bool:
    """``(L1 - t - y) ∩ B_R = (L2 - y) ∩ B_R`` with ``x = y + t``."""
    x = y + t
    i1 = _ball(s1.tree, x, radius)
    i2 = _ball(s2.tree, y, radius)
    if len(i1) != len(i2):
        return False
    if t_coords is not None:
        return _match(s1.tags[i1], s1.coords[i1] - t_coords, None, s2.tags[i2], s2.coords[i2], None, True)
    return _match(s1.tags[i1], None, s1.pos[i1] - t, s2.tags[i2], None, s2.pos[i2], False)


def _disk_grid(d: int, eps: float, center: np.ndarray) -> np.ndarray:
    step = eps / 8
    k = np.arange(-8, 9) * step
    grid = np.array(np.meshgrid(*[k] * d, indexing="ij")).reshape(d, -1).T
    grid = grid[np.linalg.norm(grid, axis=1) <= eps + 1e-15]
    return grid + center


def big_ball_distance(x1: MSet, x2: MSet, eps_min: float = 1e-3, ratio: float = 1.05, reach: float | None = None) -> float:
    """``min(inf eps, 2^-1/2)`` over eps admitting ``x, y`` in ``B_eps(0)`` with
    ``(L1 - x) ∩ B_{1/eps}(0) = (L2 - y) ∩ B_{1/eps}(0)``.

    ``eps`` runs over a geometric grid; for each value the translation difference
    ``t = x - y`` ranges over ``L1 - q`` with ``q`` the point of ``L2`` nearest 0,
    and ``y`` over a grid of pitch ``eps / 8``.  When both sets share a frame the
    comparison is exact on coordinates.  ``reach`` is the radius about 0 on which
    both patches are complete; balls beyond it are not examined.
    """
    if x1.d != x2.d or x1.m != x2.m:
        raise DeloneError("m-sets differ in dimension or number of colors")
    s1, s2 = _Side.of(x1), _Side.of(x2)
    if not len(s1.tags) or not len(s2.tags):
        return CAP
    exact = x1.frame == x2.frame
    if reach is None:
        reach = min(float(np.abs(s1.pos).max()), float(np.abs(s2.pos).max()))
    d = x1.d
    _, q_idx = s2.tree.query(np.zeros(d))
    q_pos, q_tag = s2.pos[q_idx], s2.tags[q_idx]
    eps = max(eps_min, 1.0 / max(reach - 2, 1e-9))
    while eps < CAP:
        radius = 1.0 / eps
        # x = y + t with |x|, |y| <= eps, so |t| <= 2 eps
        cand = _ball(s1.tree, q_pos, 2 * eps + 1e-12)
        for j in cand:
            if s1.tags[j] != q_tag:
                continue
            t = s1.pos[j] - q_pos
            t_coords = s1.coords[j] - s2.coords[q_idx] if exact else None
            if np.linalg.norm(t) <= 1e-15 and _agree(s1, s2, t, t_coords, np.zeros(d), radius):
                return 0.0 if _identical(s1, s2, exact) else eps
            centre = -t / 2
            for y in _disk_grid(d, eps, centre):
                if np.linalg.norm(y) > eps + 1e-15 or np.linalg.norm(y + t) > eps + 1e-15:
                    continue
                if _agree(s1, s2, t, t_coords, y, radius):
                    return min(eps, CAP)
        eps *= ratio
    return CAP


def _identical(s1: _Side, s2: _Side, exact: bool) -> bool:
    if exact:
        return _match(s1.tags, s1.coords, None, s2.tags, s2.coords, None, True)
    return _match(s1.tags, None, s1.pos, s2.tags, None, s2.pos, False)


# -- cluster frequencies --------------------------------------------------------------------


@dataclass
class FrequencyReport:
    cluster: MSet
    ns: list[float]
    samples: np.ndarray
    counts: np.ndarray  # (len(ns), len(samples)) exact integers
    frequencies: np.ndarray

    @property
    def spread(self) -> np.ndarray:
        return self.frequencies.max(axis=1) - self.frequencies.min(axis=1)

    @property
    def limit(self) -> float:
        return float(self.frequencies[-1].mean())

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "volume_min_count", "volume_max_count", "freq_min", "freq_max", "spread"])
        for k, n in enumerate(self.ns):
            w.writerow([n, int(self.counts[k].min()), int(self.counts[k].max()), self.frequencies[k].min(), self.frequencies[k].max(), self.spread[k]])
        return _emit(buf.getvalue(), path)


def _emit(text: str, path) -> str:
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def occurrences(x: MSet, cluster: MSet) -> np.ndarray:
    """Coordinate vectors ``t`` with ``cluster + t ⊆ x``, exact."""
    if cluster.frame != x.frame or cluster.m != x.m:
        raise DeloneError("cluster and set live in different frames")
    ctags, ccoords = cluster.tagged()
    if not len(ctags):
        raise DeloneError("empty cluster")
    anchor_tag, anchor = ctags[0], ccoords[0]
    cand = x.colors[anchor_tag] - anchor
    ok = np.ones(len(cand), dtype=bool)
    for tag, c in zip(ctags[1:], ccoords[1:]):
        ok &= x.contains(int(tag), cand + c)
    return cand[ok]


def cluster_frequency(
    x: MSet,
    cluster: MSet,
    seq: VanHoveSequence,
    samples: Sequence[Sequence[float]],
    ns: Sequence[float],
    region: Box | None = None,
) -> FrequencyReport:
    """``L_P(s + F_n) / vol(F_n)``: occurrences whose translation lies in ``s + F_n``.

    ``region`` is where the patch is complete (default: its bounding box shrunk
    by the cluster diameter); every ``s + F_n`` must fit inside it.
    """
    occ = occurrences(x, cluster)
    opos = x.frame.embed(occ)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if region is None:
        region = Box.around(x.support_positions())
        cpos = cluster.support_positions()
        diam = float(np.linalg.norm(cpos.max(axis=0) - cpos.min(axis=0))) if len(cpos) > 1 else 0.0
        region = region.shrunk(diam)
    counts = np.zeros((len(ns), len(samples)), dtype=np.int64)
    for a, n in enumerate(ns):
        for b, s in enumerate(samples):
            box = seq.bounding_box(n, s)
            if np.any(np.array(box.lo) < np.array(region.lo) - TAU) or np.any(np.array(box.hi) > np.array(region.hi) + TAU):
                raise DeloneError(f"patch does not cover s + F_n for n = {n}")
            counts[a, b] = int(seq.contains(opos, n, s, TAU).sum()) if len(opos) else 0
    vols = np.array([seq.volume(n) for n in ns])[:, None]
    return FrequencyReport(cluster, list(ns), samples, counts, counts / vols)


# -- almost-periods -------------------------------------------------------------------------


def almost_periods(x: MSet, delta: float, window: Box, region: Box | None = None) -> np.ndarray:
    """Coordinates of ``y`` in ``(X - X) ∩ window`` with ``X ∩ B_{1/d}(0) = (X - y) ∩ B_{1/d}(0)``.

    The equality is decided on exact coordinates.  ``region`` is where the
    patch is complete and must contain ``B_{1/d}(0)`` moved by every ``y``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    radius = 1.0 / delta
    tags, coords = x.tagged()
    pos = x.frame.embed(coords)
    if region is None:
        region = Box.around(pos)
    need = Box(tuple(np.array(window.lo) - radius), tuple(np.array(window.hi) + radius))
    if np.any(np.array(need.lo) < np.array(region.lo) - TAU) or np.any(np.array(need.hi) > np.array(region.hi) + TAU):
        raise DeloneError("patch too small for the requested delta and window")
    tree = cKDTree(pos)
    base = _ball(tree, np.zeros(x.d), radius)
    if not len(base):
        raise DeloneError("no point of the set within 1/delta of the origin")
    ref = base[np.argmin(np.linalg.norm(pos[base], axis=1))]
    key0 = np.unique(np.column_stack([tags[base], coords[base]]), axis=0)
    cand = x.colors[tags[ref]] - coords[ref]
    cpos = x.frame.embed(cand)
    cand = cand[window.contains(cpos, TAU)]
    out = []
    for y in cand:
        yp = x.frame.embed(y)[0]
        idx = _ball(tree, yp, radius)
        if len(idx) != len(base):
            continue
        key = np.unique(np.column_stack([tags[idx], coords[idx] - y]), axis=0)
        if np.array_equal(key, key0):
            out.append(y)
    res = np.array(out, dtype=np.int64).reshape(-1, x.s)
    order = np.argsort(np.linalg.norm(x.frame.embed(res), axis=1), kind="stable")
    return res[order]


# -- eigenvalue tests -----------------------------------------------------------------------


@dataclass
class EigenReport:
    alpha: np.ndarray
    deltas: list[float]
    sups: list[float]
    sizes: list[int]
    verdict: str

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["delta", "almost_periods", "sup"])
        for row in zip(self.deltas, self.sizes, self.sups):
            w.writerow(row)
        return _emit(buf.getvalue(), path)


def topological_eigenvalue_test(
    x: MSet,
    alpha: Sequence[float] | float,
    deltas: Sequence[float],
    window: Box | None = None,
    region: Box | None = None,
    reach: float = 3.0,
) -> EigenReport:
    """``sup |exp(2 pi i <y, alpha>) - 1|`` over almost-periods, for shrinking ``delta``.

    Without ``window`` the almost-periods are searched in the cube of half-width
    ``reach / delta``.  Rows where only ``y = 0`` is found carry no information
    and are left out of the verdict: "eigenvalue-consistent" if the remaining
    sups do not increase and end below 0.1, "rejected" if the last one exceeds 1,
    otherwise "inconclusive".
    """
    deltas = list(deltas)
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must decrease")
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    sups, sizes = [], []
    for dl in deltas:
        win = window if window is not None else Box.cube(np.zeros(x.d), reach / dl)
        ys = almost_periods(x, dl, win, region)
        sizes.append(len(ys))
        yp = x.frame.embed(ys)
        vals = np.abs(np.exp(2j * np.pi * (yp @ a)) - 1)
        sups.append(float(vals.max()) if len(vals) else 0.0)
    used = [v for v, n in zip(sups, sizes) if n > 1]
    if not used:
        verdict = "inconclusive"
    elif all(b <= c + 1e-12 for c, b in zip(used, used[1:])) and used[-1] < 0.1:
        verdict = "eigenvalue-consistent"
    elif used[-1] > 1:
        verdict = "rejected"
    else:
        verdict = "inconclusive"
    return EigenReport(a, deltas, sups, sizes, verdict)


def interatomic_sample(x: MSet, count: int = 20, radius: float | None = None) -> np.ndarray:
    """Shortest vectors of ``U_i (X_i - X_i)`` near the origin, as coordinates.

    The sampling ball starts at ``radius`` (default ``4R + 1``) and doubles
    until it yields ``count`` vectors or covers the whole patch.
    """
    tags, coords = x.tagged()
    pos = x.frame.embed(coords)
    if radius is None:
        radius = 4 * (x.R if x.R else 1.0) + 1
    extent = float(np.linalg.norm(pos, axis=1).max()) if len(pos) else 0.0
    while True:
        near = np.linalg.norm(pos, axis=1) <= radius
        vecs = []
        for i in range(x.m):
            c = coords[near & (tags == i)]
            if len(c) > 1:
                vecs.append((c[:, None, :] - c[None, :, :]).reshape(-1, x.s))
        v = np.unique(np.concatenate(vecs), axis=0) if vecs else np.zeros((0, x.s), dtype=np.int64)
        v = v[np.any(v != 0, axis=1)]
        if len(v) >= count or radius >= extent:
            break
        radius *= 2
    if not len(v):
        raise DeloneError("no inter-atomic vectors in the sample")
    vp = x.frame.embed(v)
    order = np.lexsort(tuple(v.T[::-1]) + (np.round(np.linalg.norm(vp, axis=1), 9),))
    v, vp = v[order], vp[order]
    out = v[:count]
    if np.linalg.matrix_rank(vp[:count]) < x.d:
        raise DeloneError("inter-atomic sample does not span R^d")
    return out


@dataclass
class QnReport:
    alpha: list[FieldElement]
    vectors: np.ndarray
    table: np.ndarray  # (len(vectors), N + 1)
    verdict: str
    witness: np.ndarray | None

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n"] + [f"x{k}" for k in range(len(self.vectors))])
        for n in range(self.table.shape[1]):
            w.writerow([n] + list(self.table[:, n]))
        return _emit(buf.getvalue(), path)


def _dist_int(v: FieldElement) -> float:
    n = (v + v.field(Fraction(1, 2))).floor()
    return abs(float(v - n))


def qn_eigenvalue_test(x: MSet, q: Sequence[Sequence], alpha: Sequence, N: int = 40, count: int = 20, tol: float = 1e-3) -> QnReport:
    """``||<Q^n v, alpha>||`` for inter-atomic ``v``, exactly in the field.

    Passing is necessary for ``alpha`` to be an eigenvalue, not sufficient:
    every sequence must drop below ``tol`` by ``n = N`` and stay there.
    """
    f = x.frame.field
    d = x.d
    qq = [[f(v) if not isinstance(v, FieldElement) else v for v in row] for row in q]
    al = [f(v) if not isinstance(v, FieldElement) else v for v in np.atleast_1d(np.asarray(alpha, dtype=object))]
    if len(qq) != d or len(al) != d:
        raise DeloneError("Q and alpha must match the dimension")
    vecs = interatomic_sample(x, count)
    table = np.zeros((len(vecs), N + 1))
    witness = None
    ok = True
    for k, c in enumerate(vecs):
        v = x.frame.exact_position(c)
        for n in range(N + 1):
            table[k, n] = _dist_int(sum((a * b for a, b in zip(al, v)), f.zero()))
            v = [sum((qq[i][j] * v[j] for j in range(d)), f.zero()) for i in range(d)]
        below = np.nonzero(table[k] >= tol)[0]
        last_bad = below.max() if len(below) else -1
        if last_bad >= N:
            ok = False
            if witness is None:
                witness = c
    return QnReport(al, vecs, table, "necessary-condition-passed" if ok else "failed", witness)
