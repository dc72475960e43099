"""Substitution Delone m-sets: the operator Phi, validation, legality and generation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .algebra import characteristic_polynomial, isolate_roots, pf_analysis
from .algebra.field import FieldElement, solve_exact
from .delone import TAU, Box, DeloneError, ModuleFrame, MSet


class SubstitutionError(ValueError):
    """Malformed substitution or a violated substitution axiom."""


class OverlapError(SubstitutionError):
    """Union terms of Phi produced the same point twice (strict mode)."""


def det_exact(q: Sequence[Sequence[FieldElement]]) -> FieldElement:
    m = [list(r) for r in q]
    n = len(m)
    f = m[0][0].field
    det = f.one()
    for c in range(n):
        piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if piv is None:
            return f.zero()
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for r in range(c + 1, n):
            if not m[r][c].is_zero():
                fac = m[r][c] * inv
                m[r] = [a - fac * b for a, b in zip(m[r], m[c])]
    return det


class MSetSubstitution:
    """``Λ_i = ⊎_j (Q Λ_j + D_ij)`` over a module frame.

    ``digits[i][j]`` lists the translations ``D_ij`` as integer coordinate vectors.
    """

    def __init__(self, frame: ModuleFrame, q: Sequence[Sequence], digits: Sequence[Sequence], names: Sequence[str] | None = None):
        self.frame = frame
        self.q = tuple(tuple(frame.field(v) if not isinstance(v, FieldElement) else v for v in row) for row in q)
        if len(self.q) != frame.d or any(len(r) != frame.d for r in self.q):
            raise SubstitutionError("Q must be d x d")
        m = len(digits)
        if m == 0 or any(len(row) != m for row in digits):
            raise SubstitutionError("digit-set matrix must be square")
        self.m = m
        self.digits = tuple(
            tuple(np.asarray(dij, dtype=np.int64).reshape(-1, frame.s) for dij in row) for row in digits
        )
        for row in self.digits:
            for dij in row:
                if len(np.unique(dij, axis=0)) != len(dij):
                    raise SubstitutionError("repeated digit within a digit set")
        try:
            self.M = frame.expansion_matrix(self.q)
        except ValueError as exc:
            raise SubstitutionError(str(exc)) from exc
        self.S = np.array([[len(dij) for dij in row] for row in self.digits], dtype=np.int64)
        self.names = tuple(names) if names else tuple(chr(ord("a") + i) if m <= 26 else str(i) for i in range(m))
        self.qf = np.array([[float(v) for v in row] for row in self.q])

    @property
    def d(self) -> int:
        return self.frame.d

    @property
    def s(self) -> int:
        return self.frame.s

    def det(self) -> FieldElement:
        return det_exact(self.q)

    def q_eigenvalues(self):
        """Certified enclosures of the eigenvalues of ``Q``.

        They are roots of the characteristic polynomial of the integer matrix ``M``;
        each float eigenvalue of ``Q`` is matched to its isolating disk.
        """
        encs = isolate_roots(characteristic_polynomial(self.M), 1e-12)
        out = []
        for lam in np.linalg.eigvals(self.qf):
            best = min(encs, key=lambda e: abs(e.center - lam))
            if abs(best.center - lam) > 1e-6 * (1 + abs(lam)):
                raise SubstitutionError("eigenvalue of Q not found among eigenvalues of M")
            out.append(best)
        return out

    def is_expanding(self) -> bool:
        return all(abs(e.center) - e.radius > 1 for e in self.q_eigenvalues())

    def digit_positions(self, i: int, j: int) -> np.ndarray:
        return self.frame.embed(self.digits[i][j])

    def max_digit_norm(self) -> float:
        norms = [np.linalg.norm(self.digit_positions(i, j), axis=1).max() for i in range(self.m) for j in range(self.m) if len(self.digits[i][j])]
        return float(max(norms)) if norms else 0.0

    def inverse_norm(self) -> float:
        return float(np.linalg.norm(np.linalg.inv(self.qf), 2))

    def step(self, x: MSet) -> tuple[MSet, int]:
        """One application of Phi, returning the image and the number of duplicate points."""
        self._check(x)
        colors = []
        dups = 0
        for i in range(self.m):
            parts = [(x.colors[j] @ self.M.T)[:, None, :] + self.digits[i][j][None, :, :] for j in range(self.m) if len(x.colors[j]) and len(self.digits[i][j])]
            if parts:
                cat = np.concatenate([p.reshape(-1, self.s) for p in parts])
                uniq = np.unique(cat, axis=0)
                dups += len(cat) - len(uniq)
                colors.append(uniq)
            else:
                colors.append(np.zeros((0, self.s), dtype=np.int64))
        return MSet(self.frame, colors), dups

    def _check(self, x: MSet):
        if x.frame != self.frame:
            raise SubstitutionError("input lives in a different frame")
        if x.m != self.m:
            raise SubstitutionError(f"expected {self.m} colors, got {x.m}")

    def empty(self) -> MSet:
        return MSet(self.frame, [np.zeros((0, self.s), dtype=np.int64)] * self.m)

    def point(self, color: int, coords: Sequence[int]) -> MSet:
        cols = [np.zeros((0, self.s), dtype=np.int64) for _ in range(self.m)]
        cols[color] = np.asarray(coords, dtype=np.int64).reshape(1, self.s)
        return MSet(self.frame, cols)


def apply_phi(phi: MSetSubstitution, x: MSet, k: int = 1, mode: str = "strict") -> MSet:
    """``Phi^k(x)`` exactly; overlaps raise in strict mode and are merged in lenient mode."""
    if k < 1:
        raise ValueError("power must be >= 1")
    if mode not in ("strict", "lenient"):
        raise ValueError("mode is 'strict' or 'lenient'")
    for it in range(k):
        x, dups = phi.step(x)
        if dups and mode == "strict":
            raise OverlapError(f"{dups} duplicated point(s) at iteration {it + 1}")
    return x


# -- validation -----------------------------------------------------------------------------


@dataclass
class ValidationReport:
    expanding: bool
    eigenvalue_moduli: list[float]
    S: np.ndarray
    primitive: bool
    primitivity_exponent: int | None
    pf_eigenvalue: float
    abs_det: float
    pf_gap: float
    duplicates: list[tuple[int, int]]

    @property
    def pf_ok(self) -> bool:
        return self.pf_gap < 1e-9

    @property
    def disjoint(self) -> bool:
        return not any(n for _, n in self.duplicates)

    @property
    def ok(self) -> bool:
        return self.expanding and self.pf_ok and self.disjoint

    def failures(self) -> list[str]:
        out = []
        if not self.expanding:
            out.append("Q is not expanding")
        if not self.pf_ok:
            out.append(f"PF eigenvalue {self.pf_eigenvalue:.12g} differs from |det Q| = {self.abs_det:.12g}")
        for it, n in self.duplicates:
            if n:
                out.append(f"{n} duplicated point(s) at iteration {it}")
        return out


def validate(phi: MSetSubstitution, seed: MSet, window: Box, max_iter: int = 8) -> ValidationReport:
    """Expansion, primitivity, the PF/determinant identity and disjointness on iterates of ``seed``."""
    eig = phi.q_eigenvalues()
    expanding = all(abs(e.center) - e.radius > 1 for e in eig)
    spec = pf_analysis(phi.S)
    abs_det = abs(float(phi.det()))
    dups = []
    x = seed
    for it in range(1, max_iter + 1):
        x, n = phi.step(x)
        inside = x.restrict(window)
        dups.append((it, n))
        if len(inside) > 20000 or len(x) > 200000:
            break
    return ValidationReport(
        expanding,
        [abs(e.center) for e in eig],
        phi.S,
        spec.primitive,
        spec.primitivity_exponent,
        spec.pf_eigenvalue,
        abs_det,
        abs(spec.pf_eigenvalue - abs_det),
        dups,
    )


# -- generating clusters --------------------------------------------------------------------


@dataclass
class GeneratingCluster:
    cluster: MSet
    power: int

    def __post_init__(self):
        if not len(self.cluster):
            raise SubstitutionError("generating cluster must be nonempty")


def _branch_fixed_points(phi: MSetSubstitution, p: int) -> list[tuple[int, tuple[int, ...]]]:
    """Points ``y`` of color ``j`` with ``y ∈ Phi^p({y}_j)_j`` and integer coordinates."""
    mp = np.linalg.matrix_power(phi.M, p)
    lhs = [[Fraction(int(v)) for v in row] for row in (np.eye(phi.s, dtype=np.int64) - mp)]
    out = []
    for j in range(phi.m):
        image = apply_phi(phi, phi.point(j, [0] * phi.s), p, "lenient")
        for a in image.colors[j].tolist():
            sol = solve_exact(lhs, [Fraction(v) for v in a])
            if sol is not None and all(v.denominator == 1 for v in sol):
                out.append((j, tuple(int(v) for v in sol)))
    return out


def _contains(big: MSet, small: MSet) -> bool:
    return small.is_subset_of(big)


def find_generating_cluster(phi: MSetSubstitution, max_power: int | None = None, two_sided: bool = False, k_max: int = 12) -> GeneratingCluster:
    """A cluster ``P`` with ``Phi^p(P) ⊇ P``.

    Single points fixed by a branch of ``Phi^p`` are tried first.  With
    ``two_sided`` (or when no single point works) legal pairs of such points are
    searched, nearest pairs first, within ``2 max|D| / (min|eig Q| - 1)``; in one
    dimension the pair must straddle the origin so that iterates grow both ways.
    """
    if max_power is None:
        max_power = max(2, phi.m)
    fixed: list[tuple[int, int, tuple[int, ...]]] = []
    for p in range(1, max_power + 1):
        for j, y in _branch_fixed_points(phi, p):
            fixed.append((p, j, y))
        if fixed and not two_sided:
            p0, j, y = min(fixed, key=lambda t: (t[0], float(np.linalg.norm(phi.frame.embed(t[2]))), t[1], t[2]))
            return GeneratingCluster(phi.point(j, y), p0)
    if not fixed:
        raise SubstitutionError("no generating cluster found within the search bounds")
    lam_min = min(abs(e.center) for e in phi.q_eigenvalues())
    radius = 2 * max(phi.max_digit_norm(), 1.0) / (lam_min - 1)
    candidates = []
    for a in range(len(fixed)):
        for b in range(a + 1, len(fixed)):
            pa, ja, ya = fixed[a]
            pb, jb, yb = fixed[b]
            if (ja, ya) == (jb, yb):
                continue
            xa = phi.frame.embed(ya)[0]
            xb = phi.frame.embed(yb)[0]
            dist = float(np.linalg.norm(xa - xb))
            if dist > radius:
                continue
            if phi.d == 1 and not (min(xa[0], xb[0]) < 0 <= max(xa[0], xb[0]) or min(xa[0], xb[0]) <= 0 < max(xa[0], xb[0])):
                continue
            candidates.append((dist, math.lcm(pa, pb), (ja, ya), (jb, yb)))
    candidates.sort(key=lambda c: (c[1], c[0], c[2], c[3]))
    for _, p, (ja, ya), (jb, yb) in candidates:
        pair = phi.point(ja, ya).union(phi.point(jb, yb))
        if is_legal(phi, pair, k_max).legal:
            return GeneratingCluster(pair, p)
    raise SubstitutionError("no generating cluster found within the search bounds")


# -- legality -------------------------------------------------------------------------------


@dataclass
class LegalityVerdict:
    legal: bool
    witness: tuple[int, int, tuple[int, ...]] | None  # (color, k, translation)


def is_legal(phi: MSetSubstitution, cluster: MSet, k_max: int = 12, max_points: int = 400000) -> LegalityVerdict:
    """Search for ``cluster + t ⊆ Phi^k({0}_j)`` with ``k <= k_max``.

    ``False`` means no witness was found within the bounds.
    """
    if not len(cluster):
        return LegalityVerdict(True, None)
    tags, coords = cluster.tagged()
    anchor_c, anchor = int(tags[0]), coords[0]
    for k in range(0, k_max + 1):
        for j in range(phi.m):
            image = phi.point(j, [0] * phi.s)
            if k:
                image = apply_phi(phi, image, k, "lenient")
            if len(image) > max_points:
                return LegalityVerdict(False, None)
            lookup = [{tuple(r) for r in c.tolist()} for c in image.colors]
            for q in image.colors[anchor_c].tolist():
                t = np.asarray(q, dtype=np.int64) - anchor
                if all(tuple((coords[n] + t).tolist()) in lookup[int(tags[n])] for n in range(len(coords))):
                    return LegalityVerdict(True, (j, k, tuple(int(v) for v in t)))
    return LegalityVerdict(False, None)


# -- patch generation -----------------------------------------------------------------------


@dataclass
class PatchResult:
    patch: MSet
    iterations: int
    power: int
    covered: Box


class CoverageError(SubstitutionError):
    def __init__(self, message: str, covered: Box | None):
        super().__init__(message)
        self.covered = covered


def _cover_1d(phi: MSetSubstitution, x: MSet, region: Box) -> bool:
    tiles = _tile_cache(phi)
    spans = sorted((p + lo, p + hi) for i in range(phi.m) for p in x.positions(i)[:, 0] for lo, hi in tiles[i])
    reach = region.lo[0]
    for lo, hi in spans:
        if hi < reach:
            continue
        if lo > reach + TAU:
            return False
        reach = max(reach, hi)
        if reach >= region.hi[0] - TAU:
            return True
    return False


_TILES: dict[int, list] = {}


def _tile_cache(phi: MSetSubstitution):
    key = id(phi)
    if key not in _TILES:
        from .tiling import solve_adjoint

        result = solve_adjoint(phi)
        _TILES[key] = [[(float(a), float(b)) for a, b in t.intervals] for t in result.tiles]
    return _TILES[key]


def generate_patch(phi: MSetSubstitution, seed: GeneratingCluster | MSet, region: Box, max_iter: int = 60, mode: str = "strict") -> PatchResult:
    """Iterate ``Phi^p`` on the seed until the region is covered, then restrict.

    In one dimension coverage is decided with the exact adjoint tiles; in higher
    dimension the restriction to the region must be stable under one more
    iteration and the bounding box must contain the region.
    """
    if isinstance(seed, MSet):
        seed = GeneratingCluster(seed, _seed_power(phi, seed))
    p = seed.power
    x = seed.cluster
    if not _contains(apply_phi(phi, x, p, "lenient"), x):
        raise SubstitutionError("seed is not a generating cluster: Phi^p(P) does not contain P")
    prev_box = None
    stalls = 0
    for it in range(1, max_iter + 1):
        x = apply_phi(phi, x, p, mode)
        pos = x.support_positions()
        box = Box.around(pos)
        if phi.d == 1:
            done = _cover_1d(phi, x, region)
        else:
            done = all(np.array(box.lo) <= np.array(region.lo)) and all(np.array(box.hi) >= np.array(region.hi))
            if done:
                nxt = apply_phi(phi, x, p, mode)
                done = nxt.restrict(region) == x.restrict(region)
        if done:
            return PatchResult(x.restrict(region), it * p, p, box)
        if prev_box is not None:
            grown_lo = np.array(box.lo) < np.array(prev_box.lo) - TAU
            grown_hi = np.array(box.hi) > np.array(prev_box.hi) + TAU
            need_lo = np.array(box.lo) > np.array(region.lo)
            need_hi = np.array(box.hi) < np.array(region.hi)
            stalls = stalls + 1 if (need_lo & ~grown_lo).any() or (need_hi & ~grown_hi).any() else 0
            if stalls >= 3:
                raise CoverageError(f"seed does not cover the region; covered box {_fmt_box(box)}", box)
        prev_box = box
        if len(x) > 5_000_000:
            break
    raise CoverageError(f"region not covered after {max_iter} iterations", prev_box)


def _fmt_box(b: Box) -> str:
    return "[" + ", ".join(f"[{lo:.6g}, {hi:.6g}]" for lo, hi in zip(b.lo, b.hi)) + "]"


def _seed_power(phi: MSetSubstitution, x: MSet, max_power: int = 6) -> int:
    y = x
    for p in range(1, max_power + 1):
        y = apply_phi(phi, y, 1, "lenient")
        if _contains(y, x):
            return p
    raise SubstitutionError("seed is not a generating cluster for any power <= 6")


# -- repetitivity ---------------------------------------------------------------------------


@dataclass
class RepetitivityReport:
    M: float
    cluster_types: int
    M_half: float
    repetitive_evidence: bool
    note: str = "patch-relative"


def _cluster_types(x: MSet, T: float, inner: Box):
    tags, coords = x.tagged()
    pos = x.frame.embed(coords)
    tree = cKDTree(pos)
    types: dict[tuple, list[int]] = {}
    for k in np.flatnonzero(inner.contains(pos)):
        nbr = tree.query_ball_point(pos[k], T + TAU)
        shape = tuple(sorted((int(tags[j]), *map(int, coords[j] - coords[k])) for j in nbr))
        types.setdefault(shape, []).append(k)
    return types, pos


def _repetitivity_radius(x: MSet, T: float, box: Box) -> tuple[float, int]:
    types, pos = _cluster_types(x, T, box.shrunk(T))
    if not types:
        raise DeloneError("no complete clusters inside the patch")
    trees = [cKDTree(pos[idx]) for idx in types.values()]
    margin = T
    M = T
    for _ in range(6):
        inner = box.shrunk(margin)
        pitch = max(T / 8, float(inner.widths.max()) / 400)
        axes = [np.arange(lo, hi + pitch / 2, pitch) if hi > lo else np.array([lo]) for lo, hi in zip(inner.lo, inner.hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, x.d)
        far = np.zeros(len(grid))
        for tr in trees:
            far = np.maximum(far, tr.query(grid)[0])
        new_m = T + float(far.max())
        if abs(new_m - M) < 1e-9 or new_m >= float(box.widths.min()) / 2:
            M = new_m
            break
        M = new_m
        margin = M
    return M, len(types)


def repetitivity_probe(x: MSet, T: float, patch_box: Box | None = None) -> RepetitivityReport:
    """``M_X(T)``: smallest radius whose balls inside the patch see every ``T``-cluster type."""
    if patch_box is None:
        patch_box = Box.around(x.support_positions())
    if patch_box.widths.min() < 10 * T:
        raise DeloneError("patch narrower than 10T")
    M, n_types = _repetitivity_radius(x, T, patch_box)
    M_half, _ = _repetitivity_radius(x.restrict(patch_box.scaled(0.5)), T, patch_box.scaled(0.5))
    evidence = M < float(patch_box.widths.min()) / 4 and M <= 1.5 * M_half + TAU
    return RepetitivityReport(M, n_types, M_half, evidence)
