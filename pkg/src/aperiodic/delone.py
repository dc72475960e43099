"""Colored Delone point sets with exact module coordinates, and probes on them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .algebra import AlgebraicInteger, NumberField, classify, induced_integer_matrix
from .algebra.field import FieldElement, rank_exact
from .algebra.spectral import rationalize

TAU = 1e-9


class DeloneError(ValueError):
    """Data-level failure of a Delone-set operation."""


# -- geometry helpers -----------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box corners differ in dimension")
        if any(not (math.isfinite(a) and math.isfinite(b)) for a, b in zip(self.lo, self.hi)):
            raise ValueError("box must be bounded")
        if any(b < a for a, b in zip(self.lo, self.hi)):
            raise ValueError("box has negative extent")

    @classmethod
    def interval(cls, a: float, b: float) -> "Box":
        return cls((float(a),), (float(b),))

    @classmethod
    def cube(cls, center: Sequence[float], half: float) -> "Box":
        c = [float(v) for v in center]
        return cls(tuple(v - half for v in c), tuple(v + half for v in c))

    @classmethod
    def around(cls, pos: np.ndarray) -> "Box":
        return cls(tuple(pos.min(axis=0)), tuple(pos.max(axis=0)))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def center(self) -> np.ndarray:
        return (np.array(self.lo) + np.array(self.hi)) / 2

    @property
    def widths(self) -> np.ndarray:
        return np.array(self.hi) - np.array(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def scaled(self, factor: float) -> "Box":
        c, h = self.center, self.widths / 2 * factor
        return Box(tuple(c - h), tuple(c + h))

    def shrunk(self, margin: float) -> "Box":
        c, h = self.center, np.maximum(self.widths / 2 - margin, 0.0)
        return Box(tuple(c - h), tuple(c + h))

    def contains(self, pos: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pos = np.atleast_2d(pos)
        return np.all((pos >= np.array(self.lo) - tol) & (pos <= np.array(self.hi) + tol), axis=1)

    def nested(self) -> list["Box"]:
        """The window and its halvings: ``w/4, w/2, w`` (smallest first)."""
        return [self.scaled(0.25), self.scaled(0.5), self]


# -- frames and m-sets ----------------------------------------------------------------------


class ModuleFrame:
    """Basis ``V`` (d x s) of a free module ``[X]``, exact over a real number field.

    ``V`` is given as rows of field elements (or anything the field accepts).
    """

    def __init__(self, field_: NumberField, basis: Sequence[Sequence]):
        rows = [[field_(v) if not isinstance(v, FieldElement) else v for v in row] for row in basis]
        if not rows or not rows[0]:
            raise ValueError("empty basis")
        s = len(rows[0])
        if any(len(r) != s for r in rows):
            raise ValueError("ragged basis matrix")
        self.field = field_
        self.basis = tuple(tuple(r) for r in rows)
        self.d = len(rows)
        self.s = s
        if s < self.d:
            raise ValueError("rank s must be at least the dimension d")
        self.vf = np.array([[float(v) for v in row] for row in rows], dtype=float)
        if np.linalg.matrix_rank(self.vf) != self.d:
            raise ValueError("basis does not span R^d")
        # columns free over Z iff the s columns are Q-independent, i.e. the stacked
        # power-basis coordinates have rank s
        if rank_exact(rationalize(self.basis)) != s:
            raise ValueError("basis columns satisfy an integer relation (not free)")

    @classmethod
    def integer_lattice(cls, d: int) -> "ModuleFrame":
        q = NumberField.rationals()
        return cls(q, [[1 if i == j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def power_basis(cls, field_: NumberField) -> "ModuleFrame":
        """``V = [1, b, ..., b^(s-1)]`` for the field generator ``b`` (d = 1)."""
        b = field_.gen()
        return cls(field_, [[b**k for k in range(field_.degree)]])

    @classmethod
    def rational(cls, basis: Sequence[Sequence]) -> "ModuleFrame":
        return cls(NumberField.rationals(), [[Fraction(v) if not isinstance(v, str) else Fraction(v) for v in r] for r in basis])

    def embed(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.s)
        return coords.astype(float) @ self.vf.T

    def exact_position(self, coords: Sequence[int]) -> list[FieldElement]:
        return [sum((v * int(c) for v, c in zip(row, coords)), self.field.zero()) for row in self.basis]

    def coords_of(self, vector: Sequence) -> np.ndarray:
        """Integer coordinates of an exact module vector, or ``DeloneError`` if not in ``[X]``."""
        from .algebra.field import solve_exact

        vec = [self.field(v) if not isinstance(v, FieldElement) else v for v in vector]
        vr = rationalize(self.basis)
        rhs = [c for e in vec for c in e.coords]
        sol = solve_exact(vr, rhs)
        if sol is None or any(x.denominator != 1 for x in sol):
            raise DeloneError(f"{vector} is not in the module spanned by the frame")
        return np.array([int(x) for x in sol], dtype=np.int64)

    def expansion_matrix(self, q: Sequence[Sequence]) -> np.ndarray:
        """Integer ``M`` with ``Q V = V M``."""
        qq = [[self.field(v) if not isinstance(v, FieldElement) else v for v in row] for row in q]
        return induced_integer_matrix(qq, self.basis)

    def __eq__(self, other):
        return isinstance(other, ModuleFrame) and self.field == other.field and self.basis == other.basis

    def __hash__(self):
        return hash((self.field, self.basis))

    def __repr__(self):
        return f"ModuleFrame(d={self.d}, s={self.s}, field={self.field!r})"


def _canonical(arr: np.ndarray, s: int, strict: bool = True) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64).reshape(-1, s)
    if len(arr) == 0:
        return arr
    uniq = np.unique(arr, axis=0)
    if strict and len(uniq) != len(arr):
        raise DeloneError("duplicate points within a color")
    return uniq


class MSet:
    """``Λ = (Λ_1, ..., Λ_m)``: per-color integer coordinate arrays over a frame.

    Points within a color are distinct and kept in lexicographic order; colors
    may share points.
    """

    def __init__(self, frame: ModuleFrame, colors: Sequence, r: float | None = None, R: float | None = None, strict: bool = True):
        self.frame = frame
        self.colors = tuple(_canonical(c, frame.s, strict) for c in colors)
        self.r = r
        self.R = R
        self._pos: dict[int, np.ndarray] = {}

    @property
    def m(self) -> int:
        return len(self.colors)

    @property
    def s(self) -> int:
        return self.frame.s

    @property
    def d(self) -> int:
        return self.frame.d

    def __len__(self) -> int:
        return sum(len(c) for c in self.colors)

    def counts(self) -> np.ndarray:
        return np.array([len(c) for c in self.colors], dtype=np.int64)

    def positions(self, i: int) -> np.ndarray:
        if i not in self._pos:
            self._pos[i] = self.frame.embed(self.colors[i])
        return self._pos[i]

    def support(self) -> np.ndarray:
        """Union over colors, as distinct integer coordinates."""
        if not len(self):
            return np.zeros((0, self.s), dtype=np.int64)
        return np.unique(np.concatenate(self.colors), axis=0)

    def support_positions(self) -> np.ndarray:
        return self.frame.embed(self.support())

    def tagged(self) -> tuple[np.ndarray, np.ndarray]:
        """All (color, coords) records, color-major."""
        tags = np.concatenate([np.full(len(c), i, dtype=np.int64) for i, c in enumerate(self.colors)]) if len(self) else np.zeros(0, np.int64)
        coords = np.concatenate(self.colors) if len(self) else np.zeros((0, self.s), np.int64)
        return tags, coords

    def restrict(self, box: Box, tol: float = TAU) -> "MSet":
        return MSet(self.frame, [c[box.contains(self.positions(i), tol)] if len(c) else c for i, c in enumerate(self.colors)], self.r, self.R)

    def translate(self, t: Sequence[int]) -> "MSet":
        t = np.asarray(t, dtype=np.int64)
        return MSet(self.frame, [c + t for c in self.colors], self.r, self.R)

    def union(self, other: "MSet") -> "MSet":
        return MSet(self.frame, [np.concatenate([a, b]) for a, b in zip(self.colors, other.colors)], self.r, self.R, strict=False)

    def contains(self, i: int, coords: np.ndarray) -> np.ndarray:
        """Exact membership of each row of ``coords`` in color ``i``."""
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.s)
        base = self.colors[i]
        if not len(base) or not len(coords):
            return np.zeros(len(coords), dtype=bool)
        known = {tuple(r) for r in base.tolist()}
        return np.array([tuple(r) in known for r in coords.tolist()], dtype=bool)

    def is_subset_of(self, other: "MSet") -> bool:
        return all(self_c.size == 0 or other.contains(i, self_c).all() for i, self_c in enumerate(self.colors))

    def __eq__(self, other):
        return (
            isinstance(other, MSet)
            and self.frame == other.frame
            and self.m == other.m
            and all(np.array_equal(a, b) for a, b in zip(self.colors, other.colors))
        )

    def __repr__(self):
        return f"MSet(m={self.m}, counts={self.counts().tolist()}, {self.frame!r})"


Cluster = MSet


def single_color(frame: ModuleFrame, coords) -> MSet:
    return MSet(frame, [coords])


# -- parameters and censuses ----------------------------------------------------------------


def estimate_parameters(x: MSet, region: Box) -> tuple[float, float]:
    """``(r, R)``: packing radius and covering radius of the support on ``region``.

    In one dimension both come from the gap list.  Otherwise ``R`` is the largest
    distance from a grid sample (pitch ``r/4``) to the set, with a boundary margin
    of ``R`` excluded; it is a lower estimate.
    """
    pos = x.restrict(region).support_positions()
    if len(pos) < 2:
        raise DeloneError("need at least two points in the region")
    tree = cKDTree(pos)
    dist, _ = tree.query(pos, k=2)
    r = float(dist[:, 1].min()) / 2
    if x.d == 1:
        p = np.sort(pos[:, 0])
        return r, float(np.diff(p).max()) / 2
    pitch = r / 4
    margin = 0.0
    R = 0.0
    for _ in range(2):
        inner = region.shrunk(margin)
        axes = [np.arange(lo, hi + pitch / 2, pitch) for lo, hi in zip(inner.lo, inner.hi)]
        while np.prod([len(a) for a in axes]) > 2_000_000:
            pitch *= 1.5
            axes = [np.arange(lo, hi + pitch / 2, pitch) for lo, hi in zip(inner.lo, inner.hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, x.d)
        dgrid, _ = tree.query(grid)
        R = float(dgrid.max())
        margin = R
    return r, R


def _pairs_within(pos: np.ndarray, radius: float) -> np.ndarray:
    return kernels.close_pairs(pos, radius + TAU)


def _difference_census(coords: np.ndarray, pos: np.ndarray, T: float) -> set[tuple[int, ...]]:
    pairs = _pairs_within(pos, T)
    out = {tuple([0] * coords.shape[1])} if len(coords) else set()
    if len(pairs):
        diff = coords[pairs[:, 1]] - coords[pairs[:, 0]]
        out.update(map(tuple, diff.tolist()))
        out.update(map(tuple, (-diff).tolist()))
    return out


def _cluster_census(x: MSet, box: Box, T: float) -> set:
    tags, coords = x.tagged()
    pos = x.frame.embed(coords)
    inside = box.contains(pos)
    tree = cKDTree(pos)
    shapes = set()
    for k in np.flatnonzero(inside):
        nbr = tree.query_ball_point(pos[k], T + TAU)
        shape = tuple(sorted((int(tags[j]), *map(int, coords[j] - coords[k])) for j in nbr))
        shapes.add(shape)
    return shapes


@dataclass
class FiniteTypeReport:
    verdict: str
    census: int
    censuses: list[int]
    cluster_census: int
    differences: list[tuple[int, ...]] = field(repr=False)

    @property
    def consistent(self) -> bool:
        return self.verdict == "finite-type-consistent"


def finite_type_probe(x: MSet, T: float, window: Box) -> FiniteTypeReport:
    """Census of ``(X - X) ∩ B(0, T)`` on nested windows ``w/4, w/2, w``.

    Consistent when the two doublings add no new difference vector.
    """
    if window.widths.min() < 10 * T:
        raise DeloneError(f"window width {window.widths.min():g} is below 10T = {10 * T:g}")
    supp = x.support()
    pos = x.frame.embed(supp)
    censuses = []
    last: set = set()
    for box in window.nested():
        mask = box.contains(pos)
        last = _difference_census(supp[mask], pos[mask], T)
        censuses.append(len(last))
    stable = censuses[0] == censuses[1] == censuses[2]
    clusters = len(_cluster_census(x, window.shrunk(T), T))
    return FiniteTypeReport(
        "finite-type-consistent" if stable else "inconsistent",
        censuses[-1],
        censuses,
        clusters,
        sorted(last),
    )


@dataclass
class MeyerReport:
    verdict: str
    F: list[tuple[int, ...]]
    sizes: list[int]
    min_gap: float
    delta0: float

    @property
    def consistent(self) -> bool:
        return self.verdict == "Meyer-consistent"


def meyer_probe(x: MSet, window: Box, delta0: float | None = None) -> MeyerReport:
    """Finite ``F`` with ``(X - X) ∩ window ⊆ X + F``, tracked on nested windows.

    Differences are taken between points of each window and kept when they
    fall in the same window translated to the origin.

    Each difference ``z`` is written ``z = p + f`` with ``p`` the nearest stored
    point (ties broken lexicographically on coordinates).
    """
    supp = x.support()
    pos = x.frame.embed(supp)
    if len(supp) < 2:
        raise DeloneError("need at least two points")
    if delta0 is None:
        r = x.r if x.r is not None else estimate_parameters(x, window)[0]
        delta0 = r / 2
    tree = cKDTree(pos)
    sizes = []
    fset: set = set()
    min_gap = math.inf
    for box in window.nested():
        inner = box.contains(pos)
        c_in = supp[inner]
        diffs = np.unique((c_in[:, None, :] - c_in[None, :, :]).reshape(-1, x.s), axis=0)
        dpos = x.frame.embed(diffs)
        # differences are compared against the window recentred at 0
        keep = np.all(np.abs(dpos) <= box.widths / 2 + TAU, axis=1)
        diffs, dpos = diffs[keep], dpos[keep]
        dist, _ = tree.query(dpos, k=min(4, len(pos)))
        dist = np.atleast_2d(dist)
        _, idx = tree.query(dpos, k=min(4, len(pos)))
        idx = np.atleast_2d(idx)
        fset = set()
        for row in range(len(diffs)):
            best = dist[row, 0]
            cands = [supp[j] for j, dj in zip(idx[row], dist[row]) if dj <= best + TAU]
            p = min(cands, key=lambda c: tuple(c.tolist()))
            fset.add(tuple((diffs[row] - p).tolist()))
        sizes.append(len(fset))
        if len(dpos) > 1:
            dd, _ = cKDTree(dpos).query(dpos, k=2)
            min_gap = min(min_gap, float(dd[:, 1].min()))
    stable = sizes[0] == sizes[1] == sizes[2]
    ok = stable and min_gap >= delta0 - TAU
    return MeyerReport("Meyer-consistent" if ok else "inconsistent", sorted(fset), sizes, min_gap, delta0)


# -- chains --------------------------------------------------------------------------------


def chain_bound(r: float, R: float, dist: float) -> float:
    return (1 / (2 * R) + 1 / r) * dist + 1


def chain(x: MSet, a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Points of ``X`` leading from ``a`` to ``b`` with steps at most ``4R``.

    The segment is cut into ``ceil(|a-b| / 2R)`` pieces of length at most ``2R``
    and every interior waypoint is snapped to its nearest ``X``-point.
    """
    if x.r is None or x.R is None:
        raise DeloneError("chain needs declared (r, R)")
    pos = x.support_positions()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tree = cKDTree(pos)
    for p in (a, b):
        if tree.query(p)[0] > TAU:
            raise DeloneError(f"endpoint {p.tolist()} is not a point of X")
    dist = float(np.linalg.norm(b - a))
    if dist <= TAU:
        return a[None, :].copy()
    pieces = math.ceil(dist / (2 * x.R) - 1e-12)
    out = [a]
    for k in range(1, pieces):
        w = a + (b - a) * (k / pieces)
        dw, j = tree.query(w)
        if dw > x.R + TAU:
            raise DeloneError(f"no X-point within R={x.R:g} of waypoint {w.tolist()}")
        if np.linalg.norm(pos[j] - out[-1]) > TAU:
            out.append(pos[j])
    if np.linalg.norm(b - out[-1]) > TAU:
        out.append(b)
    return np.array(out)


# -- address map ----------------------------------------------------------------------------


@dataclass
class AddressReport:
    lipschitz: float
    L: np.ndarray
    residual_sup: float
    window_sups: list[float]
    bounded: bool
    method: str


def _doubling_linear_part(pos: np.ndarray, coords: np.ndarray, d: int) -> np.ndarray:
    """``L(y) = lim phi(x_k) / 2^k`` with ``x_k`` the point nearest ``2^k y``, on unit vectors."""
    tree = cKDTree(pos)
    reach = float(np.abs(pos).max())
    k = max(1, int(math.floor(math.log2(reach))) - 1)
    cols = []
    for axis in range(d):
        y = np.zeros(d)
        y[axis] = 1.0
        _, j = tree.query(y * 2**k)
        cols.append(coords[j] / 2**k)
    return np.array(cols, dtype=float).T


def address_audit(x: MSet, window: Box | None = None, method: str = "lstsq", growth: float = 1.25, pair_samples: int = 20000) -> AddressReport:
    """Lipschitz constant, linear part and residual of ``phi(V n) = n``.

    The residual ``max |phi(x) - L x|`` is reported on the nested windows; it is
    called bounded when neither doubling increases it by more than ``growth``.
    """
    supp = x.support()
    if len(supp) < x.s + 1:
        raise DeloneError("address audit needs at least s + 1 points")
    pos = x.frame.embed(supp)
    if window is None:
        window = Box.around(pos)
    if method == "lstsq":
        sol, *_ = np.linalg.lstsq(pos, supp.astype(float), rcond=None)
        L = sol.T
    elif method == "doubling":
        L = _doubling_linear_part(pos, supp, x.d)
    else:
        raise ValueError(f"unknown method {method!r}")
    resid = np.linalg.norm(supp - pos @ L.T, axis=1)
    sups = []
    for box in window.nested():
        mask = box.contains(pos)
        sups.append(float(resid[mask].max()) if mask.any() else 0.0)
    bounded = all(sups[k + 1] <= growth * sups[k] + 1e-9 for k in range(2))
    rng = np.random.default_rng(0)
    n = len(supp)
    i = rng.integers(0, n, size=pair_samples)
    j = rng.integers(0, n, size=pair_samples)
    ok = i != j
    num = np.linalg.norm((supp[i] - supp[j])[ok].astype(float), axis=1)
    den = np.linalg.norm(pos[i] - pos[j], axis=1)[ok]
    lip = float((num / den).max()) if ok.any() else 0.0
    return AddressReport(lip, L, float(resid[window.contains(pos)].max()), sups, bounded, method)


# -- inflation audit ------------------------------------------------------------------------

ALLOWED = {
    "finite type": {"Perron", "Lind", "Pisot", "Salem"},
    "Meyer": {"Pisot", "Salem"},
}


@dataclass
class InflationReport:
    number_class: str
    inclusion_checked: int
    finite_type: FiniteTypeReport
    meyer: MeyerReport
    rows: list[tuple[str, str, str]]
    contradiction: bool


def inflation_audit(x: MSet, eta: AlgebraicInteger, window: Box, T: float | None = None) -> InflationReport:
    """Cross-tabulate empirical probes against the class of the inflation factor."""
    el = _field_element_of(x.frame.field, eta)
    zero = x.frame.field.zero()
    q = [[el if i == j else zero for j in range(x.d)] for i in range(x.d)]
    m = x.frame.expansion_matrix(q)
    supp = x.support()
    image = supp @ m.T
    ipos = x.frame.embed(image)
    sel = window.contains(ipos)
    single = MSet(x.frame, [supp])
    missing = ~single.contains(0, image[sel])
    if missing.any():
        bad = image[sel][missing][0]
        raise DeloneError(f"inflation inclusion fails: eta * {bad.tolist()} not in X")
    cls = classify(eta).name
    if T is None:
        T = float(window.widths.min()) / 10
    ft = finite_type_probe(x, T, window)
    my = meyer_probe(x, window)
    rows = [("finitely generated", "consistent", "algebraic integer")]
    contradiction = False
    for name, report in (("finite type", ft), ("Meyer", my)):
        if report.consistent:
            allowed = cls in ALLOWED[name]
            rows.append((name, "consistent" if allowed else "CONTRADICTION", "/".join(sorted(ALLOWED[name]))))
            contradiction |= not allowed
        else:
            rows.append((name, "probe negative", "no constraint"))
    return InflationReport(cls, int(sel.sum()), ft, my, rows, contradiction)


def _field_element_of(f: NumberField, eta: AlgebraicInteger) -> FieldElement:
    if eta.degree == 1:
        return f(-eta.poly.coeffs[0])
    if f.generator == eta:
        return f.gen()
    raise DeloneError("inflation factor must be the generator of the frame's field")


# -- file formats ---------------------------------------------------------------------------


def _fmt_elem(e: FieldElement) -> str:
    return "(" + ",".join(str(c) for c in e.coords) + ")"


def write_points(x: MSet, path=None) -> str:
    """Point-set text: header with ``d s m``, field and basis, then ``color n_1 ... n_s`` lines."""
    f = x.frame.field
    lines = [f"pointset {x.d} {x.s} {x.m}", f"field {f.poly} root {f.generator.selector}"]
    for row in x.frame.basis:
        lines.append("basis " + " ".join(_fmt_elem(e) for e in row))
    for i, c in enumerate(x.colors):
        for row in c.tolist():
            lines.append(f"{i} " + " ".join(str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _parse_elem(f: NumberField, tok: str) -> FieldElement:
    tok = tok.strip()
    if tok.startswith("(") and tok.endswith(")"):
        return f([Fraction(t) for t in tok[1:-1].split(",")])
    return f(Fraction(tok))


def read_points(text: str) -> MSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    head = lines[0].split()
    if head[0] != "pointset" or len(head) != 4:
        raise DeloneError("line 1: expected 'pointset d s m'")
    d, s, m = map(int, head[1:])
    fl = lines[1].split()
    if fl[0] != "field" or fl[-2] != "root":
        raise DeloneError("line 2: expected 'field <poly> root <k>'")
    from .algebra import AlgebraicInteger as _AI

    f = NumberField(_AI(" ".join(fl[1:-2]), int(fl[-1])))
    basis = []
    for k in range(d):
        toks = lines[2 + k].split()
        if toks[0] != "basis" or len(toks) != s + 1:
            raise DeloneError(f"line {3 + k}: expected basis row with {s} entries")
        basis.append([_parse_elem(f, t) for t in toks[1:]])
    frame = ModuleFrame(f, basis)
    colors: list[list[list[int]]] = [[] for _ in range(m)]
    for ln in lines[2 + d :]:
        vals = [int(t) for t in ln.split()]
        if len(vals) != s + 1 or not 0 <= vals[0] < m:
            raise DeloneError(f"bad point record {ln!r}")
        colors[vals[0]].append(vals[1:])
    return MSet(frame, [np.array(c, dtype=np.int64).reshape(-1, s) for c in colors])


def write_csv(x: MSet, path=None) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["color"] + [f"n{k}" for k in range(x.s)] + [f"x{k}" for k in range(x.d)])
    for i, c in enumerate(x.colors):
        pos = x.positions(i)
        for row, p in zip(c.tolist(), pos.tolist()):
            w.writerow([i, *row, *(f"{v:.12g}" for v in p)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def from_positions_1d(frame: ModuleFrame, values: Iterable[FieldElement]) -> MSet:
    return MSet(frame, [np.array([frame.coords_of([v]) for v in values], dtype=np.int64).reshape(-1, frame.s)])
