"""Cut-and-project schemes, model sets and lifts of Meyer sets."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.spatial import cKDTree

from .algebra import AlgebraicInteger, FieldElement, NumberField, classify, companion_matrix, rank_exact
from .algebra.spectral import rationalize
from .delone import TAU, Box, DeloneError, ModuleFrame, MSet, address_audit

MAX_CANDIDATES = 20_000_000


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    """Open window ``{y : |y_g - c_g| < r_g for every group g}`` in internal coordinates.

    Each group is a tuple of coordinate indices measured with the Euclidean norm,
    so singleton groups give a box and one group of all indices gives a ball.
    """

    center: tuple[float, ...]
    groups: tuple[tuple[int, ...], ...]
    radii: tuple[float, ...]
    boundary: str = "open"  # "open", "closed" or "half-open" (lower faces of a box kept)

    def __post_init__(self):
        if self.boundary not in ("open", "closed", "half-open"):
            raise SchemeError(f"unknown boundary convention {self.boundary!r}")
        if self.boundary == "half-open" and any(len(g) != 1 for g in self.groups):
            raise SchemeError("half-open windows must be boxes")
        m = len(self.center)
        seen = sorted(i for g in self.groups for i in g)
        if seen != list(range(m)):
            raise SchemeError("window groups must partition the internal coordinates")
        if len(self.radii) != len(self.groups) or any(not r > 0 for r in self.radii):
            raise SchemeError("every group needs a positive radius")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float], boundary: str = "open") -> "Window":
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        return cls(tuple((lo + hi) / 2), tuple((i,) for i in range(len(lo))), tuple((hi - lo) / 2), boundary)

    @classmethod
    def ball(cls, center: Sequence[float], radius: float) -> "Window":
        c = tuple(float(v) for v in center)
        return cls(c, (tuple(range(len(c))),), (float(radius),))

    @classmethod
    def trivial(cls) -> "Window":
        return cls((), (), ())

    @property
    def m(self) -> int:
        return len(self.center)

    def half_widths(self) -> np.ndarray:
        h = np.zeros(self.m)
        for g, r in zip(self.groups, self.radii):
            h[list(g)] = r
        return h

    def diameter(self) -> float:
        return float(2 * np.linalg.norm(self.half_widths())) if self.m else 0.0

    def margin(self, y: np.ndarray) -> np.ndarray:
        """``min_g (r_g - |y_g - c_g|)``: positive inside, negative outside."""
        y = np.atleast_2d(y)
        if not self.m:
            return np.full(len(y), np.inf)
        out = np.full(len(y), np.inf)
        c = np.asarray(self.center)
        for g, r in zip(self.groups, self.radii):
            dist = np.linalg.norm(y[:, list(g)] - c[list(g)], axis=1)
            out = np.minimum(out, r - dist)
        return out

    def admit(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Masks of admitted points and of excluded points within ``TAU`` of the boundary."""
        marg = self.margin(y)
        near = np.abs(marg) <= TAU
        keep = marg > TAU
        if self.boundary == "closed":
            keep |= near
        elif self.boundary == "half-open":
            y = np.atleast_2d(y)
            c, h = np.asarray(self.center), self.half_widths()
            lower = np.all(y < c + h - TAU, axis=1)
            keep |= near & lower
        return keep, near & ~keep

    def scaled(self, factor: float) -> "Window":
        return Window(self.center, self.groups, tuple(r * factor for r in self.radii), self.boundary)

    def difference(self) -> "Window":
        """``W - W``, open (exact for products of balls)."""
        return Window(tuple(0.0 for _ in self.center), self.groups, tuple(2 * r for r in self.radii))

    def contains_window(self, other: "Window") -> bool:
        if self.groups != other.groups:
            return False
        c1, c2 = np.asarray(self.center), np.asarray(other.center)
        return all(
            np.linalg.norm(c1[list(g)] - c2[list(g)]) + r2 <= r1 + 1e-15
            for g, r1, r2 in zip(self.groups, self.radii, other.radii)
        )


class CutProjectScheme:
    """Lattice ``Z^n`` with the images of its generators in physical and internal space.

    ``physical`` is ``d x n`` and exact (its columns are ``pi(e_k)``); ``internal``
    is ``m x n`` floats (``pi_int(e_k)``).  The stacked ``n x n`` matrix must be
    invertible, which is the statement that the two spaces are complementary.
    """

    def __init__(self, field_: NumberField, physical: Sequence[Sequence], internal, window: Window, name: str = ""):
        self.field = field_
        self.physical = tuple(tuple(field_(v) if not isinstance(v, FieldElement) else v for v in row) for row in physical)
        self.d = len(self.physical)
        self.n = len(self.physical[0])
        self.internal = np.asarray(internal, dtype=float).reshape(-1, self.n)
        self.m = self.internal.shape[0]
        if self.d + self.m != self.n:
            raise SchemeError(f"dimensions d={self.d} and m={self.m} do not add up to n={self.n}")
        if window.m != self.m:
            raise SchemeError("window dimension differs from the internal dimension")
        self.window = window
        self.name = name
        self.pf = np.array([[float(v) for v in row] for row in self.physical])
        split = np.vstack([self.pf, self.internal])
        if abs(np.linalg.det(split)) < 1e-12 * max(1.0, np.abs(split).max()) ** self.n:
            raise SchemeError("physical and internal spaces are not complementary")
        self._inv = _inverse_bound_matrix(split)
        self.nondegenerate = rank_exact(rationalize(self.physical)) == self.n
        self.frame = ModuleFrame(field_, self.physical) if self.nondegenerate else None

    def lift_positions(self, lifts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lifts = np.asarray(lifts, dtype=np.int64).reshape(-1, self.n).astype(float)
        return lifts @ self.pf.T, lifts @ self.internal.T

    def with_window(self, window: Window) -> "CutProjectScheme":
        return CutProjectScheme(self.field, self.physical, self.internal, window, self.name)

    def difference_scheme(self) -> "CutProjectScheme":
        return self.with_window(self.window.difference())

    def integer_bounds(self, region: Box) -> tuple[np.ndarray, np.ndarray]:
        """Box of integer vectors containing every lattice point admissible over ``region``."""
        if region.dim != self.d:
            raise SchemeError("region dimension differs from the physical dimension")
        lo_r, hi_r = np.asarray(region.lo), np.asarray(region.hi)
        if not np.all(np.isfinite(lo_r)) or not np.all(np.isfinite(hi_r)):
            raise SchemeError("region must be bounded")
        c = np.concatenate([(lo_r + hi_r) / 2, np.asarray(self.window.center)])
        h = np.concatenate([(hi_r - lo_r) / 2 + TAU, self.window.half_widths()])
        mid = self._inv @ c
        spread = np.abs(self._inv) @ h
        lo = np.floor(mid - spread * (1 + 1e-9) - 1e-9).astype(np.int64)
        hi = np.ceil(mid + spread * (1 + 1e-9) + 1e-9).astype(np.int64)
        return lo, hi

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "field": str(self.field.poly),
            "root": self.field.generator.selector,
            "physical": [[[str(c) for c in v.coords] for v in row] for row in self.physical],
            "internal": self.internal.tolist(),
            "window": {"center": list(self.window.center), "groups": [list(g) for g in self.window.groups], "radii": list(self.window.radii), "boundary": self.window.boundary},
        }

    def __repr__(self):
        return f"CutProjectScheme({self.name or 'unnamed'}, n={self.n}, d={self.d}, m={self.m})"


def _inverse_bound_matrix(split: np.ndarray) -> np.ndarray:
    with mpmath.workdps(50):
        inv = mpmath.inverse(mpmath.matrix(split.tolist()))
        return np.array([[float(inv[i, j]) for j in range(inv.cols)] for i in range(inv.rows)])


@dataclass
class ModelSetResult:
    lifts: np.ndarray
    positions: np.ndarray
    internal: np.ndarray
    points: MSet | None
    nondegenerate: bool
    dense_evidence: bool
    boundary_hits: np.ndarray = field(repr=False)
    candidates: int = 0

    @property
    def warnings(self) -> list[str]:
        out = []
        if len(self.boundary_hits):
            out.append(f"{len(self.boundary_hits)} lattice point(s) within {TAU:g} of the window boundary were excluded")
        if not self.nondegenerate:
            out.append("projection is not injective on the lattice")
        return out

    def __len__(self):
        return len(self.lifts)


def _dense_evidence(window: Window, images: np.ndarray) -> bool:
    if window.m == 0:
        return True
    if len(images) == 0:
        return False
    eps = window.diameter() / 10
    h = window.half_widths()
    c = np.asarray(window.center)
    axes = [np.arange(c[i] - h[i] + eps / 2, c[i] + h[i], eps) for i in range(window.m)]
    grid = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, window.m)
    grid = grid[window.margin(grid) > 0]
    if not len(grid):
        return True
    dist, _ = cKDTree(images).query(grid)
    return bool(dist.max() <= eps)


def generate_model_set(scheme: CutProjectScheme, region: Box) -> ModelSetResult:
    """``pi({w in Z^n : pi(w) in region, pi_int(w) in W})`` by exhaustive integer search."""
    lo, hi = scheme.integer_bounds(region)
    sizes = hi - lo + 1
    total = int(np.prod(sizes.astype(object)))
    if total > MAX_CANDIDATES:
        raise SchemeError(f"{total} candidate lattice vectors exceed the search cap {MAX_CANDIDATES}")
    keep, hits = [], []
    # chunk over the first coordinate
    rest = np.array(list(itertools.product(*[range(int(a), int(b) + 1) for a, b in zip(lo[1:], hi[1:])])), dtype=np.int64).reshape(-1, scheme.n - 1)
    pos_rest = rest.astype(float) @ scheme.pf[:, 1:].T
    int_rest = rest.astype(float) @ scheme.internal[:, 1:].T
    for w0 in range(int(lo[0]), int(hi[0]) + 1):
        pos = pos_rest + w0 * scheme.pf[:, 0]
        inside = region.contains(pos, TAU)
        if not inside.any():
            continue
        y = int_rest[inside] + w0 * scheme.internal[:, 0]
        ok, hit = scheme.window.admit(y)
        cand = np.hstack([np.full((int(inside.sum()), 1), w0, dtype=np.int64), rest[inside]])
        keep.append(cand[ok])
        hits.append(cand[hit])
    lifts = np.concatenate(keep) if keep else np.zeros((0, scheme.n), dtype=np.int64)
    bhits = np.concatenate(hits) if hits else np.zeros((0, scheme.n), dtype=np.int64)
    pos, y = scheme.lift_positions(lifts)
    order = np.lexsort(tuple(lifts.T[::-1]) + tuple(pos.T[::-1]))
    lifts, pos, y = lifts[order], pos[order], y[order]
    points = MSet(scheme.frame, [lifts]) if scheme.nondegenerate else None
    return ModelSetResult(lifts, pos, y, points, scheme.nondegenerate, _dense_evidence(scheme.window, y), bhits, total)


def difference_inclusion(scheme: CutProjectScheme, result: ModelSetResult, region: Box) -> bool:
    """``X - X ⊆ X(Z^n, W - W)`` on the differences of the points of ``result``."""
    if not len(result.lifts):
        return True
    diffs = np.unique((result.lifts[:, None, :] - result.lifts[None, :, :]).reshape(-1, scheme.n), axis=0)
    w = region.widths
    dregion = Box(tuple(-w), tuple(w))
    dset = generate_model_set(scheme.difference_scheme(), dregion)
    have = {tuple(r) for r in dset.lifts.tolist()}
    return all(tuple(r) in have for r in diffs.tolist())


# -- schemes --------------------------------------------------------------------------------


def fibonacci_scheme() -> CutProjectScheme:
    """``Z^2`` with ``pi(a, b) = a + b phi`` and ``pi_int(a, b) = a + b phi'``.

    The window is the internal image ``[-1/phi, 1)`` of the unit square, closed
    on the left so that the set is the fixed point of the Fibonacci substitution.
    """
    f = NumberField.from_poly("x^2-x-1")
    phi = f.gen()
    conj = 1 - float(phi)
    return CutProjectScheme(f, [[f.one(), phi]], [[1.0, conj]], Window.box([conj], [1.0], "half-open"), "fibonacci")


def _conjugate_rows(alpha: AlgebraicInteger) -> tuple[np.ndarray, tuple[tuple[int, ...], ...]]:
    """Real-form rows ``y -> sum y_j g^j`` for the conjugates ``g != alpha``."""
    s = alpha.degree
    rows, groups = [], []
    done = set()
    for g in alpha.conjugates():
        z = complex(g.value(40))
        if g.selector in done:
            continue
        powers = [z**j for j in range(s)]
        if abs(z.imag) < 1e-12:
            groups.append((len(rows),))
            rows.append([p.real for p in powers])
        else:
            # one of each complex pair; its partner is the complex conjugate
            partner = min(alpha.conjugates(), key=lambda h: abs(complex(h) - z.conjugate()))
            done.add(partner.selector)
            groups.append((len(rows), len(rows) + 1))
            rows.append([p.real for p in powers])
            rows.append([p.imag for p in powers])
        done.add(g.selector)
    return np.array(rows, dtype=float).reshape(-1, s), tuple(groups)


def salem_scheme(poly: str, radius: float = 1.0) -> CutProjectScheme:
    """``Z^s`` with the eigencoordinates of the companion matrix.

    The physical coordinate of ``y`` is ``sum y_j b^j`` and the internal ones are
    the conjugate sums; the window asks every conjugate coordinate to have
    modulus below ``radius``.
    """
    alpha = AlgebraicInteger.largest_real(poly)
    cls = classify(alpha)
    if cls.name != "Salem":
        raise SchemeError(f"{alpha.poly} is {cls.name}, not Salem")
    f = NumberField(alpha)
    rows, groups = _conjugate_rows(alpha)
    s = alpha.degree
    b = f.gen()
    window = Window(tuple(0.0 for _ in range(len(rows))), groups, tuple(radius for _ in groups))
    return CutProjectScheme(f, [[b**k for k in range(s)]], rows, window, f"salem {alpha.poly}")


def inflation_check(scheme: CutProjectScheme, result: ModelSetResult, region: Box) -> tuple[int, int]:
    """For the power-basis schemes: ``M y`` stays admissible whenever ``b pi(y)`` lies in ``region``.

    Returns (checked, failures).
    """
    m = np.array(companion_matrix(scheme.field.poly), dtype=np.int64)
    have = {tuple(r) for r in result.lifts.tolist()}
    images = result.lifts @ m.T
    pos, y = scheme.lift_positions(images)
    checked = failures = 0
    for img, p, yy in zip(images.tolist(), pos, y):
        if not region.contains(p[None, :], -TAU)[0]:
            continue
        checked += 1
        if tuple(img) not in have or not scheme.window.admit(yy[None, :])[0][0]:
            failures += 1
    return checked, failures


def scheme_from_address(x: MSet, L: np.ndarray | None = None, window: Box | None = None, growth: float = 1.25) -> CutProjectScheme:
    """Lift a Meyer set to ``Z^s`` through its address map.

    Physical coordinates are the frame itself, so ``pi(n) = V n`` is exact.
    Internal coordinates measure ``n - L V n`` against a fixed orthonormal basis
    of ``L(R^d)^perp`` whose entries are rounded to ``1e-12``; the window is the
    bounding box of the lifted points widened by one percent.
    """
    if L is None or window is not None:
        rep = address_audit(x, window, growth=growth)
        if not rep.bounded:
            raise DeloneError("address residual is not bounded: no cut-and-project lift")
        if L is None:
            L = rep.L
    d, s = x.d, x.s
    lr = np.array([[float(Fraction(v).limit_denominator(10**12)) for v in row] for row in np.atleast_2d(L).reshape(s, d)])
    if s == d:
        return CutProjectScheme(x.frame.field, x.frame.basis, np.zeros((0, s)), Window.trivial(), "address lift")
    q, _ = np.linalg.qr(np.hstack([lr, np.eye(s)]))
    comp = q[:, d:s]
    comp = np.round(comp * 1e12) / 1e12
    internal = comp.T @ (np.eye(s) - lr @ x.frame.vf)
    y = x.support().astype(float) @ internal.T
    lo, hi = y.min(axis=0), y.max(axis=0)
    pad = 0.01 * np.maximum(hi - lo, 1e-6)
    return CutProjectScheme(x.frame.field, x.frame.basis, internal, Window.box(lo - pad, hi + pad), "address lift")
