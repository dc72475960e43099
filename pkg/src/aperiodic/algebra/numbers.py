"""Algebraic integers and the Pisot / Salem / Perron / Lind classification."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import sympy

from .polynomial import IntPolynomial, PolynomialError, companion_matrix
from .roots import PrecisionError, RootEnclosure, isolate_roots, refine_root

ENCLOSURE_RADIUS = 1e-12
CLASS_ORDER = ("Pisot", "Salem", "Perron", "Lind", "None")


class AlgebraicInteger:
    """A root of an irreducible monic integer polynomial.

    ``selector`` indexes the roots sorted by (real part, imaginary part); the
    enclosure of the selected root has radius at most ``1e-12``.
    """

    __slots__ = ("poly", "selector", "_roots")

    def __init__(self, poly: IntPolynomial | str, selector: int):
        if isinstance(poly, str):
            poly = IntPolynomial.parse(poly)
        if not poly.is_irreducible:
            raise PolynomialError(f"{poly} is reducible over Z; a minimal polynomial is required")
        roots = isolate_roots(poly, ENCLOSURE_RADIUS)
        if not 0 <= selector < len(roots):
            raise IndexError(f"root selector {selector} out of range for degree {poly.degree}")
        self.poly = poly
        self.selector = selector
        self._roots = roots

    @classmethod
    def largest_real(cls, poly: IntPolynomial | str) -> "AlgebraicInteger":
        if isinstance(poly, str):
            poly = IntPolynomial.parse(poly)
        roots = isolate_roots(poly, ENCLOSURE_RADIUS)
        real = [i for i, r in enumerate(roots) if r.is_real]
        if not real:
            raise ValueError(f"{poly} has no real root")
        return cls(poly, max(real, key=lambda i: roots[i].center.real))

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def enclosure(self) -> RootEnclosure:
        return self._roots[self.selector]

    @property
    def is_real(self) -> bool:
        return self.enclosure.is_real

    def __float__(self) -> float:
        if not self.is_real:
            raise TypeError("non-real algebraic integer")
        return self.enclosure.center.real

    def __complex__(self) -> complex:
        return self.enclosure.center

    def value(self, dps: int = 50):
        """Root value refined to ``dps`` digits (mpf when real, mpc otherwise)."""
        with mpmath.workdps(dps):
            z = refine_root(self.poly, self.enclosure.center, dps)
            if self.is_real:
                return +mpmath.re(z)
            return +z

    def conjugates(self) -> list["AlgebraicInteger"]:
        return [AlgebraicInteger(self.poly, k) for k in range(self.degree) if k != self.selector]

    def companion(self) -> list[list[int]]:
        return companion_matrix(self.poly)

    @property
    def key(self) -> tuple:
        return (self.poly.coeffs, self.selector)

    def __eq__(self, other):
        return isinstance(other, AlgebraicInteger) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"AlgebraicInteger({str(self.poly)!r}, {self.selector}) ~ {self.enclosure.center:.12g}"


@dataclass(frozen=True)
class NumberClass:
    name: str
    conjugate_moduli: tuple[float, ...]
    degree: int

    def __str__(self):
        return self.name


# -- exact modulus comparison ---------------------------------------------------------------


@lru_cache(maxsize=128)
def _pair_products(coeffs: tuple[int, ...]) -> IntPolynomial:
    """Monic polynomial whose roots are all products ``g_i * g_j`` of roots of ``p``."""
    x, z = sympy.symbols("x z")
    s = len(coeffs) - 1
    p = sum(c * x**k for k, c in enumerate(coeffs))
    q = sum(c * z**k * x ** (s - k) for k, c in enumerate(coeffs))
    res = sympy.Poly(sympy.resultant(p, q, x), z)
    cs = [int(c) for c in res.all_coeffs()]
    lead = cs[0]
    if abs(lead) != 1:
        raise ArithmeticError("pair-product resultant is not monic")
    return IntPolynomial(tuple(reversed([c * lead for c in cs])))


def _locate(poly: IntPolynomial, center: complex, precision: float) -> RootEnclosure:
    for enc in isolate_roots(poly, precision):
        if abs(enc.center - center) <= max(enc.radius, 1e-300) + 2 * ENCLOSURE_RADIUS:
            return enc
    raise ArithmeticError("lost track of root while refining")


def _modsq_bounds(enc: RootEnclosure):
    z = enc.exact_center
    r = mpmath.mpf(enc.radius) * (1 + mpmath.mpf(2) ** -30)
    m = abs(z)
    lo = max(mpmath.mpf(0), m - r)
    return lo * lo, (m + r) * (m + r)


def compare_modulus(a: AlgebraicInteger, b: AlgebraicInteger | None = None) -> int:
    """Sign of ``|a| - |b|`` (``b=None`` compares with 1), decided exactly.

    Precision is escalated until the enclosures of ``|a|^2`` and ``|b|^2`` separate.
    Ties cannot be separated numerically; they are settled with the pair-product
    resultant ``R``, whose roots include both ``a*conj(a)`` and ``b*conj(b)``: when
    the enclosures of both squared moduli meet only one root of ``R`` they are equal.
    """
    if b is not None and b.poly != a.poly:
        raise ValueError("compare_modulus expects conjugate algebraic integers")
    if b is not None and b.selector == a.selector:
        return 0
    if a.degree == 1:
        va = abs(a.poly.coeffs[0])
        vb = 1 if b is None else abs(b.poly.coeffs[0])
        return (va > vb) - (va < vb)
    products = None
    for exponent in (12, 24, 48, 96, 192, 384, 768):
        prec = 10.0**-exponent if exponent <= 300 else 0.0
        if prec == 0.0:
            break
        ea = _locate(a.poly, a.enclosure.center, prec)
        with mpmath.workdps(exponent + 30):
            alo, ahi = _modsq_bounds(ea)
            if b is None:
                blo = bhi = mpmath.mpf(1)
            else:
                eb = _locate(b.poly, b.enclosure.center, prec)
                blo, bhi = _modsq_bounds(eb)
            if ahi < blo:
                return -1
            if alo > bhi:
                return 1
            if exponent < 24:
                continue
            if products is None:
                products = _pair_products(a.poly.coeffs)
            if b is None and products(1) != 0:
                continue  # no product equals 1 exactly; refinement will separate
            # both squared moduli are roots of R; if the hull of their enclosures
            # meets exactly one root of R they coincide
            lo, hi = min(alo, blo), max(ahi, bhi)
            near = 0
            for enc in isolate_roots(products, prec):
                c = enc.exact_center
                rad = mpmath.mpf(enc.radius)
                if abs(c.imag) <= rad and lo - rad <= c.real <= hi + rad:
                    near += 1
            if near == 1:
                return 0
    raise ArithmeticError("modulus comparison undecided (internal error)")


# -- classification -------------------------------------------------------------------------


def _require_real_gt_one(a: AlgebraicInteger):
    if not a.is_real:
        raise ValueError(f"{a!r} is not real; classes are defined for real numbers > 1")
    if a.degree == 1:
        if -a.poly.coeffs[0] <= 1:
            raise ValueError("algebraic integer must exceed 1")
        return
    enc = a.enclosure
    if enc.center.real - enc.radius <= 1:
        raise ValueError(f"{a!r} does not exceed 1")


def classify(a: AlgebraicInteger) -> NumberClass:
    """Pisot > Salem > Perron > Lind > None, from certified conjugate moduli."""
    _require_real_gt_one(a)
    conj = a.conjugates()
    moduli = tuple(abs(c.enclosure.center) for c in conj)
    vs_one = [compare_modulus(c) for c in conj]
    vs_self = [compare_modulus(c, a) for c in conj]
    perron = all(v < 0 for v in vs_self)
    if all(v < 0 for v in vs_one):
        assert perron, "Pisot number failed the Perron inequalities"
        name = "Pisot"
    elif all(v <= 0 for v in vs_one):
        assert perron
        name = "Salem"
    elif perron:
        name = "Perron"
    elif all(v <= 0 for v in vs_self):
        name = "Lind"
    else:
        name = "None"
    return NumberClass(name, moduli, a.degree)


def pisot_family_check(family: Sequence[AlgebraicInteger]):
    """Return ``(True, None)`` or ``(False, (member, conjugate))`` for the first violation."""
    if not family:
        raise ValueError("family must be nonempty")
    keys = {m.key for m in family}
    if len(keys) != len(family):
        raise ValueError("family members must be distinct")
    for lam in family:
        for g in lam.conjugates():
            if g.key in keys:
                continue
            if compare_modulus(g) >= 0:
                return False, (lam, g)
    return True, None


@dataclass
class KSReport:
    admissible: bool
    findings: list[tuple[AlgebraicInteger, AlgebraicInteger, str]]


def ks_admissibility(spectrum: Iterable[tuple[AlgebraicInteger, int]]) -> KSReport:
    """Conjugate condition on a diagonalizable expansion spectrum.

    Each eigenvalue ``lam`` of multiplicity ``k``: every conjugate ``g`` has
    ``|g| < |lam|`` or is itself in the spectrum with multiplicity ``>= k``.
    """
    spec = list(spectrum)
    mult: dict[tuple, int] = {}
    for lam, k in spec:
        if compare_modulus(lam) <= 0:
            raise ValueError(f"{lam!r} has modulus <= 1; not an expansion eigenvalue")
        mult[lam.key] = mult.get(lam.key, 0) + int(k)
    findings = []
    ok = True
    for lam, _ in spec:
        k = mult[lam.key]
        for g in lam.conjugates():
            if compare_modulus(g, lam) < 0:
                continue
            if mult.get(g.key, 0) >= k:
                findings.append((lam, g, "present"))
            else:
                findings.append((lam, g, "missing"))
                ok = False
    return KSReport(ok, findings)


def power_mod1_test(a: AlgebraicInteger, x: Sequence[int], n_max: int, tol: float = 1e-9) -> list[float]:
    """Distances ``||a^n x||`` to the nearest integer for ``n = 0..n_max``.

    ``x`` is given in the power basis ``1, a, ..., a^(s-1)``; the powers are
    propagated exactly with the companion matrix and each value is evaluated
    with enough digits to keep the absolute error below ``tol``.
    """
    _require_real_gt_one(a)
    s = a.degree
    if len(x) != s:
        raise ValueError(f"expected {s} power-basis coordinates")
    m = companion_matrix(a.poly)
    y = [int(v) for v in x]
    guard = max(15, int(-mpmath.log10(tol)) + 10)
    amag = float(a) + 1.0
    out = []
    for _ in range(n_max + 1):
        size = sum(abs(v) for v in y) * amag ** (s - 1) + 1
        dps = guard + int(mpmath.log10(size)) + 10
        if dps > 4000:
            raise PrecisionError("working precision cap reached in power_mod1_test")
        beta = a.value(dps)
        with mpmath.workdps(dps):
            val = mpmath.fsum(c * beta**k for k, c in enumerate(y))
            out.append(float(abs(val - mpmath.nint(val))))
        y = [sum(m[i][k] * y[k] for k in range(s)) for i in range(s)]
    return out
