"""Exact arithmetic in Q(theta) with rational power-basis coordinates."""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Sequence

import mpmath

from .numbers import AlgebraicInteger
from .polynomial import IntPolynomial
from .roots import PrecisionError


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, float):
        raise TypeError("floats are not exact field coordinates; pass Fraction or 'p/q'")
    return Fraction(v)


class NumberField:
    """``Q(theta)`` for a selected real root ``theta`` of an irreducible monic polynomial."""

    def __init__(self, generator: AlgebraicInteger):
        if not generator.is_real:
            raise ValueError("field generator must be a real root (geometric embedding)")
        self.generator = generator
        self.poly = generator.poly
        self.degree = generator.degree

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls(AlgebraicInteger(IntPolynomial((0, 1)), 0))

    @classmethod
    def from_poly(cls, poly: str | IntPolynomial, selector: int | None = None) -> "NumberField":
        if selector is None:
            return cls(AlgebraicInteger.largest_real(poly))
        return cls(AlgebraicInteger(poly if isinstance(poly, IntPolynomial) else IntPolynomial.parse(poly), selector))

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.generator == other.generator

    def __hash__(self):
        return hash(self.generator)

    def __repr__(self):
        return f"NumberField({str(self.poly)!r}, root={self.generator.selector})"

    # element construction
    def __call__(self, coords) -> "FieldElement":
        if isinstance(coords, FieldElement):
            return coords
        if not isinstance(coords, (list, tuple)):
            coords = (coords,)
        c = [_frac(v) for v in coords]
        if len(c) > self.degree:
            raise ValueError(f"too many coordinates for a degree-{self.degree} field")
        c += [Fraction(0)] * (self.degree - len(c))
        return FieldElement(self, tuple(c))

    def zero(self) -> "FieldElement":
        return self(0)

    def one(self) -> "FieldElement":
        return self(1)

    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self(-self.poly.coeffs[0])
        return self((0, 1))

    @cached_property
    def _theta_float(self) -> float:
        return float(self.generator)

    def theta(self, dps: int):
        return self.generator.value(dps)

    def _reduce(self, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
        s = self.degree
        c = list(coeffs)
        pc = self.poly.coeffs
        for k in range(len(c) - 1, s - 1, -1):
            top = c[k]
            if top:
                for j in range(s):
                    c[k - s + j] -= top * pc[j]
            c[k] = Fraction(0)
        c = c[:s] + [Fraction(0)] * (s - len(c[:s]))
        return tuple(c)


class FieldElement:
    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: tuple[Fraction, ...]):
        self.field = field
        self.coords = coords

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements from different fields")
            return other
        return self.field(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        s = self.field.degree
        prod = [Fraction(0)] * (2 * s - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(self.field, self.field._reduce(prod))

    __rmul__ = __mul__

    def mul_matrix(self) -> list[list[Fraction]]:
        """Matrix of ``y -> self * y`` in the power basis (columns are images of basis vectors)."""
        s = self.field.degree
        cols = []
        for k in range(s):
            e = [Fraction(0)] * s
            e[k] = Fraction(1)
            cols.append((self * FieldElement(self.field, tuple(e))).coords)
        return [[cols[j][i] for j in range(s)] for i in range(s)]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        s = self.field.degree
        rhs = [Fraction(0)] * s
        rhs[0] = Fraction(1)
        sol = solve_exact(self.mul_matrix(), rhs)
        if sol is None:
            raise ArithmeticError("singular multiplication matrix")
        return FieldElement(self.field, tuple(sol))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        return isinstance(other, FieldElement) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def evaluate(self, dps: int = 30):
        theta = self.field.theta(dps)
        with mpmath.workdps(dps):
            return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * theta**k for k, c in enumerate(self.coords))

    def __float__(self) -> float:
        if self.field.degree == 1:
            return float(self.coords[0])
        return float(self.evaluate(30))

    def sign(self) -> int:
        """Exact sign: zero by coordinates, otherwise precision is raised until certain."""
        if self.is_zero():
            return 0
        dps = 30
        scale = max(abs(float(c)) for c in self.coords) + 1
        while dps <= 4000:
            v = self.evaluate(dps)
            if abs(v) > scale * mpmath.mpf(10) ** (-(dps - 10)) * (abs(float(self.field.generator)) + 2) ** self.field.degree:
                return 1 if v > 0 else -1
            dps *= 2
        raise PrecisionError("sign undecided")

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor(self) -> int:
        """``floor`` with an exact integrality test when the value is near an integer."""
        v = self.evaluate(40)
        n = int(mpmath.nint(v))
        if abs(v - n) > 1e-9:
            return int(mpmath.floor(v))
        diff = self - n
        if diff.is_zero():
            return n
        return n if diff.sign() > 0 else n - 1

    def is_integer_combination(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __repr__(self):
        body = ", ".join(str(c) for c in self.coords)
        return f"({body})"


def solve_exact(a: Sequence[Sequence], b: Sequence) -> list | None:
    """Unique solution of ``a x = b`` over an exact field (Fractions or FieldElements).

    ``a`` may be overdetermined; returns ``None`` when inconsistent or rank-deficient.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(a[i]) + [b[i]] for i in range(rows)]

    def nonzero(v):
        return not (v.is_zero() if isinstance(v, FieldElement) else v == 0)

    piv_row = 0
    pivots = []
    for c in range(cols):
        r = next((r for r in range(piv_row, rows) if nonzero(m[r][c])), None)
        if r is None:
            return None
        m[piv_row], m[r] = m[r], m[piv_row]
        inv = 1 / m[piv_row][c] if not isinstance(m[piv_row][c], FieldElement) else m[piv_row][c].inverse()
        m[piv_row] = [v * inv for v in m[piv_row]]
        for rr in range(rows):
            if rr != piv_row and nonzero(m[rr][c]):
                f = m[rr][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[piv_row])]
        pivots.append(c)
        piv_row += 1
    for r in range(piv_row, rows):
        if nonzero(m[r][cols]):
            return None
    return [m[i][cols] for i in range(cols)]


def rank_exact(a: Sequence[Sequence[Fraction]]) -> int:
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    for c in range(cols):
        r = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if r is None:
            continue
        m[rank], m[r] = m[r], m[rank]
        for rr in range(rows):
            if rr != rank and m[rr][c] != 0:
                f = m[rr][c] / m[rank][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[rank])]
        rank += 1
    return rank
