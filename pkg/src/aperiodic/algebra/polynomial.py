"""Monic integer polynomials."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

import sympy

_X = sympy.Symbol("x")


class PolynomialError(ValueError):
    """Raised for malformed or non-monic polynomial input."""


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first.

    Only monic polynomials of degree >= 1 are accepted; the number-theoretic
    predicates downstream all assume a monic minimal polynomial.
    """

    coeffs: tuple[int, ...]
    _irreducible: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise PolynomialError("polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise PolynomialError(f"polynomial is not monic (leading coefficient {coeffs[-1]})")

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse ``"x^2-x-1"`` style text (``^`` or ``**``, implicit products allowed)."""
        cleaned = text.strip().replace("^", "**")
        if not cleaned or not re.fullmatch(r"[0-9x+\-*/() \t]+", cleaned):
            raise PolynomialError(f"cannot parse polynomial {text!r}")
        try:
            expr = sympy.parse_expr(
                cleaned,
                local_dict={"x": _X},
                transformations=sympy.parsing.sympy_parser.standard_transformations
                + (sympy.parsing.sympy_parser.implicit_multiplication_application,),
            )
            poly = sympy.Poly(expr, _X)
        except (sympy.SympifyError, sympy.PolynomialError, SyntaxError, TypeError) as exc:
            raise PolynomialError(f"cannot parse polynomial {text!r}") from exc
        if not all(c.is_integer for c in poly.all_coeffs()):
            raise PolynomialError(f"non-integer coefficients in {text!r}")
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def monic(self) -> bool:
        return True

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coeffs)), _X, domain="ZZ")

    def high_first(self) -> list[int]:
        return list(reversed(self.coeffs))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def is_irreducible(self) -> bool:
        if "v" not in self._irreducible:
            self._irreducible["v"] = bool(self.to_sympy().is_irreducible)
        return self._irreducible["v"]

    @cached_property
    def is_reciprocal(self) -> bool:
        return self.coeffs == tuple(reversed(self.coeffs))

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if mag == 1 else f"{mag}{mono}"
            terms.append((sign, body))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f"{sign}{body}"
        return out


def companion_matrix(p: IntPolynomial) -> list[list[int]]:
    """Companion matrix with ones on the subdiagonal and ``-c_j`` in the last column.

    With the power basis ``1, b, ..., b^(s-1)`` as columns of ``V``, multiplication
    by a root ``b`` satisfies ``b V = V M``.
    """
    s = p.degree
    m = [[0] * s for _ in range(s)]
    for i in range(1, s):
        m[i][i - 1] = 1
    for i in range(s):
        m[i][s - 1] = -p.coeffs[i]
    return m
