"""Certified complex root enclosures for integer polynomials.

Approximate roots come from ``mpmath.polyroots``; they are certified with the
Weierstrass inclusion disks: for a monic square-free ``f`` of degree ``n`` with
distinct approximations ``z_i``, every connected component of the union of the
disks ``|z - z_i| <= n |W_i|``, ``W_i = f(z_i) / prod_{j != i}(z_i - z_j)``,
holds as many roots as disks.  Pairwise disjoint disks therefore isolate the roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import sympy

from .polynomial import IntPolynomial, PolynomialError

MAX_DPS = 4000


class PrecisionError(ArithmeticError):
    """Working precision cap reached before a certificate was obtained."""


@dataclass(frozen=True)
class RootEnclosure:
    """Closed disk ``|z - center| <= radius`` holding one root of given multiplicity."""

    center: complex
    radius: float
    multiplicity: int
    exact_center: object = None  # mpmath.mpc at the working precision

    @property
    def is_real(self) -> bool:
        # disjoint disks + conjugate symmetry: a disk meeting the real axis is its own mirror
        return abs(self.center.imag) <= self.radius

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


def _certify(coeffs_high: list[int], dps: int):
    """Return (centers, radii) as mpmath numbers, or None when the disks overlap."""
    n = len(coeffs_high) - 1
    with mpmath.workdps(dps):
        if n == 1:
            return [mpmath.mpc(-coeffs_high[1])], [mpmath.mpf(0)]
        try:
            zs = mpmath.polyroots(coeffs_high, maxsteps=400, extraprec=2 * dps)
        except mpmath.libmp.libhyper.NoConvergence:
            return None
        zs = [mpmath.mpc(z) for z in zs]
        radii = []
        slack = mpmath.mpf(10) ** (-(dps - 8))
        for i, z in enumerate(zs):
            denom = mpmath.mpf(1)
            for j, w in enumerate(zs):
                if i != j:
                    denom *= z - w
            if denom == 0:
                return None
            val = mpmath.polyval(coeffs_high, z)
            radii.append(n * abs(val / denom) * (1 + mpmath.mpf(2) ** -20) + slack * (1 + abs(z)))
        for i in range(n):
            for j in range(i + 1, n):
                if abs(zs[i] - zs[j]) <= radii[i] + radii[j]:
                    return None
        return zs, radii


@lru_cache(maxsize=512)
def _squarefree_parts(coeffs: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain="ZZ")
    _, factors = poly.sqf_list()
    out = []
    for f, mult in factors:
        c = [int(v) for v in f.all_coeffs()]
        if c[0] < 0:
            c = [-v for v in c]
        out.append((tuple(c), mult))
    return tuple(out)


def canonical_key(z: complex) -> tuple[float, float]:
    return (round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0)


@lru_cache(maxsize=2048)
def _isolate_cached(coeffs: tuple[int, ...], precision: float) -> tuple[RootEnclosure, ...]:
    out: list[RootEnclosure] = []
    for high_first, mult in _squarefree_parts(coeffs):
        dps = 40
        while True:
            cert = _certify(list(high_first), dps)
            if cert is not None:
                zs, radii = cert
                if max(radii) <= precision:
                    break
            dps *= 2
            if dps > MAX_DPS:
                raise PrecisionError(f"could not isolate roots of {high_first} within {MAX_DPS} digits")
        for z, r in zip(zs, radii):
            out.append(
                RootEnclosure(
                    center=complex(z),
                    radius=float(r) if r > 0 else 0.0,
                    multiplicity=mult,
                    exact_center=z,
                )
            )
    out.sort(key=lambda e: canonical_key(e.center))
    return tuple(out)


def isolate_roots(p: IntPolynomial, precision: float = 1e-12) -> list[RootEnclosure]:
    """Certified enclosures of all roots of ``p``, sorted by (real, imaginary) part.

    Multiple roots are split off with a square-free decomposition first, so the
    enclosures are pairwise disjoint and their multiplicities sum to the degree.
    """
    if not isinstance(p, IntPolynomial):
        raise PolynomialError("expected an IntPolynomial")
    if not precision > 0:
        raise ValueError("precision must be positive")
    return list(_isolate_cached(p.coeffs, float(precision)))


def refine_root(p: IntPolynomial, approx: complex, dps: int):
    """Root of ``p`` nearest to ``approx`` at ``dps`` decimal digits (mpmath value)."""
    if dps > MAX_DPS:
        raise PrecisionError(f"requested {dps} digits exceeds cap {MAX_DPS}")
    coeffs = p.high_first()
    with mpmath.workdps(dps + 10):
        z = mpmath.mpc(approx)
        if abs(z.imag) == 0:
            z = mpmath.mpf(z.real)
        deriv = [c * (len(coeffs) - 1 - k) for k, c in enumerate(coeffs[:-1])]
        for _ in range(200):
            fz = mpmath.polyval(coeffs, z)
            dz = mpmath.polyval(deriv, z)
            if dz == 0:
                break
            step = fz / dz
            z -= step
            if abs(step) <= mpmath.mpf(10) ** (-(dps + 5)) * (1 + abs(z)):
                break
        return +z
