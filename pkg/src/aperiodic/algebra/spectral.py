"""Perron-Frobenius analysis and integer matrices induced by expansions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .field import FieldElement, solve_exact
from .polynomial import IntPolynomial
from .roots import RootEnclosure, isolate_roots


@dataclass
class SpectralReport:
    eigenvalues: list[RootEnclosure]
    pf_eigenvalue: float
    pf_enclosure: RootEnclosure
    right_vector: np.ndarray
    left_vector: np.ndarray
    primitive: bool
    primitivity_exponent: int | None
    charpoly: IntPolynomial


def characteristic_polynomial(a) -> IntPolynomial:
    mat = sympy.Matrix([[int(v) for v in row] for row in np.asarray(a).tolist()])
    x = sympy.Symbol("x")
    cp = mat.charpoly(x)
    return IntPolynomial(tuple(int(c) for c in reversed(cp.all_coeffs())))


def primitivity_exponent(s) -> int | None:
    """Smallest ``k`` with ``S^k > 0`` entrywise, searched up to Wielandt's bound ``(m-1)^2 + 1``."""
    b = (np.asarray(s) > 0).astype(np.int64)
    m = b.shape[0]
    power = b.copy()
    for k in range(1, (m - 1) ** 2 + 2):
        if power.all():
            return k
        power = ((power @ b) > 0).astype(np.int64)
    return None


def _null_vector(a: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(a)
    v = np.abs(vt[-1])
    return v / v.sum()


def pf_analysis(s) -> SpectralReport:
    s = np.asarray(s)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("substitution matrix must be square")
    if (s < 0).any():
        raise ValueError("matrix has negative entries")
    if not s.any():
        raise ValueError("zero matrix has no Perron-Frobenius eigenvalue")
    cp = characteristic_polynomial(s)
    eig = isolate_roots(cp, 1e-13)
    rho = max(abs(e.center) for e in eig)
    candidates = [e for e in eig if e.is_real and e.center.real > 0 and abs(abs(e.center) - rho) <= 1e-9]
    pf = max(candidates, key=lambda e: e.center.real)
    lam = pf.center.real
    sf = s.astype(float)
    eye = np.eye(s.shape[0])
    right = _null_vector(sf - lam * eye)
    left = _null_vector(sf.T - lam * eye)
    k = primitivity_exponent(s)
    return SpectralReport(eig, lam, pf, right, left, k is not None, k, cp)


def rationalize(matrix: Sequence[Sequence[FieldElement]]) -> list[list[Fraction]]:
    """Stack the power-basis coordinates of each row entry: (d*k) x s rational matrix."""
    d = len(matrix)
    s = len(matrix[0])
    k = matrix[0][0].field.degree
    out = []
    for i in range(d):
        for c in range(k):
            out.append([matrix[i][j].coords[c] for j in range(s)])
    return out


def induced_integer_matrix(q: Sequence[Sequence[FieldElement]], v: Sequence[Sequence[FieldElement]]) -> np.ndarray:
    """Integer ``M`` with ``Q V = V M`` (exact), or ``ValueError`` if ``Q`` does not preserve the module."""
    d = len(v)
    s = len(v[0])
    if len(q) != d or any(len(row) != d for row in q):
        raise ValueError("Q must be d x d")
    qv = [[sum((q[i][t] * v[t][j] for t in range(d)), v[0][0].field.zero()) for j in range(s)] for i in range(d)]
    vr = rationalize(v)
    qvr = rationalize(qv)
    m = np.zeros((s, s), dtype=np.int64)
    for j in range(s):
        col = solve_exact(vr, [row[j] for row in qvr])
        if col is None:
            raise ValueError("Q V is not in the span of V: the module is not Q-invariant")
        for i, val in enumerate(col):
            if val.denominator != 1:
                raise ValueError("no integer solution of QV = VM: the module is not Q-invariant")
            m[i, j] = int(val)
    return m
