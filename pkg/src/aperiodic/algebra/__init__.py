"""Exact and certified arithmetic: polynomials, algebraic integers, number fields, spectra."""
from .field import FieldElement, NumberField, rank_exact, solve_exact
from .numbers import (
    AlgebraicInteger,
    KSReport,
    NumberClass,
    classify,
    compare_modulus,
    ks_admissibility,
    pisot_family_check,
    power_mod1_test,
)
from .polynomial import IntPolynomial, PolynomialError, companion_matrix
from .roots import PrecisionError, RootEnclosure, isolate_roots
from .spectral import SpectralReport, characteristic_polynomial, induced_integer_matrix, pf_analysis

__all__ = [
    "AlgebraicInteger", "FieldElement", "IntPolynomial", "KSReport", "NumberClass", "NumberField",
    "PolynomialError", "PrecisionError", "RootEnclosure", "SpectralReport", "characteristic_polynomial",
    "classify", "companion_matrix", "compare_modulus", "induced_integer_matrix", "isolate_roots",
    "ks_admissibility", "pf_analysis", "pisot_family_check", "power_mod1_test", "rank_exact", "solve_exact",
]
