from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from aperiodic.algebra.field import NumberField, rank_exact, solve_exact
from aperiodic.algebra.numbers import (
    AlgebraicInteger,
    classify,
    compare_modulus,
    ks_admissibility,
    pisot_family_check,
    power_mod1_test,
)
from aperiodic.algebra.polynomial import IntPolynomial, PolynomialError, companion_matrix
from aperiodic.algebra.roots import isolate_roots
from aperiodic.algebra.spectral import induced_integer_matrix, pf_analysis


def _random_corpus(n, seed=11):
    """Irreducible monic polynomials (degree 2..4) with a real root > 1."""
    rng = np.random.default_rng(seed)
    x = sympy.Symbol("x")
    out = []
    while len(out) < n:
        deg = int(rng.integers(2, 5))
        coeffs = [int(c) for c in rng.integers(-3, 4, size=deg)] + [1]
        if coeffs[0] == 0:
            continue
        poly = sympy.Poly(sum(c * x**k for k, c in enumerate(coeffs)), x)
        if not poly.is_irreducible:
            continue
        real = [float(mpmath.re(r)) for r in mpmath.polyroots(coeffs[::-1], maxsteps=200, extraprec=60) if abs(mpmath.im(r)) < 1e-12]
        if not real or max(real) <= 1.05:
            continue
        out.append(IntPolynomial(tuple(coeffs)))
    return out


CORPUS = _random_corpus(50)


class TestPolynomial:
    def test_parse(self):
        assert IntPolynomial.parse("x^2-x-1").coeffs == (-1, -1, 1)
        assert IntPolynomial.parse("x**3 - 2x + 1").coeffs == (1, -2, 0, 1)

    @pytest.mark.parametrize("text", ["2x^2-1", "x^2+x/2", "y^2", "", "3"])
    def test_parse_rejects(self, text):
        with pytest.raises(PolynomialError):
            IntPolynomial.parse(text)

    def test_irreducible(self):
        assert IntPolynomial.parse("x^2-x-1").is_irreducible
        assert not IntPolynomial.parse("x^2-2x").is_irreducible
        with pytest.raises(PolynomialError):
            AlgebraicInteger("x^2-1", 0)

    def test_reciprocal(self):
        assert IntPolynomial.parse("x^4-x^3-x^2-x+1").is_reciprocal
        assert not IntPolynomial.parse("x^3-x-1").is_reciprocal

    def test_companion_charpoly(self):
        p = IntPolynomial.parse("x^3-x^2-2x+1")
        ev = np.sort(np.linalg.eigvals(np.array(companion_matrix(p), dtype=float)).real)
        np.testing.assert_allclose(ev, np.sort(np.roots(p.high_first()).real), atol=1e-10)


class TestRoots:
    @pytest.mark.parametrize("poly", CORPUS[:20], ids=str)
    def test_refinement_keeps_root(self, poly):
        coarse = isolate_roots(poly, 1e-6)
        fine = isolate_roots(poly, 1e-12)
        assert len(coarse) == len(fine) == poly.degree
        for c, f in zip(coarse, fine):
            assert c.contains(f.center)
            assert sum(c.contains(g.center) for g in fine) == 1

    def test_canonical_order(self):
        roots = isolate_roots(IntPolynomial.parse("x^3-2"), 1e-12)
        keys = [(r.center.real, r.center.imag) for r in roots]
        assert keys == sorted(keys)


def _oracle_class(poly: IntPolynomial) -> str:
    """Brute-force classification from 60-digit roots and a 1e-30 tie tolerance."""
    with mpmath.workdps(60):
        roots = mpmath.polyroots(list(reversed(poly.coeffs)), maxsteps=400, extraprec=200)
        real = [r for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** -40]
        eta = max(mpmath.re(r) for r in real)
        others = [r for r in roots if abs(r - eta) > mpmath.mpf(10) ** -30]
        tol = mpmath.mpf(10) ** -30
        mods = [abs(r) for r in others]
        if all(m < 1 - tol for m in mods):
            return "Pisot"
        if all(m < 1 + tol for m in mods):
            return "Salem"
        if all(m < eta - tol for m in mods):
            return "Perron"
        if all(m < eta + tol for m in mods):
            return "Lind"
        return "None"


NAMED = [
    ("x-2", "Pisot"),
    ("x-3", "Pisot"),
    ("x^2-x-1", "Pisot"),
    ("x^2-2x-1", "Pisot"),
    ("x^2-3x+1", "Pisot"),
    ("x^2-4x+2", "Pisot"),
    ("x^3-x-1", "Pisot"),
    ("x^3-x^2-x-1", "Pisot"),
    ("x^4-x^3-x^2-x+1", "Salem"),
    ("x^4-2x^3+x^2-2x+1", "Salem"),
    ("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1", "Salem"),
    ("x^2-x-3", "Perron"),
    ("x^2-x-4", "Perron"),
    ("x^3-x^2-2x+1", "Perron"),
    ("x^3-3x-1", "Perron"),
    ("x^2-2", "Lind"),
    ("x^2-3", "Lind"),
    ("x^3-2", "Lind"),
    ("x^4-2", "Lind"),
    ("x^2+x-3", "None"),
]


class TestClassify:
    @pytest.mark.parametrize("text,expected", NAMED)
    def test_named(self, text, expected):
        a = AlgebraicInteger.largest_real(text)
        assert classify(a).name == expected
        if a.degree > 1:
            assert _oracle_class(a.poly) == expected

    @pytest.mark.parametrize("poly", CORPUS, ids=str)
    def test_matches_oracle(self, poly):
        assert classify(AlgebraicInteger.largest_real(poly)).name == _oracle_class(poly)

    @pytest.mark.parametrize("poly", CORPUS, ids=str)
    def test_salem_reciprocal(self, poly):
        if classify(AlgebraicInteger.largest_real(poly)).name == "Salem":
            assert poly.is_reciprocal

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            classify(AlgebraicInteger.largest_real("x^2-2x-1").conjugates()[0])

    def test_compare_modulus_ties(self):
        a = AlgebraicInteger.largest_real("x^2-3")
        b = [c for c in a.conjugates() if c.selector != a.selector][0]
        assert compare_modulus(a, b) == 0
        salem = AlgebraicInteger.largest_real("x^4-x^3-x^2-x+1")
        on_circle = [c for c in salem.conjugates() if not c.is_real]
        assert all(compare_modulus(c) == 0 for c in on_circle)

    def test_pisot_family(self):
        phi = AlgebraicInteger.largest_real("x^2-x-1")
        assert pisot_family_check([phi])[0]
        r2 = AlgebraicInteger.largest_real("x^2-2")
        ok, witness = pisot_family_check([r2])
        assert not ok and witness[1].selector != r2.selector
        assert pisot_family_check([r2] + r2.conjugates())[0]

    def test_ks_admissibility(self):
        r2 = AlgebraicInteger.largest_real("x^2-2")
        assert not ks_admissibility([(r2, 1)]).admissible
        assert ks_admissibility([(c, 1) for c in [r2] + r2.conjugates()]).admissible
        assert ks_admissibility([(AlgebraicInteger.largest_real("x^2-x-1"), 2)]).admissible


class TestPowerMod1:
    @pytest.mark.parametrize("text,x", [("x^2-x-1", (1, 0)), ("x^2-x-1", (2, 1)), ("x^2-2x-1", (1, 1))])
    def test_quadratic_pisot_decay(self, text, x):
        a = AlgebraicInteger.largest_real(text)
        rho = max(c for c in classify(a).conjugate_moduli if c < 1)
        d = power_mod1_test(a, x, 40)
        start = next(n for n in range(a.degree, 40) if d[n] < 0.25)
        for n in range(start, 39):
            if d[n] < 1e-8:
                break
            assert d[n + 1] <= (rho + 1e-6) * d[n] + 1e-9

    def test_lind_does_not_decay(self):
        d = power_mod1_test(AlgebraicInteger.largest_real("x^2-2"), (0, 1), 20)
        assert max(d[10:]) > 0.1


class TestSpectral:
    @pytest.mark.parametrize("s", [[[1, 1], [1, 0]], [[0, 1, 1], [1, 0, 0], [0, 1, 0]], [[2, 1], [1, 1]], [[3]]])
    def test_pf_matches_roots(self, s):
        rep = pf_analysis(s)
        rho = max(abs(r.center) for r in isolate_roots(rep.charpoly, 1e-13))
        assert abs(rep.pf_eigenvalue - rho) < 1e-9
        assert rep.primitive
        assert (rep.right_vector > 0).all() and (rep.left_vector > 0).all()
        np.testing.assert_allclose(np.asarray(s) @ rep.right_vector, rep.pf_eigenvalue * rep.right_vector, atol=1e-9)

    def test_non_primitive(self):
        rep = pf_analysis([[0, 1], [1, 0]])
        assert not rep.primitive and abs(rep.pf_eigenvalue - 1) < 1e-12

    @pytest.mark.parametrize(
        "poly,q,v,expected",
        [
            ("x^2-x-1", (0, 1), [(1, 0), (0, 1)], [[0, 1], [1, 1]]),
            ("x", (2,), [(1,)], [[2]]),
            ("x^2-2", (1, 1), [(1, 0), (0, 1)], [[1, 2], [1, 1]]),
        ],
    )
    def test_induced_matrix(self, poly, q, v, expected):
        f = NumberField.rationals() if poly == "x" else NumberField.from_poly(poly)
        m = induced_integer_matrix([[f(q)]], [[f(c) for c in v]])
        assert m.tolist() == expected
        qv = float(f(q).evaluate())
        assert np.min(np.abs(np.linalg.eigvals(m.astype(float)) - qv)) < 1e-9

    def test_induced_matrix_rejects(self):
        f = NumberField.from_poly("x^2-x-1")
        with pytest.raises(ValueError):
            induced_integer_matrix([[f(Fraction(1, 2))]], [[f(1), f((0, 1))]])


PHI = NumberField.from_poly("x^2-x-1")
CUBIC = NumberField.from_poly("x^3-x^2-2x+1")
small = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def _elem(f):
    return st.lists(small, min_size=f.degree, max_size=f.degree).map(lambda c: f(tuple(c)))


class TestField:
    @settings(max_examples=60, deadline=None)
    @given(_elem(CUBIC), _elem(CUBIC), _elem(CUBIC))
    def test_ring_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == CUBIC.zero()

    @settings(max_examples=60, deadline=None)
    @given(_elem(CUBIC))
    def test_inverse_and_embedding(self, a):
        if a.is_zero:
            return
        assert a * a.inverse() == CUBIC.one()
        assert abs(float(a.evaluate()) * float(a.inverse().evaluate()) - 1) < 1e-9

    @settings(max_examples=80, deadline=None)
    @given(_elem(PHI))
    def test_sign_floor(self, a):
        v = a.evaluate(60)
        assert a.sign() == (v > 0) - (v < 0)
        assert a.floor() == int(mpmath.floor(v))

    def test_floor_exact_ties(self):
        phi = PHI.gen()
        assert (phi * phi - phi).floor() == 1
        assert (phi * (phi - 1)).floor() == 1

    def test_solve_and_rank(self):
        a = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
        assert rank_exact(a) == 1
        assert solve_exact(a, [Fraction(1), Fraction(3)]) is None
        assert solve_exact([[Fraction(2), 0], [0, Fraction(3)]], [Fraction(1), Fraction(1)]) == [Fraction(1, 2), Fraction(1, 3)]
