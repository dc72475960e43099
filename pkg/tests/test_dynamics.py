import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aperiodic.delone import Box, DeloneError, ModuleFrame, MSet
from aperiodic.dynamics import (
    CAP,
    VanHoveSequence,
    almost_periods,
    big_ball_distance,
    cluster_frequency,
    interatomic_sample,
    occurrences,
    qn_eigenvalue_test,
    topological_eigenvalue_test,
)
from aperiodic.substitution import generate_patch

from conftest import lattice, load_spec

PHI = (1 + 5**0.5) / 2
REGION = Box.interval(-400, 400)
DELTAS = [0.2, 0.1, 0.05, 0.025, 0.0125]


@pytest.fixture(scope="module")
def fib(fib_phi):
    return generate_patch(fib_phi, load_spec("fibonacci").seed(), REGION).patch


def inv_sqrt5(f):
    return (2 * f.gen() - 1) * f(Fraction(1, 5))


class TestVanHove:
    @pytest.mark.parametrize("kind", ["cube", "ball"])
    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("r", [1, 5])
    def test_boundary_ratio_vanishes(self, kind, d, r):
        seq = VanHoveSequence(d, kind)
        ratios = [seq.boundary_ratio(n, r) for n in (10, 100, 1000, 10000)]
        assert all(b < a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] < 2 * d * r / 10000 * 1.01 + 1e-12

    def test_volumes(self):
        assert VanHoveSequence(2).volume(1.5) == 9.0
        assert abs(VanHoveSequence(2, "ball").volume(1.0) - np.pi) < 1e-12

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            VanHoveSequence(1, "star")


def _shifts(fib):
    # module vectors a + b phi of length below one
    return [np.array(v) for v in [(0, 0), (-1, 1), (2, -1), (-3, 2), (5, -3), (-8, 5)]]


class TestMetric:
    def test_zero_on_equal(self, fib):
        assert big_ball_distance(fib, fib) == 0.0

    def test_half_shift_of_integers(self):
        z = lattice(1, 60)
        half = MSet(ModuleFrame.rational([[Fraction(1, 2)]]), [np.arange(-119, 121, 2).reshape(-1, 1)])
        rho = big_ball_distance(z, half)
        # within one step of the geometric eps grid
        assert 0.25 <= rho <= 0.25 * 1.05 + 1e-12

    def test_small_shift(self, fib):
        # resolving eps = 0.01 needs patches reaching past 1/eps
        x = lattice(1, 200)
        frame = ModuleFrame.rational([[Fraction(1, 100)]])
        fine = MSet(frame, [np.arange(-200, 201).reshape(-1, 1) * 100 - 1])
        assert big_ball_distance(x, fine) <= 0.01 * 1.05

    def test_capped(self, fib):
        other = MSet(fib.frame, [fib.colors[1], fib.colors[0]])
        assert big_ball_distance(fib, other) <= CAP

    def test_dimension_mismatch(self, fib):
        with pytest.raises(DeloneError):
            big_ball_distance(fib, lattice(2, 3))

    def test_symmetry_and_triangle(self, fib):
        base = fib.restrict(Box.interval(-150, 150))
        sets = [base.translate(v) for v in _shifts(fib)]
        dist = {}
        for i, j in itertools.combinations_with_replacement(range(len(sets)), 2):
            a = big_ball_distance(sets[i], sets[j], reach=140)
            b = big_ball_distance(sets[j], sets[i], reach=140)
            assert a == b
            dist[i, j] = dist[j, i] = a
        rng = np.random.default_rng(2)
        for _ in range(100):
            i, j, k = rng.integers(len(sets), size=3)
            # the eps grid has ratio 1.05, so each distance may overshoot by 5%
            assert dist[i, k] <= 1.05 * (dist[i, j] + dist[j, k]) + 1e-3


class TestFrequency:
    def test_fibonacci_point(self, fib, fib_phi):
        rep = cluster_frequency(fib, fib_phi.point(0, [0, 0]), VanHoveSequence(1), [[0], [50], [-100]], [25, 50, 100, 200], region=REGION)
        assert (rep.frequencies >= 0).all()
        assert rep.counts.dtype.kind == "i"
        assert abs(rep.limit - 1 / 5**0.5) < 5e-3
        assert rep.spread[-1] <= rep.spread[0]

    def test_fraction_of_a(self, fib, fib_phi):
        seq = VanHoveSequence(1)
        fa = cluster_frequency(fib, fib_phi.point(0, [0, 0]), seq, [[0]], [300], region=REGION).limit
        fb = cluster_frequency(fib, fib_phi.point(1, [0, 0]), seq, [[0]], [300], region=REGION).limit
        assert abs(fa / (fa + fb) - 1 / PHI) < 5e-3

    def test_integers(self):
        z = lattice(1, 100)
        rep = cluster_frequency(z, lattice(1, 0), VanHoveSequence(1), [[0], [10.5]], [10, 40], region=Box.interval(-100, 100))
        # closed cubes around an integer centre catch one extra point
        assert abs(rep.limit - 1) <= 1 / 80 + 1e-12

    def test_patch_too_small(self, fib, fib_phi):
        with pytest.raises(DeloneError):
            cluster_frequency(fib, fib_phi.point(0, [0, 0]), VanHoveSequence(1), [[0]], [1000], region=REGION)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(-30, 30), st.integers(-20, 20), st.integers(0, 1), st.integers(-100, 100))
    def test_translation_invariant(self, fib, fib_phi, a, b, color, s):
        x = fib.restrict(Box.interval(-300, 300))
        cluster = MSet(fib.frame, [np.array([[0, 0], [1, 0]]), np.zeros((0, 2), dtype=np.int64)]) if color else fib_phi.point(0, [0, 0])
        v = np.array([a, b])
        shift = float(fib.frame.embed(v)[0, 0])
        seq = VanHoveSequence(1)
        region = Box.interval(-290, 290)
        moved = Box.interval(-290 + shift, 290 + shift)
        one = cluster_frequency(x, cluster, seq, [[s]], [60, 120], region=region)
        # moving patch and cluster together leaves every occurrence vector in place
        both = cluster_frequency(x.translate(v), cluster.translate(v), seq, [[s]], [60, 120], region=region)
        # moving the patch alone moves the occurrences and the sample window with it
        patch = cluster_frequency(x.translate(v), cluster, seq, [[s + shift]], [60, 120], region=moved)
        assert one.counts.tolist() == both.counts.tolist() == patch.counts.tolist()

    def test_occurrences_exact(self, fib, fib_phi):
        occ = occurrences(fib, fib_phi.point(1, [0, 0]))
        assert sorted(map(tuple, occ.tolist())) == sorted(map(tuple, fib.colors[1].tolist()))


class TestAlmostPeriods:
    def test_contains_zero(self, fib):
        ys = almost_periods(fib, 0.2, Box.interval(-15, 15), REGION)
        assert ys[0].tolist() == [0, 0]
        assert [2, 3] in ys.tolist()

    def test_integers_periods(self):
        z = lattice(1, 100)
        for delta in (0.5, 0.1, 0.05):
            ys = almost_periods(z, delta, Box.interval(-10, 10), Box.interval(-100, 100))
            assert sorted(ys[:, 0].tolist()) == list(range(-10, 11))

    def test_perturbed_only_zero(self):
        rng = np.random.default_rng(9)
        coords = np.arange(-100, 101) * 1000 + rng.integers(-200, 201, size=201)
        x = MSet(ModuleFrame.rational([[Fraction(1, 1000)]]), [np.unique(coords).reshape(-1, 1)])
        ys = almost_periods(x, 0.2, Box.interval(-20, 20), Box.interval(-99, 99))
        assert ys.tolist() == [[0]]

    def test_patch_too_small(self, fib):
        with pytest.raises(DeloneError):
            almost_periods(fib, 0.001, Box.interval(-10, 10), REGION)

    def test_symmetric_is_not_automatic(self, fib):
        ys = {tuple(v) for v in almost_periods(fib, 0.2, Box.interval(-15, 15), REGION).tolist()}
        assert (2, 3) in ys and (-2, -3) not in ys


class TestEigenvalues:
    @pytest.mark.parametrize("alpha", [1.0, 1 / 5**0.5])
    def test_topological_consistent(self, fib, alpha):
        rep = topological_eigenvalue_test(fib, alpha, DELTAS, region=REGION)
        assert rep.verdict == "eigenvalue-consistent"
        assert rep.sups[-1] < 0.1

    def test_topological_rejects_third(self, fib):
        assert topological_eigenvalue_test(fib, 1 / 3, DELTAS, region=REGION).verdict == "rejected"

    def test_zero_alpha(self, fib):
        rep = topological_eigenvalue_test(fib, 0.0, DELTAS, region=REGION)
        assert max(rep.sups) == 0.0 and rep.verdict == "eigenvalue-consistent"

    def test_deltas_must_decrease(self, fib):
        with pytest.raises(ValueError):
            topological_eigenvalue_test(fib, 1.0, [0.1, 0.2], region=REGION)

    def test_perturbed_inconclusive(self):
        rng = np.random.default_rng(9)
        coords = np.arange(-100, 101) * 1000 + rng.integers(-200, 201, size=201)
        x = MSet(ModuleFrame.rational([[Fraction(1, 1000)]]), [np.unique(coords).reshape(-1, 1)])
        rep = topological_eigenvalue_test(x, 0.5, [0.2, 0.1], window=Box.interval(-20, 20), region=Box.interval(-99, 99))
        assert rep.verdict == "inconclusive"

    def test_qn(self, fib, fib_phi):
        f = fib_phi.frame.field
        for alpha in (f(1), inv_sqrt5(f)):
            rep = qn_eigenvalue_test(fib, fib_phi.q, [alpha], N=30)
            assert rep.verdict == "necessary-condition-passed"
            assert rep.table[:, 30].max() < 1e-3
        rep = qn_eigenvalue_test(fib, fib_phi.q, [f(Fraction(1, 3))], N=30)
        assert rep.verdict == "failed" and rep.witness is not None

    def test_interatomic_sample_spans(self, fib):
        v = interatomic_sample(fib, 20)
        assert len(v) == 20 and not np.any(np.all(v == 0, axis=1))

    def test_grid_relatively_dense_and_ordered(self, fib, fib_phi):
        f = fib_phi.frame.field
        g = f.gen()
        passing = []
        for a, b in itertools.product(range(-3, 4), repeat=2):
            alpha = (f(a) + f(b) * g) * inv_sqrt5(f)
            top = topological_eigenvalue_test(fib, float(alpha), DELTAS, region=REGION)
            if top.verdict == "eigenvalue-consistent":
                passing.append(float(alpha))
                assert qn_eigenvalue_test(fib, fib_phi.q, [alpha], N=30).verdict == "necessary-condition-passed"
        passing.sort()
        assert passing[0] < -3 and passing[-1] > 3
        assert max(np.diff(passing)) < 0.5

    @pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(1, 3), Fraction(2, 7)])
    def test_rational_rejected_by_both(self, fib, fib_phi, alpha):
        f = fib_phi.frame.field
        top = topological_eigenvalue_test(fib, float(alpha), DELTAS, region=REGION)
        qn = qn_eigenvalue_test(fib, fib_phi.q, [f(alpha)], N=30)
        assert top.verdict != "eigenvalue-consistent" and qn.verdict == "failed"

    def test_csv(self, fib, fib_phi):
        text = topological_eigenvalue_test(fib, 1.0, DELTAS[:2], region=REGION).to_csv()
        assert text.splitlines()[0] == "delta,almost_periods,sup"
        text = qn_eigenvalue_test(fib, fib_phi.q, [fib_phi.frame.field(1)], N=5).to_csv()
        assert len(text.splitlines()) == 7
