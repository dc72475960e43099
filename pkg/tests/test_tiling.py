import numpy as np
import pytest

from aperiodic.algebra.spectral import pf_analysis
from aperiodic.delone import Box, MSet
from aperiodic.substitution import generate_patch
from aperiodic.tiling import (
    TilingError,
    adapted_contraction,
    control_point_mset,
    control_points,
    mset_to_tiling,
    solve_adjoint,
    tiling_to_mset,
)

from conftest import load_spec

PHI = (1 + 5**0.5) / 2


@pytest.fixture(scope="module")
def fib_adjoint(fib_phi):
    return solve_adjoint(fib_phi)


@pytest.fixture(scope="module")
def square_adjoint(square_phi):
    return solve_adjoint(square_phi)


@pytest.fixture(scope="module")
def fib_region_patch(fib_phi):
    spec = load_spec("fibonacci")
    return generate_patch(fib_phi, spec.seed(), Box.interval(-20, 130)).patch


class TestAdjoint1D:
    def test_fibonacci_exact(self, fib_adjoint, fib_phi):
        assert fib_adjoint.exact
        f = fib_phi.frame.field
        a, b = fib_adjoint.tiles
        assert a.intervals == [(f(0), f.gen())]
        assert b.intervals == [(f(0), f(1))]

    def test_volumes_are_pf_vector(self, fib_adjoint, fib_phi):
        left = pf_analysis(fib_phi.S).left_vector
        v = fib_adjoint.volumes
        np.testing.assert_allclose(v / v.sum(), left / left.sum(), atol=1e-9)

    def test_volume_identity(self, fib_adjoint, fib_phi):
        v = fib_adjoint.volumes
        det = abs(float(fib_phi.det()))
        np.testing.assert_allclose(det * v, fib_phi.S.T @ v, atol=1e-9)

    def test_steps_decrease(self, fib_adjoint):
        s = [x for x in fib_adjoint.steps if x > 1e-12]
        assert all(b < a for a, b in zip(s[1:], s[2:]))

    def test_binary(self, binary_phi):
        res = solve_adjoint(binary_phi)
        f = binary_phi.frame.field
        assert res.tiles[0].intervals == [(f(0), f(1))]


class TestAdjoint2D:
    def test_square_volume(self, square_adjoint, square_phi):
        t = square_adjoint.tiles[0]
        assert abs(t.volume - 1.0) <= t.volume_error
        lo, hi = t.bounds()
        np.testing.assert_allclose(lo, [0, 0], atol=2 * t.eps)
        np.testing.assert_allclose(hi, [1, 1], atol=2 * t.eps)

    def test_inner_outer(self, square_adjoint):
        t = square_adjoint.tiles[0]
        assert (t.inner <= t.mask).all() and (t.mask <= t.outer).all()
        assert t.inner.sum() * t.eps**2 <= t.volume <= t.outer.sum() * t.eps**2

    def test_volume_identity(self, square_adjoint, square_phi):
        v = square_adjoint.volumes
        err = max(t.volume_error for t in square_adjoint.tiles)
        det = abs(float(square_phi.det()))
        assert np.all(np.abs(det * v - square_phi.S.T @ v) <= det * err)

    def test_adapted_contraction(self):
        c, p = adapted_contraction(np.array([[2.0, 1.0], [0.0, 2.0]]))
        a = np.linalg.inv(np.array([[2.0, 1.0], [0.0, 2.0]]))
        rng = np.random.default_rng(0)
        for x in rng.normal(size=(50, 2)):
            assert np.sqrt(a @ x @ p @ (a @ x)) <= c * np.sqrt(x @ p @ x) + 1e-12

    def test_not_expanding(self):
        with pytest.raises(TilingError):
            adapted_contraction(np.array([[1.0, 0.0], [0.0, 2.0]]))


class TestCoverage:
    def test_fibonacci_tiles_exactly(self, fib_phi, fib_adjoint, fib_region_patch):
        _, rep = mset_to_tiling(fib_phi, fib_region_patch, fib_adjoint, Box.interval(0, 100))
        assert rep.exact
        assert rep.uncovered == 0 and rep.overlap == 0

    def test_deleted_point_leaves_gap(self, fib_phi, fib_adjoint, fib_region_patch):
        x = fib_region_patch
        pos = x.positions(0)[:, 0]
        k = int(np.argmin(np.abs(pos - 50)))
        cols = list(x.colors)
        cols[0] = np.delete(cols[0], k, axis=0)
        _, rep = mset_to_tiling(fib_phi, MSet(x.frame, cols), fib_adjoint, Box.interval(0, 100))
        assert abs(rep.uncovered - fib_adjoint.volumes[0]) < 1e-9
        assert rep.overlap == 0

    def test_duplicate_tile_overlaps(self, fib_phi, fib_adjoint, fib_region_patch):
        x = fib_region_patch
        cols = list(x.colors)
        extra = cols[1][len(cols[1]) // 2] + np.array([1, 0])
        cols[1] = np.vstack([cols[1], extra])
        _, rep = mset_to_tiling(fib_phi, MSet(x.frame, cols), fib_adjoint, Box.interval(0, 100))
        assert rep.overlap > 0.5

    def test_square(self, square_phi, square_adjoint):
        spec = load_spec("square")
        patch = generate_patch(square_phi, spec.seed(), Box((0.0, 0.0), (10.0, 10.0))).patch
        _, rep = mset_to_tiling(square_phi, patch, square_adjoint, Box((0.0, 0.0), (8.0, 8.0)))
        assert rep.consistent


class TestControlPoints:
    def test_fibonacci(self, fib_phi, fib_adjoint):
        cps = control_points(fib_phi, [(0, 0), (0, 0)], fib_adjoint.tiles)
        # Q c_j = a_j + c_i with the a-child at offset 0 gives c = 0
        assert all(v.is_zero() for c in cps.offsets for v in c)
        cps = control_points(fib_phi, [(1, 0), (0, 0)], fib_adjoint.tiles)
        phi = fib_phi.frame.field.gen()
        for j, (i, k) in enumerate(cps.tile_map):
            a = fib_phi.frame.exact_position(fib_phi.digits[i][j][k].tolist())[0]
            assert phi * cps.offsets[j][0] == a + cps.offsets[i][0]

    def test_control_point_mset_shifts(self, fib_phi, fib_adjoint, fib_region_patch):
        cps = control_points(fib_phi, [(1, 0), (0, 0)], fib_adjoint.tiles)
        y = control_point_mset(fib_region_patch, cps)
        assert y.counts().tolist() == fib_region_patch.counts().tolist()

    def test_interior_flags(self, fib_phi, fib_adjoint):
        # every Fibonacci choice lands on a tile endpoint
        for tm in ([(0, 0), (0, 0)], [(1, 0), (0, 0)]):
            assert control_points(fib_phi, tm, fib_adjoint.tiles).interior == [False, False]
            with pytest.raises(TilingError):
                control_points(fib_phi, tm, fib_adjoint.tiles, require_interior=True)

    def test_bad_tile_map(self, fib_phi):
        with pytest.raises(TilingError):
            control_points(fib_phi, [(1, 0), (1, 0)])


class TestRoundTrip:
    def test_fibonacci(self, fib_phi, fib_adjoint):
        # the one-sided fixed point grown from a single a-point is fixed by Phi itself
        res = generate_patch(fib_phi, fib_phi.point(0, [0, 0]), Box.interval(0, 130))
        assert res.power == 1
        patch, _ = mset_to_tiling(fib_phi, res.patch, fib_adjoint, Box.interval(0, 100))
        back, phi2 = tiling_to_mset(patch, fib_phi.q)
        assert back == res.patch
        for i in range(2):
            for j in range(2):
                assert sorted(map(tuple, phi2.digits[i][j].tolist())) == sorted(map(tuple, fib_phi.digits[i][j].tolist()))

    def test_fibonacci_square_of_phi(self, fib_phi, fib_adjoint, fib_region_patch):
        # the two-sided patch is fixed by Phi^2 only; reading with Q^2 recovers Phi^2
        f = fib_phi.frame.field
        q2 = [[fib_phi.q[0][0] * fib_phi.q[0][0]]]
        patch, _ = mset_to_tiling(fib_phi, fib_region_patch, fib_adjoint, Box.interval(0, 100))
        back, phi2 = tiling_to_mset(patch, q2)
        assert back == fib_region_patch
        assert phi2.S.tolist() == (fib_phi.S @ fib_phi.S).tolist()
        assert q2[0][0] == f.gen() + 1
        with pytest.raises(TilingError):
            tiling_to_mset(patch, fib_phi.q)

    def test_square_digits(self, square_phi, square_adjoint):
        spec = load_spec("square")
        x = generate_patch(square_phi, spec.seed(), Box((0.0, 0.0), (8.0, 8.0))).patch
        patch, _ = mset_to_tiling(square_phi, x, square_adjoint, Box((0.0, 0.0), (8.0, 8.0)))
        back, phi2 = tiling_to_mset(patch, square_phi.q)
        assert back == x
        assert sorted(map(tuple, phi2.digits[0][0].tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]
