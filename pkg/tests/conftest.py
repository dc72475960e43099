from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from aperiodic import specfile
from aperiodic.delone import Box, ModuleFrame, MSet
from aperiodic.onedim import BetaSystem, beta_integers


@pytest.fixture(scope="session")
def phi_system():
    return BetaSystem("x^2-x-1")


@pytest.fixture(scope="session")
def fib_points(phi_system):
    """Fibonacci beta-integers on [-400, 400] with declared (r, R)."""
    x = beta_integers(phi_system, 400)
    return MSet(x.frame, x.colors, r=(5**0.5 - 1) / 4, R=0.5)


@pytest.fixture(scope="session")
def fib_field(phi_system):
    return phi_system.field


def lattice(d, half):
    axes = [np.arange(-half, half + 1)] * d
    coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return MSet(ModuleFrame.integer_lattice(d), [coords], r=0.5, R=0.5 * d**0.5)


def random_delone(rng, d, n=None, scale=1000):
    """Jittered grid on a rational frame of pitch ``1/scale``.

    Returns the set with its true packing radius and a valid covering radius.
    """
    h = float(rng.uniform(1.0, 3.0))
    jitter = float(rng.uniform(0.0, 0.3)) * h
    n = n or (60 if d == 1 else 12)
    axes = [np.arange(n) * h] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    pts = grid + rng.uniform(-jitter, jitter, size=grid.shape)
    coords = np.unique(np.round(pts * scale).astype(np.int64), axis=0)
    frame = ModuleFrame.rational([[Fraction(1, scale) if i == j else 0 for j in range(d)] for i in range(d)])
    pos = coords / scale
    diff = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    np.fill_diagonal(diff, np.inf)
    r = float(diff.min()) / 2
    R = (h / 2 * d**0.5 + jitter * d**0.5) * 1.01
    box = Box(tuple(pos.min(axis=0)), tuple(pos.max(axis=0)))
    return MSet(frame, [coords], r=r, R=R), box


SPECS = Path(__file__).resolve().parents[1] / "examples_specs"


def load_spec(name):
    return specfile.read(SPECS / f"{name}.spec")


@pytest.fixture(scope="session")
def fib_phi():
    return load_spec("fibonacci").substitution()


@pytest.fixture(scope="session")
def binary_phi():
    return load_spec("binary").substitution()


@pytest.fixture(scope="session")
def square_phi():
    return load_spec("square").substitution()


def random_scheme(rng):
    """Nondegenerate scheme with ``n <= 4`` and a random box or ball window."""
    from aperiodic.algebra.field import NumberField
    from aperiodic.cutproject import CutProjectScheme, Window

    kind = int(rng.integers(0, 3))
    if kind == 0:
        f = NumberField.from_poly(str(rng.choice(["x^2-x-1", "x^2-2", "x^2-3"])))
        b = f.gen()
        physical = [[f.one(), b]]
    elif kind == 1:
        f = NumberField.from_poly(str(rng.choice(["x^3-x-1", "x^3-x^2-2x+1"])))
        b = f.gen()
        physical = [[f.one(), b, b * b]]
    else:
        f = NumberField.from_poly("x^2-2")
        b = f.gen()
        physical = [[f.one(), b, f.zero(), f.zero()], [f.zero(), f.zero(), f.one(), b]]
    n = len(physical[0])
    d = len(physical)
    m = n - d
    while True:
        internal = rng.normal(size=(m, n))
        pf = np.array([[float(v) for v in row] for row in physical])
        # a small singular value blows up the integer search box
        if np.linalg.svd(np.vstack([pf, internal]), compute_uv=False)[-1] > 0.3:
            break
    center = rng.uniform(-0.3, 0.3, size=m)
    if m > 1 and rng.random() < 0.5:
        window = Window.ball(center, float(rng.uniform(0.4, 1.0)))
    else:
        half = rng.uniform(0.3, 1.0, size=m)
        window = Window.box(center - half, center + half)
    region = Box(tuple([0.0] * d), tuple([float(rng.uniform(4, 10)) if d == 2 else float(rng.uniform(10, 30))] * d))
    return CutProjectScheme(f, physical, internal, window, "random"), region


# criterion number -> list of (passed, note), filled by the acceptance suite
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p for p, _ in parts)
        notes = "; ".join(note for _, note in parts if note)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {notes}")
