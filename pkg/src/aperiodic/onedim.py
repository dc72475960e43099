"""Beta-expansions, Parry orbits, beta-integers and inflation-invariant sets on the line."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraicInteger, NumberField, classify, companion_matrix
from .algebra.field import FieldElement
from .delone import TAU, Box, DeloneError, ModuleFrame, MSet


class BetaSystem:
    """``T_b(x) = b x mod 1`` for a real algebraic integer ``b > 1``, exact in ``Z[b]``."""

    def __init__(self, beta: AlgebraicInteger | str):
        if isinstance(beta, str):
            beta = AlgebraicInteger.largest_real(beta)
        if not beta.is_real or float(beta) <= 1:
            raise ValueError("beta must be a real algebraic integer > 1")
        self.beta = beta
        self.field = NumberField(beta)
        self.frame = ModuleFrame.power_basis(self.field)
        self.b = self.field.gen()
        self.is_integer = beta.degree == 1
        self.digit_max = self.b.floor()
        self.M = np.array(companion_matrix(beta.poly), dtype=np.int64)
        self._orbit: OrbitResult | None = None

    @property
    def s(self) -> int:
        return self.beta.degree

    def __float__(self):
        return float(self.beta)

    def __repr__(self):
        return f"BetaSystem({self.beta.poly}, root={self.beta.selector})"

    def power_coords(self, n: int) -> np.ndarray:
        """Power-basis coordinates of ``b^n``."""
        e = np.zeros(self.s, dtype=np.int64)
        e[0] = 1
        for _ in range(n):
            e = self.M @ e
        return e

    def orbit(self, max_iter: int = 200) -> "OrbitResult":
        if self._orbit is None or self._orbit.max_iter < max_iter:
            self._orbit = t_beta_orbit(self, max_iter)
        return self._orbit


# -- the orbit of 1 -------------------------------------------------------------------------


@dataclass
class OrbitResult:
    values: list[FieldElement]
    digits: list[int]
    verdict: str  # "finite" or "not decided"
    preperiod: int | None
    period: int | None
    min_value: float
    max_iter: int

    @property
    def parry(self) -> bool:
        return self.verdict == "finite"

    @property
    def simple(self) -> bool:
        """The expansion of 1 terminates (the orbit reaches 0)."""
        return self.parry and self.values[-1].is_zero()


def t_beta_orbit(system: BetaSystem, max_iter: int = 200) -> OrbitResult:
    """``1, T(1), T^2(1), ...`` until a value repeats.

    ``floor(b x)`` uses a certified float evaluation and falls back to an exact
    integrality test in ``Z[b]`` when ``b x`` is within ``1e-9`` of an integer.
    """
    x = system.field.one()
    values = [x]
    digits: list[int] = []
    seen = {x.coords: 0}
    for n in range(1, max_iter + 1):
        y = system.b * x
        t = y.floor()
        x = y - t
        digits.append(t)
        values.append(x)
        if x.coords in seen:
            first = seen[x.coords]
            return OrbitResult(values, digits, "finite", first, n - first, _min_positive(values), max_iter)
        seen[x.coords] = n
    return OrbitResult(values, digits, "not decided", None, None, _min_positive(values), max_iter)


def _min_positive(values: Sequence[FieldElement]) -> float:
    vals = [float(v) for v in values if not v.is_zero()]
    return min(vals) if vals else 0.0


def quasi_greedy(orbit: OrbitResult, length: int | None = None) -> tuple[list[int], list[int]]:
    """``d*(1)`` as (preperiod digits, period digits).

    A terminating ``d(1) = t_1 ... t_n`` gives ``(t_1 ... t_{n-1} (t_n - 1))^inf``;
    an eventually periodic one is its own quasi-greedy expansion.  For an
    undecided orbit the digits seen so far are returned as a prefix with empty period.
    """
    if orbit.simple:
        # digits beyond the last nonzero one are the zero tail
        t = list(orbit.digits[: orbit.preperiod])
        while t and t[-1] == 0:
            t.pop()
        t[-1] -= 1
        return [], t
    if orbit.parry:
        pre = orbit.digits[: orbit.preperiod]
        per = orbit.digits[orbit.preperiod : orbit.preperiod + orbit.period]
        return list(pre), list(per)
    return list(orbit.digits if length is None else orbit.digits[:length]), []


class ParryAutomaton:
    """Recognizer of admissible digit strings (most significant digit first).

    State ``i`` records that the last ``i`` digits match ``d*(1)``: a digit below
    the next one of ``d*(1)`` resets to 0, an equal digit advances, a larger one
    is rejected.
    """

    def __init__(self, pre: Sequence[int], per: Sequence[int]):
        self.pre = list(pre)
        self.per = list(per)
        if not self.per:
            # prefix only: states past the prefix are unknown
            self.limit = len(self.pre)
        else:
            self.limit = None

    def digit(self, state: int) -> int | None:
        if state < len(self.pre):
            return self.pre[state]
        if not self.per:
            return None
        return self.per[(state - len(self.pre)) % len(self.per)]

    def step(self, state: int, a: int) -> int | None:
        t = self.digit(state)
        if t is None:
            raise DeloneError("admissibility undecided beyond the known prefix of d*(1)")
        if a < t:
            return 0
        if a == t:
            nxt = state + 1
            if self.per and nxt >= len(self.pre) + len(self.per):
                nxt -= len(self.per)
            return nxt
        return None

    def admissible(self, digits: Sequence[int]) -> bool:
        state = 0
        for a in digits:
            state = self.step(state, a)
            if state is None:
                return False
        return True


def _lex_less_padded(seq: Sequence[int], pre: Sequence[int], per: Sequence[int]) -> bool:
    """``seq 0^inf <_lex pre per^inf``."""
    n = len(seq) + len(pre) + 2 * max(len(per), 1) + 2
    for k in range(n):
        a = seq[k] if k < len(seq) else 0
        t = pre[k] if k < len(pre) else (per[(k - len(pre)) % len(per)] if per else 0)
        if a != t:
            return a < t
    return False


def parry_admissible(digits: Sequence[int], pre: Sequence[int], per: Sequence[int]) -> bool:
    """Every suffix of ``digits`` (zero padded) is lexicographically below ``d*(1)``."""
    return all(_lex_less_padded(digits[k:], pre, per) for k in range(len(digits)))


# -- beta-integers --------------------------------------------------------------------------


def _enumerate_nonneg(system: BetaSystem, bound: float, auto: ParryAutomaton) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    beta = float(system.beta)
    top = 0
    while beta ** (top + 1) <= bound + TAU:
        top += 1
    powers = [system.power_coords(n) for n in range(top + 1)]
    pvals = [beta**n for n in range(top + 1)]
    coords: list[np.ndarray] = []
    strings: list[tuple[int, ...]] = []

    def rec(pos: int, state: int, acc: np.ndarray, val: float, digits: tuple[int, ...]):
        if val > bound + TAU:
            return
        if pos < 0:
            coords.append(acc)
            strings.append(digits)
            return
        for a in range(system.digit_max + 1):
            nxt = auto.step(state, a)
            if nxt is None:
                break
            rec(pos - 1, nxt, acc + a * powers[pos], val + a * pvals[pos], digits + (a,))

    rec(top, 0, np.zeros(system.s, dtype=np.int64), 0.0, ())
    arr = np.array(coords, dtype=np.int64).reshape(-1, system.s)
    return arr, strings


def beta_integers(system: BetaSystem, bound: float, allow_non_parry: bool = False, max_iter: int = 200) -> MSet:
    """``X_b ∩ [-bound, bound]`` from admissible strings, symmetrized.

    Requires a finite orbit of 1.  With ``allow_non_parry`` a non-Parry base is
    enumerated against the known prefix of ``d*(1)`` and fails loudly if a string
    needs more of it.
    """
    orbit = system.orbit(max_iter)
    if not orbit.parry and not allow_non_parry:
        raise DeloneError(
            "orbit of 1 not shown finite: enumeration would be incomplete; use is_beta_integer per point"
        )
    pre, per = quasi_greedy(orbit)
    auto = ParryAutomaton(pre, per)
    pos, _ = _enumerate_nonneg(system, bound, auto)
    both = np.concatenate([pos, -pos])
    return MSet(system.frame, [np.unique(both, axis=0)])


def beta_integer_strings(system: BetaSystem, bound: float) -> list[tuple[int, ...]]:
    orbit = system.orbit()
    pre, per = quasi_greedy(orbit)
    return _enumerate_nonneg(system, bound, ParryAutomaton(pre, per))[1]


def greedy_digits(system: BetaSystem, x: FieldElement) -> tuple[list[int], FieldElement]:
    """Greedy digits of ``x >= 0`` down to ``b^0`` and the fractional remainder."""
    if x.sign() < 0:
        raise ValueError("greedy expansion needs x >= 0")
    if x.is_zero():
        return [0], x
    n = 0
    p = system.field.one()
    while not (p * system.b > x):
        p = p * system.b
        n += 1
    digits = []
    r = x
    for _ in range(n + 1):
        a = (r / p).floor()
        digits.append(a)
        r = r - p * a
        p = p / system.b
    return digits, r


def is_beta_integer(system: BetaSystem, x: FieldElement) -> bool:
    """Whether ``|x|`` equals the integer part of its own greedy expansion."""
    if x.sign() < 0:
        x = -x
    return greedy_digits(system, x)[1].is_zero()


# -- Meyer residual -------------------------------------------------------------------------


@dataclass
class ResidualReport:
    e_beta: np.ndarray
    windows: list[tuple[float, float]]
    sups: list[float]
    overall: float
    prediction: float | None

    def flat(self, ratio: float = 1.5) -> bool:
        """Later windows stay within ``ratio`` of the largest earlier sup."""
        s = self.sups[1:]
        if len(s) < 2:
            return True
        half = len(s) // 2
        return max(s[half:]) <= ratio * max(max(s[:half]), TAU)

    def strictly_increasing_run(self) -> int:
        best = run = 1
        for a, b in zip(self.sups, self.sups[1:]):
            run = run + 1 if b > a + 1e-12 else 1
            best = max(best, run)
        return best


def _eigen_split(system: BetaSystem):
    """Right eigenvectors of the companion matrix and the components of ``e_0``."""
    m = system.M.astype(float)
    vals, vecs = np.linalg.eig(m)
    k = int(np.argmin(np.abs(vals - float(system.beta))))
    row = np.array([float(system.beta) ** j for j in range(system.s)])
    e_beta = np.real(vecs[:, k] / (row @ vecs[:, k]))
    coeffs = np.linalg.solve(vecs, np.eye(system.s)[:, 0])
    parts = [(vals[j], coeffs[j] * vecs[:, j]) for j in range(system.s) if j != k]
    return e_beta, parts


def meyer_residual(system: BetaSystem, bound: float, points: MSet | None = None) -> ResidualReport:
    """``sup |phi(x) - x e_b|`` over ``X_b ∩ [0, bound]`` on dyadic windows.

    ``e_b`` is the eigenvector of the companion matrix for ``b`` scaled so that
    ``V e_b = 1``.  For a Pisot base the residual of ``sum a_j b^j`` is
    ``sum_k (sum_j a_j g_k^j) e_k`` over the conjugates ``g_k``, which gives the
    prediction ``floor(b) sum_k |e_k| / (1 - |g_k|)``.
    """
    if points is None:
        points = beta_integers(system, bound)
    coords = points.colors[0]
    pos = points.positions(0)[:, 0]
    keep = (pos >= -TAU) & (pos <= bound + TAU)
    coords, pos = coords[keep], pos[keep]
    e_beta, parts = _eigen_split(system)
    resid = np.linalg.norm(coords - np.outer(pos, e_beta), axis=1)
    edges = [0.0, 1.0]
    while edges[-1] < bound:
        edges.append(edges[-1] * 2)
    windows = list(zip(edges[:-1], edges[1:]))
    sups = []
    for a, b in windows:
        mask = (pos >= a - TAU) & (pos < b - TAU) if b < edges[-1] else (pos >= a - TAU)
        sups.append(float(resid[mask].max()) if mask.any() else 0.0)
    prediction = None
    if parts and all(abs(g) < 1 for g, _ in parts):
        prediction = float(system.digit_max * sum(np.linalg.norm(v) / (1 - abs(g)) for g, v in parts))
    elif not parts:
        prediction = 0.0
    return ResidualReport(e_beta, windows, sups, float(resid.max()) if len(resid) else 0.0, prediction)


# -- the greedy inflation set ---------------------------------------------------------------


def _candidates(frame: ModuleFrame, lo: float, hi: float, max_height: int = 400):
    """First point of ``Z[eta]`` strictly inside ``(lo, hi)`` in canonical order.

    The order is by height ``max |c_k|``, then lexicographic on the coordinates.
    """
    v = frame.vf[0]
    s = len(v)
    for h in range(max_height + 1):
        best = None
        for tail in itertools.product(range(-h, h + 1), repeat=s - 1):
            rest = float(np.dot(tail, v[1:])) if s > 1 else 0.0
            c_lo = max(-h, math.floor(lo - rest) + 1)
            c_hi = min(h, math.ceil(hi - rest) - 1)
            tail_h = max((abs(t) for t in tail), default=0)
            for c0 in range(c_lo, c_hi + 1):
                if max(abs(c0), tail_h) != h:
                    continue
                val = c0 + rest
                if lo + TAU < val < hi - TAU:
                    cand = (c0, *tail)
                    if best is None or cand < best:
                        best = cand
                    break
        if best is not None:
            return np.array(best, dtype=np.int64)
    raise DeloneError(f"no point of the module in ({lo:g}, {hi:g}) up to height {max_height}")


def example_i_set(eta: AlgebraicInteger | str, bound: float, rho_min: float = 0.4, rho_max: float = 1.2) -> MSet:
    """Symmetric ``X ⊂ Z[eta]`` with ``eta X ⊆ X`` and gaps in ``[rho_min, rho_max]``.

    Start from ``{0, 1}`` on ``[0, eta)``.  Each annulus ``[eta^k, eta^(k+1))``
    receives ``eta`` times the previous annulus, then every gap longer than
    ``rho_max`` gets the canonically first module point that keeps both new
    gaps at least ``rho_min``.
    """
    if isinstance(eta, str):
        eta = AlgebraicInteger.largest_real(eta)
    if eta.degree == 1:
        raise ValueError("eta must be irrational")
    e = float(eta)
    if e <= 1:
        raise ValueError("eta must exceed 1")
    if not 0 < rho_min < rho_max:
        raise DeloneError("need 0 < rho_min < rho_max")
    if rho_max < 2 * rho_min:
        raise DeloneError("rho_max < 2 rho_min: long gaps cannot be split while keeping gaps >= rho_min")
    field_ = NumberField(eta)
    frame = ModuleFrame.power_basis(field_)
    m = np.array(companion_matrix(eta.poly), dtype=np.int64)
    one = np.zeros(eta.degree, dtype=np.int64)
    one[0] = 1
    pts = [np.zeros(eta.degree, dtype=np.int64), one]
    if not rho_min - TAU <= 1 <= rho_max + TAU or not rho_min - TAU <= e - 1:
        raise DeloneError("seed gaps of {0, 1, eta} fall outside [rho_min, rho_max]")
    k = 1
    prev = [one]  # points in [eta^(k-1), eta^k)
    carry: list[np.ndarray] = []  # points already placed in the next annulus

    def val(c):
        return float(frame.embed(c)[0, 0])

    def insert(a, hi):
        c = _candidates(frame, a + rho_min, hi)
        return val(c), c

    while e**k <= bound:
        hi_k = e ** (k + 1)
        layer = sorted([m @ p for p in prev] + carry, key=val)
        left = max(pts, key=val)
        filled = [(val(c), c) for c in [left] + layer]
        for (a, _), (b, _) in zip(filled, filled[1:]):
            if b - a < rho_min - TAU:
                raise DeloneError(
                    f"points at {a:.6g} and {b:.6g} are closer than rho_min; eta, rho_min, rho_max are inconsistent"
                )
        i = 0
        while i < len(filled) - 1:
            a, b = filled[i][0], filled[i + 1][0]
            if b - a > rho_max + TAU:
                filled.insert(i + 1, insert(a, min(a + rho_max, b - rho_min)))
            else:
                i += 1
        # the first point of the next annulus is eta times the first point of
        # this one, so the tail can be filled against it now
        nxt = e * filled[1][0]
        while nxt - filled[-1][0] > rho_max + TAU:
            a = filled[-1][0]
            filled.append(insert(a, min(a + rho_max, nxt - rho_min)))
        prev = [c for v, c in filled[1:] if v < hi_k - TAU]
        carry = [c for v, c in filled[1:] if v >= hi_k - TAU]
        pts.extend(prev)
        k += 1
    pts.extend(carry)
    arr = np.array(pts, dtype=np.int64)
    arr = arr[frame.embed(arr)[:, 0] <= bound + TAU]
    both = np.concatenate([arr, -arr])
    return MSet(frame, [np.unique(both, axis=0)])
