"""Line-oriented system description files.

Each non-blank line is ``keyword arguments...``; ``#`` starts a comment.

    name fibonacci
    field x^2-x-1
    frame power
    expansion (0,1)
    colors a b
    digit a a 0,0
    digit a b 0,0
    digit b a 0,1
    seed a 0,0
    window -100,100

Keywords: ``name``, ``field <poly> [root <k>]``, ``frame power|lattice <d>``,
``basis <elem>...`` (one line per row), ``expansion <elem>...`` (one line per
row of Q), ``colors <names>``, ``digit <i> <j> <coords>``, ``seed <color>
<coords>``, ``scheme fibonacci|salem <poly> [radius <r>]``, ``beta <poly>``,
``window <lo,hi>...`` (one pair per axis) and ``param <key> <value>``.
Field elements are ``p/q`` rationals or ``(c0,c1,...)`` power-basis tuples.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgebraicInteger, IntPolynomial, NumberField, PolynomialError
from .delone import Box, ModuleFrame, MSet


class SpecError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column


Elem = tuple[Fraction, ...]


@dataclass
class SystemSpec:
    name: str = ""
    field_poly: str = "x"
    root: int | None = None
    frame: tuple = ("power",)  # ("power",), ("lattice", d) or ("basis",)
    basis: list[list[Elem]] = field(default_factory=list)
    expansion: list[list[Elem]] = field(default_factory=list)
    colors: list[str] = field(default_factory=list)
    digits: list[tuple[str, str, tuple[int, ...]]] = field(default_factory=list)
    seeds: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)
    scheme: tuple = ()
    beta: str = ""
    window: list[tuple[float, float]] = field(default_factory=list)
    params: dict[str, str] = field(default_factory=dict)

    # -- construction of library objects ---------------------------------------------------

    def number_field(self) -> NumberField:
        if self.field_poly.strip() == "x":
            return NumberField.rationals()
        return NumberField.from_poly(self.field_poly, self.root)

    def module_frame(self) -> ModuleFrame:
        f = self.number_field()
        kind = self.frame[0]
        if kind == "power":
            return ModuleFrame.power_basis(f)
        if kind == "lattice":
            d = int(self.frame[1])
            return ModuleFrame(f, [[1 if i == j else 0 for j in range(d)] for i in range(d)])
        return ModuleFrame(f, [[f(list(e)) for e in row] for row in self.basis])

    def color_index(self, name: str) -> int:
        return self.colors.index(name)

    def substitution(self):
        from .substitution import MSetSubstitution

        frame = self.module_frame()
        f = frame.field
        if not self.expansion:
            raise SpecError("no expansion given")
        m = len(self.colors)
        if m == 0:
            raise SpecError("no colors given")
        digits = [[[] for _ in range(m)] for _ in range(m)]
        for i, j, c in self.digits:
            digits[self.color_index(i)][self.color_index(j)].append(list(c))
        q = [[f(list(e)) for e in row] for row in self.expansion]
        return MSetSubstitution(frame, q, [[np.array(dij, dtype=np.int64).reshape(-1, frame.s) for dij in row] for row in digits], self.colors)

    def seed(self, frame: ModuleFrame | None = None) -> MSet:
        frame = frame or self.module_frame()
        cols = [[] for _ in self.colors]
        for c, v in self.seeds:
            cols[self.color_index(c)].append(list(v))
        return MSet(frame, [np.array(c, dtype=np.int64).reshape(-1, frame.s) for c in cols])

    def region(self, default: Box | None = None) -> Box:
        if not self.window:
            if default is None:
                raise SpecError("no window given")
            return default
        return Box(tuple(a for a, _ in self.window), tuple(b for _, b in self.window))

    def param(self, key: str, default=None, cast=str):
        return cast(self.params[key]) if key in self.params else default


# -- parsing --------------------------------------------------------------------------------

_ELEM = re.compile(r"^\(([^()]*)\)$")


def _frac(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"not a rational number: {tok!r}", line, col) from None


def _elem(tok: str, line: int, col: int) -> Elem:
    m = _ELEM.match(tok)
    if m:
        parts = [p.strip() for p in m.group(1).split(",")]
        if not parts or any(not p for p in parts):
            raise SpecError(f"malformed field element {tok!r}", line, col)
        return tuple(_frac(p, line, col) for p in parts)
    return (_frac(tok, line, col),)


def _ints(tok: str, line: int, col: int) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in tok.split(","))
    except ValueError:
        raise SpecError(f"expected comma-separated integers, got {tok!r}", line, col) from None


def _pair(tok: str, line: int, col: int) -> tuple[float, float]:
    parts = tok.split(",")
    if len(parts) != 2:
        raise SpecError(f"expected lo,hi, got {tok!r}", line, col)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise SpecError(f"expected numbers in {tok!r}", line, col) from None
    if not lo < hi:
        raise SpecError("window needs lo < hi", line, col)
    return lo, hi


def _tokens(raw: str) -> list[tuple[str, int]]:
    """Whitespace tokens with 1-based columns; parenthesised groups stay whole."""
    out = []
    for m in re.finditer(r"\([^)]*\)|\S+", raw):
        out.append((m.group(0).replace(" ", ""), m.start() + 1))
    return out


def _check_poly(text: str, line: int, col: int) -> str:
    try:
        p = IntPolynomial.parse(text)
    except (PolynomialError, ValueError) as exc:
        raise SpecError(str(exc), line, col) from None
    return str(p) if p.degree > 1 else text


def parse(text: str) -> SystemSpec:
    spec = SystemSpec()
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = _tokens(body)
        if not toks:
            continue
        (kw, kc), args = toks[0], toks[1:]

        def need(n, exact=True):
            if (exact and len(args) != n) or (not exact and len(args) < n):
                raise SpecError(f"{kw!r} expects {'' if exact else 'at least '}{n} argument(s)", ln, kc)

        if kw == "name":
            spec.name = body.strip()[len("name"):].strip()
        elif kw == "field":
            need(1, exact=False)
            spec.field_poly = args[0][0] if args[0][0] == "x" else _check_poly(args[0][0], ln, args[0][1])
            rest = args[1:]
            if rest:
                if len(rest) != 2 or rest[0][0] != "root":
                    raise SpecError("expected 'root <k>'", ln, rest[0][1])
                spec.root = int(_ints(rest[1][0], ln, rest[1][1])[0])
        elif kw == "frame":
            need(1, exact=False)
            if args[0][0] == "power":
                spec.frame = ("power",)
            elif args[0][0] == "lattice":
                need(2)
                spec.frame = ("lattice", _ints(args[1][0], ln, args[1][1])[0])
            else:
                raise SpecError(f"unknown frame {args[0][0]!r}", ln, args[0][1])
        elif kw == "basis":
            need(1, exact=False)
            spec.frame = ("basis",)
            spec.basis.append([_elem(t, ln, c) for t, c in args])
        elif kw == "expansion":
            need(1, exact=False)
            spec.expansion.append([_elem(t, ln, c) for t, c in args])
        elif kw == "colors":
            need(1, exact=False)
            spec.colors = [t for t, _ in args]
        elif kw == "digit":
            need(3)
            for t, c in args[:2]:
                if t not in spec.colors:
                    raise SpecError(f"unknown color {t!r}", ln, c)
            spec.digits.append((args[0][0], args[1][0], _ints(args[2][0], ln, args[2][1])))
        elif kw == "seed":
            need(2)
            if args[0][0] not in spec.colors:
                raise SpecError(f"unknown color {args[0][0]!r}", ln, args[0][1])
            spec.seeds.append((args[0][0], _ints(args[1][0], ln, args[1][1])))
        elif kw == "scheme":
            need(1, exact=False)
            if args[0][0] == "fibonacci":
                need(1)
                spec.scheme = ("fibonacci",)
            elif args[0][0] == "salem":
                if len(args) not in (2, 4) or (len(args) == 4 and args[2][0] != "radius"):
                    raise SpecError("expected 'scheme salem <poly> [radius <r>]'", ln, kc)
                poly = _check_poly(args[1][0], ln, args[1][1])
                radius = float(_frac(args[3][0], ln, args[3][1])) if len(args) == 4 else 1.0
                spec.scheme = ("salem", poly, radius)
            else:
                raise SpecError(f"unknown scheme {args[0][0]!r}", ln, args[0][1])
        elif kw == "beta":
            need(1)
            spec.beta = _check_poly(args[0][0], ln, args[0][1])
        elif kw == "window":
            need(1, exact=False)
            spec.window = [_pair(t, ln, c) for t, c in args]
        elif kw == "param":
            need(2)
            spec.params[args[0][0]] = args[1][0]
        else:
            raise SpecError(f"unknown keyword {kw!r}", ln, kc)
    if spec.frame[0] == "basis" and not spec.basis:
        raise SpecError("basis frame without rows")
    return spec


def read(path) -> SystemSpec:
    with open(path) as fh:
        return parse(fh.read())


# -- serialization --------------------------------------------------------------------------


def _fmt_frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _fmt_elem(e: Elem) -> str:
    if len(e) == 1:
        return _fmt_frac(e[0])
    return "(" + ",".join(_fmt_frac(v) for v in e) + ")"


def _fmt_float(v: float) -> str:
    return repr(float(v))


def serialize(spec: SystemSpec) -> str:
    out = []
    if spec.name:
        out.append(f"name {spec.name}")
    out.append(f"field {spec.field_poly}" + (f" root {spec.root}" if spec.root is not None else ""))
    if spec.frame[0] == "basis":
        out.extend("basis " + " ".join(_fmt_elem(e) for e in row) for row in spec.basis)
    elif spec.frame[0] == "lattice":
        out.append(f"frame lattice {spec.frame[1]}")
    else:
        out.append("frame power")
    out.extend("expansion " + " ".join(_fmt_elem(e) for e in row) for row in spec.expansion)
    if spec.colors:
        out.append("colors " + " ".join(spec.colors))
    out.extend(f"digit {i} {j} " + ",".join(map(str, c)) for i, j, c in spec.digits)
    out.extend(f"seed {c} " + ",".join(map(str, v)) for c, v in spec.seeds)
    if spec.scheme:
        if spec.scheme[0] == "salem":
            out.append(f"scheme salem {spec.scheme[1]} radius {_fmt_float(spec.scheme[2])}")
        else:
            out.append(f"scheme {spec.scheme[0]}")
    if spec.beta:
        out.append(f"beta {spec.beta}")
    if spec.window:
        out.append("window " + " ".join(f"{_fmt_float(a)},{_fmt_float(b)}" for a, b in spec.window))
    out.extend(f"param {k} {v}" for k, v in sorted(spec.params.items()))
    return "\n".join(out) + "\n"


def from_substitution(phi, seed: MSet | None = None, name: str = "", window: Box | None = None) -> SystemSpec:
    """Spec text for an existing substitution over a power-basis or lattice frame."""
    f = phi.frame.field
    spec = SystemSpec(name=name, field_poly=str(f.poly) if f.degree > 1 else "x", root=None)
    if f.degree > 1 and f.generator != AlgebraicInteger.largest_real(f.poly):
        spec.root = f.generator.selector
    spec.frame = ("basis",)
    spec.basis = [[tuple(v.coords) for v in row] for row in phi.frame.basis]
    spec.expansion = [[tuple(v.coords) for v in row] for row in phi.q]
    spec.colors = list(phi.names)
    for i in range(phi.m):
        for j in range(phi.m):
            for c in phi.digits[i][j].tolist():
                spec.digits.append((phi.names[i], phi.names[j], tuple(c)))
    if seed is not None:
        for i in range(seed.m):
            for c in seed.colors[i].tolist():
                spec.seeds.append((phi.names[i], tuple(c)))
    if window is not None:
        spec.window = list(zip(window.lo, window.hi))
    return spec
