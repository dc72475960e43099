"""Command-line front end.

Exit status: 0 on success, 1 on usage or input errors, 2 when a computed check
fails (the report is still written).
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import cutproject, delone, dynamics, onedim, render, specfile, substitution, tiling
from .algebra import AlgebraicInteger, IntPolynomial, PolynomialError, classify
from .delone import Box, DeloneError

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# -- reports --------------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, np.ndarray):
        return " ".join(_fmt(float(a)) if np.issubdtype(v.dtype, np.floating) else str(a) for a in v.ravel())
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(a) for a in v)
    return str(v)


def _report(rows: list[tuple[str, object]]) -> str:
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in rows)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _window(text: str | None) -> Box | None:
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad window {text!r}; expected lo,hi[,lo,hi]") from None
    if len(vals) % 2 or not vals:
        raise UsageError(f"bad window {text!r}; expected lo,hi pairs")
    lo, hi = vals[0::2], vals[1::2]
    if any(a >= b for a, b in zip(lo, hi)):
        raise UsageError("window needs lo < hi")
    return Box(tuple(lo), tuple(hi))


def _poly(text: str) -> AlgebraicInteger:
    try:
        p = IntPolynomial.parse(text)
    except PolynomialError:
        raise UsageError(f"cannot parse {text!r} as an integer polynomial") from None
    if not p.is_irreducible:
        raise UsageError(f"{text!r} is not monic-irreducible over the documented grammar")
    try:
        return AlgebraicInteger.largest_real(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _spec(path: str) -> specfile.SystemSpec:
    try:
        return specfile.read(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _points(path: str) -> delone.MSet:
    try:
        with open(path) as fh:
            return delone.read_points(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _region(args, spec=None) -> Box:
    box = _window(getattr(args, "window", None))
    if box is None and spec is not None and spec.window:
        box = spec.region()
    if box is None:
        raise UsageError("a window is required (--window lo,hi)")
    return box


def _elem(f, text: str):
    text = text.strip()
    if text.startswith("("):
        return f([Fraction(v) for v in text.strip("()").split(",")])
    return f(Fraction(text))


# -- commands -------------------------------------------------------------------------------


def cmd_classify(args) -> int:
    a = _poly(args.poly)
    if not a.is_real or float(a) <= 1:
        raise UsageError("the largest real root must exceed 1")
    cls = classify(a)
    mod = max(cls.conjugate_moduli) if cls.conjugate_moduli else 0.0
    line = f"{cls.name}, degree {cls.degree}"
    line += f", conjugate modulus ≈ {mod:.4f}\n" if cls.conjugate_moduli else "\n"
    _emit(line, args.out)
    return EXIT_OK


def cmd_beta(args) -> int:
    system = onedim.BetaSystem(_poly(args.poly))
    if args.action == "orbit":
        o = system.orbit(args.max_iter)
        pre, per = onedim.quasi_greedy(o)
        rows = [
            ("beta", f"{float(system):.12g}"),
            ("verdict", o.verdict),
            ("digits", o.digits),
            ("values", [float(v) for v in o.values]),
            ("preperiod", o.preperiod),
            ("period", o.period),
            ("min_value", o.min_value),
            ("quasi_greedy_prefix", pre),
            ("quasi_greedy_period", per),
        ]
        _emit(_report(rows), args.out)
        return EXIT_OK
    box = _region(args)
    bound = float(max(abs(box.lo[0]), abs(box.hi[0])))
    if args.action == "integers":
        x = onedim.beta_integers(system, bound, allow_non_parry=args.allow_non_parry)
        x = x.restrict(box)
        _emit(delone.write_points(x), args.out)
        return EXIT_OK
    rep = onedim.meyer_residual(system, bound)
    rows = [
        ("e_beta", rep.e_beta),
        ("windows", [f"[{a:g},{b:g})" for a, b in rep.windows]),
        ("sups", rep.sups),
        ("overall", rep.overall),
        ("prediction", rep.prediction if rep.prediction is not None else "none"),
        ("flat", rep.flat()),
        ("longest_increasing_run", rep.strictly_increasing_run()),
    ]
    _emit(_report(rows), args.out)
    return EXIT_OK


def _substitution(spec):
    try:
        return spec.substitution()
    except (ValueError, KeyError) as exc:
        raise UsageError(f"invalid substitution: {exc}") from None


def cmd_subst(args) -> int:
    spec = _spec(args.spec)
    phi = _substitution(spec)
    if args.action == "validate":
        seed = spec.seed(phi.frame)
        region = _region(args, spec)
        rep = substitution.validate(phi, seed, region, max_iter=args.kmax or 8)
        rows = [
            ("expanding", rep.expanding),
            ("eigenvalue_moduli", rep.eigenvalue_moduli),
            ("S", rep.S),
            ("primitive", rep.primitive),
            ("primitivity_exponent", rep.primitivity_exponent),
            ("pf_eigenvalue", rep.pf_eigenvalue),
            ("abs_det", rep.abs_det),
            ("pf_gap", rep.pf_gap),
            ("duplicates", [f"{it}:{n}" for it, n in rep.duplicates]),
            ("ok", rep.ok),
        ]
        rows += [("failure", f) for f in rep.failures()]
        _emit(_report(rows), args.out)
        return EXIT_OK if rep.ok else EXIT_CHECK
    if args.action == "generate":
        res = substitution.generate_patch(phi, spec.seed(phi.frame), _region(args, spec), mode=args.mode)
        _emit(delone.write_points(res.patch), args.out)
        return EXIT_OK
    if args.action == "legal":
        v = substitution.is_legal(phi, spec.seed(phi.frame), k_max=args.kmax or 12)
        rows = [("legal", v.legal)]
        if v.witness:
            color, k, t = v.witness
            rows += [("witness_color", phi.names[color]), ("witness_power", k), ("witness_translation", list(t))]
        _emit(_report(rows), args.out)
        return EXIT_OK
    if args.action == "adjoint":
        res = tiling.solve_adjoint(phi, eps=args.eps)
        rows = [("exact", res.exact), ("rate", res.rate), ("iterations", res.iterations), ("volumes", res.volumes)]
        for t in res.tiles:
            if t.mask is None:
                rows.append((f"tile_{phi.names[t.index]}", [f"[{float(a):.12g},{float(b):.12g}]" for a, b in t.intervals]))
            else:
                rows.append((f"tile_{phi.names[t.index]}", f"raster {t.mask.shape[1]}x{t.mask.shape[0]} eps {t.eps:.6g}"))
            rows.append((f"empty_interior_{phi.names[t.index]}", t.empty_interior))
        _emit(_report(rows), args.out)
        if args.out:
            for t in res.tiles:
                if t.mask is not None:
                    with open(f"{args.out}.{phi.names[t.index]}.pbm", "w") as fh:
                        fh.write(render.pbm(t.mask))
        return EXIT_OK
    # tile
    region = _region(args, spec)
    patch = substitution.generate_patch(phi, spec.seed(phi.frame), region, mode=args.mode).patch
    res = tiling.solve_adjoint(phi, eps=args.eps)
    _, cov = tiling.mset_to_tiling(phi, patch, res, region, eps=args.eps)
    rows = [
        ("tiles", len(patch)),
        ("uncovered", cov.uncovered),
        ("overlap", cov.overlap),
        ("tolerance", cov.tolerance),
        ("exact", cov.exact),
        ("consistent", cov.consistent),
    ]
    _emit(_report(rows), args.out)
    return EXIT_OK if cov.consistent else EXIT_CHECK


def _scheme(spec) -> cutproject.CutProjectScheme:
    if not spec.scheme:
        raise UsageError("spec has no scheme line")
    if spec.scheme[0] == "fibonacci":
        return cutproject.fibonacci_scheme()
    return cutproject.salem_scheme(spec.scheme[1], spec.scheme[2])


def cmd_cutproject(args) -> int:
    if args.action == "generate":
        spec = _spec(args.target)
        scheme = _scheme(spec)
        res = cutproject.generate_model_set(scheme, _region(args, spec))
        if res.points is None:
            raise UsageError("projection is not injective; no point file can be written")
        _emit(delone.write_points(res.points), args.out)
        for w in res.warnings:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_OK
    try:
        scheme = cutproject.salem_scheme(args.target, args.radius)
    except cutproject.SchemeError as exc:
        raise UsageError(str(exc)) from None
    region = _region(args)
    res = cutproject.generate_model_set(scheme, region)
    checked, failures = cutproject.inflation_check(scheme, res, region)
    rows = [
        ("scheme", scheme.name),
        ("points", len(res)),
        ("nondegenerate", res.nondegenerate),
        ("dense_evidence", res.dense_evidence),
        ("boundary_hits", len(res.boundary_hits)),
        ("inflation_checked", checked),
        ("inflation_failures", failures),
        ("positions", res.positions[:, 0]),
    ]
    _emit(_report(rows), args.out)
    return EXIT_OK if failures == 0 else EXIT_CHECK


def _dataset(spec, region: Box) -> delone.MSet:
    if spec.scheme:
        res = cutproject.generate_model_set(_scheme(spec), region)
        if res.points is None:
            raise UsageError("projection is not injective")
        return res.points
    phi = _substitution(spec)
    return substitution.generate_patch(phi, spec.seed(phi.frame), region).patch


def cmd_dyn(args) -> int:
    if args.action == "metric":
        if len(args.inputs) != 2:
            raise UsageError("metric needs two point files")
        a, b = (_points(p) for p in args.inputs)
        _emit(_report([("distance", dynamics.big_ball_distance(a, b))]), args.out)
        return EXIT_OK
    if len(args.inputs) != 1:
        raise UsageError(f"{args.action} needs one spec file")
    spec = _spec(args.inputs[0])
    region = _region(args, spec)
    x = _dataset(spec, region)
    if args.action == "freq":
        color = spec.param("cluster_color", spec.colors[0] if spec.colors else None)
        cidx = spec.colors.index(color) if spec.colors else 0
        cols = [np.zeros((0, x.s), dtype=np.int64) for _ in range(x.m)]
        cols[cidx] = np.zeros((1, x.s), dtype=np.int64)
        cluster = delone.MSet(x.frame, cols)
        half = float(min(region.widths)) / 2
        ns = [half / 16, half / 8, half / 4]
        shift = np.zeros(x.d)
        shift[0] = half / 4
        samples = [region.center - shift, region.center, region.center + shift]
        rep = dynamics.cluster_frequency(x, cluster, dynamics.VanHoveSequence(x.d), samples, ns, region)
        _emit(rep.to_csv(), args.out)
        return EXIT_OK
    if args.action == "eigen":
        deltas = [float(v) for v in args.deltas.split(",")]
        alpha = [float(v) for v in args.alpha.split(";")]
        rep = dynamics.topological_eigenvalue_test(x, alpha, deltas, region=region)
        text = rep.to_csv() + f"verdict,{rep.verdict}\n"
        _emit(text, args.out)
        return EXIT_OK
    # qn
    f = x.frame.field
    q = [[_elem(f, v) for v in row.split(",")] for row in args.q.split(";")] if args.q else None
    if q is None:
        phi = _substitution(spec)
        q = [list(row) for row in phi.q]
    alpha = [_elem(f, v) for v in args.alpha.split(";")]
    rep = dynamics.qn_eigenvalue_test(x, q, alpha, N=args.n, tol=args.tol or 1e-3)
    text = rep.to_csv() + f"verdict,{rep.verdict}\n"
    if rep.witness is not None:
        text += "witness," + " ".join(map(str, rep.witness)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_delone(args) -> int:
    x = _points(args.points)
    box = _window(args.window) or Box.around(x.support_positions())
    if args.action == "probe":
        ft = delone.finite_type_probe(x, args.T, box)
        mp = delone.meyer_probe(x, box)
        r, R = delone.estimate_parameters(x, box)
        rows = [
            ("r", r),
            ("R", R),
            ("finite_type", ft.verdict),
            ("censuses", ft.censuses),
            ("meyer", mp.verdict),
            ("F_sizes", mp.sizes),
            ("min_gap", mp.min_gap),
        ]
        _emit(_report(rows), args.out)
        return EXIT_OK
    if args.action == "chain":
        # endpoints are snapped to the nearest points of X
        pos = x.support_positions()
        a = pos[np.argmin(np.linalg.norm(pos - [float(v) for v in args.start.split(",")], axis=1))]
        b = pos[np.argmin(np.linalg.norm(pos - [float(v) for v in args.end.split(",")], axis=1))]
        if x.r is None or x.R is None:
            r, R = delone.estimate_parameters(x, box)
            x = delone.MSet(x.frame, x.colors, r=r, R=R)
        path = delone.chain(x, a, b)
        steps = np.linalg.norm(np.diff(path, axis=0), axis=1) if len(path) > 1 else np.zeros(0)
        rows = [("start", a), ("end", b), ("pieces", len(path) - 1), ("max_step", float(steps.max()) if len(steps) else 0.0), ("points", path.ravel())]
        _emit(_report(rows), args.out)
        return EXIT_OK
    rep = delone.inflation_audit(x, _poly(args.eta), box, T=args.T)
    rows = [("number_class", rep.number_class), ("inclusion_checked", rep.inclusion_checked)]
    rows += [(f"row_{k}", " | ".join(r)) for k, r in enumerate(rep.rows)]
    rows.append(("contradiction", rep.contradiction))
    _emit(_report(rows), args.out)
    return EXIT_CHECK if rep.contradiction else EXIT_OK


def cmd_render(args) -> int:
    with open(args.input) as fh:
        text = fh.read()
    if text.startswith("pointset"):
        svg = render.svg_points(delone.read_points(text))
    else:
        spec = specfile.parse(text)
        region = _region(args, spec)
        if spec.scheme:
            svg = render.svg_points(_dataset(spec, region))
        else:
            phi = _substitution(spec)
            patch = substitution.generate_patch(phi, spec.seed(phi.frame), region).patch
            res = tiling.solve_adjoint(phi, eps=args.eps)
            svg = render.svg_patch(tiling.Patch(patch, res.tiles))
    _emit(svg, args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------


def _common(p):
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--window", help="region as lo,hi (one pair per axis)")
    p.add_argument("--eps", type=float, help="raster step for planar tiles")
    p.add_argument("--kmax", type=int, help="iteration or power limit")
    p.add_argument("--tol", type=float, help="numerical tolerance")
    p.add_argument("--mode", choices=("strict", "lenient"), default="strict")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aperiodic", description="Delone sets, substitutions, model sets and their dynamics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="Pisot/Salem/Perron/Lind class of the largest real root")
    p.add_argument("poly")
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("beta", help="beta-expansions")
    p.add_argument("action", choices=("orbit", "integers", "residual"))
    p.add_argument("poly")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--allow-non-parry", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("subst", help="substitution m-sets and tilings")
    p.add_argument("action", choices=("validate", "generate", "legal", "adjoint", "tile"))
    p.add_argument("spec")
    _common(p)
    p.set_defaults(func=cmd_subst)

    p = sub.add_parser("cutproject", help="model sets")
    p.add_argument("action", choices=("generate", "salem"))
    p.add_argument("target", help="spec file (generate) or Salem polynomial (salem)")
    p.add_argument("--radius", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_cutproject)

    p = sub.add_parser("dyn", help="dynamical probes")
    p.add_argument("action", choices=("freq", "metric", "eigen", "qn"))
    p.add_argument("inputs", nargs="+")
    p.add_argument("--alpha", default="1", help="frequency vector, components separated by ';'")
    p.add_argument("--deltas", default="0.2,0.1,0.05,0.02,0.01")
    p.add_argument("--q", help="expansion matrix rows separated by ';'")
    p.add_argument("--n", type=int, default=30)
    _common(p)
    p.set_defaults(func=cmd_dyn)

    p = sub.add_parser("delone", help="Delone-set probes on a point file")
    p.add_argument("action", choices=("probe", "chain", "audit"))
    p.add_argument("points")
    p.add_argument("--T", type=float, default=2.0)
    p.add_argument("--start", default="0")
    p.add_argument("--end", default="10")
    p.add_argument("--eta", default="x^2-x-1")
    _common(p)
    p.set_defaults(func=cmd_delone)

    p = sub.add_parser("render", help="SVG of a point file or of the tiling described by a spec")
    p.add_argument("input")
    _common(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, specfile.SpecError, render.RenderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DeloneError, substitution.SubstitutionError, tiling.TilingError, cutproject.SchemeError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
