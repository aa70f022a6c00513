"""Command-line front end.

One subcommand per pipeline, nothing interactive.  Arguments that name a
curve, family, quartic, point list, lattice, or polynomial system accept
a file path, a literal string, or `-` for stdin; lattice arguments also
accept built-in names (E8, D16, A3, U, inose-ns, d16plus, E8^3, ...).

Exit status: 0 on success, 1 when the computation rejects its input
(domain errors), 2 for a malformed command line.  Every subcommand has
a --json flag; search-style commands emit one JSON object per line,
everything else a single object.
"""

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import fixtures
from .curves import curve_from_text, curve_to_text, invariants, torsion_subgroup
from .families import (family_from_text, family_to_text, mestre_family,
                       mestre_quintic, neron_pencil, section_order,
                       verify_sections)
from .heights import (gram_rank, integral_points_in_span, points_from_text,
                      quartic_from_text, quartic_search, results_json_lines)
from .lattices import (HYPERBOLIC_GRAM, K3_FIBER_TABLE, THIRTEEN_DISCRIMINANTS,
                       IntLattice, ade_gram, essential_lattice,
                       half_hole_cosets, lattice_from_text, lattice_invariants,
                       lattice_to_text, mw_group, p_neighbor,
                       root_decomposition)
from .padic import lift_and_recognize, parse_poly_system, rational_reconstruct
from .sieve import (SieveConfig, build_np_tables, cached_np_tables,
                    score_curve, sieve_search)

# ------------------------------ input plumbing -----------------------------


def _read_text(value: str) -> str:
    """File contents if `value` is an existing path, stdin for `-`,
    otherwise the string itself."""
    if value == "-":
        return sys.stdin.read()
    if os.path.isfile(value):
        with open(value, "r", encoding="utf-8") as fh:
            return fh.read()
    return value


def _load_curve(value: str):
    return curve_from_text(_read_text(value).strip())


def _load_family(value: str):
    return family_from_text(_read_text(value))


_ADE_NAME = re.compile(r"([ADEade])([0-9]+)(?:\^([0-9]+))?")


def _load_lattice(value: str) -> IntLattice:
    """Built-in names take precedence over files with the same name.

    `E8^2` style powers are plain direct sums; the Niemeier labels
    (A1^24, E8^3, D16+E8) name the glued unimodular models instead.
    """
    name = value.strip()
    low = name.lower()
    if low in ("u", "hyperbolic"):
        return IntLattice(HYPERBOLIC_GRAM)
    if low in ("inose", "inose-ns"):
        return fixtures.inose_ns()
    if low == "d16plus":
        return fixtures.d16_plus()
    if name in fixtures.NIEMEIER_LABELS:
        return fixtures.niemeier(name)
    m = _ADE_NAME.fullmatch(name)
    if m:
        L = ade_gram(m.group(1).upper(), int(m.group(2)))
        for _ in range(int(m.group(3) or 1) - 1):
            L = L.direct_sum(ade_gram(m.group(1).upper(), int(m.group(2))))
        return L
    return lattice_from_text(_read_text(value))


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _range_pair(text: str):
    """`T0:T1`, both integers."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ValueError("expected T0:T1")
    return int(lo), int(hi)


def _int_vector(text: str):
    return tuple(int(s) for s in text.replace(",", " ").split())


def _fraction_vector(text: str):
    return tuple(Fraction(s) for s in text.replace(",", " ").split())


def _emit(args, obj: dict, text_lines) -> None:
    if args.json:
        print(json.dumps(obj))
    else:
        for line in text_lines:
            print(line)


def _q(x) -> str:
    return str(Fraction(x))


def _torsion_shape(invs) -> str:
    if not invs:
        return "trivial"
    return " x ".join(f"Z/{d}Z" for d in invs)


# -------------------------------- handlers ---------------------------------


def _cmd_curve_info(args) -> int:
    E = _load_curve(args.curve)
    b2, b4, b6, b8, c4, c6, disc, j = invariants(E)
    names = ("b2", "b4", "b6", "b8", "c4", "c6", "disc", "j")
    vals = (b2, b4, b6, b8, c4, c6, disc, j)
    obj = {"a": [_q(v) for v in (E.a1, E.a2, E.a3, E.a4, E.a6)]}
    obj.update({k: _q(v) for k, v in zip(names, vals)})
    lines = ["a " + curve_to_text(E)]
    lines += [f"{k} {_q(v)}" for k, v in zip(names, vals)]
    _emit(args, obj, lines)
    return 0


def _cmd_torsion(args) -> int:
    E = _load_curve(args.curve)
    T = torsion_subgroup(E)
    affine = sorted(((P.x, P.y) for P in T.points if not P.is_infinity))
    obj = {"shape": T.shape, "order": T.order,
           "points": [[_q(x), _q(y)] for x, y in affine]}
    lines = [f"shape {T.shape}", f"order {T.order}"]
    lines += [f"point {_q(x)} {_q(y)}" for x, y in affine]
    _emit(args, obj, lines)
    return 0


def _cmd_score_curve(args) -> int:
    E = _load_curve(args.curve)
    score = score_curve(E, args.primes)
    _emit(args, {"prime_bound": args.primes, "score": score},
          [f"score {score}"])
    return 0


def _cmd_sieve_search(args) -> int:
    fam = _load_family(args.family)
    if args.cache:
        tables, skipped = cached_np_tables(fam, args.primes, args.cache,
                                           threads=args.threads)
    else:
        tables, skipped = build_np_tables(fam, args.primes,
                                          threads=args.threads)
    if skipped:
        print("skipped primes: " + " ".join(str(p) for p in skipped),
              file=sys.stderr)
    cfg = SieveConfig(prime_bound=args.primes, t_range=args.range,
                      top_k=args.top, denominator=args.denominator)
    for cand in sieve_search(tables, cfg, threads=args.threads):
        if args.json:
            print(json.dumps({"t": _q(cand.t), "score": cand.score}))
        else:
            print(f"{_q(cand.t)} {cand.score}")
    return 0


def _cmd_verify_family(args) -> int:
    fam = _load_family(args.family)
    ok = verify_sections(fam)
    orders = [section_order(fam, P) if good else None
              for P, good in zip(fam.sections, ok)]
    rows = []
    lines = []
    for i, (good, order) in enumerate(zip(ok, orders)):
        rows.append({"ok": good, "order": order})
        if not good:
            lines.append(f"section {i}: FAIL")
        elif order is None:
            lines.append(f"section {i}: ok, infinite order")
        else:
            lines.append(f"section {i}: ok, order {order}")
    good_count = sum(ok)
    if good_count == len(ok):
        lines.append(f"all {len(ok)} sections verified")
    else:
        lines.append(f"{len(ok) - good_count} of {len(ok)} sections failed")
    _emit(args, {"sections": rows, "all_ok": good_count == len(ok)}, lines)
    return 0 if good_count == len(ok) else 1


def _cmd_rank(args) -> int:
    E = _load_curve(args.curve)
    pts = points_from_text(_read_text(args.points))
    rank, indices, reg = gram_rank(E, pts, eps=args.eps, tol=args.tol,
                                   threads=args.threads)
    obj = {"rank": rank, "independent": list(indices), "regulator": reg}
    lines = [f"rank {rank}",
             "independent " + " ".join(str(i) for i in indices),
             f"regulator {reg}"]
    _emit(args, obj, lines)
    return 0


def _cmd_integral_points(args) -> int:
    E = _load_curve(args.curve)
    gens = points_from_text(_read_text(args.points))
    bound = args.box if args.box is not None else args.cap
    pairs = integral_points_in_span(E, gens, bound)
    if args.json:
        sys.stdout.write(results_json_lines(E, pairs))
    else:
        for x, y in pairs:
            print(f"{_q(x)} {_q(y)}")
    return 0


def _cmd_quartic_search(args) -> int:
    q = quartic_from_text(_read_text(args.quartic).strip())
    pairs = quartic_search(q, args.height, threads=args.threads)
    for x, y in pairs:
        if args.json:
            print(json.dumps({"x": _q(x), "y": _q(y)}))
        else:
            print(f"{_q(x)} {_q(y)}")
    return 0


def _analysis(L: IntLattice):
    rank, disc, even, sig = lattice_invariants(L)
    roots = None
    comps = None
    if sig == (rank, 0) and rank > 0:
        dec = root_decomposition(L)
        roots = dec.root_count
        comps = list(dec.components)
    return rank, disc, even, sig, roots, comps


def _cmd_lattice_analyze(args) -> int:
    L = _load_lattice(args.lattice)
    rank, disc, even, sig, roots, comps = _analysis(L)
    obj = {"rank": rank, "disc": disc, "parity": "even" if even else "odd",
           "signature": list(sig),
           "root_count": roots,
           "components": None if comps is None else [list(c) for c in comps]}
    lines = [f"rank {rank}", f"disc {disc}",
             f"parity {'even' if even else 'odd'}",
             f"signature {sig[0]} {sig[1]}"]
    if roots is not None:
        lines.append(f"roots {roots}")
        lines.append("components " +
                     (" ".join(lbl for lbl, _ in comps) if comps else "none"))
    _emit(args, obj, lines)
    return 0


def _essential_for(value: str) -> IntLattice:
    low = value.strip().lower()
    if low in ("inose", "inose-ns"):
        f, s = fixtures.inose_fs()
        return essential_lattice(fixtures.inose_ns(), f, s)
    # everything else is taken to be the essential lattice already
    return _load_lattice(value)


def _cmd_mw_group(args) -> int:
    N = _essential_for(args.lattice)
    data = mw_group(N)
    shape = _torsion_shape(data.torsion)
    obj = {"essential_rank": N.rank, "mw_rank": data.mw_rank,
           "torsion": list(data.torsion), "torsion_shape": shape}
    lines = [f"essential rank {N.rank}", f"mw-rank {data.mw_rank}",
             f"torsion {shape}"]
    _emit(args, obj, lines)
    return 0


def _cmd_half_holes(args) -> int:
    L = _load_lattice(args.lattice)
    mn = args.min_norm
    if mn.denominator == 1:
        mn = int(mn)
    cosets = half_hole_cosets(L, mn, force=args.force, threads=args.threads)
    obj = {"count": len(cosets),
           "cosets": [{"rep": [_q(c) for c in h.rep],
                       "min_norm": _q(h.min_norm)} for h in cosets]}
    lines = [f"count {len(cosets)}"]
    lines += ["rep " + " ".join(_q(c) for c in h.rep) +
              f" min-norm {_q(h.min_norm)}" for h in cosets]
    _emit(args, obj, lines)
    return 0


def _cmd_neighbor(args) -> int:
    L = _load_lattice(args.lattice)
    M = p_neighbor(L, list(args.vector), args.prime)
    rank, disc, even, sig, roots, comps = _analysis(M)
    if args.json:
        print(json.dumps({"rank": rank, "gram": [list(r) for r in M.gram],
                          "disc": disc,
                          "parity": "even" if even else "odd",
                          "root_count": roots,
                          "components":
                          None if comps is None else [list(c) for c in comps]}))
    else:
        # bare lattice text so the result pipes back into lattice-analyze
        sys.stdout.write(lattice_to_text(M))
    return 0


def _cmd_reconstruct(args) -> int:
    m = args.modulus
    if m <= 0:
        raise ValueError("modulus must be positive")
    q = rational_reconstruct(args.residue % m, m)
    _emit(args, {"value": _q(q), "modulus": m}, [_q(q)])
    return 0


def _cmd_lift(args) -> int:
    system = parse_poly_system(_read_text(args.system))
    if len(args.start) != system.arity:
        raise ValueError(f"system has arity {system.arity}, "
                         f"got {len(args.start)} start values")
    sol = lift_and_recognize(system, args.prime, list(args.start),
                             max_k=args.max_k)
    obj = {"prime": args.prime, "solution": [_q(v) for v in sol]}
    _emit(args, obj, [" ".join(_q(v) for v in sol)])
    return 0


def _cmd_mestre(args) -> int:
    xs = args.tuple
    if len(xs) != 12:
        raise ValueError("need exactly 12 values")
    F = mestre_quintic(xs)
    if F != 0:
        _emit(args, {"quintic": _q(F), "R": None, "A2": None, "A3": None},
              [f"quintic {_q(F)}",
               "no cube-root splitting: the obstruction is nonzero"])
        return 0
    data, cubic, marked = mestre_family(xs)
    obj = {"quintic": "0",
           "R": [_q(c) for c in data.R.coeffs],
           "A2": [_q(c) for c in data.A2.coeffs],
           "A3": [_q(c) for c in data.A3.coeffs],
           "points": len(marked)}
    lines = ["quintic 0",
             "R " + " ".join(_q(c) for c in data.R.coeffs),
             "A2 " + " ".join(_q(c) for c in data.A2.coeffs),
             "A3 " + " ".join(_q(c) for c in data.A3.coeffs),
             f"points {len(marked)}"]
    _emit(args, obj, lines)
    return 0


def _cmd_neron_pencil(args) -> int:
    if len(args.params) != 8:
        raise ValueError("need exactly 8 parameters")
    pen = neron_pencil(args.params)
    from .curves import CUBIC_MONOMIALS
    mono = ["".join(str(e) for e in m) for m in CUBIC_MONOMIALS]
    c0 = [_q(v) for v in pen.C0.vector()]
    c1 = [_q(v) for v in pen.C1.vector()]
    base = [[_q(x), _q(y), _q(z)] for x, y, z in pen.base_points]
    obj = {"monomials": [list(m) for m in CUBIC_MONOMIALS],
           "C0": c0, "C1": c1, "base_points": base}
    lines = ["monomials " + " ".join(mono),
             "C0 " + " ".join(c0),
             "C1 " + " ".join(c1)]
    lines += ["base " + " ".join(pt) for pt in base]
    _emit(args, obj, lines)
    return 0


FIXTURE_NAMES = ("rank28-curve", "z4-family", "shioda-family",
                 "sextic-points", "shimura-check", "inose-ns", "d16plus",
                 "fiber-tables")


def _cmd_fixtures(args) -> int:
    name = args.name
    if name is None:
        _emit(args, {"names": list(FIXTURE_NAMES)}, FIXTURE_NAMES)
        return 0
    if name == "rank28-curve":
        line = curve_to_text(fixtures.rank28_curve())
        _emit(args, {"curve": line}, [line])
        return 0
    if name == "z4-family":
        text = family_to_text(fixtures.z4_family())
        _emit(args, {"family": text, "special_t": _q(fixtures.Z4_SPECIAL_T)},
              [text.rstrip("\n")])
        return 0
    if name == "shioda-family":
        text = family_to_text(fixtures.shioda_family(args.n))
        _emit(args, {"family": text, "n": args.n}, [text.rstrip("\n")])
        return 0
    if name == "sextic-points":
        pts = fixtures.sextic_points()
        _emit(args, {"points": [[_q(t), _q(u)] for t, u in pts]},
              [f"{_q(t)} {_q(u)}" for t, u in pts])
        return 0
    if name == "shimura-check":
        pts = fixtures.sextic_points()
        rows = []
        lines = []
        bad = 0
        for t, u in pts:
            r = u * u - fixtures.SEXTIC(t)
            rows.append({"t": _q(t), "u": _q(u), "residual": _q(r)})
            lines.append(f"t={_q(t)} u={_q(u)} residual {_q(r)}")
            bad += r != 0
        lines.append("all points satisfy u^2 = 16t^6 - 19t^4 + 88t^2 - 48"
                     if bad == 0 else f"{bad} points FAILED the sextic check")
        _emit(args, {"ok": bad == 0, "points": rows}, lines)
        return 0 if bad == 0 else 1
    if name in ("inose-ns", "d16plus"):
        L = fixtures.inose_ns() if name == "inose-ns" else fixtures.d16_plus()
        text = lattice_to_text(L)
        _emit(args, {"lattice": text}, [text.rstrip("\n")])
        return 0
    # fiber-tables
    rows = [{"torsion": e.torsion, "fibers": e.fibers, "bound": e.bound}
            for e in K3_FIBER_TABLE.values()]
    lines = [f"torsion {e.torsion}: fibers {e.fibers}, bound {e.bound}"
             for e in K3_FIBER_TABLE.values()]
    lines.append("singular bound(d) = 10d - 2")
    lines.append("discriminants " +
                 " ".join(str(d) for d in THIRTEEN_DISCRIMINANTS))
    _emit(args, {"fiber_table": rows, "bound_rule": "10*d - 2",
                 "discriminants": list(THIRTEEN_DISCRIMINANTS)}, lines)
    return 0


# --------------------------------- parser ----------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="hirank",
        description="exact arithmetic for high-rank elliptic curves")
    sub = top.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="machine-readable output")
    threaded = argparse.ArgumentParser(add_help=False)
    threaded.add_argument("--threads", type=int, default=None,
                          help="worker count (default: HIRANK_THREADS or 1)")

    p = sub.add_parser("curve-info", parents=[common],
                       help="b-, c-invariants, discriminant and j")
    p.add_argument("curve", help="curve line `a1 a2 a3 a4 a6`, file, or -")
    p.set_defaults(func=_cmd_curve_info)

    p = sub.add_parser("torsion", parents=[common],
                       help="torsion subgroup of a rational curve")
    p.add_argument("curve")
    p.set_defaults(func=_cmd_torsion)

    p = sub.add_parser("score-curve", parents=[common],
                       help="reduction-count score of one curve")
    p.add_argument("curve")
    p.add_argument("--primes", type=int, required=True, metavar="B",
                   help="use primes p < B")
    p.set_defaults(func=_cmd_score_curve)

    p = sub.add_parser("sieve-search", parents=[common, threaded],
                       help="score a family over an integer t-range")
    p.add_argument("family", help="family text, file, or -")
    p.add_argument("--primes", type=int, required=True, metavar="B")
    p.add_argument("--range", type=_range_pair, required=True,
                   metavar="T0:T1")
    p.add_argument("--denominator", type=int, default=1, metavar="D",
                   help="score at t = n/D instead of integers")
    p.add_argument("--top", type=int, default=20, metavar="K")
    p.add_argument("--cache", default=None, metavar="PATH",
                   help="reuse prime tables across runs")
    p.set_defaults(func=_cmd_sieve_search)

    p = sub.add_parser("verify-family", parents=[common],
                       help="check every stored section identically")
    p.add_argument("family")
    p.set_defaults(func=_cmd_verify_family)

    p = sub.add_parser("rank", parents=[common, threaded],
                       help="certified lower rank bound from heights")
    p.add_argument("curve")
    p.add_argument("--points", required=True,
                   help="point list `x y` per line (file, literal, or -)")
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("integral-points", parents=[common],
                       help="integral points in the span of given points")
    p.add_argument("curve")
    p.add_argument("--points", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--box", type=int, default=None, metavar="N",
                   help="coefficient box |n_i| <= N")
    g.add_argument("--cap", type=float, default=None, metavar="H",
                   help="canonical height cap")
    p.set_defaults(func=_cmd_integral_points)

    p = sub.add_parser("quartic-search", parents=[common, threaded],
                       help="rational points on y^2 = quartic(x)")
    p.add_argument("quartic",
                   help="line `q0 q1 q2 q3 q4` (constant term first), "
                        "file, or -")
    p.add_argument("--height", type=int, required=True, metavar="H")
    p.set_defaults(func=_cmd_quartic_search)

    p = sub.add_parser("lattice-analyze", parents=[common],
                       help="invariants and root system of a lattice")
    p.add_argument("lattice",
                   help="name (E8, D16, U, inose-ns, d16plus, E8^3, ...), "
                        "file, or lattice text")
    p.set_defaults(func=_cmd_lattice_analyze)

    p = sub.add_parser("mw-group", parents=[common],
                       help="Mordell-Weil rank/torsion from an essential "
                            "lattice")
    p.add_argument("lattice",
                   help="essential lattice (or `inose-ns` to derive it)")
    p.set_defaults(func=_cmd_mw_group)

    p = sub.add_parser("half-holes", parents=[common, threaded],
                       help="deep-hole classes of L/2L above a norm bound")
    p.add_argument("lattice")
    p.add_argument("--min-norm", type=_fraction, required=True, metavar="Q")
    p.add_argument("--force", action="store_true",
                   help="allow rank > 12 (2^rank cosets)")
    p.set_defaults(func=_cmd_half_holes)

    p = sub.add_parser("neighbor", parents=[common],
                       help="p-neighbor lattice at an isotropic vector")
    p.add_argument("lattice")
    p.add_argument("--vector", type=_int_vector, required=True, metavar="V",
                   help="coordinates, comma or space separated")
    p.add_argument("--prime", type=int, required=True, metavar="P")
    p.set_defaults(func=_cmd_neighbor)

    p = sub.add_parser("reconstruct", parents=[common],
                       help="rational number from a residue")
    p.add_argument("residue", type=int)
    p.add_argument("modulus", type=int)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("lift", parents=[common],
                       help="p-adic Newton lift to an exact rational root")
    p.add_argument("system",
                   help="polynomial system, one poly per line of "
                        "`coeff:e1,...,en` terms (file, literal, or -)")
    p.add_argument("--prime", type=int, required=True, metavar="P")
    p.add_argument("--start", type=_int_vector, required=True, metavar="X0",
                   help="approximate root mod P, comma separated")
    p.add_argument("--max-k", type=int, default=256,
                   help="give up beyond precision P^K")
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("mestre", parents=[common],
                       help="cube-root splitting of prod(X - x_i)")
    p.add_argument("tuple", type=_fraction_vector,
                   help="12 rationals, comma or space separated")
    p.set_defaults(func=_cmd_mestre)

    p = sub.add_parser("neron-pencil", parents=[common],
                       help="pencil of cubics through points of a cuspidal "
                            "cubic")
    p.add_argument("params", type=_fraction_vector,
                   help="8 rationals u_1..u_8, comma or space separated")
    p.set_defaults(func=_cmd_neron_pencil)

    p = sub.add_parser("fixtures", parents=[common],
                       help="list or emit the built-in reference data")
    p.add_argument("name", nargs="?", choices=FIXTURE_NAMES, default=None)
    p.add_argument("--n", type=int, default=6,
                   help="parameter for shioda-family")
    p.set_defaults(func=_cmd_fixtures)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except (ValueError, KeyError, ArithmeticError, RuntimeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
