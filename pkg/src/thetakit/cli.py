"""``thetakit``: enumeration, factorization, presheaves and verifiers from the shell.

Exit codes: 0 pass, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import presheaf as ps
from . import verify as vf
from .core import (
    MultiMorphism, TermError, morphism_to_json, parse_morphism, parse_term, render_object, sections,
)


class UsageError(Exception):
    pass


def _nonneg(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _common(p, degree=True):
    p.add_argument("--level", "-k", type=_nonneg, default=2, help="how many times Theta is applied (default 2)")
    p.add_argument("--inner", choices=("terminal", "delta"), default="terminal",
                   help="category Theta is applied to (default terminal)")
    if degree:
        p.add_argument("--max-degree", "-D", type=_nonneg, default=4, help="degree bound (default 4)")
    p.add_argument("--format", choices=("text", "json"), default=None,
                   help="output format (default $THETAKIT_FORMAT or text)")


def build_parser():
    parser = argparse.ArgumentParser(prog="thetakit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("objects", help="objects of degree <= D in canonical order")
    _common(p)

    p = sub.add_parser("hom", help="all morphisms between two objects")
    _common(p, degree=False)
    p.add_argument("dom")
    p.add_argument("cod")

    p = sub.add_parser("compose", help="g . f for f: A -> B and g: B -> C (JSON morphisms)")
    _common(p, degree=False)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("f")
    p.add_argument("g")

    p = sub.add_parser("factorize", help="minus-then-plus factorization of a family")
    _common(p, degree=False)
    p.add_argument("dom")
    p.add_argument("--member", nargs=2, action="append", default=[], metavar=("COD", "MOR"),
                   help="one family member (repeatable; none means the empty family)")

    p = sub.add_parser("sections", help="right inverses of a morphism")
    _common(p, degree=False)
    p.add_argument("dom")
    p.add_argument("cod")
    p.add_argument("mor")

    p = sub.add_parser("equiv-delta", help="the dictionary between Theta(1) and Delta")
    p.add_argument("--max-degree", "-D", type=_nonneg, default=4)
    p.add_argument("--valence", "-U", type=_nonneg, default=1)
    p.add_argument("--format", choices=("text", "json"), default=None)

    p = sub.add_parser("verify", help="run a verifier")
    vsub = p.add_subparsers(dest="check", required=True)
    for name in ("category", "multireedy", "ez", "sp", "fclasses", "idempotents"):
        q = vsub.add_parser(name)
        _common(q)
        q.add_argument("--valence", "-U", type=_nonneg, default=2)
        q.add_argument("--jobs", type=int, default=1)
        q.add_argument("--sample", type=int, default=None, metavar="SEED",
                       help="also run seeded random checks above the bound (never affects the verdict)")
    q = vsub.add_parser("prism", help="plus families in Delta against non-degenerate product cells")
    q.add_argument("m", type=_nonneg)
    q.add_argument("factors", type=_nonneg, nargs="+")
    q.add_argument("--format", choices=("text", "json"), default=None)

    p = sub.add_parser("presheaf", help="generate and analyse tabulated presheaves")
    psub = p.add_subparsers(dest="action", required=True)
    for name, helptext in (("yoneda", "representable presheaf F c"),
                           ("product", "product of representables"),
                           ("boundary", "boundary of a representable"),
                           ("pushout", "pushout of F sigma1 and F sigma2 (objects C D1 D2, --maps M1 M2)")):
        q = psub.add_parser(name, help=helptext)
        _common(q)
        q.add_argument("--objects", nargs="+", required=True)
        if name == "pushout":
            q.add_argument("--maps", nargs=2, required=True)
        q.add_argument("--out", help="write the presheaf here instead of stdout")
    for name in ("classify", "latching", "check-e", "relmono"):
        q = psub.add_parser(name)
        q.add_argument("--file", required=True)
        q.add_argument("--format", choices=("text", "json"), default=None)
        if name in ("latching", "check-e"):
            q.add_argument("--objects", nargs="*", default=None, help="restrict to these objects")
        if name == "relmono":
            q.add_argument("--target", required=True, help="presheaf containing --file pointwise")
    return parser


# -- helpers -----------------------------------------------------------------

def _oracle(args):
    return ps.shared_oracle(args.level, args.inner)


def _object(oracle, text):
    obj = parse_term(text, level=_level(oracle))
    if obj not in oracle.objects(oracle.degree(obj)):
        raise UsageError(f"{text} is not an object of {oracle.name}")
    return obj


def _level(oracle):
    level, _ = ps.oracle_signature(oracle)
    return level


def _morphism(oracle, text, dom, cod):
    try:
        f = parse_morphism(text, dom, cod)
    except json.JSONDecodeError as err:
        raise UsageError(f"bad morphism JSON: {err}") from None
    if f not in oracle.hom(dom, cod):
        raise UsageError(f"{text} is not a morphism {render_object(dom)} -> {render_object(cod)}")
    return f


def _mor_json(f):
    return {"dom": render_object(f.dom), "cod": render_object(f.cod), "mor": morphism_to_json(f)}


def _compact(data):
    return json.dumps(data, separators=(",", ":"))


def _emit(fmt, data, text_lines):
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    return "".join(line + "\n" for line in text_lines)


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return ps.loads(fh.read())


# -- commands ----------------------------------------------------------------

def cmd_objects(args, fmt):
    oracle = _oracle(args)
    objs = [render_object(c) for c in oracle.objects(args.max_degree)]
    data = {"oracle": oracle.name, "max_degree": args.max_degree, "count": len(objs), "objects": objs}
    return 0, _emit(fmt, data, objs)


def cmd_hom(args, fmt):
    oracle = _oracle(args)
    c, d = _object(oracle, args.dom), _object(oracle, args.cod)
    homs = [morphism_to_json(f) for f in oracle.hom(c, d)]
    data = {"dom": render_object(c), "cod": render_object(d), "count": len(homs), "morphisms": homs}
    return 0, _emit(fmt, data, [_compact(f) for f in homs])


def cmd_compose(args, fmt):
    oracle = _oracle(args)
    a, b, c = (_object(oracle, t) for t in (args.a, args.b, args.c))
    f = _morphism(oracle, args.f, a, b)
    g = _morphism(oracle, args.g, b, c)
    h = oracle.compose(g, f)
    return 0, _emit(fmt, _mor_json(h), [_compact(morphism_to_json(h))])


def cmd_factorize(args, fmt):
    oracle = _oracle(args)
    c = _object(oracle, args.dom)
    members = []
    for cod, mor in args.member:
        members.append(_morphism(oracle, mor, c, _object(oracle, cod)))
    fam = MultiMorphism(c, tuple(members))
    fact = oracle.factorize(fam)
    data = {
        "family": [_mor_json(f) for f in members],
        "plus": oracle.is_plus(fam),
        "minus": _mor_json(fact.minus),
        "middle": render_object(fact.middle),
        "plus_part": [_mor_json(h) for h in fact.plus],
    }
    lines = [f"middle: {data['middle']}",
             f"minus: {_compact(morphism_to_json(fact.minus))}"]
    lines += [f"plus[{i}]: {_compact(morphism_to_json(h))} -> {render_object(h.cod)}"
              for i, h in enumerate(fact.plus)]
    lines.append(f"family is plus: {str(data['plus']).lower()}")
    return 0, _emit(fmt, data, lines)


def cmd_sections(args, fmt):
    oracle = _oracle(args)
    c, d = _object(oracle, args.dom), _object(oracle, args.cod)
    f = _morphism(oracle, args.mor, c, d)
    found = [morphism_to_json(b) for b in sections(oracle, f)]
    data = {"morphism": _mor_json(f), "minus": oracle.is_minus(f), "count": len(found), "sections": found}
    return 0, _emit(fmt, data, [_compact(b) for b in found])


def _report(report, fmt):
    out = report.to_json() + "\n" if fmt == "json" else report.to_text() + "\n"
    return (0 if report.passed else 1), out


def cmd_equiv(args, fmt):
    return _report(vf.verify_theta1_delta(args.max_degree, args.valence), fmt)


def cmd_verify(args, fmt):
    if args.check == "prism":
        return _report(vf.prism_correspondence(args.m, args.factors), fmt)
    oracle = _oracle(args)
    D, U = args.max_degree, args.valence
    if args.check == "category":
        report = vf.verify_category(oracle, D)
    elif args.check == "multireedy":
        report = vf.verify_multi_reedy(oracle, D, U, jobs=args.jobs, sample=args.sample)
    elif args.check == "ez":
        report = vf.verify_ez(oracle, D)
    elif args.check == "sp":
        report = vf.verify_elegance_sp(oracle, D)
    elif args.check == "fclasses":
        report = vf.verify_F_classes(oracle, D, U)
    else:
        report = vf.verify_idempotents(oracle, D)
    return _report(report, fmt)


def cmd_presheaf(args, fmt):
    action = args.action
    if action in ("yoneda", "product", "boundary", "pushout"):
        oracle = _oracle(args)
        objs = [_object(oracle, t) for t in args.objects]
        N = args.max_degree
        if action == "yoneda":
            if len(objs) != 1:
                raise UsageError("yoneda takes exactly one object")
            X = ps.yoneda(oracle, objs[0], N)
        elif action == "boundary":
            if len(objs) != 1:
                raise UsageError("boundary takes exactly one object")
            X = ps.boundary(oracle, objs[0], N)
        elif action == "product":
            X = ps.product_presheaf(*(ps.yoneda(oracle, c, N) for c in objs))
        else:
            if len(objs) != 3:
                raise UsageError("pushout takes objects C D1 D2")
            c, d1, d2 = objs
            s1 = _morphism(oracle, args.maps[0], c, d1)
            s2 = _morphism(oracle, args.maps[1], c, d2)
            X, _, _ = ps.pushout_presheaf(ps.representable_map(oracle, s1, N),
                                          ps.representable_map(oracle, s2, N))
        text = ps.dumps(X)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            return 0, ""
        return 0, text

    X = _load(args.file)
    oracle = X.oracle
    if action == "classify":
        pc = ps.classify_points(X)
        rows = [{"object": render_object(c), "points": X.size(c),
                 "nondegenerate": len(pc.nondegenerate[c]), "degenerate": len(pc.degenerate[c])}
                for c in X.objects]
        data = {"objects": rows, "nondegenerate_counts": pc.nd_counts()}
        lines = [f"{r['object']}: {r['points']} points, {r['nondegenerate']} non-degenerate, "
                 f"{r['degenerate']} degenerate" for r in rows]
        lines.append("non-degenerate counts: " + " ".join(map(str, pc.nd_counts())))
        return 0, _emit(fmt, data, lines)

    objs = X.objects if not getattr(args, "objects", None) else [_object(oracle, t) for t in args.objects]
    if action == "latching":
        pc = ps.classify_points(X)
        rows = []
        for c in objs:
            L = ps.latching(X, c, pc)
            rows.append({"object": render_object(c), "size": len(L), "degenerate": len(L.degenerate),
                         "q_injective": L.q_injective, "q_surjective": L.q_surjective,
                         "q_bijective": L.q_bijective})
        ok = all(r["q_bijective"] for r in rows)
        lines = [f"{r['object']}: latching size {r['size']}, degenerate {r['degenerate']}, "
                 f"q bijective: {str(r['q_bijective']).lower()}" for r in rows]
        return (0 if ok else 1), _emit(fmt, {"objects": rows, "q_bijective": ok}, lines)

    if action == "check-e":
        pc = ps.classify_points(X)
        rows = []
        for c in objs:
            verdict = ps.check_e_prime(X, c, pc)
            bad = [ps.point_label(x) for x in X(c) if not ps.ez_decompose(X, c, x, pc).unique]
            rows.append({"object": render_object(c), "e_prime": bool(verdict), "witness": verdict.witness,
                         "non_unique_points": bad})
        ok = all(r["e_prime"] and not r["non_unique_points"] for r in rows)
        lines = [f"{r['object']}: E' {'holds' if r['e_prime'] else 'fails'}"
                 + (f", witness {_compact(r['witness'])}" if r["witness"] else "") for r in rows]
        return (0 if ok else 1), _emit(fmt, {"objects": rows, "holds": ok}, lines)

    # relmono
    Y = _load(args.target)
    f = ps.inclusion(X, Y)
    rows = []
    for c in X.objects:
        verdict = ps.relative_latching_mono(f, c)
        rows.append({"object": render_object(c), "mono": bool(verdict), "witness": verdict.witness})
    ok = all(r["mono"] for r in rows)
    lines = [f"{r['object']}: relative latching map {'injective' if r['mono'] else 'not injective'}"
             for r in rows]
    return (0 if ok else 1), _emit(fmt, {"objects": rows, "mono": ok}, lines)


COMMANDS = {
    "objects": cmd_objects,
    "hom": cmd_hom,
    "compose": cmd_compose,
    "factorize": cmd_factorize,
    "sections": cmd_sections,
    "equiv-delta": cmd_equiv,
    "verify": cmd_verify,
    "presheaf": cmd_presheaf,
}


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or os.environ.get("THETAKIT_FORMAT", "text")
    if fmt not in ("text", "json"):
        parser.error(f"THETAKIT_FORMAT must be text or json, not {fmt!r}")
    try:
        code, out = COMMANDS[args.command](args, fmt)
    except ps.PresheafError as err:
        # the input presheaf itself fails a check: report it like any other failure
        data = {"verdict": "fail", "error": str(err.args[0]), "witness": err.witness}
        stdout.write(_emit(fmt, data, [f"FAIL: {err.args[0]}", "witness: " + _compact(err.witness)]))
        return 1
    except (UsageError, TermError, OSError, KeyError) as err:
        message = err.args[0] if isinstance(err, KeyError) and err.args else err
        print(f"thetakit: error: {message}", file=sys.stderr)
        return 2
    stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
