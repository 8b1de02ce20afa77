"""Command-line front end.

Exit codes: 0 success, 1 a checked property fails (or the input is not a valid
loop), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis as an
from . import automorphism as au
from . import io
from . import terms as tm
from .doubling import (
    LoopError,
    build_chein,
    build_general,
    build_Qn,
    double,
    q0,
    validate_params,
)
from .involution import classify_involution
from .loop import structure_sets


class UsageError(Exception):
    pass


def _names(L, xs):
    return [L.name(int(x)) for x in sorted(xs)]


def _element(L, name: str) -> int:
    try:
        return L.index(name)
    except (KeyError, ValueError):
        raise UsageError(f"no element named {name!r}") from None


def _emit_loop(args, L, inv):
    text = io.dumps(L, inv)
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return {"order": L.order}


# --- verbs --------------------------------------------------------------------


def cmd_show(args):
    L, inv = io.read(args.loop)
    width = max(len(s) for s in L.names)
    print(f"order: {L.order}")
    print(" " * (width + 1) + " ".join(s.rjust(width) for s in L.names))
    for a in range(L.order):
        row = " ".join(L.name(int(v)).rjust(width) for v in L.table[a])
        print(f"{L.name(a).rjust(width)} {row}")
    if inv is not None:
        print("involution: " + ", ".join(f"{L.name(a)}*={L.name(int(inv.perm[a]))}" for a in range(L.order)))
    return 0, {"order": L.order, "names": list(L.names)}


def cmd_check(args):
    try:
        L, inv = io.read(args.loop)
    except LoopError as exc:
        print(f"invalid: {exc}")
        return 1, {"valid": False, "error": str(exc)}
    print(f"valid loop of order {L.order}" + (" with involution" if inv is not None else ""))
    out = {"valid": True}
    code = 0
    if args.property:
        rep = an.property_report(L, inv)
        flags = rep.as_dict()
        for p in args.property:
            if p not in an.FLAGS:
                raise UsageError(f"unknown property {p!r}; choose from {', '.join(an.FLAGS)}")
            val = flags[p]
            w = rep.witness.get(p)
            extra = "" if w is None else " witness (" + ", ".join(L.name(int(x)) for x in w) + ")"
            print(f"{p}: {val}{extra}")
            out[p] = val
            if not val:
                code = 1
    return code, out


def cmd_double(args):
    L, inv = io.read(args.loop)
    if inv is None:
        raise UsageError("doubling needs a loop file with an involution")
    g = _element(L, args.gamma)
    e = None if args.epsilon in (None, "none") else _element(L, args.epsilon)
    params = validate_params(L, inv, g, e)
    D = double(L, inv, params, args.gen)
    return 0, _emit_loop(args, D.M, D.star)


def cmd_qn(args):
    if args.n == 0:
        L, inv = q0()
    else:
        d = build_Qn(args.n)[-1]
        L, inv = d.M, d.star
    return 0, _emit_loop(args, L, inv)


def cmd_chein(args):
    G, _ = io.read(args.group)
    D = build_chein(G)
    return 0, _emit_loop(args, D.M, D.star)


def cmd_general(args):
    exps = [int(x) for x in args.gammas.split(",") if x.strip()]
    if not exps:
        raise UsageError("--gammas needs at least one exponent")
    d = build_general(args.m, exps)[-1]
    return 0, _emit_loop(args, d.M, d.star)


def cmd_analyze(args):
    L, inv = io.read(args.loop)
    s = structure_sets(L)
    rep = an.property_report(L, inv)
    print(f"order: {L.order}")
    for label, S in (
        ("left nucleus", s.nuc_left),
        ("middle nucleus", s.nuc_mid),
        ("right nucleus", s.nuc_right),
        ("nucleus", s.nucleus),
        ("commutant", s.commutant),
        ("center", s.center),
    ):
        print(f"{label}: {{{', '.join(_names(L, S))}}}")
    print(f"derived subloop order: {s.derived.order}")
    print(f"dim: {'undefined' if s.dim is None else s.dim}")
    out = {"order": L.order, "center": _names(L, s.center), "dim": s.dim, "properties": rep.as_dict()}
    for k in an.FLAGS:
        v = getattr(rep, k)
        if v is None:
            continue
        w = rep.witness.get(k)
        extra = "" if w is None else "  witness (" + ", ".join(L.name(int(x)) for x in w) + ")"
        print(f"{k}: {str(v).lower()}{extra}")
    if inv is not None:
        c = classify_involution(L, inv)
        inv_out = {
            "central": c.is_central,
            "super_central": c.is_super_central,
            "normal": c.is_normal,
            "anti_symmetric": c.is_anti_symmetric,
            "symmetric_center": _names(L, c.symmetric_center),
        }
        for k, v in inv_out.items():
            print(f"involution {k.replace('_', '-')}: {v if isinstance(v, list) else str(v).lower()}")
        out["involution"] = inv_out
    if args.fast_dias:
        try:
            ok, w = an.diassociative_fast(L, with_witness=True)
        except an.NotInZAE2 as exc:
            print(f"fast diassociativity: not applicable ({exc})")
        else:
            extra = "" if w is None else "  witness [" + ",".join(L.name(int(x)) for x in w[2:]) + "]"
            print(f"fast diassociativity: {str(ok).lower()}{extra}")
            out["diassociative_fast"] = ok
    if args.moufang_double:
        if inv is None or args.gamma is None:
            raise UsageError("--moufang-double needs an involution and --gamma")
        r = an.moufang_double_report(L, inv, _element(L, args.gamma))
        for k, v in r.conditions.items():
            print(f"condition {k}: {str(v).lower()}")
        print(f"predicted moufang double: {str(r.predicted).lower()}")
        print(f"actual moufang double: {str(r.actual).lower()}")
        out["moufang_double"] = {"conditions": r.conditions, "predicted": r.predicted, "actual": r.actual}
    return 0, out


def cmd_aut(args):
    L, inv = io.read(args.loop)
    flavor = "plain"
    eps = None
    if args.fix_epsilon is not None:
        flavor, eps = "star_fixing", _element(L, args.fix_epsilon)
    elif args.star:
        flavor = "star"
    if flavor != "plain" and inv is None:
        raise UsageError("--star needs a loop file with an involution")
    A = au.automorphism_group(L, inv, flavor, eps)
    print(f"order: {A.order}")
    print(f"generators: {len(A.generators)}")
    for g in A.generators:
        moved = [f"{L.name(x)}->{L.name(g[x])}" for x in range(L.order) if g[x] != x]
        print("  " + (", ".join(moved) or "identity"))
    out = {"order": A.order, "flavor": flavor, "generators": [list(g) for g in A.generators]}
    if args.linear_action:
        act = au.induced_linear_action(L, A)
        print(f"linear action: image order {act.image_order}, faithful {str(act.faithful).lower()}, "
              f"kernel size {len(act.kernel)}")
        gens = A.generators
        for i, g in enumerate(gens):
            m = au._matrix(an.central_quotient(L), g)
            print(f"  generator {i}: " + " ".join("".join(str(int(b)) for b in row) for row in m))
        out["linear_action"] = {"image_order": act.image_order, "faithful": act.faithful, "kernel": len(act.kernel)}
    return 0, out


def _variety(spec: str) -> tm.VarietySpec:
    if spec in tm.NAMED_VARIETIES:
        return tm.NAMED_VARIETIES[spec]
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"no identity file or named variety {spec!r}")
    return tm.load_variety(path)


def cmd_variety(args):
    V = _variety(args.ids)
    if args.action == "derive":
        out = []
        for ident in V.identities:
            print(f"{ident}:")
            for e in tm.expand_derivative_identities(ident):
                print(f"  {e}")
                out.append(str(e))
        return 0, {"identities": out}
    if args.loop is None:
        raise UsageError("variety check needs a loop file")
    L, inv = io.read(args.loop)
    if args.derivative:
        if inv is None:
            raise UsageError("--derivative needs an involution")
        L, inv = tm.unit_double(L, inv)
    fails = tm.variety_failures(L, inv, V)
    for ident in V.identities:
        hit = next((w for i, w in fails if i is ident), None)
        if hit is None:
            print(f"{ident}: holds")
        else:
            print(f"{ident}: fails at " + ", ".join(f"{k}={L.name(v)}" for k, v in hit.items()))
    member = not fails
    print(f"member: {str(member).lower()}")
    return (0 if member else 1), {"member": member, "failures": [str(i) for i, _ in fails]}


def cmd_term(args):
    t = tm.parse_term(args.term)
    marks = [m for m in (args.marks or "").split(",") if m]
    d = tm.degrees(t, marks)
    print(f"term: {tm.to_text(t)}")
    print(f"dj: {d.dj}")
    print(f"dgamma: {d.dgamma}")
    print(f"deps: {d.deps}")
    return 0, {"term": tm.to_text(t), "dj": d.dj, "dgamma": d.dgamma, "deps": d.deps}


def cmd_kirsh(args):
    chain = build_Qn(4)
    rep = an.kirsh_refutation(chain[2], chain[3])
    for line in rep.lines(chain[2].M, chain[3].M):
        print(line)
    return 0, {"refuted": rep.refuted, "assoc": chain[3].M.name(rep.assoc_triple)}


def cmd_paper_check(args):
    from .paper_check import paper_check, select

    try:
        select(args.only)
    except KeyError as exc:
        raise UsageError(f"unknown criterion {exc}") from None
    results = paper_check(args.only)
    for r in results:
        print(r.line())
        if args.verbose or not r.passed:
            for d in r.details:
                print(f"    {d}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed} passed, {failed} failed")
    return (1 if failed else 0), {"criteria": [r.as_dict() for r in results]}


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdloops", description="Finite loops with involution and their doubles.")
    p.add_argument("--json-out", metavar="PATH", help="also write a machine-readable result here")
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")

    def loop_arg(sp, name="loop"):
        sp.add_argument(name, help="loop exchange file, or - for stdin")

    def out_arg(sp):
        sp.add_argument("-o", "--output", help="write the loop here instead of stdout")

    s = sub.add_parser("show", help="print the Cayley table")
    loop_arg(s)
    s.set_defaults(func=cmd_show)

    s = sub.add_parser("check", help="validate a loop file, optionally test properties")
    loop_arg(s)
    s.add_argument("--property", action="append", help="property flag to require (repeatable)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("double", help="Cayley-Dickson double of a loop with involution")
    loop_arg(s)
    s.add_argument("--gamma", required=True, help="name of the central element gamma")
    s.add_argument("--epsilon", default=None, help="name of epsilon, or none")
    s.add_argument("--gen", default="j", help="name of the new generator")
    out_arg(s)
    s.set_defaults(func=cmd_double)

    s = sub.add_parser("qn", help="the Cayley-Dickson loop Q_n")
    s.add_argument("n", type=int)
    out_arg(s)
    s.set_defaults(func=cmd_qn)

    s = sub.add_parser("chein", help="Chein double M(G, 2) of a group")
    loop_arg(s, "group")
    out_arg(s)
    s.set_defaults(func=cmd_chein)

    s = sub.add_parser("general", help="iterated doubles over a cyclic center Z_m")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--gammas", required=True, help="comma-separated exponents of w")
    out_arg(s)
    s.set_defaults(func=cmd_general)

    s = sub.add_parser("analyze", help="structure and property report")
    loop_arg(s)
    s.add_argument("--fast-dias", action="store_true", help="finite-basis diassociativity test")
    s.add_argument("--moufang-double", action="store_true", help="Moufang conditions for the double")
    s.add_argument("--gamma", help="gamma for --moufang-double")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("aut", help="automorphism group")
    loop_arg(s)
    s.add_argument("--star", action="store_true", help="only automorphisms commuting with the involution")
    s.add_argument("--fix-epsilon", metavar="NAME", help="... and fixing this element")
    s.add_argument("--linear-action", action="store_true", help="print the action on L/Z(L)")
    s.set_defaults(func=cmd_aut)

    s = sub.add_parser("variety", help="variety membership and derivative expansion")
    s.add_argument("action", choices=["check", "derive"])
    s.add_argument("loop", nargs="?", help="loop file (for check)")
    s.add_argument("--ids", required=True, help="identity file or named variety")
    s.add_argument("--derivative", action="store_true", help="check D(L,*,1,1) instead of L")
    s.set_defaults(func=cmd_variety)

    s = sub.add_parser("term", help="term utilities")
    s.add_argument("action", choices=["degrees"])
    s.add_argument("term")
    s.add_argument("--marks", default="", help="comma-separated variables standing for Lj elements")
    s.set_defaults(func=cmd_term)

    s = sub.add_parser("kirsh", help="the octonion subloop counterexample in Q4")
    s.set_defaults(func=cmd_kirsh)

    s = sub.add_parser("paper-check", help="run the reproduction suite")
    s.add_argument("--only", action="append", help="criterion key or number (repeatable)")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_paper_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.func(args)
    except UsageError as exc:
        print(f"cdloops: error: {exc}", file=sys.stderr)
        return 2
    except (LoopError, tm.TermSyntaxError, ValueError) as exc:
        print(f"cdloops: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, tm.TermSyntaxError) else 1
    except FileNotFoundError as exc:
        print(f"cdloops: error: {exc}", file=sys.stderr)
        return 2
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
