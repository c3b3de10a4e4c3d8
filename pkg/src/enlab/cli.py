"""``enlab`` command line.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 a differential
did not square to zero.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import verify
from .algdata import AlgebraError, builtin, load_algebra, make_module, validate
from .coeffsys import dual_loday, leaves_functor, loday, representable
from .encomplex import build_chain, build_cochain, homology_table
from .epicat import MorphismError, enumerate_hom
from .exactla import FieldError, NotAComplexError, QQ, parse_field
from .trees import Tree, TreeError, corolla, enumerate_by_degree, enumerate_trees, linear_tree, tree_from_json

SUITES = ("d2", "multicomplex", "oracle", "hochschild", "projective", "bstar", "duality", "category")


class InputError(ValueError):
    pass


def _positive(name: str, minimum: int):
    def parse(raw: str) -> int:
        try:
            v = int(raw)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {raw!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"{name} must be >= {minimum}, got {v}")
        return v

    return parse


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=_positive("--n", 1), default=1, help="number of tree levels")
    p.add_argument("--max-degree", type=_positive("--max-degree", 1), default=4, dest="max_degree")
    p.add_argument("--field", default=None, help="Q or F:p")
    p.add_argument("--algebra", help="algebra JSON file")
    p.add_argument("--builtin", help="builtin algebra NAME[:PARAM]")
    p.add_argument("--module", default=None, help="trivial, A, or a module JSON file")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enlab", description="Exact E_n-homology of tree functors.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("homology", "cohomology"):
        p = sub.add_parser(name, help="Betti numbers of the Loday functor (cohomology: its dual)")
        _common(p)
        p.add_argument("--cohomology", action="store_true", help="use the cochain complex")

    p = sub.add_parser("trees", help="list trees by degree or signature")
    _common(p)
    p.add_argument("--degree", type=_positive("--degree", 0))
    p.add_argument("--signature", help="comma separated r_1,...,r_n")
    p.add_argument("--count-only", action="store_true", dest="count_only")

    p = sub.add_parser("homset", help="list morphisms between two trees")
    _common(p)
    p.add_argument("--source", required=True, help="C<k>, L, or a JSON tree")
    p.add_argument("--target", required=True, help="C<k>, L, or a JSON tree")
    p.add_argument("--count-only", action="store_true", dest="count_only")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.add_argument("--tree", help="tree literal for the projective suite")
    p.add_argument(
        "--system",
        choices=("loday", "dual_loday", "leaves", "representable"),
        default="loday",
        help="coefficient system for d2 and multicomplex",
    )
    p.add_argument("--trials", type=_positive("--trials", 1), default=1000)
    return parser


def parse_tree(raw: str, n: int) -> Tree:
    """``C<k>`` (corolla with k leaves), ``L`` (linear tree), or a JSON literal."""
    s = raw.strip()
    m = re.fullmatch(r"[Cc](\d+)", s)
    if m:
        return corolla(n, int(m.group(1)))
    if s.upper() == "L":
        return linear_tree(n)
    try:
        return tree_from_json(s)
    except json.JSONDecodeError as exc:
        raise TreeError(f"malformed tree literal {raw!r}: {exc.msg}") from None


def resolve_algebra(args):
    """``(A, M, field)`` from the flags; defaults to ``square_zero:1`` with trivial coefficients."""
    if args.algebra and args.builtin:
        raise InputError("give either --algebra or --builtin, not both")
    if args.algebra:
        a, m, fld = load_algebra(args.algebra)
        if args.module is not None or m is None:
            m = make_module(a, args.module or "trivial")
    else:
        a, m = builtin(args.builtin or "square_zero:1", module=args.module or "trivial")
        fld = QQ
    if args.field is not None:
        fld = parse_field(args.field)
    problems = validate(a, m, fld)
    if problems:
        raise InputError("invalid algebra data: " + "; ".join(problems))
    return a, m, fld


def _field(args):
    return parse_field(args.field) if args.field is not None else QQ


def _emit(report: dict, fmt: str, text: str) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True))
    else:
        print(text)


def _betti_text(betti: dict) -> str:
    rows = ["degree  betti"] + [f"{int(k):>6}  {v:>5}" for k, v in sorted(betti.items(), key=lambda kv: int(kv[0]))]
    return "\n".join(rows)


def cmd_homology(args) -> int:
    a, m, fld = resolve_algebra(args)
    co = args.cohomology or args.command == "cohomology"
    if co:
        C = build_cochain(dual_loday(a, m, fld), args.max_degree, n=args.n)
    else:
        C = build_chain(loday(a, m, fld), args.max_degree, n=args.n)
    betti = {str(k): v for k, v in homology_table(C).items()}
    report = {
        "command": "cohomology" if co else "homology",
        "n": args.n,
        "field": fld.to_json(),
        "maxDegree": args.max_degree,
        "betti": betti,
    }
    _emit(report, args.format, _betti_text(betti))
    return 0


def cmd_trees(args) -> int:
    if args.signature:
        try:
            sig = tuple(int(x) for x in args.signature.split(","))
        except ValueError:
            raise InputError(f"bad signature {args.signature!r}") from None
        if len(sig) != args.n or min(sig) < 0:
            raise InputError(f"signature needs {args.n} nonnegative entries, got {args.signature!r}")
        trees = enumerate_trees(args.n, sig)
    elif args.degree is not None:
        trees = enumerate_by_degree(args.n, args.degree)
    else:
        raise InputError("trees needs --degree or --signature")
    report = {"command": "trees", "n": args.n, "count": len(trees)}
    if not args.count_only:
        report["trees"] = [t.to_json() for t in trees]
    text = str(len(trees)) if args.count_only else "\n".join(json.dumps(t.to_json()) for t in trees)
    _emit(report, args.format, text)
    return 0


def cmd_homset(args) -> int:
    t, s = parse_tree(args.source, args.n), parse_tree(args.target, args.n)
    if t.n != s.n:
        raise InputError(f"source has {t.n} levels, target has {s.n}")
    homs = enumerate_hom(t, s)
    report = {"command": "homset", "source": t.to_json(), "target": s.to_json(), "count": len(homs)}
    if not args.count_only:
        report["morphisms"] = [list(map(list, h.levels)) for h in homs]
    text = str(len(homs)) if args.count_only else "\n".join(repr(h) for h in homs)
    _emit(report, args.format, text)
    return 0


def _system(args, a, m, fld):
    if args.system == "loday":
        return loday(a, m, fld)
    if args.system == "dual_loday":
        return dual_loday(a, m, fld)
    if args.system == "leaves":
        return leaves_functor(args.n, fld)
    if not args.tree:
        raise InputError("--system representable needs --tree")
    return representable(parse_tree(args.tree, args.n), fld)


def cmd_verify(args) -> int:
    suite, D = args.suite, args.max_degree
    if suite in ("d2", "multicomplex"):
        a, m, fld = resolve_algebra(args)
        runner = verify.suite_d2 if suite == "d2" else verify.suite_multicomplex
        report = runner(_system(args, a, m, fld), D, n=args.n)
    elif suite == "oracle":
        a, m, fld = resolve_algebra(args)
        report = verify.suite_oracle(a, m, args.n, D, fld)
    elif suite == "hochschild":
        a, m, fld = resolve_algebra(args)
        report = verify.suite_hochschild(a, m, D, fld)
    elif suite == "projective":
        if not args.tree:
            raise InputError("verify projective needs --tree")
        report = verify.suite_projective(parse_tree(args.tree, args.n), D, _field(args))
    elif suite == "bstar":
        report = verify.suite_bstar(args.n, D, _field(args))
    elif suite == "duality":
        a, m, fld = resolve_algebra(args)
        report = verify.suite_duality(a, m, args.n, D, fld)
    else:
        a, m, fld = resolve_algebra(args)
        cat = verify.suite_category(args.trials, args.seed, max_n=args.n)
        fun = verify.suite_functoriality(a, m, fld, max(1, args.trials // 2), args.seed, max_n=args.n)
        report = {"suite": "category", "ok": cat["ok"] and fun["ok"], "composition": cat, "functoriality": fun}
    text = f"{suite}: {'PASS' if report['ok'] else 'FAIL'}"
    if "betti" in report:
        text += "\n" + _betti_text(report["betti"])
    if not report["ok"]:
        text += "\n" + json.dumps(report, sort_keys=True, indent=2)
    _emit(report, args.format, text)
    return 0 if report["ok"] else 1


COMMANDS = {"homology": cmd_homology, "cohomology": cmd_homology, "trees": cmd_trees, "homset": cmd_homset, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NotAComplexError as exc:
        print(f"enlab: internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except (InputError, AlgebraError, FieldError, TreeError, MorphismError, OSError, KeyError, ValueError) as exc:
        print(f"enlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
