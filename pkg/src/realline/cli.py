"""Command-line interface.

Subcommands: analyze, witness, surjection, fixture, fuzz.  Exit codes:
0 success, 1 property/verdict failure, 2 parse error, 3 uncertifiable
input, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .deciders import decide_ccc, decide_gcc_sequences, decide_gcc_transversal
from .dsl import format_set, parse_dsl
from .engine import normalize
from .errors import (DomainError, InvalidCut, NotApplicable, NotCompact,
                     NotGcc, NotMember, ParseError, RealLineError,
                     Unnormalizable, UnsupportedConfig)
from .fuzz import FuzzSpec, fuzz_run
from .planar import COLLISION_FREE, LITERAL_SUM, PlanarExampleConfig, fixture_verdicts
from .ratmath import Q, fmt
from .report import analyze
from .surject import build_surjection, cantor_eval, eval_surjection, solve_preimage

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_PARSE = 2
EXIT_UNNORMALIZABLE = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _load_expr(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return fh.read().strip()
    return text


def _cmd_analyze(args) -> int:
    report = analyze(_load_expr(args.expr))
    payload = json.dumps(report, indent=2)
    print(payload)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    return EXIT_OK


def _cmd_witness(args) -> int:
    X = normalize(parse_dsl(_load_expr(args.expr)))
    gcc = decide_gcc_transversal(X)["verdict"]
    if args.kind in ("gcc", "ccc"):
        if not gcc:
            print(json.dumps({"error": "the set fails the compactness criterion"}))
            return EXIT_VERDICT
        res = decide_ccc(X)
        t = res["transversal"]
        out = {
            "kind": args.kind,
            "witness": format_set(res["witnessK"]),
            "policy": t.policy,
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    # non-gcc
    if gcc:
        print(json.dumps({"error": "the set satisfies the criterion; no refutation exists"}))
        return EXIT_VERDICT
    from .deciders import cover_to_surjection, witness_non_gcc_cover
    w = decide_gcc_sequences(X)["witness"]
    cover = witness_non_gcc_cover(X)
    f = cover_to_surjection(cover)
    fam = cover.families[0]
    from .dsl import format_seq
    out = {
        "kind": "non-gcc",
        "alternating": {"even": format_seq(w.even_seq), "odd": format_seq(w.odd_seq),
                        "start": w.start, "limit": fmt(w.limit),
                        "direction": w.direction},
        "cover": {"finiteWindows": [str(x) for x in cover.finite_windows],
                  "family": {"lo": format_seq(fam.lo_seq),
                             "hi": format_seq(fam.hi_seq), "start": fam.start}},
        "surjectionSamples": [[fmt(w.even_seq.value(n)), f(w.even_seq.value(n))]
                              for n in range(w.start, w.start + 3)],
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_surjection(args) -> int:
    X = normalize(parse_dsl(_load_expr(args.expr)))
    plan = build_surjection(X)
    if args.eval is not None:
        a_txt, y_txt = args.eval.split(",")
        v = eval_surjection(plan, Q(a_txt), Q(y_txt))
        print(json.dumps({"value": fmt(v)}))
        return EXIT_OK
    if args.preimage is not None:
        a, y = solve_preimage(plan, Q(args.preimage))
        print(json.dumps({"a": fmt(a), "y": fmt(y)}))
        return EXIT_OK
    if args.cantor is not None:
        b = cantor_eval(plan.domain, args.cantor)
        print(json.dumps({"bracket": [fmt(b.lo), fmt(b.hi)], "width": fmt(b.width)}))
        return EXIT_OK
    print(json.dumps({
        "domain": format_set(plan.domain),
        "constantPoints": len(plan.constant_points),
        "interiorRules": len(plan.interior_rules),
        "familyRules": len(plan.family_rules),
    }, indent=2))
    return EXIT_OK


def _cmd_fixture(args) -> int:
    if args.space != "planar":
        raise SystemExit(EXIT_USAGE)
    rule = LITERAL_SUM if args.rule == "literal" else COLLISION_FREE
    cfg = PlanarExampleConfig(rule, args.bound)
    try:
        verdicts = fixture_verdicts(cfg)
    except UnsupportedConfig as e:
        print(json.dumps({"error": str(e), "collisions": e.detail["collisions"]},
                         indent=2))
        return EXIT_VERDICT
    print(json.dumps(verdicts, indent=2, default=str))
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    spec = FuzzSpec(seed=args.seed, trials=args.trials)
    summary = fuzz_run(spec)
    print(json.dumps(summary.to_dict(), indent=2, default=str))
    if summary.failures:
        return EXIT_VERDICT
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="realline",
                description="symbolic compactness/connectedness analysis of "
                            "definable subsets of the real line")
    sub = p.add_subparsers(dest="cmd", required=True)

    pa = sub.add_parser("analyze", help="full analysis report (JSON)")
    pa.add_argument("expr", help="set expression or @file")
    pa.add_argument("--json", help="also write the report to this path")
    pa.set_defaults(fn=_cmd_analyze)

    pw = sub.add_parser("witness", help="emit a machine-checkable witness")
    pw.add_argument("expr")
    pw.add_argument("--kind", choices=("gcc", "non-gcc", "ccc"), required=True)
    pw.set_defaults(fn=_cmd_witness)

    ps = sub.add_parser("surjection", help="evaluate the product surjection")
    ps.add_argument("expr")
    ps.add_argument("--eval", metavar="a,y")
    ps.add_argument("--preimage", metavar="t")
    ps.add_argument("--cantor", metavar="bits")
    ps.set_defaults(fn=_cmd_surjection)

    pf = sub.add_parser("fixture", help="planar example checks")
    pf.add_argument("space", choices=("planar",))
    pf.add_argument("--rule", choices=("literal", "collision-free"),
                    default="collision-free")
    pf.add_argument("--check", default="all")
    pf.add_argument("--bound", type=int, default=100)
    pf.set_defaults(fn=_cmd_fixture)

    pz = sub.add_parser("fuzz", help="run the property battery")
    pz.add_argument("--seed", type=int, required=True)
    pz.add_argument("--trials", type=int, required=True)
    pz.set_defaults(fn=_cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except ParseError as e:
        print(json.dumps({"error": "parse", "message": str(e),
                          "position": e.position}), file=sys.stderr)
        return EXIT_PARSE
    except Unnormalizable as e:
        print(json.dumps({"error": "unnormalizable", "message": str(e)}),
              file=sys.stderr)
        return EXIT_UNNORMALIZABLE
    except (NotApplicable, NotGcc, NotMember, NotCompact, InvalidCut,
            DomainError, UnsupportedConfig) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return EXIT_VERDICT
    except RealLineError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return EXIT_VERDICT


if __name__ == "__main__":
    raise SystemExit(main())
