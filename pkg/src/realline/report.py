"""Analysis reports: one JSON-ready dict per input expression.

Field set is fixed (test stability): input, normalized, components,
gcc, ccc, witness, closure, checks.
"""

from __future__ import annotations

from .deciders import (decide_ccc, decide_gcc_sequences, decide_gcc_transversal,
                       witness_non_gcc_cover, cover_to_surjection)
from .dsl import format_seq, format_set, parse_dsl
from .engine import complement_in, normalize, semantic_equal, union
from .ratmath import fmt
from .sets import INTERVALS, RealSet, SchemaAtom
from .topology import closure, components, local_connectedness_defects, predicates


def _component_closures(X: RealSet) -> RealSet:
    """Union of the closures of all components (no limit points added)."""
    intervals = [a.closed_version() for a in X.intervals]
    points = list(X.points)
    schemas = []
    for s in X.schemas:
        if s.kind == INTERVALS:
            schemas.append(SchemaAtom(INTERVALS, s.start, s.left, True, s.right, True))
        else:
            schemas.append(s)
    return normalize(RealSet.build(intervals, points, schemas))


def check_corollary_closure_identity(X: RealSet, gcc: bool) -> bool:
    """closure(X) equals the union of component closures whenever gcc."""
    identity = semantic_equal(closure(X), _component_closures(X))
    return identity if gcc else True


def check_corollary_complement_lc(X: RealSet, gcc: bool) -> bool:
    """gcc implies a locally connected complement; bounded converse."""
    defects = local_connectedness_defects(complement_in(X))
    forward = (not gcc) or defects == []
    bounded = predicates(X)["bounded"]
    converse = (not (bounded and defects == [])) or gcc
    return forward and converse


def _witness_payload(X: RealSet, gcc: bool) -> dict:
    if gcc:
        res = decide_ccc(X)
        t = res["transversal"]
        fams = []
        for schema, seqs in t.families:
            for q in seqs:
                fams.append({"selection": format_seq(q), "start": schema.start,
                             "limit": fmt(schema.limit)})
        return {
            "kind": "transversal",
            "policy": t.policy,
            "set": format_set(t.set),
            "points": [fmt(p.value) for p in t.set.points],
            "families": fams,
        }
    seq_res = decide_gcc_sequences(X)
    w = seq_res["witness"]
    cover = witness_non_gcc_cover(X)
    f = cover_to_surjection(cover)
    samples = []
    for n in range(w.start, w.start + 3):
        v = w.even_seq.value(n)
        samples.append([fmt(v), f(v)])
    fam = cover.families[0]
    return {
        "kind": "cover+surjection",
        "alternating": {
            "direction": w.direction,
            "even": format_seq(w.even_seq),
            "odd": format_seq(w.odd_seq),
            "start": w.start,
            "limit": fmt(w.limit),
        },
        "cover": {
            "finiteWindows": [str(wd) for wd in cover.finite_windows],
            "family": {"lo": format_seq(fam.lo_seq), "hi": format_seq(fam.hi_seq),
                       "start": fam.start},
        },
        "surjectionSamples": samples,
    }


def analyze(text: str) -> dict:
    """Full analysis of one expression: verdicts, witness, closure, checks."""
    raw = parse_dsl(text)
    X = normalize(raw)
    comp = components(X)
    gcc = decide_gcc_transversal(X)["verdict"]
    seq_verdict = decide_gcc_sequences(X)["verdict"]
    if gcc != seq_verdict:
        raise AssertionError("independent deciders disagree on this input")
    ccc = decide_ccc(X)["verdict"]
    report = {
        "input": text,
        "normalized": format_set(X),
        "components": {"finite": len(comp.finite), "families": len(comp.families)},
        "gcc": gcc,
        "ccc": ccc,
        "witness": _witness_payload(X, gcc),
        "closure": format_set(closure(X)),
        "checks": {
            "corollary1": check_corollary_closure_identity(X, gcc),
            "corollary2": check_corollary_complement_lc(X, gcc),
        },
    }
    return report
