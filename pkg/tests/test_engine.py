"""Normalization and boolean algebra: contract examples plus properties."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from realline.dsl import format_set, parse_dsl
from realline.engine import (complement_in, intersect, normalize, semantic_equal,
                             semantic_subset, union)
from realline.errors import Unnormalizable
from realline.fuzz import FuzzSpec, gen_case
from realline.ratmath import Q
from realline.sets import IntervalAtom, RawOracle, member


def N(text):
    return normalize(parse_dsl(text))


def S(X):
    return format_set(X)


# -- contract examples -------------------------------------------------------

def test_normalize_merges_overlap():
    assert S(N("(0,1) | (1/2, 2)")) == "(0,2)"


def test_normalize_telescopes_closed_chain():
    # oracle: finite unions up to depth plus the limit; checked by sampling
    raw = parse_dsl("fam(n>=1){ [1/(n+1), 1/n] }")
    X = normalize(raw)
    assert S(X) == "(0,1]"
    oracle = RawOracle(raw, 10_000)
    for q in [Q(1), Q(1, 2), Q(2, 5), Q(1, 10000), Q(3, 7)]:
        assert member(X, q) and oracle.contains(q)
    assert not member(X, 0)


def test_normalize_keeps_open_chain():
    t = "fam(n>=1){ (1/(n+1), 1/n) }"
    assert S(N(t)) == "fam(n>=1){ (1/(n+1), 1/n) }"


def test_union_examples():
    assert S(union(N("(0,1)"), N("{1}"))) == "(0,1]"
    assert S(union(N("fam(n>=1){ {1/n} }"), N("{0}"))) == "{0} | fam(n>=1){ {1/n} }"
    # gaps filled exactly: checked against the enumerative oracle
    u = union(N("fam(n>=1){ (1/(n+1),1/n) }"), N("fam(n>=1){ {1/n} }"))
    ints, pts, fams = u.intervals, u.points, u.schemas
    assert len(ints) == 1 and not pts and not fams
    a = ints[0]
    assert (a.lo, a.hi, a.lo_closed, a.hi_closed) == (0, 1, False, True)
    raw = parse_dsl("fam(n>=1){ (1/(n+1),1/n) } | fam(n>=1){ {1/n} }")
    oracle = RawOracle(raw, 10_000)
    for q in [Q(1), Q(1, 2), Q(1, 3), Q(2, 5), Q(9999, 10000)]:
        assert member(u, q) == oracle.contains(q) == True
    assert not member(u, 0) and not oracle.contains(0)


def test_complement_examples():
    assert S(complement_in(N("(0,1)"))) == "(-inf,0] | [1,inf)"
    X = N("{0} | fam(n>=1){ (1/(n+1),1/n) }")
    c = complement_in(X, IntervalAtom(0, 1, True, True))
    assert S(c) == "fam(n>=1){ {1/n} }"
    assert complement_in(N("[0,1]"), IntervalAtom(0, 1, True, True)).is_empty()


def test_subset_examples():
    assert semantic_subset(N("(0,1)"), N("[0,1]"))
    assert not semantic_subset(N("[0,1]"), N("(0,1)"))
    assert semantic_subset(N("fam(n>=1){ (1/(n+1),1/n) }"), N("(0,1)"))


def test_even_odd_split_equality():
    A = N("fam(n>=1){ (mob(0,1,2,1), mob(0,1,2,0)) } | "
          "fam(n>=1){ (mob(0,1,2,2), mob(0,1,2,1)) }")
    B = N("fam(n>=1){ (1/(n+2), 1/(n+1)) }")
    assert semantic_equal(A, B)


def test_atom_absorbs_family_tail():
    X = N("[-1, 1/2] | fam(n>=1){ (1/(n+1), 1/n) }")
    assert S(X) == "[-1,1)"


def test_extension_absorption():
    # loose atoms matching the family pattern fold in, start reindexes to 1
    X = N("{1} | fam(n>=2){ {1/n} }")
    assert S(X) == "fam(n>=1){ {1/n} }"


def test_empty_set_laws():
    E = N("empty")
    assert E.is_empty()
    assert complement_in(E, IntervalAtom(0, 1)).intervals
    assert intersect(E, N("[0,1]")).is_empty()
    assert semantic_subset(E, N("{5}"))
    assert S(union(E, N("{5}"))) == "{5}"


def test_union_with_complement_is_line():
    for t in ["{0} | fam(n>=1){ (1/(n+1),1/n) }", "fam(n>=1){ {1/n} }",
              "[0,1] | {4}", "(-inf, 0)"]:
        X = N(t)
        assert S(union(X, complement_in(X))) == "(-inf,inf)"


# -- properties over generated cases ----------------------------------------

SPEC = FuzzSpec(seed=99, trials=0)


def _case(seed):
    return gen_case(random.Random(seed), SPEC)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_normalize_idempotent(seed):
    raw = _case(seed)
    try:
        X = normalize(raw)
    except Unnormalizable:
        return
    Y = normalize(parse_dsl(format_set(X)))
    assert format_set(Y) == format_set(X)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_double_complement_identity(seed):
    raw = _case(seed)
    try:
        X = normalize(raw)
    except Unnormalizable:
        return
    W = IntervalAtom(-40, 40, True, True)
    lhs = complement_in(complement_in(X, W), W)
    rhs = intersect(X, normalize(parse_dsl("[-40, 40]")))
    assert semantic_equal(lhs, rhs)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_intersect_is_lower_bound(seed):
    rng = random.Random(seed)
    raw1, raw2 = gen_case(rng, SPEC), gen_case(rng, SPEC)
    try:
        X, Y = normalize(raw1), normalize(raw2)
        both = intersect(X, Y)
    except Unnormalizable:
        return
    assert semantic_subset(both, X) and semantic_subset(both, Y)


def test_thousand_probe_membership_preservation():
    """1000 seeded probes per case against the depth-10^4 enumerative oracle."""
    rng = random.Random(4242)
    cases = 0
    seed = 0
    while cases < 8:
        seed += 1
        raw = _case(seed)
        if not raw.schemas:
            continue
        try:
            X = normalize(raw)
        except Unnormalizable:
            continue
        cases += 1
        oracle = RawOracle(raw, 10_000)
        probes = []
        anchors = []
        for s in raw.schemas:
            for n in range(s.start, s.start + 40):
                piece = s.piece(n)
                if hasattr(piece, "lo"):
                    anchors += [piece.lo, piece.hi]
                else:
                    anchors.append(piece.value)
            anchors.append(s.limit)
        for a in raw.intervals:
            anchors += [v for v in (a.lo, a.hi) if v is not None]
        for p in raw.points:
            anchors.append(p.value)
        while len(probes) < 1000:
            base = anchors[rng.randrange(len(anchors))]
            probes.append(base + Q(rng.randint(-3, 3), rng.randint(7, 23)))
        for q in probes:
            assert member(X, q) == oracle.contains(q), (format_set(raw), q)


def test_complement_window_inside_family_region():
    X = N("{0} | fam(n>=1){ (1/(n+1), 1/n) }")
    c = complement_in(X, IntervalAtom(Q(1, 3), Q(1, 2), True, True))
    assert S(c) == "{1/3} | {1/2}"
    c2 = complement_in(X, IntervalAtom(Q(2, 5), Q(9, 20), True, True))
    assert c2.is_empty()  # strictly inside one piece
