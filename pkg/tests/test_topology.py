"""Closure, interior, components, predicates, defect list."""

import random

from hypothesis import given, settings, strategies as st

from realline.dsl import format_set, parse_dsl
from realline.engine import (complement_in, intersect, normalize, semantic_equal,
                             semantic_subset)
from realline.errors import Unnormalizable
from realline.fuzz import FuzzSpec, gen_case
from realline.ratmath import Q
from realline.sets import IntervalAtom
from realline.topology import (closure, components, interior,
                               local_connectedness_defects, predicates)


def N(text):
    return normalize(parse_dsl(text))


def test_closure_examples():
    assert format_set(closure(N("(0,1)"))) == "[0,1]"
    assert format_set(closure(N("{0} | fam(n>=1){ (1/(n+1), 1/n) }"))) == "[0,1]"
    assert format_set(closure(N("fam(n>=1){ {1/n} }"))) == "{0} | fam(n>=1){ {1/n} }"


def test_interior_examples():
    assert format_set(interior(N("[0,1] | {2}"))) == "(0,1)"
    assert format_set(interior(N("(0,1)"))) == "(0,1)"
    assert format_set(interior(N("fam(n>=1){ [1/(n+1), 1/n] }"))) == "(0,1)"


def test_components_examples():
    c = components(N("(0,1) | {5} | [7,8]"))
    assert len(c.finite) == 3 and len(c.families) == 0
    c = components(N("{0} | fam(n>=1){ (1/(n+1), 1/n) }"))
    assert len(c.finite) == 1 and len(c.families) == 1
    assert not c.families[0].singleton
    c = components(N("(0,2)"))
    assert len(c.finite) == 1 and len(c.families) == 0


def test_predicates_examples():
    assert predicates(N("[0,1]")) == {"bounded": True, "closed": True, "compact": True}
    assert predicates(N("{0} | fam(n>=1){ {1/n} }")) == \
        {"bounded": True, "closed": True, "compact": True}
    assert predicates(N("fam(n>=1){ {1/n} }")) == \
        {"bounded": True, "closed": False, "compact": False}
    assert predicates(N("(-inf, 0]"))["bounded"] is False
    assert predicates(N("(-inf, 0]"))["closed"] is True


def test_defects_examples():
    assert local_connectedness_defects(N("{0} | fam(n>=1){ {1/n} }")) == [0]
    assert local_connectedness_defects(N("[0,1]")) == []
    assert local_connectedness_defects(N("fam(n>=1){ {1/n} }")) == []


SPEC = FuzzSpec(seed=7, trials=0)


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_closure_is_closure_operator(seed):
    raw = gen_case(random.Random(seed), SPEC)
    try:
        X = normalize(raw)
    except Unnormalizable:
        return
    cX = closure(X)
    assert semantic_subset(X, cX)
    assert semantic_equal(closure(cX), cX)
    assert predicates(cX)["closed"]


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_interior_between(seed):
    raw = gen_case(random.Random(seed), SPEC)
    try:
        X = normalize(raw)
    except Unnormalizable:
        return
    iX = interior(X)
    assert semantic_subset(iX, X)
    assert semantic_subset(X, closure(X))


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_components_partition(seed):
    raw = gen_case(random.Random(seed), SPEC)
    try:
        X = normalize(raw)
    except Unnormalizable:
        return
    comp = components(X)
    # the parts re-assemble to X and are pairwise disjoint by construction;
    # verify the union symbolically
    from realline.sets import RealSet
    ints = [p for p in comp.finite if isinstance(p, IntervalAtom)]
    pts = [p for p in comp.finite if not isinstance(p, IntervalAtom)]
    back = RealSet.build(ints, pts, [f.schema for f in comp.families], normal=True)
    assert semantic_equal(back, X)


def test_compact_iff_bounded_and_closed():
    for t in ["[0,1]", "(0,1)", "fam(n>=1){ {1/n} }", "(-inf, 2]",
              "{0} | fam(n>=1){ {1/n} }"]:
        p = predicates(N(t))
        assert p["compact"] == (p["bounded"] and p["closed"])
