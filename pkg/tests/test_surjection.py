"""The product surjection and its Cantor stage."""

import random

import pytest

from realline.dsl import parse_dsl
from realline.engine import normalize
from realline.errors import DomainError, NotCompact, NotGcc, NotMember
from realline.ratmath import Q
from realline.sets import member
from realline.surject import (Bracket, build_surjection, cantor_eval,
                              cantor_path_to, continuity_samples,
                              eval_surjection, solve_preimage)


def N(text):
    return normalize(parse_dsl(text))


SECTION1 = "{0} | fam(n>=1){ (1/(n+1), 1/n) }"


def test_eval_examples():
    plan = build_surjection(N("[0,1]"))
    assert eval_surjection(plan, Q(1, 2), 0) == Q(1, 2)
    assert eval_surjection(plan, 0, 99) == 0
    assert eval_surjection(plan, 1, -5) == 1
    plan2 = build_surjection(N("(0,1)"))
    assert eval_surjection(plan2, Q(1, 2), 1) == Q(3, 4)
    plan3 = build_surjection(N("{5}"))
    assert eval_surjection(plan3, 5, 123) == 5
    with pytest.raises(DomainError):
        eval_surjection(plan, Q(1, 3), 0)


def test_not_gcc_rejected():
    with pytest.raises(NotGcc):
        build_surjection(N("fam(n>=1){ {1/n} }"))


def test_preimage_examples():
    plan = build_surjection(N("(0,1)"))
    assert solve_preimage(plan, Q(3, 4)) == (Q(1, 2), 1)
    plan2 = build_surjection(N("[0,1]"))
    assert solve_preimage(plan2, 0) == (0, 0)
    plan3 = build_surjection(N(SECTION1))
    a, y = solve_preimage(plan3, Q(2, 5))
    assert eval_surjection(plan3, a, y) == Q(2, 5)
    assert a == Q(5, 12)  # the n=2 midpoint
    with pytest.raises(NotMember):
        solve_preimage(plan3, Q(1, 2))


def test_range_and_roundtrip_sampled():
    X = N(SECTION1)
    plan = build_surjection(X)
    rng = random.Random(5)
    sel = plan.family_rules[0][0].seq
    for _ in range(400):
        a = sel.value(rng.randint(1, 60))
        y = Q(rng.randint(-50, 50), rng.randint(1, 9))
        assert member(X, eval_surjection(plan, a, y))
    for _ in range(200):
        n = rng.randint(1, 40)
        piece = X.schemas[0].piece(n)
        t = piece.lo + Q(rng.randint(1, 7), 8) * (piece.hi - piece.lo)
        a, y = solve_preimage(plan, t)
        assert eval_surjection(plan, a, y) == t


def test_catalog_kinds_roundtrip():
    for text in ["[0,1]", "(0,1)", "[0,1)", "(0,1]", "(2,inf)", "[2,inf)",
                 "(-inf,2)", "(-inf,2]", "(-inf,inf)"]:
        X = N(text)
        plan = build_surjection(X)
        atom = X.intervals[0]
        probes = []
        if atom.lo is not None and atom.hi is not None:
            probes = [atom.lo + (atom.hi - atom.lo) * f for f in
                      (Q(1, 7), Q(1, 2), Q(6, 7))]
            if atom.lo_closed:
                probes.append(atom.lo)
            if atom.hi_closed:
                probes.append(atom.hi)
        elif atom.lo is not None:
            probes = [atom.lo + d for d in (Q(1, 3), Q(1), Q(10))]
            if atom.lo_closed:
                probes.append(atom.lo)
        elif atom.hi is not None:
            probes = [atom.hi - d for d in (Q(1, 3), Q(1), Q(10))]
            if atom.hi_closed:
                probes.append(atom.hi)
        else:
            probes = [Q(-5), Q(0), Q(7, 3)]
        for t in probes:
            a, y = solve_preimage(plan, t)
            assert eval_surjection(plan, a, y) == t
        # range containment across the y grid
        for v, rule in plan.interior_rules:
            for y in (Q(-9), Q(-1), Q(0), Q(1, 2), Q(5)):
                assert member(X, rule.eval(y)), (text, y)


def test_continuity_samples_empty():
    for text in ["[0,1]", SECTION1, "{5}"]:
        plan = build_surjection(N(text))
        assert continuity_samples(plan, Q(1, 1000)) == []


def test_cantor_examples():
    b = cantor_eval(N("{0} | {1}"), "0")
    assert (b.lo, b.hi) == (0, 0)
    A2 = N("{0} | fam(n>=1){ {1/n} }")
    b = cantor_eval(A2, "1")
    assert b.contains(1)
    assert cantor_eval(N("{5}"), "0110").lo == 5
    with pytest.raises(NotCompact):
        cantor_eval(N("fam(n>=1){ {1/n} }"), "0")
    with pytest.raises(NotCompact):
        cantor_eval(N("empty"), "0")


def test_cantor_nesting_width_reachability():
    A = N("{0} | fam(n>=1){ {1/n} }")
    hull_width = Q(1)
    rng = random.Random(11)
    for _ in range(12):
        bits = "".join(rng.choice("01") for _ in range(20))
        prev = cantor_eval(A, "")
        for d in range(1, 21):
            cur = cantor_eval(A, bits[:d])
            assert prev.lo <= cur.lo and cur.hi <= prev.hi
            prev = cur
        assert prev.width <= hull_width * Q(3, 4) ** 10
    for target in (Q(0), Q(1), Q(1, 7), Q(1, 13)):
        path = cantor_path_to(A, target, 20)
        assert cantor_eval(A, path).contains(target)


def test_catalog_image_bounds_exact():
    """Each catalog rule's image is exactly its component: endpoint values,
    attainment, and strict interiority match the interval shape."""
    from realline.surject import ComponentSurjection
    from realline.sets import IntervalAtom
    ys = [Q(-1000), Q(-3), Q(-1), Q(-1, 2), Q(0), Q(1, 2), Q(1), Q(3), Q(1000)]
    shapes = [
        IntervalAtom(0, 1, True, True), IntervalAtom(0, 1, False, False),
        IntervalAtom(0, 1, True, False), IntervalAtom(0, 1, False, True),
        IntervalAtom(2, None, True, False), IntervalAtom(2, None, False, False),
        IntervalAtom(None, 2, False, True), IntervalAtom(None, 2, False, False),
        IntervalAtom(None, None, False, False),
    ]
    for a in shapes:
        rule = ComponentSurjection.for_interval(a)
        vals = [rule.eval(y) for y in ys]
        assert all(a.contains(v) for v in vals)
        if a.lo is not None:
            assert (a.lo in vals) == a.lo_closed or not a.lo_closed
            if a.lo_closed:
                assert rule.eval(rule.invert(a.lo)) == a.lo
            else:
                assert all(v > a.lo for v in vals)
        if a.hi is not None:
            if a.hi_closed:
                assert rule.eval(rule.invert(a.hi)) == a.hi
            else:
                assert all(v < a.hi for v in vals)
