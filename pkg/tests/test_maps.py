"""Piecewise-linear maps: evaluation, images, extremum reports."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from realline.dsl import format_set, parse_dsl
from realline.engine import normalize
from realline.errors import Unnormalizable
from realline.fuzz import FuzzSpec, gen_case, gen_plmap
from realline.maps import PLMap, eval_map, extremum_report, pushforward
from realline.ratmath import Q
from realline.sets import member


def N(text):
    return normalize(parse_dsl(text))


def test_eval_examples():
    assert eval_map(PLMap.identity(), Q(3, 7)) == Q(3, 7)
    assert eval_map(PLMap.abs_value(), -2) == 2
    assert eval_map(PLMap.affine(2, 1), Q(1, 2)) == 2


def test_continuity_validated_exactly():
    with pytest.raises(ValueError):
        PLMap((Q(0),), (Q(1), Q(1)), (Q(0), Q(1)))  # jump at 0
    PLMap((Q(0),), (Q(-1), Q(1)), (Q(0), Q(0)))     # |x| is fine


def test_pushforward_examples():
    X = N("{0} | fam(n>=1){ (1/(n+1), 1/n) }")
    assert format_set(pushforward(PLMap.identity(), X)) == format_set(X)
    assert format_set(pushforward(PLMap.affine(-1, 0), N("(0,1)"))) == "(-1,0)"
    Y = pushforward(PLMap.affine(2, 0), X)
    assert format_set(Y) == "{0} | fam(n>=1){ (2/(n+1), 2/n) }"


def test_pushforward_constant_collapses():
    X = N("{0} | fam(n>=1){ (1/(n+1), 1/n) }")
    assert format_set(pushforward(PLMap.constant(5), X)) == "{5}"


def test_pushforward_splits_family_at_breakpoint():
    X = N("{0} | fam(n>=1){ (1/(n+1), 1/n) }")
    hinge = PLMap((Q(1, 3),), (Q(1), Q(2)), (Q(0), Q(-1, 3)))
    img = pushforward(hinge, X)
    for q in [Q(2, 5), Q(1, 5), Q(7, 8)]:
        assert member(img, eval_map(hinge, q)) == member(X, q) or member(X, q)
    # head pieces map with slope 2, the tail keeps the identity shape
    assert member(img, eval_map(hinge, Q(2, 5)))
    assert not member(img, eval_map(hinge, Q(1, 2)))


def test_extremum_examples():
    ident = PLMap.identity()
    r = extremum_report(ident, N("[0,1]"))
    assert (r["sup"], r["supAttained"]) == (1, True)
    r = extremum_report(ident, N("(0,1)"))
    assert (r["sup"], r["supAttained"], r["supLeftIntervalContained"]) == (1, False, True)
    assert r["supEpsilon"] == 1
    r = extremum_report(ident, N("{0} | fam(n>=1){ {1/n} }"))
    assert (r["sup"], r["supAttained"]) == (1, True)
    assert (r["inf"], r["infAttained"]) == (0, True)
    r = extremum_report(ident, N("(0, inf)"))
    assert r["sup"] is None and r["supLeftIntervalContained"]


SPEC = FuzzSpec(seed=13, trials=0)


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_pushforward_membership(seed):
    rng = random.Random(seed)
    raw = gen_case(rng, SPEC)
    m = gen_plmap(rng)
    try:
        X = normalize(raw)
        Y = pushforward(m, X)
    except Unnormalizable:
        return
    # forward membership on sampled members of X
    samples = []
    for a in X.intervals:
        if a.lo is not None and a.hi is not None:
            samples.append((a.lo + a.hi) / 2)
        elif a.lo is not None:
            samples.append(a.lo + 1)
        elif a.hi is not None:
            samples.append(a.hi - 1)
        else:
            samples.append(Q(0))
        if a.lo is not None and a.lo_closed:
            samples.append(a.lo)
    samples += [p.value for p in X.points]
    for s in X.schemas:
        for n in range(s.start, s.start + 8):
            piece = s.piece(n)
            samples.append(piece.value if not hasattr(piece, "lo")
                           else (piece.lo + piece.hi) / 2)
    for q in samples:
        assert member(Y, eval_map(m, q)), (format_set(X), str(m), q)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_image_members_have_preimages(seed):
    """Every sampled member of the image inverts through some affine piece."""
    rng = random.Random(seed)
    raw = gen_case(rng, SPEC)
    m = gen_plmap(rng)
    try:
        X = normalize(raw)
        Y = pushforward(m, X)
    except Unnormalizable:
        return
    samples = [p.value for p in Y.points]
    for a in Y.intervals:
        if a.lo is not None and a.hi is not None:
            samples.append((a.lo + a.hi) / 2)
    for s in Y.schemas:
        piece = s.piece(s.start + 1)
        samples.append(piece.value if not hasattr(piece, "lo")
                       else (piece.lo + piece.hi) / 2)
    regions = [(None, m.breakpoints[0] if m.breakpoints else None)]
    for i in range(len(m.breakpoints)):
        nxt = m.breakpoints[i + 1] if i + 1 < len(m.breakpoints) else None
        regions.append((m.breakpoints[i], nxt))
    for q in samples[:20]:
        found = False
        for i, (rlo, rhi) in enumerate(regions):
            sl, off = m.slopes[i], m.offsets[i]
            if sl == 0:
                if off == q:
                    # a constant piece's preimage is its whole region
                    from realline.engine import intersect
                    from realline.sets import IntervalAtom, RealSet
                    region = RealSet.build((IntervalAtom(rlo, rhi, True, True),),
                                           (), (), normal=True)
                    if not intersect(X, region).is_empty():
                        found = True
                continue
            x = (q - off) / sl
            in_region = ((rlo is None or x >= rlo) and (rhi is None or x <= rhi))
            if in_region and member(X, x):
                found = True
        assert found, (format_set(X), str(m), q)
