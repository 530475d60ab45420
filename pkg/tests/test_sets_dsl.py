"""Set representation, membership, and the expression language."""

import pytest

from realline.dsl import format_set, parse_dsl
from realline.engine import normalize
from realline.errors import ParseError, Unnormalizable
from realline.ratmath import Q
from realline.sets import IntervalAtom, PointAtom, RawOracle, member


def N(text):
    return normalize(parse_dsl(text))


def test_parse_basic_terms():
    X = parse_dsl("[0,1) | {3/2} | (-inf, -5]")
    assert len(X.intervals) == 2 and len(X.points) == 1
    assert X.intervals[0].lo_closed and not X.intervals[0].hi_closed
    assert X.intervals[1].lo is None


def test_parse_family_sugars():
    X = parse_dsl("fam(n>=1){ (1/(n+1), 1/n) }")
    s = X.schemas[0]
    assert s.left.value(1) == Q(1, 2) and s.right.value(1) == 1
    Y = parse_dsl("fam(n>=2){ {mob(0,1,2,1)} }")
    assert Y.schemas[0].seq.value(2) == Q(1, 5)
    Z = parse_dsl("fam(n>=1){ {2+-1/n} }")
    assert Z.schemas[0].seq.value(1) == 1 and Z.schemas[0].limit == 2


def test_parse_errors_have_positions():
    for text, pos_at_least in [("(1,", 3), ("{}", 1), ("fam(n>=0){ {1/n} }", 7),
                               ("[0,1] |", 7), ("(2,1)", 1)]:
        with pytest.raises(ParseError):
            parse_dsl(text)


def test_parse_empty_literal_roundtrip():
    assert parse_dsl("empty").is_empty()
    assert format_set(N("(0,1)").__class__.empty()) == "empty"


def test_inverted_family_is_rejected_downstream():
    X = parse_dsl("fam(n>=1){ (1/n, 1/(n+1)) }")  # parses, then fails
    with pytest.raises(Unnormalizable):
        normalize(X)


def test_membership_examples():
    X = N("{0} | fam(n>=1){ (1/(n+1), 1/n) }")
    assert member(X, Q(1, 2)) is False      # open gap endpoint
    assert member(X, 0) is True
    assert member(X, Q(2, 5)) is True       # inside the n=2 piece
    assert member(X, 2) is False
    assert member(X, Q(-1, 3)) is False


def test_membership_matches_raw_oracle():
    texts = [
        "{0} | fam(n>=1){ (1/(n+1), 1/n) }",
        "fam(n>=1){ {1/n} } | [2, 3)",
        "fam(n>=2){ [1/(n+1), 1/n] }",
        "(-inf,0) | fam(n>=1){ {5+-1/n} }",
    ]
    for text in texts:
        raw = parse_dsl(text)
        X = normalize(raw)
        oracle = RawOracle(raw, 500)
        probes = set()
        for s in raw.schemas:
            for n in range(s.start, s.start + 30):
                piece = s.piece(n)
                if isinstance(piece, PointAtom):
                    probes |= {piece.value, piece.value + Q(1, 101)}
                else:
                    probes |= {piece.lo, piece.hi, (piece.lo + piece.hi) / 2}
        probes |= {Q(0), Q(1), Q(-1), Q(7, 3)}
        for q in probes:
            assert member(X, q) == oracle.contains(q), (text, q)


def test_roundtrip_printing():
    texts = [
        "{0} | fam(n>=1){ (1/(n+1), 1/n) }",
        "fam(n>=1){ {1/n} }",
        "[0,1) | (2,inf)",
        "fam(n>=1){ [mob(0,1,2,1), 1/2/n] }",
    ]
    for text in texts:
        X = N(text)
        Y = N(format_set(X))
        assert format_set(Y) == format_set(X)


def test_interval_atom_invariants():
    with pytest.raises(ValueError):
        IntervalAtom(1, 1)
    with pytest.raises(ValueError):
        IntervalAtom(2, 1)
    a = IntervalAtom(None, 5, False, True)
    assert a.contains(Q(-999)) and a.contains(5) and not a.contains(6)
