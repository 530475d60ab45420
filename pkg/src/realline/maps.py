"""Continuous piecewise-linear maps on R with exact set images.

A PLMap is a list of breakpoints and one affine piece per region (two
unbounded end pieces included).  Continuity is validated exactly at
construction.  Affine maps send Mobius endpoint sequences to Mobius
sequences, so images of RealSets stay in the representable class.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .engine import normalize, _first_true
from .errors import Unnormalizable
from .ratmath import Q
from .sets import INTERVALS, IntervalAtom, PointAtom, RealSet


@dataclass(frozen=True)
class PLMap:
    """y = slope[i]*x + offset[i] on the i-th region of the breakpoint grid."""

    breakpoints: tuple
    slopes: tuple
    offsets: tuple

    def __post_init__(self):
        bps = tuple(Q(b) for b in self.breakpoints)
        sl = tuple(Q(s) for s in self.slopes)
        off = tuple(Q(o) for o in self.offsets)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", sl)
        object.__setattr__(self, "offsets", off)
        if len(sl) != len(bps) + 1 or len(off) != len(bps) + 1:
            raise ValueError("need exactly one affine piece per region")
        if any(bps[i] >= bps[i + 1] for i in range(len(bps) - 1)):
            raise ValueError("breakpoints must be strictly increasing")
        for i, b in enumerate(bps):
            left = sl[i] * b + off[i]
            right = sl[i + 1] * b + off[i + 1]
            if left != right:
                raise ValueError(f"discontinuity at breakpoint {b}: {left} != {right}")

    @staticmethod
    def identity() -> "PLMap":
        return PLMap((), (Q(1),), (Q(0),))

    @staticmethod
    def constant(c) -> "PLMap":
        return PLMap((), (Q(0),), (Q(c),))

    @staticmethod
    def affine(slope, offset) -> "PLMap":
        return PLMap((), (Q(slope),), (Q(offset),))

    @staticmethod
    def abs_value() -> "PLMap":
        return PLMap((Q(0),), (Q(-1), Q(1)), (Q(0), Q(0)))

    def region_of(self, q) -> int:
        return bisect_right(self.breakpoints, q)

    def __call__(self, q):
        return eval_map(self, q)


def eval_map(m: PLMap, q):
    """Exact value at a rational point."""
    q = Q(q)
    i = m.region_of(q)
    return m.slopes[i] * q + m.offsets[i]


def _affine_interval(a: IntervalAtom, slope, offset) -> object:
    if slope == 0:
        return PointAtom(offset)
    def img(v):
        return None if v is None else slope * v + offset
    lo, hi = img(a.lo), img(a.hi)
    if slope > 0:
        return IntervalAtom(lo, hi, a.lo_closed, a.hi_closed)
    return IntervalAtom(hi, lo, a.hi_closed, a.lo_closed)


def pushforward(m: PLMap, X: RealSet) -> RealSet:
    """Normalized image m(X)."""
    X.require_normal()
    intervals, points, schemas = [], [], []

    def add(part):
        if isinstance(part, PointAtom):
            points.append(part)
        else:
            intervals.append(part)

    def map_atom(a: IntervalAtom):
        # split at breakpoints crossing the atom; values agree at the cuts,
        # so closing both cut sides changes nothing
        cuts = [b for b in m.breakpoints if
                (a.lo is None or b > a.lo) and (a.hi is None or b < a.hi)]
        lo, loc = a.lo, a.lo_closed
        for b in cuts:
            i = m.breakpoints.index(b)  # region (breakpoints[i-1], b)
            add(_affine_interval(IntervalAtom(lo, b, loc, True),
                                 m.slopes[i], m.offsets[i]))
            lo, loc = b, True
        i = m.region_of(lo) if lo is not None else 0
        add(_affine_interval(IntervalAtom(lo, a.hi, loc, a.hi_closed),
                             m.slopes[i], m.offsets[i]))

    for a in X.intervals:
        map_atom(a)
    for p in X.points:
        points.append(PointAtom(eval_map(m, p.value)))
    for s in X.schemas:
        L = s.limit
        # all but finitely many pieces lie in the single region touching L
        # from the family's side
        if s.side > 0:
            r = bisect_right(m.breakpoints, L)
            nxt = m.breakpoints[r] if r < len(m.breakpoints) else None
            tail = (s.start if nxt is None else
                    _first_true(lambda n: s.outer_seq().value(n) < nxt, s.start))
        else:
            r = bisect_left(m.breakpoints, L)
            nxt = m.breakpoints[r - 1] if r > 0 else None
            tail = (s.start if nxt is None else
                    _first_true(lambda n: s.outer_seq().value(n) > nxt, s.start))
        if tail - s.start > 512:
            raise Unnormalizable("family crosses too many breakpoints")
        for n in range(s.start, tail):
            piece = s.piece(n)
            if isinstance(piece, PointAtom):
                points.append(PointAtom(eval_map(m, piece.value)))
            else:
                map_atom(piece)
        slope, offset = m.slopes[r], m.offsets[r]
        if slope == 0:
            points.append(PointAtom(offset))
        else:
            sub = s.with_start(tail) if tail > s.start else s
            schemas.append(sub.map_affine(slope, offset))
    return normalize(RealSet.build(intervals, points, schemas))


def _sup_of(X: RealSet):
    """(value or None for +inf, attained: bool)."""
    best = None  # (value, attained); None means -inf so far
    unbounded = False
    for a in X.intervals:
        if a.hi is None:
            unbounded = True
        else:
            cand = (a.hi, a.hi_closed)
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1]):
                best = cand
    for p in X.points:
        cand = (p.value, True)
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1]):
            best = cand
    for s in X.schemas:
        top = s.outer_value() if s.side > 0 else s.limit
        if s.side > 0:
            attained = s.outer_closed() if s.kind == INTERVALS else True
        else:
            attained = X.contains(s.limit)
        if best is None or top > best[0] or (top == best[0] and attained):
            best = (top, attained)
    if unbounded:
        return None, False
    return best


def _unbounded_interval_above(X: RealSet) -> bool:
    return any(a.hi is None for a in X.intervals)


def _unbounded_interval_below(X: RealSet) -> bool:
    return any(a.lo is None for a in X.intervals)


def _left_interval_at(X: RealSet, v):
    """epsilon > 0 with (v - epsilon, v) inside X, or None."""
    for a in X.intervals:
        if a.hi is not None and a.hi == v:
            return (v - a.lo) if a.lo is not None else Q(1)
    for s in X.schemas:
        if s.kind != INTERVALS:
            continue
        if s.side > 0 and s.outer_value() == v:
            p = s.piece(s.start)
            return v - p.lo
    return None


def _right_interval_at(X: RealSet, v):
    for a in X.intervals:
        if a.lo is not None and a.lo == v:
            return (a.hi - v) if a.hi is not None else Q(1)
    for s in X.schemas:
        if s.kind != INTERVALS:
            continue
        if s.side < 0 and s.outer_value() == v:
            p = s.piece(s.start)
            return p.hi - v
    return None


def extremum_report(m: PLMap, X: RealSet) -> dict:
    """Exact sup/inf of m(X): attainment, adjacent-interval and unbounded data."""
    X.require_normal()
    if X.is_empty():
        raise ValueError("extrema of the empty set are undefined")
    Y = pushforward(m, X)
    sup = _sup_of(Y)
    neg = pushforward(PLMap.affine(-1, 0), Y)
    inf_neg = _sup_of(neg)
    report = {}
    if sup is None or sup[0] is None:
        report["sup"] = None
        report["supAttained"] = False
        report["supLeftIntervalContained"] = _unbounded_interval_above(Y)
    else:
        v, att = sup
        eps = _left_interval_at(Y, v)
        report["sup"] = v
        report["supAttained"] = att
        report["supLeftIntervalContained"] = eps is not None
        report["supEpsilon"] = eps
    if inf_neg is None or inf_neg[0] is None:
        report["inf"] = None
        report["infAttained"] = False
        report["infRightIntervalContained"] = _unbounded_interval_below(Y)
    else:
        v, att = inf_neg
        v = -v
        eps = _right_interval_at(Y, v)
        report["inf"] = v
        report["infAttained"] = att
        report["infRightIntervalContained"] = eps is not None
        report["infEpsilon"] = eps
    return report
