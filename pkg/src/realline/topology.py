"""Topological queries on normalized RealSets.

Closure, interior (taken in R), connected components, compactness
predicates, and the local-connectedness defect list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import normalize
from .sets import INTERVALS, POINTS, IntervalAtom, PointAtom, RealSet, SchemaAtom


def closure(X: RealSet) -> RealSet:
    """Smallest closed superset: close every part, add schema limits."""
    X.require_normal()
    intervals = [a.closed_version() for a in X.intervals]
    points = list(X.points)
    schemas = []
    for s in X.schemas:
        points.append(PointAtom(s.limit))
        if s.kind == INTERVALS:
            schemas.append(SchemaAtom(INTERVALS, s.start, s.left, True, s.right, True))
        else:
            schemas.append(s)
    return normalize(RealSet.build(intervals, points, schemas))


def interior(X: RealSet) -> RealSet:
    """Largest open subset of R contained in X.

    In normal form no interval of R can straddle two parts, so the interior
    is the union of the parts' own interiors.
    """
    X.require_normal()
    from .engine import _lo_key
    intervals = [a.open_version() for a in X.intervals]
    schemas = [SchemaAtom(INTERVALS, s.start, s.left, False, s.right, False)
               for s in X.schemas if s.kind == INTERVALS]
    return RealSet.build(sorted(intervals, key=_lo_key), (), schemas, normal=True)


@dataclass(frozen=True)
class FamilyComponents:
    """Descriptor for the component family contributed by one schema."""

    schema: SchemaAtom
    singleton: bool
    left_closed: bool
    right_closed: bool


@dataclass(frozen=True)
class ComponentList:
    finite: tuple
    families: tuple

    def count_finite(self) -> int:
        return len(self.finite)


def components(X: RealSet) -> ComponentList:
    """Maximal connected subsets: atoms and one family per schema."""
    X.require_normal()
    finite = sorted(list(X.intervals) + list(X.points),
                    key=lambda p: ((0,) if isinstance(p, IntervalAtom) and p.lo is None
                                   else (1, p.lo if isinstance(p, IntervalAtom) else p.value)))
    fams = []
    for s in X.schemas:
        if s.kind == POINTS:
            fams.append(FamilyComponents(s, True, True, True))
        else:
            fams.append(FamilyComponents(s, False, s.left_closed, s.right_closed))
    return ComponentList(tuple(finite), tuple(fams))


def predicates(X: RealSet) -> dict:
    """{bounded, closed, compact} for a normalized set."""
    X.require_normal()
    bounded = all(a.lo is not None and a.hi is not None for a in X.intervals)
    closed_flag = all(
        (a.lo is None or a.lo_closed) and (a.hi is None or a.hi_closed)
        for a in X.intervals)
    for s in X.schemas:
        if s.kind == INTERVALS and not (s.left_closed and s.right_closed):
            closed_flag = False
        if closed_flag and not X.contains(s.limit):
            closed_flag = False
    return {"bounded": bounded, "closed": closed_flag,
            "compact": bounded and closed_flag}


def local_connectedness_defects(Y: RealSet) -> list:
    """Points of Y whose every neighborhood meets infinitely many components.

    On this class these are exactly the schema limits that belong to Y: the
    pieces of a surviving schema accumulate at its limit with gaps, so no
    small neighborhood there is connected, and every other point has
    arbitrarily small connected neighborhoods.
    """
    Y.require_normal()
    out = []
    for s in Y.schemas:
        L = s.limit
        if Y.contains(L) and L not in out:
            out.append(L)
    return sorted(out)
