"""Symbolic subsets of the real line.

A RealSet is a finite description of a (possibly infinite) union of
pairwise disjoint parts:

* IntervalAtom   - a nondegenerate interval, bounds open/closed/infinite;
* PointAtom      - a singleton;
* SchemaAtom     - an infinite family of intervals or points whose pieces
                   approach a finite rational limit from one fixed side,
                   with endpoints given by convergent index sequences.

Only normalized RealSets (pairwise disjoint, canonically merged parts) are
accepted by the topological operations; `engine.normalize` produces them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .polyseq import RatSeq
from .ratmath import Q, fmt, qsign


@dataclass(frozen=True)
class IntervalAtom:
    """Interval with exact rational or infinite bounds; lo < hi."""

    lo: object  # Q or None (= -inf)
    hi: object  # Q or None (= +inf)
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", Q(self.lo))
        else:
            object.__setattr__(self, "lo_closed", False)
        if self.hi is not None:
            object.__setattr__(self, "hi", Q(self.hi))
        else:
            object.__setattr__(self, "hi_closed", False)
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    def contains(self, q) -> bool:
        if self.lo is not None:
            if q < self.lo or (q == self.lo and not self.lo_closed):
                return False
        if self.hi is not None:
            if q > self.hi or (q == self.hi and not self.hi_closed):
                return False
        return True

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    def closed_version(self) -> "IntervalAtom":
        return IntervalAtom(self.lo, self.hi,
                            self.lo is not None, self.hi is not None)

    def open_version(self) -> "IntervalAtom":
        return IntervalAtom(self.lo, self.hi, False, False)

    def __str__(self):
        l = "-inf" if self.lo is None else fmt(self.lo)
        h = "inf" if self.hi is None else fmt(self.hi)
        return f"{'[' if self.lo_closed else '('}{l},{h}{']' if self.hi_closed else ')'}"


@dataclass(frozen=True)
class PointAtom:
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", Q(self.value))

    def contains(self, q) -> bool:
        return q == self.value

    def __str__(self):
        return "{%s}" % fmt(self.value)


INTERVALS = "intervals"
POINTS = "points"


@dataclass(frozen=True)
class SchemaAtom:
    """Convergent family of pieces, one per integer index n >= start.

    For kind=intervals, piece n is the interval from left(n) to right(n)
    with the stated openness; for kind=points it is the singleton {seq(n)}.
    All pieces lie strictly on one side of the shared finite limit and
    their positions are strictly monotone toward it.
    """

    kind: str
    start: int = 1
    left: RatSeq | None = None
    left_closed: bool = False
    right: RatSeq | None = None
    right_closed: bool = False
    seq: RatSeq | None = None

    def __post_init__(self):
        if self.kind == INTERVALS:
            if self.left is None or self.right is None:
                raise ValueError("interval family needs both endpoint sequences")
        elif self.kind == POINTS:
            if self.seq is None:
                raise ValueError("point family needs its value sequence")
        else:
            raise ValueError(f"unknown schema kind {self.kind!r}")
        if self.start < 1:
            raise ValueError("start index must be positive")

    # -- geometry ---------------------------------------------------------
    @cached_property
    def limit(self):
        s = self.seq if self.kind == POINTS else self.left
        return s.limit

    @cached_property
    def side(self) -> int:
        """+1 if pieces lie above the limit, -1 below."""
        s = self.seq if self.kind == POINTS else self.left
        return -s.direction(self.start)

    def inner_seq(self) -> RatSeq:
        """Bound sequence nearest the limit."""
        if self.kind == POINTS:
            return self.seq
        return self.left if self.side > 0 else self.right

    def outer_seq(self) -> RatSeq:
        if self.kind == POINTS:
            return self.seq
        return self.right if self.side > 0 else self.left

    def outer_value(self):
        """Position of the outermost bound (piece at the start index)."""
        return self.outer_seq().value(self.start)

    def outer_closed(self) -> bool:
        if self.kind == POINTS:
            return True
        return self.right_closed if self.side > 0 else self.left_closed

    def piece(self, n):
        if self.kind == POINTS:
            return PointAtom(self.seq.value(n))
        return IntervalAtom(self.left.value(n), self.right.value(n),
                            self.left_closed, self.right_closed)

    def pieces(self, count: int):
        return [self.piece(self.start + i) for i in range(count)]

    # -- membership ---------------------------------------------------------
    def index_near(self, q):
        """Index of the piece whose span could contain q, or None.

        Pieces are strictly monotone toward the limit, so exponential plus
        binary search on the outer bound pins the single candidate.
        """
        side = self.side
        d = qsign(Q(q) - self.limit)
        if d != side:
            return None
        out = self.outer_seq()
        if side > 0:
            beyond = out.value(self.start) < q
        else:
            beyond = out.value(self.start) > q
        if beyond:
            return None
        # find last n with outer(n) >= q (above) / <= q (below)
        lo = self.start
        hi = self.start + 1
        while (out.value(hi) >= q if side > 0 else out.value(hi) <= q):
            lo = hi
            hi = 2 * hi + 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if (out.value(mid) >= q if side > 0 else out.value(mid) <= q):
                lo = mid
            else:
                hi = mid
        return lo

    def index_of(self, q):
        """Index of the piece containing q, or None."""
        n = self.index_near(q)
        if n is None:
            return None
        for cand in (n, n - 1):
            if cand >= self.start and self.piece(cand).contains(q):
                return cand
        return None

    def contains(self, q) -> bool:
        return self.index_of(q) is not None

    # -- reshaping -----------------------------------------------------------
    def with_start(self, start: int) -> "SchemaAtom":
        if start < self.start:
            raise ValueError("cannot extend a family backwards")
        return SchemaAtom(self.kind, start, self.left, self.left_closed,
                          self.right, self.right_closed, self.seq)

    def reindexed_to_one(self) -> "SchemaAtom":
        """Shift indices so the family starts at 1 (same pieces)."""
        k = self.start - 1
        if k == 0:
            return self
        if self.kind == POINTS:
            return SchemaAtom(POINTS, 1, seq=self.seq.shift(k))
        return SchemaAtom(INTERVALS, 1, self.left.shift(k), self.left_closed,
                          self.right.shift(k), self.right_closed)

    def map_affine(self, alpha, beta) -> "SchemaAtom":
        """Image under x -> alpha*x + beta with alpha != 0."""
        if alpha == 0:
            raise ValueError("affine image with zero slope collapses the family")
        if self.kind == POINTS:
            return SchemaAtom(POINTS, self.start, seq=self.seq.affine(alpha, beta))
        l2 = self.left.affine(alpha, beta)
        r2 = self.right.affine(alpha, beta)
        if alpha > 0:
            return SchemaAtom(INTERVALS, self.start, l2, self.left_closed,
                              r2, self.right_closed)
        return SchemaAtom(INTERVALS, self.start, r2, self.right_closed,
                          l2, self.left_closed)

    def __str__(self):
        from .dsl import format_schema
        return format_schema(self)


@dataclass(frozen=True)
class RealSet:
    """A finite union of pairwise disjoint atoms and schema families."""

    intervals: tuple = ()
    points: tuple = ()
    schemas: tuple = ()
    normal: bool = field(default=False, compare=False)

    @staticmethod
    def build(intervals=(), points=(), schemas=(), normal=False) -> "RealSet":
        return RealSet(tuple(intervals), tuple(points), tuple(schemas), normal)

    @staticmethod
    def empty() -> "RealSet":
        return RealSet((), (), (), True)

    @staticmethod
    def whole_line() -> "RealSet":
        return RealSet((IntervalAtom(None, None),), (), (), True)

    def is_empty(self) -> bool:
        return not (self.intervals or self.points or self.schemas)

    def parts(self):
        return list(self.intervals) + list(self.points) + list(self.schemas)

    def require_normal(self):
        if not self.normal:
            raise ValueError("operation requires a normalized RealSet")

    # -- membership -------------------------------------------------------
    def contains(self, q) -> bool:
        q = Q(q)
        for a in self.intervals:
            if a.contains(q):
                return True
        for p in self.points:
            if p.value == q:
                return True
        return any(s.contains(q) for s in self.schemas)

    # -- simple structure --------------------------------------------------
    def part_sort_key(self, part):
        if isinstance(part, IntervalAtom):
            inf_key = (0,) if part.lo is None else (1, part.lo)
            return (*inf_key, 1)
        if isinstance(part, PointAtom):
            return (1, part.value, 0)
        inf = part.limit if part.side > 0 else part.outer_value()
        return (1, inf, 2)

    def sorted_parts(self):
        return sorted(self.parts(), key=self.part_sort_key)

    def __str__(self):
        from .dsl import format_set
        return format_set(self)


def member(X: RealSet, q) -> bool:
    """Exact membership of a rational in a normalized set."""
    X.require_normal()
    return X.contains(Q(q))


def raw_member(X: RealSet, q, depth: int = 10_000) -> bool:
    """Membership by direct enumeration of pieces up to `depth` indices.

    Independent oracle: interprets a set description piece by piece with no
    normalization, solving, or certification.  Probes must stay inside the
    enumerated window by construction.
    """
    return RawOracle(X, depth).contains(q)


class RawOracle:
    """Materialized piece-by-piece interpretation of a raw description.

    Enumerates every family up to `depth` indices once; lookups then bisect
    the sorted piece list.  Purely enumerative - shares no machinery with
    the symbolic engine.
    """

    def __init__(self, X: RealSet, depth: int = 10_000):
        self.atoms = list(X.intervals) + list(X.points)
        spans = []
        for s in X.schemas:
            for n in range(s.start, s.start + depth):
                piece = s.piece(n)
                if isinstance(piece, PointAtom):
                    spans.append((piece.value, piece.value, True, True))
                else:
                    spans.append((piece.lo, piece.hi, piece.lo_closed, piece.hi_closed))
        spans.sort()
        self.spans = spans
        self.lows = [sp[0] for sp in spans]
        # prefix maxima of the upper ends, closed beating open on ties
        self.prefmax = []
        best = None
        for (lo, hi, lc, hc) in spans:
            cand = (hi, hc)
            if best is None or cand > best:
                best = cand
            self.prefmax.append(best)

    def contains(self, q) -> bool:
        q = Q(q)
        for a in self.atoms:
            if a.contains(q):
                return True
        from bisect import bisect_left, bisect_right
        i_strict = bisect_left(self.lows, q)
        if i_strict > 0:
            hi, hc = self.prefmax[i_strict - 1]
            if hi > q or (hi == q and hc):
                return True
        for j in range(i_strict, bisect_right(self.lows, q)):
            lo, hi, lc, hc = self.spans[j]
            if lc and (q < hi or (q == hi and hc)):
                return True
        return False
