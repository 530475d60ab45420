"""Executable continuous surjection (compact transversal) x R -> X.

For a set passing the compactness criterion, the transversal A is compact
and meets every component.  Boundary-selected points map constantly to
themselves; each interior-selected point carries a piecewise-rational
surjection from R onto its own component.  Every formula is rational, so
evaluation, image bounds, and preimages are exact over the rationals.

The Cantor stage exposes the standard surjection Cantor -> A as bracket
refinement: each bit splits the current compact node in two and descends.
"""

from __future__ import annotations

from dataclasses import dataclass

from .deciders import Transversal, decide_gcc_transversal
from .engine import _first_true
from .errors import DomainError, NotCompact, NotGcc, NotMember
from .ratmath import Q, qsign
from .sets import POINTS, IntervalAtom, PointAtom, RealSet, SchemaAtom
from .topology import predicates


@dataclass(frozen=True)
class ComponentSurjection:
    """Continuous map from R exactly onto one interval component."""

    kind: str
    lo: object = None
    hi: object = None

    @staticmethod
    def for_interval(a: IntervalAtom) -> "ComponentSurjection":
        if a.lo is None and a.hi is None:
            return ComponentSurjection("full_line")
        if a.lo is None:
            return ComponentSurjection("ray_down_closed" if a.hi_closed else "ray_down_open",
                                       hi=a.hi)
        if a.hi is None:
            return ComponentSurjection("ray_up_closed" if a.lo_closed else "ray_up_open",
                                       lo=a.lo)
        if a.lo_closed and a.hi_closed:
            return ComponentSurjection("closed", a.lo, a.hi)
        if a.lo_closed:
            return ComponentSurjection("half_left", a.lo, a.hi)
        if a.hi_closed:
            return ComponentSurjection("half_right", a.lo, a.hi)
        return ComponentSurjection("open", a.lo, a.hi)

    def eval(self, y):
        y = Q(y)
        k = self.kind
        if k == "full_line":
            return y
        if k == "open":
            m = (self.lo + self.hi) / 2
            h = (self.hi - self.lo) / 2
            return m + h * y / (1 + abs(y))
        if k == "closed":
            v = self.lo + (self.hi - self.lo) * (y + 1) / 2
            return min(max(v, self.lo), self.hi)
        if k == "half_left":   # [lo, hi)
            return self.lo + (self.hi - self.lo) * abs(y) / (1 + abs(y))
        if k == "half_right":  # (lo, hi]
            return self.hi - (self.hi - self.lo) * abs(y) / (1 + abs(y))
        if k == "ray_up_open":    # (lo, inf)
            return self.lo + (Q(1) / (1 - y) if y <= 0 else 1 + y)
        if k == "ray_up_closed":  # [lo, inf)
            return self.lo + max(Q(0), y)
        if k == "ray_down_open":  # (-inf, hi)
            return self.hi - (Q(1) / (1 - y) if y <= 0 else 1 + y)
        if k == "ray_down_closed":
            return self.hi - max(Q(0), y)
        raise ValueError(f"unknown catalog kind {k!r}")

    def invert(self, t):
        """Some y with eval(y) == t, exact."""
        t = Q(t)
        k = self.kind
        if k == "full_line":
            return t
        if k == "open":
            m = (self.lo + self.hi) / 2
            h = (self.hi - self.lo) / 2
            v = (t - m) / h
            return v / (1 - abs(v))
        if k == "closed":
            return 2 * (t - self.lo) / (self.hi - self.lo) - 1
        if k == "half_left":
            v = (t - self.lo) / (self.hi - self.lo)
            return v / (1 - v)
        if k == "half_right":
            v = (self.hi - t) / (self.hi - self.lo)
            return v / (1 - v)
        if k == "ray_up_open":
            return (t - self.lo - 1) if t >= self.lo + 1 else 1 - 1 / (t - self.lo)
        if k == "ray_up_closed":
            return t - self.lo
        if k == "ray_down_open":
            return (self.hi - t - 1) if t <= self.hi - 1 else 1 - 1 / (self.hi - t)
        if k == "ray_down_closed":
            return self.hi - t
        raise ValueError(f"unknown catalog kind {k!r}")


@dataclass(frozen=True)
class SurjectionPlan:
    """Total rule table over the transversal domain A."""

    base: RealSet
    transversal: Transversal
    constant_points: frozenset          # boundary selections: f(a, y) = a
    interior_rules: tuple               # (point, ComponentSurjection) pairs
    family_rules: tuple                 # (selection seq as SchemaAtom, source schema)

    @property
    def domain(self) -> RealSet:
        return self.transversal.set


def build_surjection(X: RealSet) -> SurjectionPlan:
    """Plan for a continuous surjection A x R onto X (A the transversal)."""
    res = decide_gcc_transversal(X)
    if not res["verdict"]:
        raise NotGcc("no such surjection exists for this set")
    t = res["transversal"]
    constants = set()
    interior = []
    for comp, sel in t.finite:
        if isinstance(comp, PointAtom):
            constants.add(comp.value)
            continue
        for v in sel:
            if comp.open_version().contains(v):
                interior.append((v, ComponentSurjection.for_interval(comp)))
            else:
                constants.add(v)
    fam_rules = []
    for schema, seqs in t.families:
        for q in seqs:
            if schema.kind == POINTS:
                # singleton components map to themselves
                fam_rules.append((SchemaAtom(POINTS, schema.start, seq=q), schema, "constant"))
            elif q is schema.left or q is schema.right:
                fam_rules.append((SchemaAtom(POINTS, schema.start, seq=q), schema, "constant"))
            else:
                fam_rules.append((SchemaAtom(POINTS, schema.start, seq=q), schema, "interior"))
    return SurjectionPlan(X, t, frozenset(constants), tuple(interior), tuple(fam_rules))


def _family_rule_at(plan: SurjectionPlan, a):
    for sel_fam, schema, mode in plan.family_rules:
        n = sel_fam.index_of(a)
        if n is not None:
            return sel_fam, schema, mode, n
    return None


def eval_surjection(plan: SurjectionPlan, a, y):
    """Exact value of the plan at (a, y); a must lie in the domain A."""
    a, y = Q(a), Q(y)
    if a in plan.constant_points:
        return a
    for v, rule in plan.interior_rules:
        if v == a:
            return rule.eval(y)
    hit = _family_rule_at(plan, a)
    if hit is None:
        raise DomainError(f"{a} is not a transversal point")
    sel_fam, schema, mode, n = hit
    if mode == "constant":
        return a
    piece = schema.piece(n)
    return ComponentSurjection.for_interval(piece).eval(y)


def solve_preimage(plan: SurjectionPlan, target):
    """(a, y) with eval_surjection(plan, a, y) == target, exact."""
    t = Q(target)
    X = plan.base
    if not X.contains(t):
        raise NotMember(f"{t} is not in the base set")
    # locate the component of t
    for comp, sel in plan.transversal.finite:
        if isinstance(comp, PointAtom):
            if comp.value == t:
                return (t, Q(0))
            continue
        if comp.contains(t):
            if t in plan.constant_points and t in sel:
                return (t, Q(0))
            for v in sel:
                if comp.open_version().contains(v):
                    rule = ComponentSurjection.for_interval(comp)
                    return (v, rule.invert(t))
    for schema, seqs in plan.transversal.families:
        n = schema.index_of(t)
        if n is None:
            continue
        if schema.kind == POINTS:
            return (t, Q(0))
        if schema.left_closed and schema.left.value(n) == t:
            return (t, Q(0))
        if schema.right_closed and schema.right.value(n) == t:
            return (t, Q(0))
        for q in seqs:
            if q is schema.left or q is schema.right:
                continue
            a = q.value(n)
            rule = ComponentSurjection.for_interval(schema.piece(n))
            return (a, rule.invert(t))
    raise NotMember(f"could not locate the component of {t}")


DEFAULT_GRID = {
    "delta0": Q(1, 1024),
    "halvings": 4,
    "y_grid": (Q(-2), Q(-1), Q(-1, 2), Q(0), Q(1, 2), Q(1), Q(2)),
    "family_depth": 3,
}


def _domain_samples_near(plan: SurjectionPlan, a, delta, depth):
    """Domain points within delta of a (always includes a itself)."""
    out = [a]
    for p in plan.transversal.set.points:
        if p.value != a and abs(p.value - a) <= delta:
            out.append(p.value)
    for sel_fam, schema, mode in plan.family_rules:
        L = sel_fam.limit
        if abs(L - a) > delta + 1:
            continue
        # a few family points within delta of a
        seq = sel_fam.seq
        n = _first_true(lambda k: abs(seq.value(k) - a) <= delta
                        if qsign(seq.value(k) - L) == qsign(a - L) or a == L
                        else False, sel_fam.start,
                        cap=10**6) if abs(L - a) <= delta else None
        if n is None:
            continue
        for k in range(n, n + depth):
            v = seq.value(k)
            if abs(v - a) <= delta:
                out.append(v)
    return out


def continuity_samples(plan: SurjectionPlan, epsilon, grid_spec=None) -> list:
    """Sampled continuity check; returns base points that look discontinuous.

    For each sampled base point, the image spread over neighbors within
    delta must fall at or below epsilon after successively halving delta;
    points where it never does are reported.  Expected empty: the catalog
    maps are rational with controlled moduli.
    """
    eps = Q(epsilon)
    spec = dict(DEFAULT_GRID)
    if grid_spec:
        spec.update(grid_spec)
    delta0 = Q(spec["delta0"])
    halvings = int(spec["halvings"])
    y_grid = tuple(Q(y) for y in spec["y_grid"])
    depth = int(spec["family_depth"])

    base_points = [p.value for p in plan.transversal.set.points]
    for sel_fam, schema, mode in plan.family_rules:
        base_points += [sel_fam.seq.value(sel_fam.start + i) for i in range(depth)]
        base_points.append(sel_fam.limit)  # accumulation candidates
    base_points = sorted(set(v for v in base_points if plan.transversal.set.contains(v)))

    violations = []
    for a in base_points:
        for y in y_grid:
            f0 = eval_surjection(plan, a, y)
            ok = False
            for k in range(halvings + 1):
                delta = delta0 / (2 ** k)
                spread = Q(0)
                for a2 in _domain_samples_near(plan, a, delta, depth):
                    for y2 in y_grid:
                        if max(abs(a2 - a), abs(y2 - y)) > delta:
                            continue
                        d = abs(eval_surjection(plan, a2, y2) - f0)
                        if d > spread:
                            spread = d
                if spread <= eps:
                    ok = True
                    break
            if not ok:
                violations.append((a, y))
    return violations


# ---------------------------------------------------------------------------
# Cantor stage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    lo: object
    hi: object

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, q) -> bool:
        return self.lo <= q <= self.hi


def _hull(S: RealSet):
    """Extremes of a bounded set."""
    los, his = [], []
    for a in S.intervals:
        los.append(a.lo)
        his.append(a.hi)
    for p in S.points:
        los.append(p.value)
        his.append(p.value)
    for s in S.schemas:
        los.append(min(s.limit, s.outer_value()))
        his.append(max(s.limit, s.outer_value()))
    return min(los), max(his)


def _fam_window_range(s: SchemaAtom, lo, hi):
    """Indices of pieces meeting the closed window [lo, hi]: (nA, nB) with
    nB None for an infinite tail (the limit side is inside the window)."""
    L, side = s.limit, s.side
    outer = s.outer_seq()
    if side > 0:
        if outer.value(s.start) < lo or L >= hi:
            return None
        nA = (s.start if outer.value(s.start) <= hi
              else _first_true(lambda n: outer.value(n) <= hi, s.start))
        if L >= lo:
            return (nA, None)
        nB = _first_true(lambda n: outer.value(n) < lo, nA) - 1
        return (nA, nB) if nB >= nA else None
    else:
        if outer.value(s.start) > hi or L <= lo:
            return None
        nA = (s.start if outer.value(s.start) >= lo
              else _first_true(lambda n: outer.value(n) >= lo, s.start))
        if L <= hi:
            return (nA, None)
        nB = _first_true(lambda n: outer.value(n) > hi, nA) - 1
        return (nA, nB) if nB >= nA else None


def _window_hull(A: RealSet, lo, hi):
    """Extremes of the compact set A within the closed window [lo, hi]."""
    los, his = [], []
    for a in A.intervals:
        if a.hi < lo or a.lo > hi:
            continue
        los.append(max(a.lo, lo))
        his.append(min(a.hi, hi))
    for p in A.points:
        if lo <= p.value <= hi:
            los.append(p.value)
            his.append(p.value)
    for s in A.schemas:
        rng = _fam_window_range(s, lo, hi)
        if rng is None:
            continue
        nA, nB = rng
        pa = s.piece(nA)
        ends = [pa.value] if isinstance(pa, PointAtom) else [max(pa.lo, lo), min(pa.hi, hi)]
        if nB is not None:
            pb = s.piece(nB)
            ends += [pb.value] if isinstance(pb, PointAtom) else [max(pb.lo, lo), min(pb.hi, hi)]
        else:
            ends.append(max(s.limit, lo) if s.side > 0 else min(s.limit, hi))
        los.append(min(ends))
        his.append(max(ends))
    if not los:
        return None
    return min(los), max(his)


def _fam_gap(s: SchemaAtom, n):
    """Gap between pieces n and n+1 as (g_lo, g_hi)."""
    inner, outer = s.inner_seq(), s.outer_seq()
    if s.side > 0:
        return (outer.value(n + 1), inner.value(n))
    return (inner.value(n), outer.value(n + 1))


def _candidate_gaps(A: RealSet, lo, hi):
    """Internal gaps of A within [lo, hi] worth splitting at.

    Contains every between-part gap plus, per family, the largest in-window
    gap and the largest gap whose midpoint falls in each queried zone; gap
    widths within a family shrink monotonically after a computable index.
    """
    extents = []
    fam_ranges = []
    for a in A.intervals:
        if a.hi < lo or a.lo > hi:
            continue
        extents.append((max(a.lo, lo), min(a.hi, hi)))
    for p in A.points:
        if lo <= p.value <= hi:
            extents.append((p.value, p.value))
    for s in A.schemas:
        rng = _fam_window_range(s, lo, hi)
        if rng is None:
            continue
        nA, nB = rng
        if s.side > 0:
            top = min(s.outer_seq().value(nA), hi)
            bot = max(s.limit, lo) if nB is None else max(s.inner_seq().value(nB), lo)
        else:
            bot = max(s.outer_seq().value(nA), lo)
            top = min(s.limit, hi) if nB is None else min(s.inner_seq().value(nB), hi)
        extents.append((bot, top))
        fam_ranges.append((s, nA, nB))
    extents.sort()
    gaps = []
    for i in range(len(extents) - 1):
        g = (extents[i][1], extents[i + 1][0])
        if g[1] > g[0]:
            gaps.append(g)
    for s, nA, nB in fam_ranges:
        last = nB - 1 if nB is not None else nA + 8
        for n in range(nA, min(nA + 8, last + 1)):
            g = _fam_gap(s, n)
            if g[1] > g[0] and g[0] >= lo and g[1] <= hi:
                gaps.append(g)
    return gaps, fam_ranges


def _zone_gap(s: SchemaAtom, nA, nB, zone_lo, zone_hi):
    """Largest family gap whose midpoint lies in [zone_lo, zone_hi]."""

    def mid(n):
        g = _fam_gap(s, n)
        return (g[0] + g[1]) / 2

    # gap midpoints move monotonically toward the limit
    side = s.side
    try:
        if side > 0:
            if mid(nA) < zone_lo:
                return None
            z1 = nA if mid(nA) <= zone_hi else _first_true(
                lambda n: mid(n) <= zone_hi, nA)
        else:
            if mid(nA) > zone_hi:
                return None
            z1 = nA if mid(nA) >= zone_lo else _first_true(
                lambda n: mid(n) >= zone_lo, nA)
    except Exception:
        return None
    if nB is not None and z1 > nB - 1:
        return None
    g = _fam_gap(s, z1)
    m = (g[0] + g[1]) / 2
    if zone_lo <= m <= zone_hi and g[1] > g[0]:
        return g
    return None


def _split_point(A: RealSet, lo, hi):
    hull = _window_hull(A, lo, hi)
    h_lo, h_hi = hull
    w = h_hi - h_lo
    gaps, fam_ranges = _candidate_gaps(A, h_lo, h_hi)
    gaps.sort(key=lambda g: (-(g[1] - g[0]), g[0]))
    if gaps and (gaps[0][1] - gaps[0][0]) >= w / 4:
        g = gaps[0]
        return (g[0] + g[1]) / 2
    zone_lo, zone_hi = h_lo + w / 4, h_lo + 3 * w / 4
    zone = [g for g in gaps if zone_lo <= (g[0] + g[1]) / 2 <= zone_hi]
    for s, nA, nB in fam_ranges:
        zg = _zone_gap(s, nA, nB, zone_lo, zone_hi)
        if zg is not None:
            zone.append(zg)
    if zone:
        zone.sort(key=lambda g: (-(g[1] - g[0]), g[0]))
        g = zone[0]
        return (g[0] + g[1]) / 2
    return (h_lo + h_hi) / 2


def cantor_eval(A: RealSet, bits: str) -> Bracket:
    """Bracket of the Cantor-stage surjection after consuming `bits`.

    Each bit splits the current compact node in two nonempty closed parts,
    preferring the largest internal gap (leftmost on ties) and falling back
    to interior gaps or the hull midpoint so that bracket widths decay
    geometrically.  Nodes are windows onto A; nothing is materialized.
    """
    A.require_normal()
    if A.is_empty():
        raise NotCompact("empty set has no Cantor surjection")
    if not predicates(A)["compact"]:
        raise NotCompact("the Cantor stage needs a compact base")
    lo, hi = _window_hull(A, _hull(A)[0], _hull(A)[1])
    for b in bits:
        if b not in "01":
            raise ValueError("bits must be a 0/1 string")
        lo, hi = _window_hull(A, lo, hi)
        if lo == hi:
            break
        m = _split_point(A, lo, hi)
        if b == "0":
            hi = m
        else:
            lo = m
    res = _window_hull(A, lo, hi)
    return Bracket(res[0], res[1])


def cantor_path_to(A: RealSet, target, depth: int) -> str:
    """A bit path whose depth-k bracket contains the target point."""
    t = Q(target)
    if not A.contains(t):
        raise NotMember(f"{target} is not in the set")
    lo, hi = _hull(A)
    bits = []
    for _ in range(depth):
        lo, hi = _window_hull(A, lo, hi)
        if lo == hi:
            bits.append("0")
            continue
        m = _split_point(A, lo, hi)
        if t <= m:
            bits.append("0")
            hi = m
        else:
            bits.append("1")
            lo = m
    return "".join(bits)
