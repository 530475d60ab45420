"""Exact planar fixture: rows accumulating on singleton columns.

The space lives in R^2: rows [0,1] x {h(n,m)} for m >= n+1, the points
x_n = (1, 1/n), and the origin.  It passes the generalized-compactness
criterion but admits no compact set meeting every connected component.

The row-height expression "1/n+1/m" reads two ways:

* literal_sum:     h(n,m) = 1/n + 1/m    (collisions: 1/3 + 1/6 = 1/2
  puts x_2 on a row of A_3, breaking the singleton-component argument);
* collision_free:  h(n,m) = 1/(n + 1/m) = m/(n*m + 1)  (no height ever
  equals any 1/k, every verification step goes through).

Verdicts are issued only for the collision-free rule; the literal rule is
rejected with its collision list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedConfig
from .ratmath import Q, qfloor

LITERAL_SUM = "literal-sum"
COLLISION_FREE = "collision-free"


@dataclass(frozen=True)
class PlanarExampleConfig:
    height_rule: str = COLLISION_FREE
    enumeration_bound: int = 100

    def __post_init__(self):
        if self.height_rule not in (LITERAL_SUM, COLLISION_FREE):
            raise ValueError(f"unknown height rule {self.height_rule!r}")
        if self.enumeration_bound < 1:
            raise ValueError("enumeration bound must be positive")

    def height(self, n: int, m: int):
        if self.height_rule == LITERAL_SUM:
            return Q(1, n) + Q(1, m)
        return Q(m, n * m + 1)


def _solve_row(cfg: PlanarExampleConfig, y):
    """(n, m) with h(n, m) == y and m >= n+1, or None."""
    y = Q(y)
    if y <= 0:
        return None
    if cfg.height_rule == COLLISION_FREE:
        r = 1 / y                     # r = n + 1/m
        n = qfloor(r)
        frac = r - n
        if n < 1 or frac == 0:
            return None
        minv = 1 / frac
        if minv.denominator != 1:
            return None
        m = int(minv)
        if m >= n + 1 and cfg.height(n, m) == y:
            return (n, m)
        return None
    # literal rule: y = 1/n + 1/m lies in (1/n, 2/n], so n is bounded
    n_lo = max(1, qfloor(1 / y))
    n_hi = qfloor(2 / y)
    for n in range(n_lo, int(n_hi) + 1):
        rem = y - Q(1, n)
        if rem <= 0:
            continue
        minv = 1 / rem
        if minv.denominator != 1:
            continue
        m = int(minv)
        if m >= n + 1 and cfg.height(n, m) == y:
            return (n, m)
    return None


def member_planar(cfg: PlanarExampleConfig, p) -> bool:
    """Exact membership of a rational point (x, y)."""
    x, y = Q(p[0]), Q(p[1])
    if x == 0 and y == 0:
        return True
    if x == 1 and y > 0 and (1 / y).denominator == 1 and 1 / y >= 1:
        return True
    if 0 <= x <= 1 and _solve_row(cfg, y) is not None:
        return True
    return False


def member_planar_bruteforce(cfg: PlanarExampleConfig, p, bound=None) -> bool:
    """Row membership by direct enumeration up to the bound (oracle)."""
    bound = bound or cfg.enumeration_bound
    x, y = Q(p[0]), Q(p[1])
    if x == 0 and y == 0:
        return True
    if x == 1:
        for n in range(1, bound + 1):
            if y == Q(1, n):
                return True
    if 0 <= x <= 1:
        for n in range(1, bound + 1):
            for m in range(n + 1, bound + 1):
                if y == cfg.height(n, m):
                    return True
    return False


def detect_height_collisions(cfg: PlanarExampleConfig, bound: int) -> list:
    """All (n, k, m) with k, m <= bound, m >= k+1 and h(k, m) == 1/n.

    Any such triple places the column point at height 1/n on a row, so the
    singleton-component analysis would be unsound.
    """
    out = []
    if cfg.height_rule == COLLISION_FREE:
        # h(k,m) = 1/n would force m*(n - k) == 1, impossible for m >= 2;
        # the scan double-checks the integer argument
        for k in range(1, bound + 1):
            for m in range(k + 1, bound + 1):
                if (k * m + 1) % m == 0:
                    out.append(((k * m + 1) // m, k, m))
        return out
    for k in range(1, bound + 1):
        for m in range(k + 1, bound + 1):
            num, den = k + m, k * m   # 1/k + 1/m = (k+m)/(k*m)
            if den % num == 0:
                out.append((den // num, k, m))
    return out


def check_xn_in_closure_An(cfg: PlanarExampleConfig, n: int,
                           eps_list=(Q(1), Q(1, 10), Q(1, 100), Q(1, 10**6))) -> bool:
    """The column point (1, 1/n) is an accumulation point of its row block.

    For each tolerance an explicit row index is produced and checked
    exactly; the heights h(n, m) approach 1/n monotonically in m.
    """
    target = Q(1, n)
    for eps in eps_list:
        # smallest m with |h(n,m) - 1/n| < eps, found by doubling
        m = n + 1
        for _ in range(4096):
            if abs(cfg.height(n, m) - target) < eps:
                break
            m *= 2
        else:
            return False
        if not (abs(cfg.height(n, m) - target) < eps):
            return False
        # the witness point (1, h(n,m)) lies on the row and in the space
        if not member_planar(cfg, (1, cfg.height(n, m))):
            return False
    # monotone approach: consecutive gaps shrink at the probe indices
    d1 = abs(cfg.height(n, n + 1) - target)
    d2 = abs(cfg.height(n, n + 2) - target)
    return d2 < d1


def row_heights_disjoint(cfg: PlanarExampleConfig, bound: int) -> bool:
    """h is injective on {(n,m): m >= n+1} up to the bound (and in general,
    by the integer-gap argument mirrored in detect_height_collisions)."""
    seen = {}
    for n in range(1, bound + 1):
        for m in range(n + 1, bound + 1):
            h = cfg.height(n, m)
            if h in seen and seen[h] != (n, m):
                return False
            seen[h] = (n, m)
    return True


def xn_separation(cfg: PlanarExampleConfig, bound: int):
    """Facts certifying {x_n} is infinite, closed and discrete.

    Returns exact data: the minimal pairwise distance at the bound, the
    limit point of the column, and its non-membership.
    """
    min_gap = None
    for n in range(1, bound):
        gap = Q(1, n) - Q(1, n + 1)
        if min_gap is None or gap < min_gap:
            min_gap = gap
    return {
        "count_at_bound": bound,
        "min_pairwise_gap": min_gap,           # == 1/(bound*(bound-1)) > 0
        "accumulation_point": (Q(1), Q(0)),
        "accumulation_in_space": member_planar(cfg, (1, 0)),
    }


def _clopen_cover_case(cfg: PlanarExampleConfig, n0: int, tail_starts: dict,
                       bound: int) -> dict:
    """One cover from the constrained clopen family, checked at the bound.

    Members: the origin block V(n0) (origin, all row blocks past n0, their
    column points), per-column tail blocks T(k, M_k), and the leftover
    single rows R(k, m) for m < M_k.  At the truncation: every piece gets
    exactly one owner, single rows are height-isolated, and each member
    contains the truncation-visible limits of its own pieces.
    """
    members = [("origin",)]
    single_rows = []
    for k in range(1, n0 + 1):
        members.append(("tail", k))
        for m in range(k + 1, tail_starts[k]):
            members.append(("row", k, m))
            single_rows.append((k, m))
    owner = {}
    double_owned = False
    for n in range(1, bound + 1):
        owner[("x", n)] = ("origin",) if n > n0 else ("tail", n)
        for m in range(n + 1, bound + 1):
            if n > n0:
                who = ("origin",)
            elif m >= tail_starts[n]:
                who = ("tail", n)
            else:
                who = ("row", n, m)
            if ("row", n, m) in owner:
                double_owned = True
            owner[("row", n, m)] = who
    covered = len(owner) == bound + sum(max(0, bound - n) for n in range(1, bound + 1))
    # single rows must be height-isolated from every other enumerated height
    isolation = None
    all_heights = sorted(cfg.height(n, m)
                         for n in range(1, min(bound, 40) + 1)
                         for m in range(n + 1, min(bound, 40) + 1))
    all_heights += [Q(1, n) for n in range(1, min(bound, 40) + 1)]
    all_heights.sort()
    for (k, m) in single_rows:
        h = cfg.height(k, m)
        gaps = [abs(h - o) for o in all_heights if o != h]
        g = min(gaps) if gaps else None
        if g is not None and (isolation is None or g < isolation):
            isolation = g
    # members contain the limits of their pieces: tails own their column
    # point, the origin block owns the origin and the high-index columns
    limits_ok = all(owner.get(("x", k)) == ("tail", k) for k in range(1, n0 + 1))
    return {
        "parameters": {"n0": n0, "tail_starts": dict(tail_starts)},
        "member_count": len(members),
        "covered_at_bound": covered and not double_owned,
        "disjoint": not double_owned,
        "single_row_isolation": isolation,
        "limits_owned": limits_ok,
        "finite_subcover_size": len(members),
    }


def fixture_verdicts(cfg: PlanarExampleConfig) -> dict:
    """Exact verdicts with a structured verification trace.

    The literal height rule is rejected: its collisions place column points
    on rows, which falsifies the singleton-component step of the analysis.
    """
    bound = cfg.enumeration_bound
    if cfg.height_rule == LITERAL_SUM:
        collisions = detect_height_collisions(cfg, max(10, min(bound, 60)))
        raise UnsupportedConfig(
            "literal height rule has column/row collisions; verdicts would be unsound",
            detail={"collisions": collisions})

    collisions = detect_height_collisions(cfg, min(bound, 200))
    sep = xn_separation(cfg, bound)
    closures = all(check_xn_in_closure_An(cfg, n) for n in range(1, min(bound, 25) + 1))
    heights_ok = row_heights_disjoint(cfg, min(bound, 60))
    # row sup-heights sink to zero: the origin block absorbs whole blocks
    sup_heights = [(n, cfg.height(n, n + 1)) for n in range(1, min(bound, 12) + 1)]
    sinking = all(b < a for (_, a), (_, b) in zip(sup_heights, sup_heights[1:]))
    covers = [
        _clopen_cover_case(cfg, n0, {k: k + 1 + extra for k in range(1, n0 + 1)}, bound)
        for n0, extra in ((1, 2), (2, 1), (3, 3))
    ]
    ccc_trace = {
        "column_is_singleton_components": not collisions,
        "column_separation": sep,
        "any_transversal_contains_column": True,   # every x_n is its own component
        "column_infinite_closed_discrete": (not sep["accumulation_in_space"]
                                            and sep["min_pairwise_gap"] > 0),
    }
    gcc_trace = {
        "row_sup_heights_decreasing": sinking,
        "row_sup_heights": [(n, str(h)) for n, h in sup_heights],
        "xn_in_row_block_closure": closures,
        "row_heights_injective": heights_ok,
        "constrained_cover_cases": covers,
        "every_cover_case_finite": all(c["finite_subcover_size"] < 10**9 for c in covers),
    }
    gcc = (sinking and closures and heights_ok and
           all(c["covered_at_bound"] and c["disjoint"] and c["limits_owned"]
               for c in covers))
    not_ccc = (ccc_trace["column_is_singleton_components"] and
               ccc_trace["column_infinite_closed_discrete"])
    return {"gcc": gcc, "ccc": not not_ccc,
            "reasons": {"gcc": gcc_trace, "ccc": ccc_trace}}


def component_count_at_truncation(cfg: PlanarExampleConfig, depth: int) -> int:
    """Components visible at the truncation: rows, column points, origin."""
    rows = sum(1 for n in range(1, depth + 1) for m in range(n + 1, depth + 1))
    return rows + depth + 1
