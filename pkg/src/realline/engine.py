"""Normalization and boolean algebra for RealSets.

Strategy
--------
Atoms are merged by a standard sweep.  Schema families are analyzed in
reciprocal coordinates: around a limit L, the map u = 1/|x - L| turns every
Mobius endpoint sequence into an *affine* function of the index, and every
family whose pieces are pairwise disjoint becomes an exactly periodic
pattern (piece n+1 is piece n translated by a fixed u-step).  Families
sharing a limit and side therefore admit a common period T, and one sorted
window of length T decides all overlap, touching, and merging questions for
the entire tails at once.  Finitely many head pieces fall outside the
certified zone and are extracted as plain atoms.

Anything the engine cannot certify raises Unnormalizable - it never
guesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import Unnormalizable
from .polyseq import const_plus_recip, stable_from, tail_sign_violations, psub, pmul, pshift
from .ratmath import Q, qceil
from .sets import INTERVALS, POINTS, IntervalAtom, PointAtom, RealSet, SchemaAtom

HEAD_CAP = 512          # max pieces extracted from one family
WINDOW_CAP = 256        # max pieces in one periodic window
FUEL = 16               # interaction-loop rounds before giving up


# ---------------------------------------------------------------------------
# bound helpers (None = infinite on its side)
# ---------------------------------------------------------------------------


def _lo_key(a: IntervalAtom):
    # closed bounds sort first so that merges keep the more inclusive end
    return (0,) if a.lo is None else (1, a.lo, not a.lo_closed)


def _intervals_mergeable(a: IntervalAtom, b: IntervalAtom) -> bool:
    """b starts at or before a ends, counting touching-closed adjacency."""
    if a.hi is None or b.lo is None:
        return True
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


def _merge_two(a: IntervalAtom, b: IntervalAtom) -> IntervalAtom:
    if a.hi is None or (b.hi is not None and b.hi < a.hi):
        hi, hic = a.hi, a.hi_closed
    elif b.hi is None or b.hi > a.hi:
        hi, hic = b.hi, b.hi_closed
    else:
        hi, hic = a.hi, a.hi_closed or b.hi_closed
    return IntervalAtom(a.lo, hi, a.lo_closed, hic)


def sweep_atoms(intervals, points):
    """Merge interval/point atoms into canonical disjoint form."""
    intervals = sorted(intervals, key=_lo_key)
    merged = []
    for a in intervals:
        if merged and _intervals_mergeable(merged[-1], a):
            merged[-1] = _merge_two(merged[-1], a)
        else:
            merged.append(a)
    pts = sorted(set(p.value for p in points))
    out_pts = []
    changed = True
    while changed:
        changed = False
        rest = []
        for v in pts:
            hit = False
            for i, a in enumerate(merged):
                if a.contains(v):
                    hit = True
                    break
                if a.lo is not None and v == a.lo and not a.lo_closed:
                    merged[i] = IntervalAtom(a.lo, a.hi, True, a.hi_closed)
                    hit = True
                    changed = True
                    break
                if a.hi is not None and v == a.hi and not a.hi_closed:
                    merged[i] = IntervalAtom(a.lo, a.hi, a.lo_closed, True)
                    hit = True
                    changed = True
                    break
            if not hit:
                rest.append(v)
        pts = rest
        if changed:
            # closing a bound may enable interval-interval merges
            merged.sort(key=_lo_key)
            re = []
            for a in merged:
                if re and _intervals_mergeable(re[-1], a):
                    re[-1] = _merge_two(re[-1], a)
                else:
                    re.append(a)
            merged = re
    out_pts = [PointAtom(v) for v in pts]
    return merged, out_pts


# ---------------------------------------------------------------------------
# per-family repair
# ---------------------------------------------------------------------------


def _seq_cmp_shift(a, b, shift, start):
    """Violations of sign(a(n) - b(n+shift)) against its eventual value."""
    bs = b.shift(shift) if shift else b
    num = psub(pmul(a.num, bs.den), pmul(bs.num, a.den))
    den = pmul(a.den, bs.den)
    if not num:
        return 0, start
    ev_n, viols_n = tail_sign_violations(num, start)
    stable_d, ev_d = stable_from(den, start)
    if ev_d == 0:
        raise Unnormalizable("denominator identically zero in comparison")
    n0 = max(stable_d, (viols_n[-1] + 1) if viols_n else start)
    return ev_n * ev_d, n0


def repair_schema(s: SchemaAtom):
    """Validate one raw family; returns (parts) it denotes.

    Output parts: interval atoms, point atoms, and at most one canonical
    family whose pieces are pairwise disjoint (touching only open-open)
    with monotonically shrinking diameters.
    """
    out_i, out_p, out_f = [], [], []
    start = s.start
    if s.kind == POINTS:
        if not s.seq.valid_from(start):
            raise Unnormalizable("point family sequence has a pole or mixed monotonicity")
        if s.seq.direction(start) == 0:
            raise Unnormalizable("point family sequence is constant")
        out_f.append(s)
        return out_i, out_p, out_f

    left, right = s.left, s.right
    for seq in (left, right):
        if not seq.valid_from(start):
            raise Unnormalizable("endpoint sequence has a pole or mixed monotonicity")
    if left.limit != right.limit:
        raise Unnormalizable("endpoint sequences converge to different values")
    L = left.limit
    # piece widths must be positive for every index
    width_sign, width_stable = _seq_cmp_shift(right, left, 0, start)
    if width_sign <= 0 or width_stable > start:
        raise Unnormalizable("family has empty or inverted pieces")

    dl, dr = left.direction(start), right.direction(start)
    if dl == 0 and dr == 0:
        raise Unnormalizable("both endpoints constant")
    if dl == 0 or dr == 0 or dl != dr:
        # nested or growing pieces: the union telescopes to one interval
        lo = min(left.value(start), L)
        hi = max(right.value(start), L)
        lo_c = s.left_closed if left.value(start) <= L else False
        hi_c = s.right_closed if right.value(start) >= L else False
        if dl == dr:  # opposite-side growth cannot happen with equal limits
            raise Unnormalizable("inconsistent endpoint monotonicity")
        out_i.append(IntervalAtom(lo, hi, lo_c, hi_c))
        return out_i, out_p, out_f

    side = -dl  # decreasing endpoints lie above the limit
    if side > 0:
        rel_sign, rel_stable = _seq_cmp_shift(left, right, 1, start)
    else:
        rel_sign, rel_stable = _seq_cmp_shift(right, left, 1, start)
        rel_sign = -rel_sign
    # rel is inner-gap: positive = separated, zero = touching, negative = overlap

    def extract_heads(upto):
        if upto - start > HEAD_CAP:
            raise Unnormalizable("family head too long to extract")
        for n in range(start, upto):
            out_i.append(s.piece(n))

    if rel_sign < 0:
        # overlapping tail: pieces chain into a single interval
        extract_heads(rel_stable)
        outer = right.value(rel_stable) if side > 0 else left.value(rel_stable)
        oc = s.right_closed if side > 0 else s.left_closed
        if side > 0:
            out_i.append(IntervalAtom(L, outer, False, oc))
        else:
            out_i.append(IntervalAtom(outer, L, oc, False))
        return out_i, out_p, out_f
    if rel_sign == 0:
        covered = s.left_closed or s.right_closed
        if covered:
            # touching chain with covered junctions: one half-open interval
            extract_heads(rel_stable)
            outer = right.value(rel_stable) if side > 0 else left.value(rel_stable)
            oc = s.right_closed if side > 0 else s.left_closed
            if side > 0:
                out_i.append(IntervalAtom(L, outer, False, oc))
            else:
                out_i.append(IntervalAtom(outer, L, oc, False))
            return out_i, out_p, out_f
        cut = rel_stable
    else:
        cut = rel_stable

    # shrinkage of diameters: (w(n) - w(n+1)) > 0 from some index on
    wnum = psub(pmul(right.num, left.den), pmul(left.num, right.den))
    wden = pmul(left.den, right.den)
    dnum = psub(pmul(wnum, pshift(wden, 1)), pmul(pshift(wnum, 1), wden))
    ev, viols = tail_sign_violations(dnum, start)
    dstable, evd = stable_from(pmul(wden, pshift(wden, 1)), start)
    if ev * evd <= 0:
        raise Unnormalizable("piece diameters do not shrink")
    cut = max(cut, dstable, (viols[-1] + 1) if viols else start)
    extract_heads(cut)
    out_f.append(s.with_start(cut))
    return out_i, out_p, out_f


# ---------------------------------------------------------------------------
# u-space views
# ---------------------------------------------------------------------------


@dataclass
class UFam:
    """Affine u-space view of one family: piece n = [sig*n + lo, sig*n + hi]."""

    schema: SchemaAtom
    sigma: object
    lo_int: object
    hi_int: object
    lo_closed: bool
    hi_closed: bool

    def lo_at(self, n):
        return self.sigma * n + self.lo_int

    def hi_at(self, n):
        return self.sigma * n + self.hi_int


def _u_of_seq(seq, limit):
    """(slope, intercept) of n -> 1/|seq(n) - limit|."""
    kappa, e = seq.dev_form(1)
    k = abs(kappa)
    return (1 / k, e / k)


def ufam_view(s: SchemaAtom) -> UFam:
    L = s.limit
    if s.kind == POINTS:
        if not s.seq.is_mobius():
            raise Unnormalizable("cannot certify interactions of a quadratic family")
        sl, ic = _u_of_seq(s.seq, L)
        return UFam(s, sl, ic, ic, True, True)
    if not (s.left.is_mobius() and s.right.is_mobius()):
        raise Unnormalizable("cannot certify interactions of a quadratic family")
    sl_l, ic_l = _u_of_seq(s.left, L)
    sl_r, ic_r = _u_of_seq(s.right, L)
    if sl_l != sl_r:
        raise Unnormalizable("family endpoints drift apart in reciprocal scale")
    if s.side > 0:
        # u-lo is the x-right bound, u-hi the x-left bound
        return UFam(s, sl_l, ic_r, ic_l, s.right_closed, s.left_closed)
    return UFam(s, sl_l, ic_l, ic_r, s.left_closed, s.right_closed)


def _x_from_u(L, side, u):
    return L + 1 / u if side > 0 else L - 1 / u


def _gap_family(L, side, T, u_lo, lo_closed, u_hi, hi_closed) -> SchemaAtom | None:
    """Family of x-space gaps [u_lo + kT, u_hi + kT] (k >= 0) in u-space."""
    if u_hi < u_lo:
        raise ValueError("inverted gap")
    if u_hi == u_lo:
        if not (lo_closed and hi_closed):
            return None
        seq = const_plus_recip(L, Q(side) / T, u_lo / T)
        return SchemaAtom(POINTS, 1, seq=seq.shift(-1))
    lo_seq = const_plus_recip(L, Q(1) / T, u_lo / T).shift(-1)   # k from 1
    hi_seq = const_plus_recip(L, Q(1) / T, u_hi / T).shift(-1)
    if side > 0:
        # larger u = closer to the limit = smaller x
        return SchemaAtom(INTERVALS, 1, hi_seq, hi_closed, lo_seq, lo_closed)
    lo_seq = const_plus_recip(L, Q(-1) / T, u_lo / T).shift(-1)
    hi_seq = const_plus_recip(L, Q(-1) / T, u_hi / T).shift(-1)
    return SchemaAtom(INTERVALS, 1, lo_seq, lo_closed, hi_seq, hi_closed)


def _piece_from_u(L, side, u_lo, lo_c, u_hi, hi_c):
    """One concrete x-space piece from a u-interval."""
    if u_lo == u_hi:
        return PointAtom(_x_from_u(L, side, u_lo))
    a = _x_from_u(L, side, u_hi)
    b = _x_from_u(L, side, u_lo)
    if side > 0:
        return IntervalAtom(a, b, hi_c, lo_c)
    a2 = _x_from_u(L, side, u_lo)
    b2 = _x_from_u(L, side, u_hi)
    return IntervalAtom(a2, b2, lo_c, hi_c)


def _lcm_q(vals):
    """Least T such that T / v is a positive integer for every v."""
    num = 1
    den = 0
    for v in vals:
        n, d = int(v.numerator), int(v.denominator)
        num = num * n // gcd(num, n)
        den = gcd(den, d)
    return Q(num, den)


@dataclass
class WindowPiece:
    u_lo: object
    lo_closed: bool
    u_hi: object
    hi_closed: bool
    fam_idx: int          # -1 for merged slots
    index: int            # piece index within its family
    members: tuple = ()   # (fam_idx, index) pairs covered by a merged slot


def cluster_window(ufams):
    """One full period of the combined pattern.

    Returns (T, U0, window pieces sorted by u_lo, per-family first tail
    index n0_i).  Window covers [U0, U0 + T).
    """
    T = _lcm_q([f.sigma for f in ufams])
    U0 = max(f.lo_at(f.schema.start) for f in ufams) + 1
    window = []
    n0 = []
    total = 0
    for i, f in enumerate(ufams):
        c = T / f.sigma
        if c.denominator != 1:
            raise Unnormalizable("incommensurate family periods")
        c = int(c)
        first = qceil((U0 - f.lo_int) / f.sigma)
        n0.append(first)
        total += c
        if total > WINDOW_CAP:
            raise Unnormalizable("combined family pattern is too dense to certify")
        for j in range(c):
            n = first + j
            window.append(WindowPiece(f.lo_at(n), f.lo_closed, f.hi_at(n),
                                      f.hi_closed, i, n, ((i, n),)))
    window.sort(key=lambda w: (w.u_lo, w.u_hi))
    return T, U0, window, n0


def _joinable(a: WindowPiece, b: WindowPiece) -> bool:
    """b (with b.u_lo >= a.u_lo) overlaps a, or touches with a covered junction."""
    if b.u_lo < a.u_hi:
        return True
    if b.u_lo == a.u_hi and (a.hi_closed or b.lo_closed):
        return True
    return False


def _join(a: WindowPiece, b: WindowPiece) -> WindowPiece:
    if b.u_hi > a.u_hi:
        hi, hic = b.u_hi, b.hi_closed
    elif b.u_hi == a.u_hi:
        hi, hic = a.u_hi, a.hi_closed or b.hi_closed
    else:
        hi, hic = a.u_hi, a.hi_closed
    return WindowPiece(a.u_lo, a.lo_closed, hi, hic, -1, a.index, a.members + b.members)


def _translate(w: WindowPiece, T) -> WindowPiece:
    return WindowPiece(w.u_lo + T, w.lo_closed, w.u_hi + T, w.hi_closed,
                       w.fam_idx, w.index, w.members)


def _linear_merge(window):
    slots = []
    for w in window:
        if slots and _joinable(slots[-1], w):
            slots[-1] = _join(slots[-1], w)
        else:
            slots.append(w)
    return slots


def merge_window(window, T):
    """Merge overlapping/touching-covered window pieces cyclically.

    Returns (slots, merged_any, full_cover).  full_cover means the combined
    pattern has no gap at all: the whole tail union is one interval.  The
    window cut is rotated until it falls into a genuine gap; every rotation
    strictly reduces the slot count, so this terminates.
    """
    # closed lower bounds sort first so joins keep the more inclusive end
    slots = _linear_merge(sorted(window, key=lambda w: (w.u_lo, not w.lo_closed,
                                                        w.u_hi)))
    merged_any = len(slots) != len(window)
    while slots:
        first, last = slots[0], slots[-1]
        if not _joinable(last, _translate(first, T)):
            return slots, merged_any, False
        merged_any = True
        if len(slots) == 1:
            return [], True, True
        slots = _linear_merge(slots[1:] + [_translate(first, T)])
    return slots, merged_any, False


# ---------------------------------------------------------------------------
# generic monotone searches over family pieces
# ---------------------------------------------------------------------------


def _first_true(pred, n0, cap=10**9):
    """Smallest n >= n0 with pred(n), for predicates that stay true."""
    if pred(n0):
        return n0
    lo, hi = n0, n0 + 1
    while not pred(hi):
        lo, hi = hi, hi * 2 + 1
        if hi > cap:
            raise Unnormalizable("monotone search did not terminate")
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def parts_interact(a, b) -> bool:
    """Two atoms/pieces intersect or touch with a covered junction.

    Touching counts (it makes the pair mergeable) even when both bounds are
    open: the shared value is then a one-point hole, which is canonical only
    between schema pieces, not between loose atoms - loose open-open
    touching stays (it is not mergeable), so it does NOT count here.
    """
    if isinstance(a, PointAtom) and isinstance(b, PointAtom):
        return a.value == b.value
    if isinstance(a, PointAtom):
        a, b = b, a
    if isinstance(b, PointAtom):
        v = b.value
        if a.contains(v):
            return True
        # a point closing an open interval bound is a merge
        if a.lo is not None and v == a.lo and not a.lo_closed:
            return True
        if a.hi is not None and v == a.hi and not a.hi_closed:
            return True
        return False
    # both intervals
    if a.hi is not None and b.lo is not None:
        if a.hi < b.lo:
            return False
        if a.hi == b.lo:
            return a.hi_closed or b.lo_closed
    if b.hi is not None and a.lo is not None:
        if b.hi < a.lo:
            return False
        if b.hi == a.lo:
            return b.hi_closed or a.lo_closed
    return True


def _family_dev(s: SchemaAtom, n):
    """Distance of the outermost bound of piece n from the limit."""
    return abs(s.outer_seq().value(n) - s.limit)


def _piece_inside(piece, atom: IntervalAtom) -> bool:
    if isinstance(piece, PointAtom):
        return atom.contains(piece.value)
    ok_lo = atom.lo is None or piece.lo > atom.lo or (
        piece.lo == atom.lo and (atom.lo_closed or not piece.lo_closed))
    ok_hi = atom.hi is None or piece.hi < atom.hi or (
        piece.hi == atom.hi and (atom.hi_closed or not piece.hi_closed))
    return ok_lo and ok_hi


def atom_vs_family(atom, fam: SchemaAtom):
    """Classify one atom against one family.

    Returns None when certified disjoint and not mergeable, or a dict:
      {"absorb_tail": N}   pieces n >= N lie inside the atom; heads extracted
      {"trim_to": N}       pieces below N interact; extract them as atoms
    """
    L, side = fam.limit, fam.side
    if isinstance(atom, IntervalAtom):
        a_lo, a_hi = atom.lo, atom.hi
        covers_limit_side = (
            (side > 0 and (a_lo is None or a_lo <= L) and (a_hi is None or a_hi > L)) or
            (side < 0 and (a_hi is None or a_hi >= L) and (a_lo is None or a_lo < L)))
        if covers_limit_side:
            out = fam.outer_seq()
            if side > 0 and a_hi is not None:
                N = _first_true(lambda n: out.value(n) < a_hi, fam.start)
            elif side < 0 and a_lo is not None:
                N = _first_true(lambda n: out.value(n) > a_lo, fam.start)
            else:
                N = fam.start
            while N > fam.start and _piece_inside(fam.piece(N - 1), atom):
                N -= 1
            return {"absorb_tail": N}
    else:
        a_lo = a_hi = atom.value
    # quick rejection: atom entirely on the wrong side of the limit
    if side > 0 and a_hi is not None and a_hi <= L:
        return None
    if side < 0 and a_lo is not None and a_lo >= L:
        return None
    # distance from the limit to the atom on the family side is positive here
    dist = (a_lo - L) if side > 0 else (L - a_hi)
    Ncore = _first_true(lambda n: _family_dev(fam, n) < dist, fam.start)
    inner = fam.inner_seq()
    far = a_hi if side > 0 else a_lo
    if far is None:
        n_from = fam.start
    elif side > 0:
        n_from = _first_true(lambda n: inner.value(n) <= far, fam.start) - 2
    else:
        n_from = _first_true(lambda n: inner.value(n) >= far, fam.start) - 2
    n_from = max(fam.start, n_from)
    if Ncore - n_from > HEAD_CAP:
        raise Unnormalizable("atom interacts with too many family pieces")
    last_hit = None
    for n in range(n_from, Ncore + 1):
        if parts_interact(fam.piece(n), atom):
            last_hit = n
    if last_hit is None:
        return None
    return {"trim_to": last_hit + 1}


def far_pair_check(f1: SchemaAtom, f2: SchemaAtom):
    """Interaction test for families with different limits.

    Pieces within |L1-L2|/3 of their own limit cannot meet the other
    family; the finitely many outer pieces are tested explicitly.  Returns
    (trim1, trim2): indexes to trim each family to, or None for no action.
    """
    L1, L2 = f1.limit, f2.limit
    d = abs(L1 - L2)
    third = d / 3
    n1 = _first_true(lambda n: _family_dev(f1, n) < third, f1.start)
    n2 = _first_true(lambda n: _family_dev(f2, n) < third, f2.start)
    if n1 - f1.start > HEAD_CAP or n2 - f2.start > HEAD_CAP:
        raise Unnormalizable("family interleave zone too long")
    hit1 = hit2 = None
    for n in range(f1.start, n1):
        piece = f1.piece(n)
        atom = piece if isinstance(piece, (IntervalAtom, PointAtom)) else None
        if atom_vs_family(atom, f2) is not None:
            hit1 = n
    for n in range(f2.start, n2):
        piece = f2.piece(n)
        if atom_vs_family(piece, f1) is not None:
            hit2 = n
    if hit1 is None and hit2 is None:
        return None
    return (hit1 + 1 if hit1 is not None else None,
            hit2 + 1 if hit2 is not None else None)


def _extract_pieces(fam: SchemaAtom, upto: int, intervals, points):
    """Move pieces [start, upto) into the atom lists."""
    if upto - fam.start > HEAD_CAP:
        raise Unnormalizable("family head too long to extract")
    for n in range(fam.start, upto):
        p = fam.piece(n)
        if isinstance(p, PointAtom):
            points.append(p)
        else:
            intervals.append(p)


def _rebuild_cluster(L, side, ufams, slots, T, full_cover, base_piece, n0s,
                     intervals, points):
    """Emit parts for a merged cluster pattern.

    Heads (pieces below each family's window start) become atoms; the tail
    becomes either a single interval (full_cover) or one family per slot.
    """
    fams_out = []
    for uf, n0 in zip(ufams, n0s):
        _extract_pieces(uf.schema, n0, intervals, points)
    if full_cover:
        u_min, lo_closed = base_piece
        x_outer = _x_from_u(L, side, u_min)
        if side > 0:
            intervals.append(IntervalAtom(L, x_outer, False, lo_closed))
        else:
            intervals.append(IntervalAtom(x_outer, L, lo_closed, False))
        return fams_out
    for s in slots:
        # instances at u in [s.u_lo + kT, s.u_hi + kT], k >= 0; members may
        # have been rotated one period up, which only shifts the base index
        fam = _gap_family(L, side, T, s.u_lo, s.lo_closed, s.u_hi, s.hi_closed)
        if fam is None:
            raise Unnormalizable("degenerate uncovered slot in rebuild")
        fams_out.append(fam)
    return fams_out


def resolve_cluster(fams, intervals, points):
    """Certify or merge the families sharing one (limit, side).

    Returns (families to keep, changed).
    """
    if len(fams) <= 1:
        return list(fams), False
    ufams = [ufam_view(s) for s in fams]
    L, side = fams[0].limit, fams[0].side
    T, U0, window, n0s = cluster_window(ufams)
    # the minimal u_lo among window pieces, with union closedness
    u_min = min(w.u_lo for w in window)
    lo_closed = any(w.lo_closed for w in window if w.u_lo == u_min)
    slots, merged_any, full = merge_window(window, T)
    if not merged_any:
        return list(fams), False
    out = _rebuild_cluster(L, side, ufams, slots, T, full, (u_min, lo_closed),
                           n0s, intervals, points)
    return out, True


# ---------------------------------------------------------------------------
# canonical finishing
# ---------------------------------------------------------------------------


def _shift_up(fam: SchemaAtom) -> SchemaAtom:
    """Equivalent family re-indexed to start one higher (same pieces)."""
    if fam.kind == POINTS:
        return SchemaAtom(POINTS, fam.start + 1, seq=fam.seq.shift(-1))
    return SchemaAtom(INTERVALS, fam.start + 1, fam.left.shift(-1), fam.left_closed,
                      fam.right.shift(-1), fam.right_closed)


def _try_absorb_extension(fam: SchemaAtom, intervals, points):
    """Absorb loose atoms that exactly extend the family pattern downward."""
    changed = False
    while True:
        if fam.start < 2:
            fam = _shift_up(fam)
        k = fam.start - 1
        # the extended index must preserve validity: well-formed piece on the
        # correct side of (and disjoint from) the current first piece
        try:
            cand = fam.piece(k)
            if fam.kind == POINTS:
                cur_outer = fam.seq.value(fam.start)
                nxt_inner = cand.value
                strict = True
            else:
                cur_outer = fam.outer_seq().value(fam.start)
                nxt_inner = cand.lo if fam.side > 0 else cand.hi
                strict = False
            if fam.side > 0:
                ok_shape = nxt_inner > cur_outer if strict else nxt_inner >= cur_outer
            else:
                ok_shape = nxt_inner < cur_outer if strict else nxt_inner <= cur_outer
        except (ValueError, ZeroDivisionError):
            break
        if not ok_shape:
            break
        seqs = (fam.seq,) if fam.kind == POINTS else (fam.left, fam.right)
        if not all(s.valid_from(k) for s in seqs):
            break
        hit = None
        if isinstance(cand, PointAtom):
            for i, p in enumerate(points):
                if p.value == cand.value:
                    hit = ("p", i)
                    break
        else:
            for i, a in enumerate(intervals):
                if (a.lo == cand.lo and a.hi == cand.hi and
                        a.lo_closed == cand.lo_closed and a.hi_closed == cand.hi_closed):
                    hit = ("i", i)
                    break
        if hit is None:
            break
        if hit[0] == "p":
            points.pop(hit[1])
        else:
            intervals.pop(hit[1])
        fam = SchemaAtom(fam.kind, k, fam.left, fam.left_closed,
                         fam.right, fam.right_closed, fam.seq)
        changed = True
    return fam, changed


def _fam_sort_key(s: SchemaAtom):
    inner = s.inner_seq()
    return (s.limit, s.side, s.kind, tuple(inner.num), tuple(inner.den), s.start)


def finalize(intervals, points, fams) -> RealSet:
    """Canonical ordering, extension absorption, reindexing to start 1."""
    intervals, points = sweep_atoms(intervals, points)
    out_f = []
    for s in fams:
        s2, ch = _try_absorb_extension(s, intervals, points)
        while ch:
            s2, ch = _try_absorb_extension(s2, intervals, points)
        out_f.append(s2.reindexed_to_one())
    out_f.sort(key=_fam_sort_key)
    intervals.sort(key=_lo_key)
    points.sort(key=lambda p: p.value)
    return RealSet(tuple(intervals), tuple(points), tuple(out_f), True)


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------


def normalize(raw: RealSet) -> RealSet:
    """Canonical form with the same underlying point set.

    Raises Unnormalizable when tail disjointness cannot be certified.
    """
    if raw.normal:
        return raw
    intervals = list(raw.intervals)
    points = list(raw.points)
    fams = []
    for s in raw.schemas:
        try:
            hi, hp, hf = repair_schema(s)
        except (ValueError, ZeroDivisionError) as e:
            raise Unnormalizable(f"invalid family: {e}") from e
        intervals += hi
        points += hp
        fams += hf

    for _ in range(FUEL):
        changed = False
        intervals, points = sweep_atoms(intervals, points)

        # clusters sharing limit and side: certify or merge (covered-junction
        # chains must fuse before atoms can nibble at them)
        clusters = {}
        for f in fams:
            clusters.setdefault((f.limit, f.side), []).append(f)
        new_fams = []
        for key, group in clusters.items():
            kept, ch = resolve_cluster(group, intervals, points)
            new_fams += kept
            changed = changed or ch
        fams = new_fams
        if changed:
            continue

        # atoms against families
        for fi, fam in enumerate(list(fams)):
            action = None
            for atom in intervals + points:
                action = atom_vs_family(atom, fam)
                if action:
                    break
            if not action:
                continue
            changed = True
            if "absorb_tail" in action:
                _extract_pieces(fam, action["absorb_tail"], intervals, points)
                fams[fi] = None
            else:
                upto = action["trim_to"]
                _extract_pieces(fam, upto, intervals, points)
                fams[fi] = fam.with_start(upto)
        fams = [f for f in fams if f is not None]
        if changed:
            continue

        # family pairs with different limits or sides
        for i in range(len(fams)):
            for j in range(i + 1, len(fams)):
                f1, f2 = fams[i], fams[j]
                if f1.limit == f2.limit and f1.side == f2.side:
                    continue
                if f1.limit == f2.limit:
                    continue  # opposite sides never meet
                act = far_pair_check(f1, f2)
                if act:
                    t1, t2 = act
                    if t1 is not None:
                        _extract_pieces(f1, t1, intervals, points)
                        fams[i] = f1.with_start(t1)
                    if t2 is not None:
                        _extract_pieces(f2, t2, intervals, points)
                        fams[j] = f2.with_start(t2)
                    changed = True
        if not changed:
            break
    else:
        raise Unnormalizable("interaction loop did not stabilize")

    return finalize(intervals, points, fams)


def union(X: RealSet, Y: RealSet) -> RealSet:
    """Normalized union of two sets."""
    raw = RealSet.build(X.intervals + Y.intervals, X.points + Y.points,
                        X.schemas + Y.schemas)
    return normalize(raw)


# ---------------------------------------------------------------------------
# cell decomposition for complement / intersection
# ---------------------------------------------------------------------------


def _feature_points(*sets):
    feats = set()
    for X in sets:
        for a in X.intervals:
            if a.lo is not None:
                feats.add(a.lo)
            if a.hi is not None:
                feats.add(a.hi)
        for p in X.points:
            feats.add(p.value)
        for s in X.schemas:
            feats.add(s.limit)
            feats.add(s.outer_value())
    feats = sorted(feats)
    # midpoints keep accumulation at one cell end at most
    full = []
    for i, v in enumerate(feats):
        full.append(v)
        if i + 1 < len(feats):
            full.append((v + feats[i + 1]) / 2)
    return full


def _clip_interval(a: IntervalAtom, lo, hi):
    """a intersected with the open cell (lo, hi); bounds None = infinite."""
    nlo, nloc = a.lo, a.lo_closed
    nhi, nhic = a.hi, a.hi_closed
    if lo is not None:
        if nhi is not None and (nhi < lo or (nhi == lo)):
            return None
        if nlo is None or nlo < lo:
            nlo, nloc = lo, False
        elif nlo == lo:
            nloc = False
    if hi is not None:
        if nlo is not None and (nlo > hi or (nlo == hi)):
            return None
        if nhi is None or nhi > hi:
            nhi, nhic = hi, False
        elif nhi == hi:
            nhic = False
    if nlo is not None and nhi is not None and not nlo < nhi:
        return None
    return IntervalAtom(nlo, nhi, nloc, nhic)


def _cell_pieces(X: RealSet, lo, hi):
    """Parts of X inside the open cell (lo, hi).

    Returns (finite_parts, accum) where accum is (side_end, families) for
    families accumulating at the cell's lo end (+1) or hi end (-1); at most
    one end accumulates because midpoint features were inserted.
    """
    finite = []
    for a in X.intervals:
        c = _clip_interval(a, lo, hi)
        if c is not None:
            finite.append(c)
    for p in X.points:
        if (lo is None or p.value > lo) and (hi is None or p.value < hi):
            finite.append(p)
    accum_fams = []
    accum_end = 0
    for s in X.schemas:
        L, side = s.limit, s.side
        if side > 0 and lo is not None and L == lo:
            accum_fams.append(s)
            accum_end = +1
            continue
        if side < 0 and hi is not None and L == hi:
            accum_fams.append(s)
            accum_end = -1
            continue
        inner, outer = s.inner_seq(), s.outer_seq()
        # finitely many pieces can meet this cell (the limit lies outside it)
        if side > 0:
            if hi is not None and L >= hi:
                continue
            if lo is not None and outer.value(s.start) <= lo:
                continue
            if lo is None:
                raise Unnormalizable("family accumulates strictly inside a cell")
            # pieces descend toward L < lo: piece meets (lo, hi) iff
            # inner(n) < hi and outer(n) > lo
            first = (s.start if hi is None
                     else _first_true(lambda n: inner.value(n) < hi, s.start))
            stop = _first_true(lambda n: outer.value(n) <= lo, first)
        else:
            if lo is not None and L <= lo:
                continue
            if hi is not None and outer.value(s.start) >= hi:
                continue
            if hi is None:
                raise Unnormalizable("family accumulates strictly inside a cell")
            first = (s.start if lo is None
                     else _first_true(lambda n: inner.value(n) > lo, s.start))
            stop = _first_true(lambda n: outer.value(n) >= hi, first)
        if stop - first > HEAD_CAP:
            raise Unnormalizable("too many foreign pieces inside a cell")
        for n in range(first, stop):
            c = s.piece(n)
            if isinstance(c, IntervalAtom):
                c = _clip_interval(c, lo, hi)
                if c is not None:
                    finite.append(c)
            else:
                if (lo is None or c.value > lo) and (hi is None or c.value < hi):
                    finite.append(c)
    return finite, (accum_end, accum_fams)


# ---------------------------------------------------------------------------
# complement / intersection within one cell
# ---------------------------------------------------------------------------


def _atom_to_u(part, L, side):
    """(u_lo, lo_closed, u_hi, hi_closed) of an atom inside the region."""
    if isinstance(part, PointAtom):
        u = 1 / abs(part.value - L)
        return (u, True, u, True)
    d_lo = abs(part.lo - L)
    d_hi = abs(part.hi - L)
    if side > 0:
        return (1 / d_hi, part.hi_closed, 1 / d_lo, part.lo_closed)
    return (1 / d_lo, part.lo_closed, 1 / d_hi, part.hi_closed)


def _upieces_for_zone(ufams, u_cap, u_from=None):
    """Family pieces with u_lo < u_cap (and u_lo above u_from minus a margin)."""
    out = []
    for i, f in enumerate(ufams):
        n = f.schema.start
        if u_from is not None:
            # skip far-out pieces; keep a two-piece margin for straddlers
            n = max(n, qceil((u_from - 2 * f.sigma - f.lo_int) / f.sigma))
        count = 0
        while f.lo_at(n) < u_cap:
            out.append((f.lo_at(n), f.lo_closed, f.hi_at(n), f.hi_closed, i, n))
            n += 1
            count += 1
            if count > 4 * WINDOW_CAP + HEAD_CAP:
                raise Unnormalizable("zone enumeration too dense")
    return out


def _accum_complement(fams, L, side, cell_hi_dist, finite_parts):
    """Complement structure of one accumulation cluster within its cell.

    cell_hi_dist: |cell far end - L| or None for an unbounded cell.
    finite_parts: disjoint atoms inside the cell (already clipped).
    Returns complement parts (intervals, points, families).
    """
    ufams = [ufam_view(s) for s in fams]
    T = _lcm_q([f.sigma for f in ufams])
    u_min = Q(0) if cell_hi_dist is None else 1 / cell_hi_dist
    U0 = max(f.lo_at(f.schema.start) for f in ufams) + 1
    U0 = max(U0, u_min)
    u_parts = [_atom_to_u(p, L, side) for p in finite_parts]
    for (_ul, _ulc, uh, _uhc) in u_parts:
        if uh >= U0:
            U0 = uh + 1
    pieces = _upieces_for_zone(ufams, U0 + 3 * T, u_min)
    allp = sorted(u_parts + [(a, b, c, d) for (a, b, c, d, *_rest) in pieces])
    out_i, out_p, out_f = [], [], []

    frontier, fr_closed = u_min, True  # covered through u_min inclusive

    def emit(g_lo, g_loc, g_hi, g_hic):
        # gap in u-space -> complement part, bucketed by zone
        if g_hi < g_lo or (g_hi == g_lo and not (g_loc and g_hic)):
            return
        if g_lo >= U0 + 2 * T:
            return  # covered by the periodic representative below it
        if g_lo >= U0 + T:
            fam = _gap_family(L, side, T, g_lo, g_loc, g_hi, g_hic)
            if fam is not None:
                out_f.append(fam)
            return
        if g_lo == 0:
            # unbounded outer gap
            x_in = _x_from_u(L, side, g_hi)
            if side > 0:
                out_i.append(IntervalAtom(x_in, None, g_hic, False))
            else:
                out_i.append(IntervalAtom(None, x_in, False, g_hic))
            return
        part = _piece_from_u(L, side, g_lo, g_loc, g_hi, g_hic)
        if isinstance(part, PointAtom):
            out_p.append(part)
        else:
            out_i.append(part)

    for (ul, ulc, uh, uhc) in allp:
        if ul > frontier:
            emit(frontier, not fr_closed, ul, not ulc)
        elif ul == frontier and not fr_closed and not ulc:
            emit(frontier, True, frontier, True)
        if uh > frontier or (uh == frontier and uhc and not fr_closed):
            frontier, fr_closed = uh, uhc
    # beyond the last enumerated piece the pattern repeats; family reps cover it
    return out_i, out_p, out_f


def _atom_intersect(a, b):
    """Exact intersection of two atoms; None when empty."""
    if isinstance(a, PointAtom) and isinstance(b, PointAtom):
        return a if a.value == b.value else None
    if isinstance(a, PointAtom):
        return a if b.contains(a.value) else None
    if isinstance(b, PointAtom):
        return b if a.contains(b.value) else None
    if a.lo is None or (b.lo is not None and b.lo > a.lo) or \
       (b.lo is not None and b.lo == a.lo and not b.lo_closed):
        lo, loc = b.lo, b.lo_closed
    else:
        lo, loc = a.lo, a.lo_closed
    if lo is not None:
        loc = loc and a.contains(lo) and b.contains(lo)
    if a.hi is None or (b.hi is not None and b.hi < a.hi) or \
       (b.hi is not None and b.hi == a.hi and not b.hi_closed):
        hi, hic = b.hi, b.hi_closed
    else:
        hi, hic = a.hi, a.hi_closed
    if hi is not None:
        hic = hic and a.contains(hi) and b.contains(hi)
    if lo is not None and hi is not None:
        if lo > hi:
            return None
        if lo == hi:
            return PointAtom(lo) if (a.contains(lo) and b.contains(lo)) else None
    return IntervalAtom(lo, hi, loc, hic)


def _limit_touching(part, L, side):
    """An interval whose closure reaches L from the accumulation side."""
    if not isinstance(part, IntervalAtom):
        return False
    if side > 0:
        return part.lo is not None and part.lo == L or (part.lo is None)
    return part.hi is not None and part.hi == L or (part.hi is None)


def _accum_intersect(famsX, famsY, L, side, finX, finY, cell_hi_dist):
    """Intersection contributions of two accumulation clusters in one cell.

    finX/finY: the respective finite atoms in the cell (clipped).  Families
    on either side may be absent.  Returns (intervals, points, families).
    """
    out_i, out_p, out_f = [], [], []

    def shove(part):
        if part is None:
            return
        if isinstance(part, PointAtom):
            out_p.append(part)
        else:
            out_i.append(part)

    # intervals whose closure reaches the limit absorb whole family tails;
    # pieces fully outside the atom contribute nothing, so only the couple
    # of boundary pieces need explicit clipping
    def touch_pairs(parts, fams_other):
        for p in parts:
            if not _limit_touching(p, L, side):
                continue
            for s in fams_other:
                act = atom_vs_family(p, s)
                if act and "absorb_tail" in act:
                    N = act["absorb_tail"]
                    out_f.append(s.with_start(N))
                    for n in range(max(s.start, N - 3), N):
                        shove(_atom_intersect(s.piece(n), p))
                elif act:
                    for n in range(s.start, act["trim_to"]):
                        shove(_atom_intersect(s.piece(n), p))

    touch_pairs(finX, famsY)
    touch_pairs(finY, famsX)
    touchX = [p for p in finX if _limit_touching(p, L, side)]
    finX = [p for p in finX if not _limit_touching(p, L, side)]
    touchY = [p for p in finY if _limit_touching(p, L, side)]
    finY = [p for p in finY if not _limit_touching(p, L, side)]
    for a in touchX:
        for b in touchY + finY:
            shove(_atom_intersect(a, b))
    for a in touchY:
        for b in finX:
            shove(_atom_intersect(a, b))
    for a in finX:
        for b in finY:
            shove(_atom_intersect(a, b))

    ufX = [ufam_view(s) for s in famsX]
    ufY = [ufam_view(s) for s in famsY]
    sigmas = [f.sigma for f in ufX + ufY]
    T = _lcm_q(sigmas) if sigmas else Q(1)
    u_min = Q(0) if cell_hi_dist is None else 1 / cell_hi_dist
    starts = [f.lo_at(f.schema.start) for f in ufX + ufY]
    U0 = max((max(starts) if starts else Q(1)) + 1, u_min)
    for p in finX + finY:
        uh = _atom_to_u(p, L, side)[2]
        if uh >= U0:
            U0 = uh + 1
    cap = U0 + 3 * T
    px = _upieces_for_zone(ufX, cap, u_min)
    py = _upieces_for_zone(ufY, cap, u_min)

    # non-touching finite atoms against the other side's pieces
    for parts, opieces in ((finX, py), (finY, px)):
        for a in parts:
            for e in opieces:
                shove(_atom_intersect(a, _piece_from_u_entry(L, side, e)))

    # piece x piece: bucket each overlap by its position residue
    for ex in px:
        for ey in py:
            s_lo = max(ex[0], ey[0])
            s_hi = min(ex[2], ey[2])
            if s_hi < s_lo:
                continue
            loc = (ex[1] if ex[0] == s_lo else True) and (ey[1] if ey[0] == s_lo else True)
            hic = (ex[3] if ex[2] == s_hi else True) and (ey[3] if ey[2] == s_hi else True)
            if s_lo == s_hi and not (loc and hic):
                continue
            if s_lo < U0 + T:
                shove(_piece_from_u(L, side, s_lo, loc, s_hi, hic))
            elif s_lo < U0 + 2 * T:
                fam = _gap_family(L, side, T, s_lo, loc, s_hi, hic)
                if fam is not None:
                    out_f.append(fam)
    return out_i, out_p, out_f


def _piece_from_u_entry(L, side, e):
    return _piece_from_u(L, side, e[0], e[1], e[2], e[3])


def _finite_complement(lo, hi, parts, out_i, out_p):
    """Complement of disjoint atoms within the open cell (lo, hi)."""
    def key(p):
        if isinstance(p, PointAtom):
            return (1, p.value)
        return (0,) if p.lo is None else (1, p.lo)

    def emit(g_lo, g_loc, g_hi, g_hic):
        if g_lo is not None and g_hi is not None:
            if g_hi < g_lo or (g_hi == g_lo and not (g_loc and g_hic)):
                return
            if g_lo == g_hi:
                out_p.append(PointAtom(g_lo))
                return
        out_i.append(IntervalAtom(g_lo, g_hi, g_loc if g_lo is not None else False,
                                  g_hic if g_hi is not None else False))

    # frontier: coverage reaches this value; gaps resume past it
    frontier, fr_closed = lo, True  # the cell itself is open at lo
    have_frontier = lo is not None
    for p in sorted(parts, key=key):
        if isinstance(p, PointAtom):
            alo, aloc, ahi, ahic = p.value, True, p.value, True
        else:
            alo, aloc, ahi, ahic = p.lo, p.lo_closed, p.hi, p.hi_closed
        if alo is not None:
            if not have_frontier:
                emit(None, False, alo, not aloc)
            elif alo > frontier:
                emit(frontier, not fr_closed, alo, not aloc)
            elif alo == frontier and not fr_closed and not aloc:
                emit(frontier, True, frontier, True)
        if ahi is None:
            return  # covered to +inf: no further gaps
        if not have_frontier or ahi > frontier or (ahi == frontier and ahic):
            frontier, fr_closed = ahi, ahic
            have_frontier = True
    if not have_frontier:
        emit(None, False, hi, False)
    elif hi is None or frontier < hi or (frontier == hi and not fr_closed):
        emit(frontier, not fr_closed, hi, False)


def _cells(feats, wlo=None, whi=None):
    """Open cells between consecutive features, clipped to (wlo, whi)."""
    bounds = [f for f in feats if (wlo is None or f > wlo) and (whi is None or f < whi)]
    edges = [wlo] + bounds + [whi]
    cells = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    return cells, bounds


def complement_in(X: RealSet, window: IntervalAtom | None = None) -> RealSet:
    """Relative complement window \\ X (window None means all of R)."""
    X.require_normal()
    wlo = window.lo if window is not None else None
    whi = window.hi if window is not None else None
    feats = _feature_points(X)
    cells, inner_feats = _cells(feats, wlo, whi)
    out_i, out_p, out_f = [], [], []
    for lo, hi in cells:
        finite, (aend, afams) = _cell_pieces(X, lo, hi)
        if afams:
            L = lo if aend > 0 else hi
            side = aend
            if side > 0:
                dist = (hi - L) if hi is not None else None
            else:
                dist = (L - lo) if lo is not None else None
            ci, cp, cf = _accum_complement(afams, L, side, dist, finite)
            out_i += ci
            out_p += cp
            out_f += cf
        else:
            _finite_complement(lo, hi, finite, out_i, out_p)
    check = list(inner_feats)
    if window is not None:
        if wlo is not None and window.lo_closed:
            check.append(wlo)
        if whi is not None and window.hi_closed:
            check.append(whi)
    for v in check:
        if not X.contains(v):
            out_p.append(PointAtom(v))
    return finalize(out_i, out_p, out_f)


def intersect(X: RealSet, Y: RealSet) -> RealSet:
    """Exact intersection of two normalized sets."""
    X.require_normal()
    Y.require_normal()
    if X.is_empty() or Y.is_empty():
        return RealSet.empty()
    feats = _feature_points(X, Y)
    cells, inner_feats = _cells(feats)
    out_i, out_p, out_f = [], [], []
    for lo, hi in cells:
        finX, (aex, afX) = _cell_pieces(X, lo, hi)
        finY, (aey, afY) = _cell_pieces(Y, lo, hi)
        if not afX and not afY:
            for a in finX:
                for b in finY:
                    c = _atom_intersect(a, b)
                    if c is None:
                        continue
                    (out_p if isinstance(c, PointAtom) else out_i).append(c)
            continue
        aend = aex if afX else aey
        L = lo if aend > 0 else hi
        if aend > 0:
            dist = (hi - L) if hi is not None else None
        else:
            dist = (L - lo) if lo is not None else None
        ci, cp, cf = _accum_intersect(afX, afY, L, aend, finX, finY, dist)
        out_i += ci
        out_p += cp
        out_f += cf
    for v in inner_feats:
        if X.contains(v) and Y.contains(v):
            out_p.append(PointAtom(v))
    return finalize(out_i, out_p, out_f)


def semantic_subset(X: RealSet, Y: RealSet) -> bool:
    """X is a subset of Y, decided symbolically via X & ~Y == empty."""
    return intersect(X, complement_in(Y)).is_empty()


def semantic_equal(X: RealSet, Y: RealSet) -> bool:
    return semantic_subset(X, Y) and semantic_subset(Y, X)
