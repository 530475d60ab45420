"""Polynomials over Q and exactly-analyzable convergent index sequences.

The whole engine rests on one decidable primitive: the sign of a rational
polynomial p(n) over all integers n >= start.  Signs can flip only at real
roots, roots are isolated with Sturm sequences, and the finitely many
integer candidates near roots are checked by exact evaluation.

Two sequence families are built on top of it:

* MobiusSeq - (a*n + b)/(c*n + d) with c != 0, the public schema language.
  Every such sequence with limit L satisfies v(n) - L = k/(n + e), so in
  reciprocal coordinates u = 1/|x - L| it becomes an affine function of the
  index.  The normalization engine exploits this heavily.
* QuadSeq - degree <= 2 over degree <= 2, used internally for derived
  selections such as interval midpoints.  Not part of the DSL.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ratmath import Q, ZERO, fmt, qceil, qfloor, qsign

# ---------------------------------------------------------------------------
# polynomial helpers (coefficient tuples, low degree first)
# ---------------------------------------------------------------------------


def ptrim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim(tuple((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                       for i in range(n)))


def pneg(a):
    return tuple(-x for x in a)


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return ptrim(out)


def pscale(a, s):
    if s == 0:
        return ()
    return tuple(x * s for x in a)


def peval(a, n):
    acc = ZERO
    for c in reversed(a):
        acc = acc * n + c
    return acc


def pshift(a, k):
    """p(n + k) as a coefficient tuple."""
    out = ()
    shifted = (Q(k), Q(1))  # n + k
    power = (Q(1),)
    for c in a:
        out = padd(out, pscale(power, c))
        power = pmul(power, shifted)
    return out


def pcompose_affine(a, p, q):
    """p(p*n + q)."""
    out = ()
    inner = (Q(q), Q(p))
    power = (Q(1),)
    for c in a:
        out = padd(out, pscale(power, c))
        power = pmul(power, inner)
    return out


def pderiv(a):
    return ptrim(tuple(a[i] * i for i in range(1, len(a))))


def _prem(a, b):
    """Remainder of polynomial division a / b over Q."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and ptrim(a):
        da = len(a) - 1
        if da < db:
            break
        coef = a[-1] / lb
        for i in range(db + 1):
            a[da - db + i] -= coef * b[i]
        a = list(ptrim(a))
        if not a:
            break
    return ptrim(a)


def _pgcd(a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, _prem(a, b)
    return a


def _squarefree(a):
    d = pderiv(a)
    if not d:
        return a
    g = _pgcd(a, d)
    if len(g) <= 1:
        return a
    # divide a by g exactly
    quot = []
    rem = list(a)
    dg, lg = len(g) - 1, g[-1]
    while len(rem) - 1 >= dg and ptrim(rem):
        da = len(rem) - 1
        coef = rem[-1] / lg
        quot.append((da - dg, coef))
        for i in range(dg + 1):
            rem[da - dg + i] -= coef * g[i]
        rem = list(ptrim(rem))
        if not rem:
            break
    out = [ZERO] * (max(e for e, _ in quot) + 1) if quot else [ZERO]
    for e, c in quot:
        out[e] = c
    return ptrim(out)


def _pdiv_exact(a, b):
    """Exact polynomial quotient a / b (remainder must vanish)."""
    quot = {}
    rem = list(a)
    db, lb = len(b) - 1, b[-1]
    while ptrim(rem) and len(ptrim(rem)) - 1 >= db:
        rem = list(ptrim(rem))
        da = len(rem) - 1
        coef = rem[-1] / lb
        quot[da - db] = coef
        for i in range(db + 1):
            rem[da - db + i] -= coef * b[i]
    if ptrim(rem):
        raise ValueError("not an exact division")
    out = [ZERO] * (max(quot) + 1) if quot else []
    for e, c in quot.items():
        out[e] = c
    return ptrim(out)


def preduce(num, den):
    """Cancel the polynomial gcd of num and den."""
    num, den = ptrim(num), ptrim(den)
    if not num:
        return (), den
    g = _pgcd(num, den)
    if len(g) > 1:
        num = _pdiv_exact(num, g)
        den = _pdiv_exact(den, g)
    return num, den


def _sturm_chain(a):
    chain = [a, pderiv(a)]
    while chain[-1]:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(pneg(r))
    return [c for c in chain if c]


def _sign_changes(chain, x):
    signs = []
    for c in chain:
        s = qsign(peval(c, x))
        if s != 0:
            signs.append(s)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def _root_bound(a):
    """Cauchy bound: all real roots lie in (-B, B)."""
    lead = a[-1]
    m = max(abs(c) for c in a[:-1]) if len(a) > 1 else ZERO
    return Q(1) + m / abs(lead)


def tail_sign_violations(a, start):
    """Representative integers n >= start where sign(p(n)) is off-trend.

    Returns (eventual_sign, violations) where violations is sorted,
    nonempty iff some integer n >= start has sign(p(n)) != eventual_sign
    (zero counts), contains the largest such integer, and contains every
    integer root.  Signs flip only inside root intervals, so integers
    adjacent to isolated roots witness all three facts; integers interior
    to a wrong-signed stretch may be omitted.  Zero polynomial: (0, []).
    """
    a = ptrim(a)
    if not a:
        return 0, []
    ev = qsign(a[-1])
    if len(a) == 1:
        return ev, []
    sf = _squarefree(a)
    chain = _sturm_chain(sf)
    bound = _root_bound(a)
    lo = Q(start) - Q(1, 2)
    hi = max(bound, Q(start) + 1)
    candidates = set()

    def isolate(l, h, count):
        if count == 0:
            return
        if h - l <= Q(1, 2) or count == 1 and h - l <= Q(1):
            for n in range(qfloor(l), qceil(h) + 1):
                if n >= start:
                    candidates.add(n)
            return
        mid = (l + h) / 2
        left = _sign_changes(chain, l) - _sign_changes(chain, mid)
        isolate(l, mid, left)
        isolate(mid, h, count - left)
        if peval(sf, mid) == 0:
            for n in (qfloor(mid), qceil(mid)):
                if n >= start:
                    candidates.add(n)

    total = _sign_changes(chain, lo) - _sign_changes(chain, hi)
    isolate(lo, hi, total)
    # the endpoints themselves are always worth checking
    candidates.add(start)
    viols = sorted(n for n in candidates if qsign(peval(a, n)) != ev)
    return ev, viols


def sign_on_tail(a, start):
    """Constant sign of p(n) for all integers n >= start, or None if mixed."""
    ev, viols = tail_sign_violations(a, start)
    return ev if not viols else None


def stable_from(a, start):
    """Smallest N >= start such that sign(p(n)) is the eventual sign for n >= N."""
    ev, viols = tail_sign_violations(a, start)
    return (viols[-1] + 1 if viols else start), ev


def integer_roots(a, start):
    """All integers n >= start with p(n) == 0 (p not identically zero)."""
    a = ptrim(a)
    if not a:
        raise ValueError("zero polynomial has every integer as a root")
    _, viols = tail_sign_violations(a, start)
    return [n for n in viols if peval(a, n) == 0]


# ---------------------------------------------------------------------------
# convergent sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatSeq:
    """A rational-function index sequence num(n)/den(n), deg <= 2 each.

    Values converge to a finite limit as n -> +inf (enforced: deg num <=
    deg den and the denominator's lead coefficient is nonzero).
    """

    num: tuple
    den: tuple

    def __post_init__(self):
        num, den = preduce(self.num, self.den)
        if not den:
            raise ValueError("zero denominator")
        if len(num) > 3 or len(den) > 3:
            raise ValueError("degree above 2 is not representable")
        if len(num) > len(den):
            raise ValueError("sequence diverges")
        if len(den) == 1:
            # after gcd cancellation this is a polynomial sequence
            raise ValueError("constant or polynomial sequence: no strictly convergent shape")
        # canonical scaling: first nonzero of (num high->low, den high->low) is 1
        lead = None
        for c in tuple(reversed(num)) + tuple(reversed(den)):
            if c != 0:
                lead = c
                break
        object.__setattr__(self, "num", pscale(num, 1 / lead) if lead is not None else ())
        object.__setattr__(self, "den", pscale(den, 1 / lead))

    # -- basic evaluation ---------------------------------------------------
    def value(self, n):
        d = peval(self.den, n)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at n={n}")
        return peval(self.num, n) / d

    @property
    def limit(self):
        if len(self.num) < len(self.den):
            return ZERO
        return self.num[-1] / self.den[-1]

    def is_mobius(self) -> bool:
        return len(self.num) <= 2 and len(self.den) <= 2

    @property
    def mobius_coeffs(self):
        """(a, b, c, d) such that value(n) = (a n + b)/(c n + d)."""
        if not self.is_mobius():
            raise ValueError("not a degree-1 sequence")
        b = self.num[0] if self.num else ZERO
        a = self.num[1] if len(self.num) > 1 else ZERO
        d = self.den[0]
        c = self.den[1] if len(self.den) > 1 else ZERO
        return (Q(a), Q(b), Q(c), Q(d))

    # -- validity and shape -------------------------------------------------
    def valid_from(self, start) -> bool:
        """Denominator nonzero and value strictly monotone or constant on [start, inf)."""
        if sign_on_tail(self.den, start) is None:
            return False
        return self.direction(start) is not None

    def direction(self, start):
        """+1 strictly increasing, -1 strictly decreasing, 0 constant; None if mixed."""
        diff_num = psub(pmul(pshift(self.num, 1), self.den),
                        pmul(self.num, pshift(self.den, 1)))
        if not diff_num:
            return 0
        s_num = sign_on_tail(diff_num, start)
        s_den = sign_on_tail(pmul(self.den, pshift(self.den, 1)), start)
        if s_num is None or s_den in (None, 0):
            return None
        return s_num * s_den

    # -- transforms -----------------------------------------------------
    def shift(self, k: int) -> "RatSeq":
        return RatSeq(pshift(self.num, k), pshift(self.den, k))

    def affine(self, alpha, beta) -> "RatSeq":
        return RatSeq(padd(pscale(self.num, Q(alpha)), pscale(self.den, Q(beta))), self.den)

    def scale_index(self, p: int, q: int) -> "RatSeq":
        """Reparameterize n -> p*n + q (p >= 1)."""
        return RatSeq(pcompose_affine(self.num, p, q), pcompose_affine(self.den, p, q))

    # -- solving ----------------------------------------------------------
    def solve_value(self, t, start):
        """All integers n >= start with value(n) == t."""
        p = psub(self.num, pscale(self.den, Q(t)))
        if not p:
            raise ValueError("sequence is constantly equal to the target")
        return [n for n in integer_roots(p, start) if peval(self.den, n) != 0]

    def dev_form(self, start):
        """(kappa, e) with value(n) - limit == kappa/(n + e), Mobius only.

        Requires n + e > 0 on [start, inf), which holds whenever the
        denominator has no pole at or beyond start.
        """
        a, b, c, d = self.mobius_coeffs
        if c == 0:
            raise ValueError("affine sequence has no finite-limit deviation form")
        det = a * d - b * c
        if det == 0:
            raise ValueError("constant sequence has zero deviation")
        return (-det / (c * c), d / c)

    def cmp_seq(self, other: "RatSeq", start):
        """Sign of self(n) - other(n) for all n >= start, or None if mixed."""
        diff = psub(pmul(self.num, other.den), pmul(other.num, self.den))
        if not diff:
            return 0
        s = sign_on_tail(diff, start)
        sd = sign_on_tail(pmul(self.den, other.den), start)
        if s is None or sd in (None, 0):
            return None
        return s * sd

    def __str__(self):
        a_ = self.num
        d_ = self.den
        if self.is_mobius():
            a, b, c, d = self.mobius_coeffs
            return f"mob({fmt(a)},{fmt(b)},{fmt(c)},{fmt(d)})"
        def side(p):
            return "+".join(f"{fmt(c)}n^{i}" if i else fmt(c) for i, c in enumerate(p))
        return f"quad[({side(a_)})/({side(d_)})]"


def mobius(a, b, c, d) -> RatSeq:
    """(a n + b)/(c n + d) with c != 0 (the sequence converges to a/c)."""
    a, b, c, d = Q(a), Q(b), Q(c), Q(d)
    if c == 0:
        raise ValueError("c must be nonzero so the limit a/c is finite")
    return RatSeq((b, a), (d, c))


def const_plus_recip(limit, kappa, e) -> RatSeq:
    """The sequence limit + kappa/(n + e)."""
    limit, kappa, e = Q(limit), Q(kappa), Q(e)
    return mobius(limit, limit * e + kappa, 1, e)


def midpoint_seq(left: RatSeq, right: RatSeq) -> RatSeq:
    """(left(n) + right(n))/2 - quadratic in general."""
    num = padd(pmul(left.num, right.den), pmul(right.num, left.den))
    return RatSeq(pscale(num, Q(1, 2)), pmul(left.den, right.den))


def convex_seq(left: RatSeq, right: RatSeq, theta) -> RatSeq:
    """left(n) + theta*(right(n) - left(n)) for a fixed rational theta in (0,1)."""
    theta = Q(theta)
    num = padd(pscale(pmul(left.num, right.den), 1 - theta),
               pscale(pmul(right.num, left.den), theta))
    return RatSeq(num, pmul(left.den, right.den))
