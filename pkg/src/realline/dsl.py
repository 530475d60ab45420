"""Text format for set expressions.

Grammar (whitespace insensitive)::

    expr     := term ('|' term)*
    term     := interval | point | family
    interval := ('('|'[') bound ',' bound (')'|']')
    bound    := rational | '-inf' | 'inf'
    point    := '{' rational '}'
    family   := 'fam' '(' 'n' '>=' int ')' '{' piece '}'
    piece    := interval or point whose endpoints are sequences
    seq      := 'mob' '(' r ',' r ',' r ',' r ')'
              | [rational '+'] rational '/' ('n' | '(' 'n' '+' int ')')
    rational := int | int '/' int

Parse errors carry the offending position.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .polyseq import RatSeq, mobius
from .ratmath import Q, fmt
from .sets import INTERVALS, POINTS, IntervalAtom, PointAtom, RealSet, SchemaAtom

_INT = re.compile(r"-?\d+")
_WS = re.compile(r"\s*")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        self.pos = _WS.match(self.text, self.pos).end()

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, token: str):
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.eat(token):
            raise ParseError(f"expected {token!r}", self.pos)

    def integer(self) -> int:
        self.skip_ws()
        m = _INT.match(self.text, self.pos)
        if not m:
            raise ParseError("expected an integer", self.pos)
        self.pos = m.end()
        return int(m.group(0))

    def rational(self):
        num = self.integer()
        save = self.pos
        if self.eat("/"):
            self.skip_ws()
            m = _INT.match(self.text, self.pos)
            if not m:
                self.pos = save
                return Q(num)
            self.pos = m.end()
            den = int(m.group(0))
            if den == 0:
                raise ParseError("zero denominator", save)
            return Q(num, den)
        return Q(num)

    def done(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_seq(c: _Cursor) -> RatSeq:
    """mob(a,b,c,d) or sugar [a+] b/n, [a+] b/(n+k)."""
    c.skip_ws()
    if c.text.startswith("mob", c.pos):
        c.pos += 3
        c.expect("(")
        a = c.rational()
        c.expect(",")
        b = c.rational()
        c.expect(",")
        cc = c.rational()
        c.expect(",")
        d = c.rational()
        c.expect(")")
        try:
            return mobius(a, b, cc, d)
        except ValueError as e:
            raise ParseError(str(e), c.pos)
    first = c.rational()
    if c.eat("+"):
        offset = first
        b = c.rational()
    else:
        offset = Q(0)
        b = first
    c.expect("/")
    k = 0
    if c.eat("("):
        c.expect("n")
        c.expect("+")
        k = c.integer()
        c.expect(")")
    else:
        c.expect("n")
    # offset + b/(n+k) = (offset*n + offset*k + b) / (n + k)
    return mobius(offset, offset * k + b, 1, k)


def _parse_piece_bound(c: _Cursor, family: bool):
    return _parse_seq(c) if family else c.rational()


def _parse_interval(c: _Cursor, family: bool):
    lo_closed = c.peek() == "["
    c.pos += 1
    c.skip_ws()
    lo = None
    if not family and c.text.startswith("-inf", c.pos):
        c.pos += 4
    elif not family and c.text.startswith("inf", c.pos):
        raise ParseError("interval cannot start at +inf", c.pos)
    else:
        lo = _parse_piece_bound(c, family)
    c.expect(",")
    c.skip_ws()
    hi = None
    if not family and c.text.startswith("inf", c.pos):
        c.pos += 3
    elif not family and c.text.startswith("-inf", c.pos):
        raise ParseError("interval cannot end at -inf", c.pos)
    else:
        hi = _parse_piece_bound(c, family)
    c.skip_ws()
    if c.eat("]"):
        hi_closed = True
    elif c.eat(")"):
        hi_closed = False
    else:
        raise ParseError("expected ')' or ']'", c.pos)
    return lo, lo_closed, hi, hi_closed


def _parse_term(c: _Cursor):
    ch = c.peek()
    if ch in "([":
        lo, lc, hi, hc = _parse_interval(c, family=False)
        if lo is not None and hi is not None and not lo < hi:
            raise ParseError("interval bounds out of order", c.pos)
        return IntervalAtom(lo, hi, lc, hc)
    if ch == "{":
        c.expect("{")
        v = c.rational()
        c.expect("}")
        return PointAtom(v)
    if c.text.startswith("fam", c.pos):
        c.pos += 3
        c.expect("(")
        c.expect("n")
        c.expect(">=")
        start = c.integer()
        if start < 1:
            raise ParseError("family start index must be positive", c.pos)
        c.expect(")")
        c.expect("{")
        inner = c.peek()
        if inner in "([":
            lo, lc, hi, hc = _parse_interval(c, family=True)
            atom = SchemaAtom(INTERVALS, start, lo, lc, hi, hc)
        elif inner == "{":
            c.expect("{")
            seq = _parse_seq(c)
            c.expect("}")
            atom = SchemaAtom(POINTS, start, seq=seq)
        else:
            raise ParseError("expected an interval or point piece", c.pos)
        c.expect("}")
        return atom
    raise ParseError("expected an interval, point, or family", c.pos)


def parse_dsl(text: str) -> RealSet:
    """Parse a set expression into an (unnormalized) RealSet."""
    c = _Cursor(text)
    if c.eat("empty"):
        if not c.done():
            raise ParseError("trailing input after 'empty'", c.pos)
        return RealSet.empty()
    intervals, points, schemas = [], [], []
    while True:
        term = _parse_term(c)
        if isinstance(term, IntervalAtom):
            intervals.append(term)
        elif isinstance(term, PointAtom):
            points.append(term)
        else:
            schemas.append(term)
        if c.done():
            break
        c.expect("|")
    return RealSet.build(intervals, points, schemas)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def format_seq(seq: RatSeq) -> str:
    if not seq.is_mobius():
        num = ",".join(fmt(x) for x in reversed(seq.num))
        den = ",".join(fmt(x) for x in reversed(seq.den))
        return f"quad({num};{den})"
    a, b, c, d = seq.mobius_coeffs
    if c != 0:
        # prefer the sugar forms [a'+] b'/(n+k) when the scaled d/c is integral
        a2, b2, d2 = a / c, b / c, d / c
        if d2.denominator == 1 and d2 >= 0:
            k = int(d2)
            off = a2
            bb = b2 - a2 * d2
            tail = f"{fmt(bb)}/n" if k == 0 else f"{fmt(bb)}/(n+{k})"
            if off == 0:
                return tail
            return f"{fmt(off)}+{tail}"
    return f"mob({fmt(a)},{fmt(b)},{fmt(c)},{fmt(d)})"


def format_schema(s: SchemaAtom) -> str:
    if s.kind == POINTS:
        body = "{%s}" % format_seq(s.seq)
    else:
        body = "%s%s, %s%s" % ("[" if s.left_closed else "(", format_seq(s.left),
                               format_seq(s.right), "]" if s.right_closed else ")")
    return "fam(n>=%d){ %s }" % (s.start, body)


def format_set(X: RealSet) -> str:
    parts = X.sorted_parts()
    if not parts:
        return "empty"
    return " | ".join(str(p) for p in parts)
