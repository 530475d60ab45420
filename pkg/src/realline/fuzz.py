"""Deterministic fuzz generator and the property-suite runner.

Cases are generated from (seed, trial-index) so identical specs replay
identical sequences.  The battery exercises: the two deciders' agreement,
selector-policy invariance, witness soundness on both verdicts, the
closure identity over components, local connectedness of the complement,
the extremum trichotomy under piecewise-linear maps, preservation of the
verdict under continuous images / clopen halves / closures / dense
extensions / finite unions, and nonemptiness of decreasing clopen chains.

Family generation works in reciprocal coordinates: pieces are laid out on
an affine grid around the limit, which guarantees per-family validity and
keeps same-limit pairs certifiable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .deciders import (POLICIES, SchemaTailChain, clopen_chain_intersection,
                       cover_to_surjection, decide_ccc, decide_gcc_sequences,
                       decide_gcc_transversal, split_clopen, verify_cover,
                       witness_non_gcc_cover)
from .dsl import format_set, parse_dsl
from .engine import complement_in, normalize, semantic_subset, union
from .errors import Unnormalizable
from .maps import PLMap, extremum_report, pushforward
from .polyseq import const_plus_recip
from .ratmath import Q
from .report import check_corollary_closure_identity
from .sets import (INTERVALS, POINTS, IntervalAtom, PointAtom, RawOracle,
                   RealSet, SchemaAtom, member)
from .topology import closure, local_connectedness_defects, predicates


@dataclass(frozen=True)
class FuzzSpec:
    seed: int
    trials: int
    max_atoms: int = 3
    max_schemas: int = 2
    coeff_bound: int = 12


def _trial_rng(spec: FuzzSpec, t: int) -> random.Random:
    return random.Random(spec.seed * 1_000_003 + t)


def _small_rational(rng, bound):
    return Q(rng.randint(-bound, bound), rng.randint(1, 4))


def _family_at(rng, L, side, sigma, phase, kind, width_t, start, openness):
    """Family with u-space pieces [sigma*n + phase, ... + width], exact."""
    if kind == POINTS:
        seq = const_plus_recip(L, Q(side) / sigma, phase / sigma)
        return SchemaAtom(POINTS, start, seq=seq)
    width = sigma * width_t
    inner_u = phase + width       # larger u = closer to the limit
    outer_u = phase
    hi_seq = const_plus_recip(L, Q(side) / sigma, inner_u / sigma)
    lo_seq = const_plus_recip(L, Q(side) / sigma, outer_u / sigma)
    lc, rc = openness
    if side > 0:
        return SchemaAtom(INTERVALS, start, hi_seq, lc, lo_seq, rc)
    return SchemaAtom(INTERVALS, start, lo_seq, lc, hi_seq, rc)


def gen_case(rng: random.Random, spec: FuzzSpec) -> RealSet:
    """One raw RealSet; roughly half the cases carry at least one family,
    and half of the family cases omit the limit point."""
    b = spec.coeff_bound
    intervals, points, schemas = [], [], []
    n_schemas = 0
    if rng.random() < 0.55:
        n_schemas = 1 + (rng.random() < 0.3 and spec.max_schemas > 1)
    limits = []
    for si in range(n_schemas):
        if si > 0 and rng.random() < 0.45 and limits:
            L, side = limits[0]
            mode = rng.choice(["other-side", "interleave", "far-phase"])
            if mode == "other-side":
                side = -side
                phase = Q(rng.randint(0, 2), 1) + Q(rng.randint(1, 3), 4)
                sigma = Q(rng.randint(1, 3))
                fam = _family_at(rng, L, side, sigma, phase,
                                 rng.choice([INTERVALS, POINTS]), Q(1, 2),
                                 rng.randint(1, 3), (False, False))
            else:
                # second family inside the first one's gaps, phase-shifted
                sigma = Q(rng.randint(1, 3))
                phase = Q(1, 2)
                fam1 = _family_at(rng, L, side, sigma, Q(0),
                                  INTERVALS, Q(1, 4), 1, (False, False))
                fam2 = _family_at(rng, L, side, sigma, phase,
                                  rng.choice([INTERVALS, POINTS]), Q(1, 4),
                                  rng.randint(1, 2), (False, False))
                schemas[0] = fam1
                fam = fam2
        else:
            L = _small_rational(rng, b)
            side = rng.choice([1, -1])
            limits.append((L, side))
            sigma = Q(rng.randint(1, 3), rng.choice([1, 1, 2]))
            phase = Q(rng.randint(0, 3)) + Q(rng.randint(1, 3), 4)
            kind = INTERVALS if rng.random() < 0.6 else POINTS
            width_t = rng.choice([Q(1, 4), Q(1, 2), Q(3, 4), Q(1)])
            if width_t == 1:
                opens = (False, False)  # touching chain stays disjoint
            else:
                opens = (rng.random() < 0.5, rng.random() < 0.5)
            fam = _family_at(rng, L, side, sigma, phase, kind, width_t,
                             rng.randint(1, 3), opens)
        schemas.append(fam)
        if rng.random() < 0.5:
            points.append(PointAtom(L))
    for _ in range(rng.randint(0, spec.max_atoms)):
        kind = rng.random()
        a = _small_rational(rng, b)
        if kind < 0.4:
            points.append(PointAtom(a))
        else:
            w = Q(rng.randint(1, b), rng.randint(1, 3))
            if kind < 0.9:
                intervals.append(IntervalAtom(a, a + w, rng.random() < 0.5,
                                              rng.random() < 0.5))
            else:
                if rng.random() < 0.5:
                    intervals.append(IntervalAtom(None, a, False, rng.random() < 0.5))
                else:
                    intervals.append(IntervalAtom(a, None, rng.random() < 0.5, False))
    return RealSet.build(intervals, points, schemas)


def gen_plmap(rng: random.Random) -> PLMap:
    nb = rng.randint(0, 2)
    bps = sorted(set(Q(rng.randint(-6, 6), rng.randint(1, 2)) for _ in range(nb)))
    slopes = [Q(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
              if rng.random() > 0.2 else Q(0) for _ in range(len(bps) + 1)]
    offsets = [Q(rng.randint(-4, 4), rng.randint(1, 2))]
    for i, bp in enumerate(bps):
        # continuity pins each next offset
        offsets.append(slopes[i] * bp + offsets[i] - slopes[i + 1] * bp)
    return PLMap(tuple(bps), tuple(slopes), tuple(offsets))


def _probes(X_raw: RealSet, rng, count=60):
    """Rational probes inside the enumerated window of a raw description."""
    probes = set()
    for a in X_raw.intervals:
        for v in (a.lo, a.hi):
            if v is not None:
                probes |= {v, v + Q(1, 7), v - Q(1, 7)}
    for p in X_raw.points:
        probes |= {p.value, p.value + Q(1, 9)}
    for s in X_raw.schemas:
        probes.add(s.limit)
        for n in range(s.start, s.start + 12):
            piece = s.piece(n)
            if isinstance(piece, PointAtom):
                probes |= {piece.value, piece.value + Q(1, 1000)}
            else:
                probes |= {piece.lo, piece.hi, (piece.lo + piece.hi) / 2}
    probes = sorted(probes)
    if len(probes) > count:
        probes = [probes[rng.randrange(len(probes))] for _ in range(count)]
    return probes


@dataclass
class FuzzSummary:
    trials: int = 0
    passed: int = 0
    unnormalizable: int = 0
    failures: list = field(default_factory=list)
    property_counts: dict = field(default_factory=dict)
    gcc_cases: int = 0
    non_gcc_cases: int = 0

    def record(self, name, ok, trial, detail=""):
        self.property_counts.setdefault(name, [0, 0])
        self.property_counts[name][0 if ok else 1] += 1
        if not ok:
            self.failures.append({"trial": trial, "property": name, "detail": detail})
        return ok

    def to_dict(self):
        return {
            "trials": self.trials,
            "passed": self.passed,
            "unnormalizable": self.unnormalizable,
            "gccCases": self.gcc_cases,
            "nonGccCases": self.non_gcc_cases,
            "failures": self.failures,
            "properties": {k: {"pass": v[0], "fail": v[1]}
                           for k, v in sorted(self.property_counts.items())},
        }


def _simpler_schema(s: SchemaAtom) -> SchemaAtom | None:
    """Canonical small-coefficient stand-in with the same limit and side."""
    L, side = s.limit, s.side
    if L != 0 and abs(L) > 2:
        L = Q(0)
    if s.kind == POINTS:
        cand = SchemaAtom(POINTS, 1, seq=const_plus_recip(L, Q(side), Q(0)))
    else:
        hi = const_plus_recip(L, Q(side), Q(0))
        lo = const_plus_recip(L, Q(side), Q(1))
        left, right = (lo, hi) if side > 0 else (hi, lo)
        cand = SchemaAtom(INTERVALS, 1, left, False, right, False)
    return None if cand == s else cand


def shrink_case(raw: RealSet, fails) -> RealSet:
    """Greedy shrink: drop atoms, then schemas, then shrink coefficients
    toward canonical small rationals, while the failure persists."""
    cur = raw
    changed = True
    while changed:
        changed = False
        for kind in ("intervals", "points", "schemas"):
            parts = list(getattr(cur, kind))
            for i in range(len(parts)):
                cand_parts = parts[:i] + parts[i + 1:]
                cand = RealSet.build(
                    cand_parts if kind == "intervals" else cur.intervals,
                    cand_parts if kind == "points" else cur.points,
                    cand_parts if kind == "schemas" else cur.schemas)
                try:
                    if fails(cand):
                        cur = cand
                        changed = True
                        break
                except Unnormalizable:
                    continue
            if changed:
                break
        if changed:
            continue
        for i, s in enumerate(cur.schemas):
            simp = _simpler_schema(s)
            if simp is None:
                continue
            fams = list(cur.schemas)
            fams[i] = simp
            cand = RealSet.build(cur.intervals, cur.points, fams)
            try:
                if fails(cand):
                    cur = cand
                    changed = True
                    break
            except Unnormalizable:
                continue
    return cur


def run_battery(X: RealSet, raw: RealSet, rng, summary: FuzzSummary, trial: int,
                decider_override=None) -> None:
    """All properties for one normalized case."""
    rec = summary.record

    decide = decider_override or (lambda Y: decide_gcc_transversal(Y)["verdict"])

    # membership preservation and idempotence
    probes = _probes(raw, rng, 40)
    oracle = RawOracle(raw, 2000)
    rec("normalize-membership", all(member(X, q) == oracle.contains(q)
                                    for q in probes), trial, format_set(X))
    rec("normalize-idempotent", format_set(normalize(parse_dsl(format_set(X)))) ==
        format_set(X), trial, format_set(X))

    gcc_t = decide(X)
    seq = decide_gcc_sequences(X)
    rec("decider-agreement", gcc_t == seq["verdict"], trial, format_set(X))
    if gcc_t:
        summary.gcc_cases += 1
    else:
        summary.non_gcc_cases += 1

    # policy invariance (the random policy under several derived seeds)
    verdicts = {decide_gcc_transversal(X, pol, seed)["verdict"]
                for pol in POLICIES for seed in ((0,) if pol != "seeded-random"
                                                 else (1, 2, 3))}
    rec("policy-invariance", len(verdicts) == 1, trial, format_set(X))

    if gcc_t:
        res = decide_ccc(X)
        K = res["witnessK"]
        ok = res["verdict"] and predicates(K)["compact"]
        # the per-index subset/selection conditions are verified inside
        # decide_ccc; the fully symbolic check needs degree-1 selections
        if all(s.seq.is_mobius() for s in K.schemas):
            ok = ok and semantic_subset(K, X)
        rec("ccc-witness", ok, trial, format_set(X))
        rec("corollary1", check_corollary_closure_identity(X, True), trial,
            format_set(X))
        defects = local_connectedness_defects(complement_in(X))
        rec("corollary2-forward", defects == [], trial, format_set(X))
        # dense extension: add boundary points, still passes
        extra = closure(X)
        rec("prop-dense-extension", decide(extra), trial, format_set(X))
        try:
            img = pushforward(gen_plmap(rng), X)
            rec("prop-continuous-image", decide(img), trial, format_set(img))
        except Unnormalizable:
            pass  # the image itself may be uncertifiable; not a verdict failure
        # extremum trichotomy
        m = gen_plmap(rng)
        try:
            if X.is_empty():
                raise Unnormalizable("vacuous")
            r = extremum_report(m, X)
            ok = True
            if r["sup"] is not None:
                ok &= r["supAttained"] or r["supLeftIntervalContained"]
            else:
                ok &= r["supLeftIntervalContained"]
            if r["inf"] is not None:
                ok &= r["infAttained"] or r["infRightIntervalContained"]
            else:
                ok &= r["infRightIntervalContained"]
            rec("corollary3", ok, trial, format_set(X))
        except Unnormalizable:
            pass
        # clopen halves
        cut = _find_cut(X)
        if cut is not None:
            lo_half, hi_half = split_clopen(X, cut)
            rec("prop-clopen-halves",
                (lo_half.is_empty() or decide(lo_half)) and
                (hi_half.is_empty() or decide(hi_half)), trial, format_set(X))
        # chains: the terms stay nonempty, and so does the full intersection
        if X.schemas:
            chain = SchemaTailChain(rng.randrange(len(X.schemas)))
            inter = clopen_chain_intersection(X, chain)
            terms_nonempty = all(not chain.term(X, n).is_empty() for n in (1, 2, 3))
            rec("clopen-chain-nonempty", terms_nonempty and not inter.is_empty(),
                trial, format_set(X))
    else:
        cov = witness_non_gcc_cover(X)
        chk = verify_cover(X, cov)
        ok = chk["covers"] and chk["disjoint"] and chk["openInX"]
        f = cover_to_surjection(cov)
        w = decide_gcc_sequences(X)["witness"]
        sample_ok = all(f(w.even_seq.value(n)) is not None
                        for n in range(w.start, w.start + 4))
        rec("non-gcc-witness", ok and sample_ok, trial, format_set(X))
        defects = local_connectedness_defects(complement_in(X))
        bounded = predicates(X)["bounded"]
        rec("corollary2-converse", (not bounded) or defects != [], trial,
            format_set(X))

    rec("prop2-guard", decide_ccc(X)["verdict"] == gcc_t, trial, format_set(X))


def _find_cut(X: RealSet):
    """A point outside the closure, if the complement of it is nonempty."""
    comp = complement_in(closure(X))
    for a in comp.intervals:
        if a.lo is not None and a.hi is not None:
            return (a.lo + a.hi) / 2
        if a.lo is not None:
            return a.lo + 1
        if a.hi is not None:
            return a.hi - 1
    for p in comp.points:
        return p.value
    return None


def fuzz_run(spec: FuzzSpec, decider_override=None, union_partner=True) -> FuzzSummary:
    """Run the full battery over `trials` generated cases."""
    summary = FuzzSummary()
    prev_gcc = None
    for t in range(spec.trials):
        rng = _trial_rng(spec, t)
        raw = gen_case(rng, spec)
        summary.trials += 1
        try:
            X = normalize(raw)
        except Unnormalizable:
            summary.unnormalizable += 1
            continue
        before = len(summary.failures)
        try:
            run_battery(X, raw, rng, summary, t, decider_override)
            # finite unions of passing sets keep passing
            if union_partner and prev_gcc is not None and \
                    decide_gcc_transversal(X)["verdict"]:
                try:
                    u = union(X, prev_gcc)
                    summary.record("prop-finite-union",
                                   decide_gcc_transversal(u)["verdict"], t,
                                   format_set(u))
                except Unnormalizable:
                    pass
            if decide_gcc_transversal(X)["verdict"]:
                prev_gcc = X
        except Unnormalizable as e:
            summary.unnormalizable += 1
            continue
        except Exception as e:  # a crash mid-battery is itself a failure
            summary.record("battery-crash", False, t,
                           f"{type(e).__name__}: {e} on {format_set(X)}")
        if len(summary.failures) == before:
            summary.passed += 1
        else:
            # shrink the first failing property for this case
            fail = summary.failures[before]
            prop = fail["property"]

            def fails(cand):
                s2 = FuzzSummary()
                try:
                    Xc = normalize(cand)
                    run_battery(Xc, cand, _trial_rng(spec, t), s2, t,
                                decider_override)
                except Unnormalizable:
                    return False
                except Exception as e:
                    s2.record("battery-crash", False, t, str(e))
                return any(f["property"] == prop for f in s2.failures)

            small = shrink_case(raw, fails)
            fail["shrunk"] = format_set(small)
    return summary
