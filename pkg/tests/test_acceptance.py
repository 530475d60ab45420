"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines.  The fuzz corpus (10^4 cases, fixed seed) is generated once per
session and shared by the criteria that quantify over it.
"""

import json
import random
import subprocess
import sys
import time

import pytest

from realline.deciders import (POLICIES, decide_ccc, decide_gcc_sequences,
                               decide_gcc_transversal, cover_to_surjection,
                               verify_cover, verify_transversal,
                               witness_non_gcc_cover)
from realline.dsl import format_set, parse_dsl
from realline.engine import normalize, semantic_subset
from realline.errors import Unnormalizable, UnsupportedConfig
from realline.fuzz import FuzzSpec, fuzz_run, gen_case, _trial_rng
from realline.planar import (COLLISION_FREE, LITERAL_SUM, PlanarExampleConfig,
                             check_xn_in_closure_An, detect_height_collisions,
                             fixture_verdicts)
from realline.ratmath import Q
from realline.report import analyze
from realline.sets import member
from realline.surject import (build_surjection, cantor_eval, cantor_path_to,
                              continuity_samples, eval_surjection, solve_preimage)
from realline.topology import predicates

SECTION1 = "{0} | fam(n>=1){ (1/(n+1),1/n) }"
SECTION1_BARE = "fam(n>=1){ (1/(n+1),1/n) }"

CORPUS_SPEC = FuzzSpec(seed=20260811, trials=10_000)


def _p(line):
    print(line, file=sys.stderr)


@pytest.fixture(scope="session")
def corpus():
    """(elapsed_seconds, normalized sets, transversal verdicts, unnorm count)."""
    t0 = time.time()
    sets, verdicts = [], []
    unnorm = 0
    for t in range(CORPUS_SPEC.trials):
        rng = _trial_rng(CORPUS_SPEC, t)
        raw = gen_case(rng, CORPUS_SPEC)
        try:
            X = normalize(raw)
        except Unnormalizable:
            unnorm += 1
            continue
        vt = decide_gcc_transversal(X)["verdict"]
        vs = decide_gcc_sequences(X)["verdict"]
        sets.append(X)
        verdicts.append((vt, vs))
    elapsed = time.time() - t0
    return elapsed, sets, verdicts, unnorm


@pytest.fixture(scope="session")
def battery(corpus):
    """Full property battery over the same spec (criteria 4, 7, 8)."""
    return fuzz_run(CORPUS_SPEC).to_dict()


def test_criterion_1_section1_fixture():
    t0 = time.time()
    rep = analyze(SECTION1)
    assert rep["gcc"] is True and rep["ccc"] is True
    assert rep["witness"]["kind"] == "transversal"
    X = normalize(parse_dsl(SECTION1))
    K = decide_ccc(X)["witnessK"]
    assert predicates(K)["compact"]
    # the only accumulation point of the witness is 0
    assert {str(s.seq.limit) for s in K.schemas} == {"0"}
    rep2 = analyze(SECTION1_BARE)
    assert rep2["gcc"] is False and rep2["ccc"] is False
    Y = normalize(parse_dsl(SECTION1_BARE))
    cov = witness_non_gcc_cover(Y)
    chk = verify_cover(Y, cov)
    assert chk["covers"] and chk["disjoint"] and chk["openInX"]
    f = cover_to_surjection(cov)
    assert f(Q(2, 5)) == 2 and f(Q(7, 8)) == 1
    elapsed = time.time() - t0
    assert elapsed < 1.0, f"fixture analysis took {elapsed:.2f}s"
    _p(f"PASS criterion 1: section-1 fixture verdicts and witnesses exact "
       f"({elapsed:.2f}s < 1s)")


def test_criterion_2_decider_agreement(corpus):
    elapsed, sets, verdicts, unnorm = corpus
    total = CORPUS_SPEC.trials
    assert len(sets) >= 10_000 - unnorm
    disagreements = sum(1 for vt, vs in verdicts if vt != vs)
    assert disagreements == 0
    assert unnorm / total < 0.01, f"unnormalizable rate {unnorm}/{total}"
    assert elapsed < 60, f"corpus decided in {elapsed:.1f}s"
    _p(f"PASS criterion 2: {len(sets)} cases, 100% agreement, "
       f"unnormalizable {unnorm}/{total}, {elapsed:.1f}s < 60s")


def test_criterion_3_policy_invariance(corpus):
    _, sets, verdicts, _ = corpus
    bad = 0
    for X, (vt, _) in zip(sets, verdicts):
        got = {decide_gcc_transversal(X, "midpoint")["verdict"],
               decide_gcc_transversal(X, "leftmost-probe")["verdict"]}
        for seed in range(10):
            got.add(decide_gcc_transversal(X, "seeded-random", seed)["verdict"])
        if got != {vt}:
            bad += 1
    assert bad == 0
    _p(f"PASS criterion 3: verdicts identical across {len(POLICIES)} policies "
       f"and 10 random seeds on all {len(sets)} cases")


def test_criterion_4_witness_soundness(battery):
    props = battery["properties"]
    assert battery["failures"] == [], battery["failures"][:3]
    ccc_w = props.get("ccc-witness", {"pass": 0, "fail": 0})
    non_w = props.get("non-gcc-witness", {"pass": 0, "fail": 0})
    assert ccc_w["fail"] == 0 and ccc_w["pass"] == battery["gccCases"]
    assert non_w["fail"] == 0 and non_w["pass"] == battery["nonGccCases"]
    _p(f"PASS criterion 4: witness soundness on {ccc_w['pass']} passing and "
       f"{non_w['pass']} failing cases (100%)")


def _gcc_corpus_cases(count):
    """Deterministic stream of distinct passing sets with families."""
    out = []
    t = 0
    while len(out) < count and t < 10_000:
        rng = _trial_rng(CORPUS_SPEC, t)
        raw = gen_case(rng, CORPUS_SPEC)
        t += 1
        try:
            X = normalize(raw)
        except Unnormalizable:
            continue
        if X.is_empty() or not decide_gcc_transversal(X)["verdict"]:
            continue
        out.append(X)
    return out


def test_criterion_5_surjection_construction():
    t0 = time.time()
    cases = _gcc_corpus_cases(50) + [normalize(parse_dsl(SECTION1))]
    rng = random.Random(91)
    for X in cases:
        plan = build_surjection(X)
        dom = plan.transversal.set
        a_pool = [p.value for p in dom.points]
        fam_seqs = [s.seq for s in dom.schemas]
        # range containment on 10^4 samples
        for _ in range(10_000):
            if fam_seqs and (not a_pool or rng.random() < 0.7):
                q = fam_seqs[rng.randrange(len(fam_seqs))]
                a = q.value(rng.randint(q_start(dom, q), q_start(dom, q) + 120))
            else:
                a = a_pool[rng.randrange(len(a_pool))]
            y = Q(rng.randint(-60, 60), rng.randint(1, 8))
            assert member(X, eval_surjection(plan, a, y))
        # exact preimage round-trips on 10^3 targets
        targets = _member_targets(X, rng, 1000)
        for tgt in targets:
            a, y = solve_preimage(plan, tgt)
            assert eval_surjection(plan, a, y) == tgt
        assert continuity_samples(plan, Q(1, 1000)) == []
    elapsed = time.time() - t0
    assert elapsed < 60, f"{elapsed:.1f}s"
    _p(f"PASS criterion 5: surjection range/preimage/continuity on "
       f"{len(cases)} cases ({elapsed:.1f}s < 60s)")


def q_start(dom, q):
    for s in dom.schemas:
        if s.seq is q:
            return s.start
    return 1


def _member_targets(X, rng, count):
    targets = []
    while len(targets) < count:
        pick = rng.random()
        if X.schemas and pick < 0.6:
            s = X.schemas[rng.randrange(len(X.schemas))]
            piece = s.piece(rng.randint(s.start, s.start + 60))
            if hasattr(piece, "lo"):
                t = piece.lo + Q(rng.randint(1, 15), 16) * (piece.hi - piece.lo)
                if piece.contains(t):
                    targets.append(t)
            else:
                targets.append(piece.value)
        elif X.intervals and pick < 0.9:
            a = X.intervals[rng.randrange(len(X.intervals))]
            lo = a.lo if a.lo is not None else (a.hi - 3 if a.hi is not None else Q(-3))
            hi = a.hi if a.hi is not None else lo + 3
            t = lo + Q(rng.randint(1, 15), 16) * (hi - lo)
            if a.contains(t):
                targets.append(t)
        elif X.points:
            targets.append(X.points[rng.randrange(len(X.points))].value)
    return targets


def test_criterion_6_cantor_stage():
    boundq = Q(3, 4) ** 10
    rng = random.Random(17)
    cases = _gcc_corpus_cases(40)
    transversals = []
    for X in cases:
        K = decide_ccc(X)["witnessK"]
        if predicates(K)["compact"]:
            transversals.append(K)
        if len(transversals) == 20:
            break
    assert len(transversals) == 20
    for A in transversals:
        from realline.surject import _hull
        lo, hi = _hull(A)
        hull_w = hi - lo
        for _ in range(3):
            bits = "".join(rng.choice("01") for _ in range(20))
            prev = cantor_eval(A, "")
            for d in range(1, 21):
                cur = cantor_eval(A, bits[:d])
                assert prev.lo <= cur.lo and cur.hi <= prev.hi  # nested
                prev = cur
            assert prev.width <= hull_w * boundq
        # every sampled point is bracketed by some depth-20 path
        samples = [p.value for p in A.points][:3]
        for s in A.schemas:
            samples += [s.seq.value(s.start), s.seq.value(s.start + 7)]
        for v in samples:
            path = cantor_path_to(A, v, 20)
            assert cantor_eval(A, path).contains(v)
    _p("PASS criterion 6: 20 transversals, depth-20 brackets nested, "
       "width <= hull*(3/4)^10, all sampled points bracketed")


def test_criterion_7_corollaries(battery):
    props = battery["properties"]
    for name in ("corollary1", "corollary2-forward", "corollary2-converse",
                 "corollary3"):
        stats = props.get(name, {"pass": 0, "fail": 0})
        assert stats["fail"] == 0, (name, stats)
        assert stats["pass"] > 0
    _p("PASS criterion 7: closure identity, complement local connectedness "
       "(+bounded converse), extremum trichotomy: 100% of applicable cases")


def test_criterion_8_preservation_battery(battery):
    props = battery["properties"]
    for name in ("prop-continuous-image", "prop-clopen-halves",
                 "prop-dense-extension", "prop-finite-union",
                 "clopen-chain-nonempty", "prop2-guard"):
        stats = props.get(name, {"pass": 0, "fail": 0})
        assert stats["fail"] == 0, (name, stats)
        assert stats["pass"] > 0
    _p("PASS criterion 8: image/clopen-half/closure/dense/union preservation "
       "and chain nonemptiness: 100% of applicable cases")


def test_criterion_9_planar_fixture():
    t0 = time.time()
    cfg = PlanarExampleConfig(COLLISION_FREE, 100)
    v = fixture_verdicts(cfg)
    assert v["gcc"] is True and v["ccc"] is False
    assert v["reasons"]["gcc"] and v["reasons"]["ccc"]
    lit = PlanarExampleConfig(LITERAL_SUM, 100)
    with pytest.raises(UnsupportedConfig) as ei:
        fixture_verdicts(lit)
    assert (2, 3, 6) in ei.value.detail["collisions"]
    assert all(check_xn_in_closure_An(cfg, n) for n in range(1, 1001))
    elapsed = time.time() - t0
    assert elapsed < 5, f"{elapsed:.1f}s"
    _p(f"PASS criterion 9: planar fixture verdicts + literal-rule rejection "
       f"+ closure checks n<=1000 ({elapsed:.1f}s < 5s)")


CLI = [sys.executable, "-m", "realline.cli"]


def _run_cli(*args):
    return subprocess.run(CLI + list(args), capture_output=True, text=True)


def test_criterion_10_cli_contract():
    r = _run_cli("analyze", SECTION1)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert set(doc) == {"input", "normalized", "components", "gcc", "ccc",
                        "witness", "closure", "checks"}
    assert _run_cli("analyze", "(1,").returncode == 2
    assert _run_cli("analyze", "fam(n>=1){ (1/n, 1/(n+1)) }").returncode == 3
    assert _run_cli("nope").returncode == 4
    assert _run_cli("fixture", "planar", "--rule", "literal",
                    "--check", "all").returncode == 1
    a = _run_cli("analyze", SECTION1).stdout
    b = _run_cli("analyze", SECTION1).stdout
    assert a == b
    fa = _run_cli("fuzz", "--seed", "5", "--trials", "10").stdout
    fb = _run_cli("fuzz", "--seed", "5", "--trials", "10").stdout
    assert fa == fb
    _p("PASS criterion 10: exit codes 0/1/2/3/4 and JSON schema exact; "
       "reports byte-identical under fixed seeds")
