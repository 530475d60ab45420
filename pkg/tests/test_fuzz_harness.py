"""The fuzz harness itself: determinism, balance, and self-testing."""

from realline.deciders import decide_gcc_transversal
from realline.fuzz import FuzzSpec, fuzz_run, gen_case, _trial_rng
from realline.dsl import format_set


def test_deterministic_generation():
    spec = FuzzSpec(seed=5, trials=30)
    a = [format_set(gen_case(_trial_rng(spec, t), spec)) for t in range(30)]
    b = [format_set(gen_case(_trial_rng(spec, t), spec)) for t in range(30)]
    assert a == b


def test_small_run_passes():
    s = fuzz_run(FuzzSpec(seed=3, trials=60))
    d = s.to_dict()
    assert d["failures"] == []
    assert d["passed"] + d["unnormalizable"] == d["trials"]
    assert d["gccCases"] > 0 and d["nonGccCases"] > 0


def test_zero_trials():
    s = fuzz_run(FuzzSpec(seed=1, trials=0))
    assert s.to_dict()["trials"] == 0 and not s.failures


def test_mutation_mode_reports_and_shrinks():
    """A deliberately broken decider must be caught and the case shrunk."""
    def broken(Y):
        v = decide_gcc_transversal(Y)["verdict"]
        return (not v) if Y.schemas else v

    s = fuzz_run(FuzzSpec(seed=3, trials=40), decider_override=broken,
                 union_partner=False)
    assert s.failures, "the harness failed to catch an injected bug"
    agree = [f for f in s.failures if f["property"] == "decider-agreement"]
    assert agree
    assert any("shrunk" in f for f in s.failures)
    # the shrunk case is no larger than the original report
    for f in s.failures:
        if "shrunk" in f:
            assert len(f["shrunk"]) <= max(len(f["detail"]), len(f["shrunk"]))


def test_seed1_hundred_trials_all_pass():
    s = fuzz_run(FuzzSpec(seed=1, trials=100))
    d = s.to_dict()
    assert d["failures"] == []
    assert d["unnormalizable"] / 100 < 0.01


def test_shrinker_reaches_canonical_coefficients():
    """Shrinking a schema-triggered failure lands on a small canonical family."""
    def broken(Y):
        from realline.deciders import decide_gcc_transversal
        v = decide_gcc_transversal(Y)["verdict"]
        return (not v) if Y.schemas else v

    s = fuzz_run(FuzzSpec(seed=8, trials=30), decider_override=broken,
                 union_partner=False)
    shrunk = [f["shrunk"] for f in s.failures if "shrunk" in f]
    assert shrunk
    assert any("fam" in t and len(t) < 60 for t in shrunk), shrunk
