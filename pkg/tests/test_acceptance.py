"""End-to-end acceptance checks. Each test records one PASS/FAIL line, printed in the session summary."""

import time

import pytest

from incontest import corpus, oracle
from incontest.mechanisms import INCONTESTABLE_KINDS, run, run_ar, run_boston, run_ettc, runner
from incontest.model import Assignment, MechanismSpec, ex_post_info
from incontest.priority_sets import incontestability_verdict, is_incontestable
from incontest.properties import check_generalized_rht, enumerate_assignments, pareto_dominates

RESULTS: list = []


def verdict(n: int, ok: bool, detail: str, started: float, limit: float = None) -> None:
    elapsed = time.perf_counter() - started
    if limit is not None and elapsed >= limit:
        ok = False
        detail += f" (took {elapsed:.2f}s, limit {limit:g}s)"
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} [{elapsed:.2f}s]")
    assert ok, detail


def complaints(p, a):
    return [(c.student, c.kind, c.witness) for c in incontestability_verdict(p, a).complaints]


def test_criterion_01_boston_on_t2(t2):
    t0 = time.perf_counter()
    out = run_boston(t2)
    ok = out.seat("i2") == "s3"
    ok &= complaints(t2, out) == [("i2", "top_priority_violation", frozenset({"s1", "s2"}))]
    ok &= all(is_incontestable(t2, run(MechanismSpec(k), t2).outcome) for k in INCONTESTABLE_KINDS)
    verdict(1, ok, "Boston seats i2 at s3 and is flagged; the five others pass", t0, 1.0)


def test_criterion_02_ar2_on_t3(t3):
    t0 = time.perf_counter()
    out = run_ar(t3, 2)
    ok = out == Assignment({"i1": "s1", "i2": "s2", "i3": None, "i4": "s3"})
    ok &= complaints(t3, out) == [("i3", "top_priority_violation", frozenset({"s1", "s2", "s3"}))]
    verdict(2, ok, "AR(2) leaves i3 unassigned and is flagged", t0, 1.0)


def test_criterion_03_ettc_on_t4(t4):
    t0 = time.perf_counter()
    out = run_ettc(t4)
    ok = out.seat("i4") not in {"s1", "s2"}
    ok &= [c[0] for c in complaints(t4, out)] == ["i4"]
    verdict(3, ok, f"ETTC seats i4 at {out.seat('i4')} and the audit flags i4", t0, 1.0)


def test_criterion_04_mu_star(t1, mu_star):
    t0 = time.perf_counter()
    ok = is_incontestable(t1, mu_star)
    ok &= not any(oracle.definitional_complaint(ex_post_info(t1, mu_star, i)) for i in t1.students)
    verdict(4, ok, "mu* passes the audit and nobody has a definitional complaint", t0, 10.0)


def test_criterion_05_characterization_matches_definition():
    t0 = time.perf_counter()
    checks = mismatches = 0
    for p in corpus.exhaustive_corpus(3, 2, 12):
        for a in enumerate_assignments(p):
            flagged = incontestability_verdict(p, a).students()
            for i in p.students:
                checks += 1
                if oracle.definitional_complaint(ex_post_info(p, a, i)) != (i in flagged):
                    mismatches += 1
    verdict(5, mismatches == 0 and checks > 0,
            f"{checks} student checks, {mismatches} mismatches", t0, 300.0)


def test_criterion_06_outcome_sets_equal_prediction():
    t0 = time.perf_counter()
    checks = mismatches = 0
    for fr in corpus.sweep_frames():
        for i in fr.students:
            for pref in corpus.all_lists(fr.schools):
                want = oracle.predicted_outcomes(fr, i, pref)
                for kind in INCONTESTABLE_KINDS:
                    checks += 1
                    if oracle.outcome_set(kind, fr, i, pref) != want:
                        mismatches += 1
    verdict(6, mismatches == 0, f"{checks} outcome sets, {mismatches} mismatches", t0, 900.0)


def test_criterion_07_incontestability_and_top_top_audits():
    t0 = time.perf_counter()
    problems = corpus.audit_corpus()
    failures = 0
    for kind in INCONTESTABLE_KINDS:
        mech = runner(MechanismSpec(kind))
        failures += sum(1 for p in problems if not is_incontestable(p, mech(p)))
        failures += len(oracle.audit_top_top_consistency(kind, problems))
    info = {k: len(oracle.audit_top_top_consistency(k, problems)) for k in ("ar:1", "ettc")}
    detail = f"{len(problems)} problems, {failures} failures; informational top-top findings {info}"
    verdict(7, failures == 0, detail, t0)


def test_criterion_08_pareto_improvements_and_rural_hospitals():
    t0 = time.perf_counter()
    pairs = violations = 0
    for p in corpus.audit_corpus():
        base = run(MechanismSpec("sosm"), p).outcome
        for a in enumerate_assignments(p):
            if a != base and pareto_dominates(p, a, base):
                pairs += 1
                violations += not is_incontestable(p, a)
                violations += not check_generalized_rht(p, a, base).passed
    verdict(8, violations == 0 and pairs > 0, f"{pairs} dominating pairs, {violations} violations", t0)


def test_criterion_09_maxmin(t2, t3):
    t0 = time.perf_counter()
    checks = violations = 0
    for fr in (t2, t3):
        for kind in INCONTESTABLE_KINDS:
            for cap in (None, 2):
                for i in fr.students:
                    checks += 1
                    violations += not oracle.check_maxmin_optimal(kind, fr, i, fr.prefs[i], cap).passed
    verdict(9, violations == 0, f"{checks} checks, {violations} violations", t0, 600.0)


def test_criterion_10_safe_and_dominant_characterizations():
    t0 = time.perf_counter()
    checks = mismatches = 0
    frames = corpus.sweep_frames() + corpus.small_frames(3, 2, 12)
    for fr in frames:
        for kind in ("sosm", "ttc"):
            for k in (1, 2, 3):
                for i in fr.students:
                    a = oracle.has_safe_strategy(fr, i, k)
                    b = oracle.has_safe_strategy(fr, i, k, kind, method="brute")
                    checks += 1
                    mismatches += a.exists != b.exists
                    for true_pref in corpus.all_lists(fr.schools):
                        a = oracle.has_dominant_strategy(kind, fr, i, true_pref, k)
                        b = oracle.has_dominant_strategy(kind, fr, i, true_pref, k, method="brute")
                        checks += 1
                        mismatches += a.exists != b.exists
    witness_ok = True
    for k in (2, 3):
        p, i = corpus.strictness_witness(k)
        for kind in ("sosm", "ttc"):
            for method in ("characterization", "brute"):
                at_k = oracle.has_dominant_strategy(kind, p, i, p.prefs[i], k, method=method).exists
                below = oracle.has_dominant_strategy(kind, p, i, p.prefs[i], k - 1, method=method).exists
                witness_ok &= at_k and not below
    detail = f"{checks} checks, {mismatches} mismatches; strictness witness ok: {witness_ok}"
    verdict(10, mismatches == 0 and witness_ok, detail, t0)


def test_criterion_11_adversarial_profiles():
    t0 = time.perf_counter()
    queries = corpus.exclusion_queries(50, seed=11)
    failures = 0
    for q in queries:
        prof = oracle.adversarial_profile(q.frame, q.student, q.pref, q.schools)
        p = q.frame.with_prefs({**prof, q.student: q.pref})
        for kind in INCONTESTABLE_KINDS:
            failures += run(MechanismSpec(kind), p).outcome.seat(q.student) in q.schools
    verdict(11, failures == 0 and len(queries) == 50, f"{len(queries)} queries, {failures} failures", t0)
