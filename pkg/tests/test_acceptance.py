"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Run directly with ``python tests/test_acceptance.py`` or under pytest, where
the lines are collected into the "acceptance criteria" summary section.
"""

import subprocess
import sys
import time

import pytest

import conftest
from qromlift import checks

CFG = checks.CheckConfig()


def record(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2} {title}: {'PASS' if passed else 'FAIL'} ({detail})"
    conftest.CRITERIA[number] = line
    print(line)


def timed(check):
    start = time.perf_counter()
    result = check(CFG)
    return result, time.perf_counter() - start


def test_criterion_01_swapping():
    r, secs = timed(checks.check_swapping)
    m = r.metrics
    ok = m["trials"] >= 1000 and m["violations"] == 0 and secs < 60
    record(1, "swapping", ok,
           f"{m['violations']}/{m['trials']} trials over bound, max lhs/rhs {m['max_lhs_over_rhs']:.4f}, {secs:.1f}s")
    assert ok


def test_criterion_02_trace_vs_euclidean():
    r, _ = timed(checks.check_measure)
    m = r.metrics
    ok = m["trials"] >= 1000 and m["violations"] == 0
    record(2, "trace/euclidean", ok, f"{m['violations']}/{m['trials']} violations, max excess {m['max_td_minus_bound']:.2e}")
    assert ok


def test_criterion_03_reprogramming():
    r, _ = timed(checks.check_reprogramming)
    rows = r.metrics["fixtures"]
    bad = [k for k, v in rows.items() if v["measured_adv"] > v["bound"] + 1e-9]
    record(3, "reprogramming", not bad, f"{len(rows)} fixtures, {len(bad)} over 2Q*sqrt(eps)")
    assert not bad


def test_criterion_04_transition_identity():
    r, secs = timed(checks.check_transition)
    ok = r.metrics["max_tv"] <= 1e-12 and secs < 120
    pairs = sum(v["pairs_checked"] for v in r.metrics["per_prg"].values())
    record(4, "transition identity", ok, f"max TV {r.metrics['max_tv']:.1e} over {pairs} (g, h) pairs, {secs:.1f}s")
    assert ok


def test_criterion_05_hybrid_chain():
    r, _ = timed(checks.check_hybrids)
    rows = r.metrics["rows"]
    bad = [
        k for k, v in rows.items()
        if v["tv_prg_hyb1"] > 1e-12 or v["tv_hyb1_hyb2"] > 1e-12 or v["gap_hyb2_hyb3"] > v["bound"]
    ]
    record(5, "hybrid chain", not bad, f"{len(rows)} (prg, delta, g) rows, {len(bad)} failing")
    assert not bad


def test_criterion_06_findtranscript_guarantee():
    r, _ = timed(checks.check_findtranscript)
    rows = r.metrics["rows"]
    bad = [
        k for k, v in rows.items()
        if v["pr_light"] < v["need"] - 1e-12 or v["mean_domain"] > v["domain_bound"] + 1e-12
    ]
    record(6, "findTranscript", not bad, f"{len(rows)} (prg, delta, g) rows, {len(bad)} failing")
    assert not bad


def test_criterion_07_lifting():
    r, _ = timed(checks.check_lifting)
    reports = r.metrics["reports"]
    bad = [
        k for k, v in reports.items()
        if not (v["adv_A"] > 0 and v["adv_B"] >= v["adv_A"] / 2 - 1e-9 and v["max_B_queries"] <= v["limit"])
    ]
    detail = ", ".join(f"{k} adv_A {v['adv_A']:.3f} adv_B {v['adv_B']:.3f}" for k, v in sorted(reports.items()))
    ok = len(reports) >= 2 and not bad
    record(7, "lifting", ok, detail)
    assert ok


def test_criterion_08_critical_set():
    r, _ = timed(checks.check_critical_sets)
    per = r.metrics["per_fixture"]
    failing = {k: v["failures"] for k, v in per.items() if v["failures"]}
    ok = r.metrics["instances"] >= 20 and not failing
    record(8, "critical set", ok, f"{r.metrics['instances']} (A, F) instances, failing fixtures {failing or 'none'}")
    assert ok


def test_criterion_09_simulation():
    r, _ = timed(checks.check_simulation)
    per = {k: v for k, v in r.metrics["per_fixture"].items() if "skipped" not in v}
    failing = {k: v["qeq_failures"] + v["over_cap"] for k, v in per.items() if v["qeq_failures"] or v["over_cap"]}
    diag = r.diagnostics["classical_queries_within_4S_plus_2"]
    record(9, "simulation", not failing,
           f"{len(per)} fixtures, failing {failing or 'none'}; queries <= 4|S|+2 on classical fixtures: {diag}")
    assert not failing


def test_criterion_10_quantum_prg_lift():
    r, _ = timed(checks.check_quantum_prg_lift)
    m = r.metrics
    ok = m["delta"] == 0 and m["eps_quantum"] > 0 and m["adv_B"] >= m["eps_quantum"] / 2 - 1e-9
    record(10, "quantum PRG lift", ok, f"eps {m['eps_quantum']:.3f}, adv_B {m['adv_B']:.3f}")
    assert ok


def test_criterion_11_verify_is_byte_identical():
    cmd = [sys.executable, "-m", "qromlift", "verify", "--mode", "exact"]
    first = subprocess.run(cmd, capture_output=True, timeout=600)
    second = subprocess.run(cmd, capture_output=True, timeout=600)
    ok = first.stdout == second.stdout and len(first.stdout) > 0
    record(11, "determinism", ok, f"{len(first.stdout)} bytes, identical: {first.stdout == second.stdout}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
