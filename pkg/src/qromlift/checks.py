"""Executable acceptance checks, grouped into suites, plus the report format.

Each check returns a :class:`CheckResult` whose ``metrics`` hold measured
values next to the bounds they are compared with. Reports are plain JSON
with sorted keys and no timestamps so repeated exact runs are
byte-identical.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from . import fixtures as fx
from .distribution import tv_distance
from .experiments import (
    conditioned_oracles,
    findtranscript_outcomes,
    game_oracles,
    quantum_prg_advantage_parts,
    prg_advantage_parts,
    reprogrammed_oracles,
    run_experiment,
)
from .gates import random_query_circuit
from .lifting import QueryLog, find_transcript, lifting_report, reprogram_game, transcript_limit
from .oracles import DEFAULT_BUDGET, Oracle, all_oracles
from .prg import conditional_oracle_distribution, heavy_point, prg_range, run_prg
from .pseudodet import (
    SimBudget,
    canonical_output,
    check_critical_set,
    critical_set_bruteforce,
    derandomize_prg,
    is_delta_deterministic,
    qeq,
    sim_oracle,
)
from .quantum import StateVector, euclidean_distance, measure_bound, swapping_check, trace_distance_pure

SLACK = 1e-9
EXACT_TOL = 1e-12
HYBRID_DELTAS = (0.04, 0.01)
FINDTRANSCRIPT_DELTAS = (0.25, 0.04, 0.01)
LIFT_PAIRS = (("G_id", "A_par"), ("G_adaptive", "A_par2"))


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "metrics": self.metrics,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class CheckConfig:
    seed: int = 20240917
    swap_trials: int = 1000
    measure_trials: int = 1000
    budget: int = DEFAULT_BUDGET


# -- 1-3: lemmas on the quantum engine ----------------------------------------------


def check_swapping(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rng = np.random.default_rng(cfg.seed)
    violations = 0
    doubled_violations = 0
    worst_ratio = 0.0
    first = None
    start = time.perf_counter()
    for trial in range(cfg.swap_trials):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 3))
        w = int(rng.integers(0, 2))
        Q = int(rng.integers(1, 4))
        circ = random_query_circuit(n, m, w, Q, rng)
        f = Oracle(n, m, tuple(int(v) for v in rng.integers(0, 2**m, 2**n)))
        table = list(f.table)
        flips = rng.random(2**n) < 0.5
        flips[int(rng.integers(0, 2**n))] = True
        for x in np.flatnonzero(flips):
            table[x] = (table[x] + int(rng.integers(1, 2**m))) % 2**m
        g = Oracle(n, m, tuple(table))
        lhs, rhs = swapping_check(circ, f, g)
        if lhs > rhs + SLACK:
            violations += 1
            if first is None:
                first = {"trial": trial, "n": n, "m": m, "w": w, "Q": Q, "lhs": lhs, "rhs": rhs}
        if lhs > 2 * rhs + SLACK:
            doubled_violations += 1
        if rhs > 0:
            worst_ratio = max(worst_ratio, lhs / rhs)
    elapsed = time.perf_counter() - start
    return CheckResult(
        "swapping",
        "final-state distance vs sqrt(Q * magnitude on the disagreement set)",
        violations == 0,
        {"trials": cfg.swap_trials, "violations": violations, "max_lhs_over_rhs": worst_ratio,
         "first_violation": first},
        {"violations_against_2x_rhs": doubled_violations, "under_one_minute": elapsed < 60},
    )


def _random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def check_measure(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rng = np.random.default_rng(cfg.seed + 1)
    violations = 0
    worst = -math.inf
    for _ in range(cfg.measure_trials):
        qubits = int(rng.integers(1, 5))
        a = _random_state(2**qubits, rng)
        c = _random_state(2**qubits, rng)
        t = rng.uniform(0, math.pi / 2)
        b = math.cos(t) * a + math.sin(t) * c
        b /= np.linalg.norm(b)
        overlap = np.vdot(a, b)
        b *= np.conj(overlap) / abs(overlap) if abs(overlap) > 0 else 1.0
        sa = StateVector(qubits, 0, 0, a)
        sb = StateVector(qubits, 0, 0, b)
        eps = euclidean_distance(sa, sb)
        gap = trace_distance_pure(sa, sb) - measure_bound(eps)
        worst = max(worst, gap)
        violations += gap > SLACK
    return CheckResult(
        "measure",
        "pure-state trace distance vs eps * sqrt(1 - eps^2 / 4)",
        violations == 0,
        {"trials": cfg.measure_trials, "violations": violations, "max_td_minus_bound": worst},
    )


def check_reprogramming(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rows = {}
    ok = True
    for fixture in fx.reprogram_fixtures():
        adv, bound = reprogram_game(fixture.distinguisher, fixture.F0, fixture.sampler)
        rows[fixture.name] = {"measured_adv": adv, "bound": bound, "epsilon": float(fixture.sampler.epsilon)}
        ok &= adv <= bound + SLACK
    return CheckResult("reprogramming", "reprogramming advantage vs 2 Q sqrt(eps)", ok, {"fixtures": rows})


# -- 4-7: PRG hybrids and lifting ---------------------------------------------------------


def _reachable_partials(G, g, delta, budget):
    seen = {}
    O_g = conditional_oracle_distribution(G, g, budget=budget)
    for H in O_g:
        trail: list = []
        find_transcript(QueryLog(H), G, g, delta, transcript_limit(delta, G.queries), budget, trail)
        for h in trail:
            seen[h] = None
    return list(seen)


def check_transition(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rows = {}
    worst = 0
    pairs = 0
    for name in ("G_id", "G_adaptive"):
        G = fx.PRGS[name]()
        for g in sorted(prg_range(G, cfg.budget)):
            hs: dict = {}
            for delta in HYBRID_DELTAS:
                for h in _reachable_partials(G, g, delta, cfg.budget):
                    hs[h] = None
            for h in hs:
                tv = tv_distance(reprogrammed_oracles(G, g, h, cfg.budget), conditioned_oracles(G, g, h, cfg.budget))
                worst = max(worst, tv)
                pairs += 1
        rows[name] = {"pairs_checked": pairs}
    return CheckResult(
        "transition",
        "TV(O'_{g,h}, O_{g,h}) over reachable h",
        worst <= EXACT_TOL,
        {"max_tv": float(worst), "per_prg": rows},
    )


def check_hybrids(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rows = {}
    ok = True
    for prg_name, a_name in LIFT_PAIRS:
        G, A = fx.PRGS[prg_name](), fx.DISTINGUISHERS[a_name]()
        for delta in HYBRID_DELTAS:
            bound = 2 * A.query_count * math.sqrt(delta) + delta
            for g in sorted(prg_range(G, cfg.budget)):
                games = {w: run_experiment(w, A, G, g=g, delta=delta, budget=cfg.budget)
                         for w in ("PRGg", "Hyb1", "Hyb2", "Hyb3")}
                tv01 = tv_distance(games["PRGg"], games["Hyb1"])
                tv12 = tv_distance(games["Hyb1"], games["Hyb2"])
                gap23 = abs(games["Hyb2"][1] - games["Hyb3"][1])
                oracle_tv = float(tv_distance(game_oracles("PRGg", G, g, budget=cfg.budget),
                                              game_oracles("Hyb1", G, g, delta, budget=cfg.budget)))
                row_ok = tv01 <= EXACT_TOL and tv12 <= EXACT_TOL and gap23 <= bound + SLACK
                ok &= row_ok
                rows[f"{prg_name}/delta={delta}/g={g:0{G.ell}b}"] = {
                    "tv_prg_hyb1": tv01, "tv_hyb1_hyb2": tv12, "gap_hyb2_hyb3": gap23,
                    "bound": bound, "oracle_tv_prg_hyb1": oracle_tv, "passed": row_ok,
                }
    return CheckResult("hybrids", "PRGg = Hyb1 = Hyb2 and |Hyb2 - Hyb3| <= 2 Q sqrt(delta) + delta", ok, {"rows": rows})


def check_findtranscript(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rows = {}
    ok = True
    for name in ("G_id", "G_adaptive"):
        G = fx.PRGS[name]()
        for delta in FINDTRANSCRIPT_DELTAS:
            for g in sorted(prg_range(G, cfg.budget)):
                outcomes = findtranscript_outcomes(G, g, delta, budget=cfg.budget)
                good = 0
                size = 0
                for (h, found), p in outcomes.items():
                    size += p * len(h)
                    if found and heavy_point(G, g, h, cfg.budget).weight <= delta:
                        good += p
                row_ok = good >= 1 - delta - EXACT_TOL and size <= G.queries / delta + EXACT_TOL
                ok &= row_ok
                rows[f"{name}/delta={delta}/g={g:0{G.ell}b}"] = {
                    "pr_light": float(good), "need": 1 - delta, "mean_domain": float(size),
                    "domain_bound": G.queries / delta, "passed": row_ok,
                }
    return CheckResult("findtranscript", "Pr[no heavy point left] >= 1 - delta and E|D_h| <= Q_G / delta", ok,
                       {"rows": rows})


def check_lifting(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    rows = {}
    ok = True
    for prg_name, a_name in LIFT_PAIRS:
        report = lifting_report(fx.DISTINGUISHERS[a_name](), fx.PRGS[prg_name](), budget=cfg.budget)
        row_ok = report.passed and report.adv_A > 0 and report.queries_within_limit
        ok &= row_ok
        rows[f"{prg_name}+{a_name}"] = report.as_dict()
    return CheckResult("lifting", "adv_B >= adv_A / 2 with B's queries under the limit", ok, {"reports": rows})


# -- 8-10: pseudo-determinism --------------------------------------------------------------


def check_critical_sets(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    failures = {}
    total = 0
    per_fixture = {}
    for fixture in fx.det_fixtures():
        A = fixture.circuit
        bad = 0
        for F in all_oracles(A.n, A.m, cfg.budget):
            S = critical_set_bruteforce(A, F, fixture.delta, budget=cfg.budget)
            res = check_critical_set(A, F, fixture.delta, S, budget=cfg.budget)
            total += 1
            if not res.ok:
                bad += 1
                failures.setdefault(fixture.name, {
                    "F": str(F), "S": list(S.points), "magnitudes": {str(k): v for k, v in S.magnitudes.items()},
                    "size_ok": res.size_ok, "stable_ok": res.stable_ok, "magnitude_ok": res.magnitude_ok,
                    "size_bound": res.size_bound, "threshold": res.threshold,
                })
        per_fixture[fixture.name] = {"oracles": 2 ** (A.m * 2**A.n), "failures": bad, "quantum": not fixture.classical}
    return CheckResult(
        "critical_set",
        "critical set size, stability and magnitude floor",
        not failures and total >= 20,
        {"instances": total, "per_fixture": per_fixture, "first_failure": failures},
    )


def check_simulation(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    per_fixture = {}
    ok = True
    diag_ok = True
    for fixture in fx.det_fixtures():
        A = fixture.circuit
        family = all_oracles(A.n, A.m, cfg.budget)
        if is_delta_deterministic(A, fixture.delta, family) is not None:
            per_fixture[fixture.name] = {"skipped": "not delta-deterministic"}
            continue
        cap = SimBudget.for_params(A.query_count, fixture.delta).query_cap
        wrong = 0
        over_cap = 0
        max_q = 0
        for F in family:
            res = sim_oracle(A, F, fixture.delta, fill=fixture.fill)
            wrong += not qeq(A, F, res.oracle, fixture.delta)
            over_cap += res.queries_used > cap
            max_q = max(max_q, res.queries_used)
            if fixture.classical:
                S = critical_set_bruteforce(A, F, fixture.delta, budget=cfg.budget)
                diag_ok &= res.queries_used <= 4 * len(S) + 2
        ok &= wrong == 0 and over_cap == 0
        per_fixture[fixture.name] = {"oracles": len(family), "qeq_failures": wrong, "over_cap": over_cap,
                                     "max_queries": max_q, "cap": cap, "quantum": not fixture.classical}
    return CheckResult("simulation", "simOracle reproduces the canonical output within the query cap", ok,
                       {"per_fixture": per_fixture}, {"classical_queries_within_4S_plus_2": diag_ok})


def check_quantum_prg_lift(cfg: CheckConfig = CheckConfig()) -> CheckResult:
    qf = fx.gq_id()
    A = fx.a_par()
    eps_prg, eps_rand = quantum_prg_advantage_parts(A, qf.circuit, qf.k, cfg.budget)
    eps = abs(eps_prg - eps_rand)
    G2 = derandomize_prg(qf.circuit, qf.k, qf.delta, fill=qf.fill)
    mismatches = sum(
        run_prg(G2, F, s)[0] != canonical_output(qf.circuit, F, s).y
        for F in all_oracles(G2.n, G2.m, cfg.budget) for s in G2.seeds
    )
    prg2, rand2 = prg_advantage_parts(A, G2, cfg.budget)
    adv_A_G2 = abs(prg2 - rand2)
    report = lifting_report(A, G2, budget=cfg.budget)
    ok = (mismatches == 0 and adv_A_G2 >= eps - qf.delta - SLACK
          and report.adv_B >= eps / 2 - qf.delta - SLACK and eps > 0)
    return CheckResult(
        "quantum_prg_lift",
        "derandomized quantum PRG keeps A's advantage and lifts to B",
        ok,
        {"prg": qf.name, "delta": qf.delta, "eps_quantum": eps, "adv_A_on_derandomized": adv_A_G2,
         "adv_B": report.adv_B, "need_adv_B": eps / 2 - qf.delta, "seed_output_mismatches": mismatches,
         "derandomized_queries": G2.queries},
    )


SUITES: dict[str, tuple[tuple[str, Callable[[CheckConfig], CheckResult]], ...]] = {
    "lemmas": (
        ("swapping", check_swapping),
        ("measure", check_measure),
        ("reprogramming", check_reprogramming),
        ("transition", check_transition),
    ),
    "lift": (
        ("hybrids", check_hybrids),
        ("findtranscript", check_findtranscript),
        ("lifting", check_lifting),
    ),
    "pseudodet": (
        ("critical_set", check_critical_sets),
        ("simulation", check_simulation),
        ("quantum_prg_lift", check_quantum_prg_lift),
    ),
}
SUITES["all"] = SUITES["lemmas"] + SUITES["lift"] + SUITES["pseudodet"]


def run_suite(suite: str, cfg: CheckConfig = CheckConfig()) -> list[CheckResult]:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    return [fn(cfg) for _, fn in SUITES[suite]]


# -- reports ------------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return str(obj)


def make_report(kind: str, config: dict, body: dict, provenance: str = "exact") -> dict:
    return _jsonable({
        "tool": "qromlift",
        "version": __version__,
        "kind": kind,
        "config": config,
        "provenance": provenance,
        **body,
    })


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, value, out: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, json.dumps(value, sort_keys=True)))


def render_table(report: dict) -> str:
    """Aligned two-column text derived from the JSON report."""
    rows: list = []
    if "checks" in report:
        head = [(c["key"], "PASS" if c["passed"] else "FAIL") for c in report["checks"]]
        width = max(len(k) for k, _ in head)
        lines = [f"{k:<{width}}  {v}" for k, v in head]
        lines.append("")
        _flatten("", {c["key"]: {"metrics": c["metrics"], "diagnostics": c["diagnostics"]} for c in report["checks"]},
                 rows)
    else:
        lines = []
        _flatten("", report, rows)
    width = max((len(k) for k, _ in rows), default=0)
    lines += [f"{k:<{width}}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"
