"""The classical distinguisher B, findTranscript and the reprogramming game."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable

import numpy as np

from .distribution import EXACT, Distribution, sampled
from .errors import SignatureMismatch
from .oracles import (
    DEFAULT_BUDGET,
    Oracle,
    PartialFunction,
    all_oracles,
    count_consistent,
    iter_consistent,
    patch,
    sample_consistent,
)
from .prg import (
    ClassicalPrg,
    conditional_oracle_distribution,
    empty_partial,
    heavy_point,
    prg_range,
    run_prg,
    transcript_distribution,
)
from .quantum import QueryCircuit, acceptance_probability, output_probabilities

log = logging.getLogger(__name__)


class QueryLog:
    """Classical access to an oracle that records every query."""

    def __init__(self, H: Oracle):
        self.oracle = H
        self.queries: list[int] = []

    def __call__(self, x: int) -> int:
        self.queries.append(x)
        return self.oracle[x]

    @property
    def count(self) -> int:
        return len(self.queries)

    def learned(self) -> PartialFunction:
        return PartialFunction(self.oracle.n, self.oracle.m, [(x, self.oracle[x]) for x in self.queries])


def transcript_limit(delta: float, q_g: int) -> int | None:
    """ceil(-ln(delta) * 4 Q_G^2 / delta^2) + 1, clamped to >= 1.

    ``None`` means unbounded (delta = 0).
    """
    if delta <= 0:
        return None
    raw = math.ceil(-math.log(delta) * 4 * q_g**2 / delta**2) + 1
    return max(1, raw)


@dataclass(frozen=True)
class LiftParams:
    eps_target: float
    delta: float
    limit: int | None

    @classmethod
    def for_advantage(
        cls,
        eps_target: float,
        q_a: int,
        q_g: int,
        delta: float | None = None,
        limit: int | None = None,
    ) -> "LiftParams":
        if delta is None:
            delta = (eps_target / (6 * q_a)) ** 2 if q_a else 1.0
        if limit is None:
            limit = transcript_limit(delta, q_g)
        if limit is not None and limit < 1:
            raise ValueError(f"limit must be >= 1, got {limit}")
        if delta < 0:
            raise ValueError(f"delta must be nonnegative, got {delta}")
        return cls(float(eps_target), float(delta), limit)


def find_transcript(
    oracle: Callable[[int], int],
    G: ClassicalPrg,
    g: int,
    delta: float,
    limit: int | None,
    budget: int = DEFAULT_BUDGET,
    trail: list | None = None,
) -> PartialFunction | None:
    """Query the heavy points of T_{g,h} until none outside D_h exceeds delta.

    Returns the learned partial function, or ``None`` (bottom) when the
    conditional transcript distribution becomes undefined or the iteration
    limit is hit. Conditional distributions are computed offline; only the
    chosen heavy points are sent to ``oracle``. Every intermediate h,
    starting from the empty one, is appended to ``trail`` when given.
    """
    h = empty_partial(G)
    if trail is not None:
        trail.append(h)
    i, eps = 0, 1.0
    while eps > delta and (limit is None or i < limit):
        i += 1
        if transcript_distribution(G, g, h, budget) is None:
            return None
        x = heavy_point(G, g, h, budget).point
        h = PartialFunction(h.n, h.m, h.entries + ((x, oracle(x)),))
        if trail is not None:
            trail.append(h)
        if transcript_distribution(G, g, h, budget) is None:
            return None
        eps = heavy_point(G, g, h, budget).weight
    if limit is not None and i >= limit:
        return None
    return h


def _accept_avg(A: QueryCircuit, g: int, oracles, weight) -> Any:
    return sum(weight * acceptance_probability(A, H, g) for H in oracles)


def distinguisher_B(
    H: Oracle,
    G: ClassicalPrg,
    g: int,
    A: QueryCircuit,
    params: LiftParams,
    mode: str = EXACT,
    seed: int | None = None,
    trials: int = 64,
    budget: int = DEFAULT_BUDGET,
) -> tuple[Distribution, int]:
    """Run B^H(g); returns its output distribution and classical query count."""
    if g not in prg_range(G, budget):
        return Distribution({0: 1.0, 1: 0.0}), 0
    access = QueryLog(H)
    h = find_transcript(access, G, g, params.delta, params.limit, budget)
    if h is None:
        return Distribution({0: 1.0, 1: 0.0}), access.count
    if mode == EXACT:
        p1 = _accept_avg(A, g, iter_consistent(h, budget), 1.0 / count_consistent(h))
        provenance = EXACT
    else:
        if seed is None:
            raise ValueError("sampled mode needs a seed")
        rng = np.random.default_rng(seed)
        p1 = sum(acceptance_probability(A, sample_consistent(h, rng), g) for _ in range(trials)) / trials
        provenance = sampled(seed, trials)
    return Distribution({0: 1.0 - p1, 1: p1}, provenance), access.count


# -- reprogramming game --------------------------------------------------------


@dataclass(frozen=True)
class Sampler:
    """Finite-randomness sampler: outcomes ``(r, Pr[r], R_r)``."""

    outcomes: tuple[tuple[Hashable, Any, PartialFunction], ...]
    name: str = ""

    def __post_init__(self):
        total = sum(p for _, p, _ in self.outcomes)
        if abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"sampler probabilities sum to {total}")

    @property
    def epsilon(self):
        """max_x Pr[x in D_R]."""
        n = self.outcomes[0][2].n
        return max(sum(p for _, p, R in self.outcomes if x in R) for x in range(2**n))


@dataclass(frozen=True)
class ReprogramDistinguisher:
    """Quantum phase (``circuit`` on F_b), then ``decide(r, y) -> bit``."""

    circuit: QueryCircuit
    decide: Callable[[Hashable, int], int]
    inputs: int | None = None
    name: str = ""


def reprogram_game(D: ReprogramDistinguisher, F0: Oracle, sampler: Sampler) -> tuple[float, float]:
    """Exact ``(|Pr[D=1|b=1] - Pr[D=1|b=0]|, 2 Q sqrt(eps))``."""
    if (F0.n, F0.m) != (D.circuit.n, D.circuit.m):
        raise SignatureMismatch("F0 does not match the distinguisher's registers")
    diff = 0.0
    p0 = output_probabilities(D.circuit, F0, D.inputs)
    for r, pr, R in sampler.outcomes:
        p1 = output_probabilities(D.circuit, patch(F0, R), D.inputs)
        for y in range(len(p0)):
            if D.decide(r, y):
                diff += float(pr) * (p1[y] - p0[y])
    bound = 2 * D.circuit.query_count * math.sqrt(float(sampler.epsilon))
    return abs(diff), bound


# -- end-to-end report ----------------------------------------------------------


@dataclass
class LiftReport:
    prg: str
    distinguisher: str
    adv_A: float
    adv_B: float
    params: LiftParams
    prg_A: float
    rand_A: float
    prg_B: float
    rand_B: float
    delta_prg: float
    delta_rand: float
    per_g: dict = field(default_factory=dict)
    max_domain: int = 0
    max_queries: int = 0
    query_counts: dict = field(default_factory=dict)
    slack: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.adv_B >= self.adv_A / 2 - self.slack

    @property
    def queries_within_limit(self) -> bool:
        return self.params.limit is None or self.max_queries <= self.params.limit

    def as_dict(self) -> dict:
        return {
            "prg": self.prg,
            "distinguisher": self.distinguisher,
            "adv_A": self.adv_A,
            "adv_B": self.adv_B,
            "half_adv_A": self.adv_A / 2,
            "eps_target": self.params.eps_target,
            "delta": self.params.delta,
            "limit": self.params.limit,
            "pr_prg_A": self.prg_A,
            "pr_rand_A": self.rand_A,
            "pr_prg_B": self.prg_B,
            "pr_rand_B": self.rand_B,
            "delta_prg": self.delta_prg,
            "delta_rand": self.delta_rand,
            "per_g": self.per_g,
            "max_findtranscript_domain": self.max_domain,
            "max_B_queries": self.max_queries,
            "B_query_histogram": self.query_counts,
            "queries_within_limit": self.queries_within_limit,
            "passed": self.passed,
        }


def lifting_report(
    A: QueryCircuit,
    G: ClassicalPrg,
    eps_target: float | str | None = "auto",
    delta: float | None = None,
    limit: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> LiftReport:
    """Exact adv_A, adv_B and the per-g gaps for B built from ``A``."""
    from .experiments import prg_advantage_parts, run_experiment

    prg_A, rand_A = prg_advantage_parts(A, G, budget=budget)
    adv_A = abs(prg_A - rand_A)
    eps = adv_A if eps_target in (None, "auto") else float(eps_target)
    params = LiftParams.for_advantage(eps, A.query_count, G.queries, delta, limit)

    oracles = all_oracles(G.n, G.m, budget)
    b_accept: dict[tuple[int, Oracle], float] = {}
    domains: dict[int, int] = {}
    max_q = 0
    for g in range(2**G.ell):
        for H in oracles:
            dist, q = distinguisher_B(H, G, g, A, params, budget=budget)
            b_accept[g, H] = dist[1]
            domains[q] = domains.get(q, 0) + 1
            max_q = max(max_q, q)

    n_pairs = len(oracles) * 2**G.k
    prg_B = sum(b_accept[run_prg(G, H, s)[0], H] for H in oracles for s in G.seeds) / n_pairs
    rand_B = sum(b_accept.values()) / (len(oracles) * 2**G.ell)
    adv_B = abs(prg_B - rand_B)

    per_g = {}
    for g in sorted(prg_range(G, budget)):
        a_g = run_experiment("PRGg", A, G, g=g, budget=budget)[1]
        O_g = conditional_oracle_distribution(G, g, budget=budget)
        b_g = sum(float(p) * b_accept[g, H] for H, p in O_g.items())
        entry = {"pr_prg_A": a_g, "pr_prg_B": b_g, "gap": abs(a_g - b_g)}
        if params.delta > 0:
            entry["hybrid_bound"] = 2 * A.query_count * math.sqrt(params.delta) + params.delta
        per_g[format(g, f"0{G.ell}b")] = entry

    return LiftReport(
        prg=G.name,
        distinguisher=A.name,
        adv_A=adv_A,
        adv_B=adv_B,
        params=params,
        prg_A=prg_A,
        rand_A=rand_A,
        prg_B=prg_B,
        rand_B=rand_B,
        delta_prg=prg_A - prg_B,
        delta_rand=rand_B - rand_A,
        per_g=per_g,
        max_domain=max_q,
        max_queries=max_q,
        query_counts={str(k): v for k, v in sorted(domains.items())},
    )
