"""Classical simulation of delta-deterministic quantum oracle algorithms.

Two runs are delta-equivalent (:func:`qeq`) when their canonical outputs,
the most likely measured strings, coincide. Both runs must be
delta-deterministic, otherwise the comparison raises.

Algorithms whose oracle has ``m != n`` cannot use the identity extension
of a partial function; pass ``fill`` to extend with a fixed oracle instead.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .distribution import Distribution
from .errors import BudgetExceeded, DeterminismViolation, SignatureMismatch
from .oracles import (
    DEFAULT_BUDGET,
    Oracle,
    PartialFunction,
    default_extend,
    identity_extend,
    iter_consistent,
    patch,
)
from .prg import ClassicalPrg
from .quantum import QueryCircuit, output_probabilities, run_circuit

log = logging.getLogger(__name__)

TIE_TOL = 1e-9
# q_x is a float sum of squared amplitudes; exact thresholds like 1 need slack.
MAGNITUDE_TOL = 1e-12


class CanonicalOutput(NamedTuple):
    y: int
    p: float


def canonical_output(A: QueryCircuit, H: Oracle | None, inputs: int | None = None) -> CanonicalOutput:
    """Most likely output, smallest y among maximisers within 1e-9."""
    probs = output_probabilities(A, H, inputs)
    best = max(probs)
    y = next(i for i, p in enumerate(probs) if p >= best - TIE_TOL)
    return CanonicalOutput(y, float(probs[y]))


@dataclass(frozen=True)
class Counterexample:
    oracle: Oracle
    distribution: Distribution
    canonical: CanonicalOutput


def is_delta_deterministic(
    A: QueryCircuit, delta: float, family: Iterable[Oracle], inputs: int | None = None
) -> Counterexample | None:
    """``None`` if every oracle in ``family`` gives canonical probability >= 1 - delta."""
    for H in family:
        c = canonical_output(A, H, inputs)
        if c.p < 1 - delta - TIE_TOL:
            dist = Distribution(dict(enumerate(output_probabilities(A, H, inputs))))
            return Counterexample(H, dist, c)
    return None


def _deterministic_output(A: QueryCircuit, H: Oracle, delta: float, inputs: int | None) -> int:
    c = canonical_output(A, H, inputs)
    if c.p < 1 - delta - TIE_TOL:
        raise DeterminismViolation(
            f"{A.name or 'algorithm'} on {H}: canonical output {c.y} has probability {c.p:.6g} < 1 - {delta}"
        )
    return c.y


def qeq(A: QueryCircuit, F: Oracle, H: Oracle, delta: float, inputs: int | None = None) -> bool:
    """True iff A^F and A^H have the same canonical output."""
    return _deterministic_output(A, F, delta, inputs) == _deterministic_output(A, H, delta, inputs)


@dataclass(frozen=True)
class SimBudget:
    """Iteration count k, magnitude threshold and total query cap for (Q, delta)."""

    queries: int
    delta: float
    k: int
    threshold: float
    query_cap: float

    @classmethod
    def for_params(cls, queries: int, delta: float) -> "SimBudget":
        if not 0 <= delta < 0.5:
            raise ValueError(f"delta must lie in [0, 1/2), got {delta}")
        gap = 1 - 2 * Fraction(delta).limit_denominator(10**12)
        if queries == 0:
            return cls(0, delta, 0, math.inf, 0.0)
        k = math.ceil(Fraction(queries) ** 4 / gap**4)
        threshold = float(gap**4 / queries**3)
        cap = float(2 * Fraction(queries) ** 12 / gap**12)
        return cls(queries, delta, k, threshold, cap)


def _extender(fill: Oracle | None) -> Callable[[PartialFunction], Oracle]:
    if fill is None:
        return identity_extend
    return lambda f: default_extend(f, fill)


class _Access:
    """Counts classical queries and keeps their order."""

    def __init__(self, oracle: Callable[[int], int]):
        self.oracle = oracle
        self.queries: list[int] = []

    def __call__(self, x: int) -> int:
        self.queries.append(x)
        return self.oracle(x)


def update(
    A: QueryCircuit,
    f: PartialFunction,
    F: Callable[[int], int],
    delta: float,
    *,
    fill: Oracle | None = None,
    inputs: int | None = None,
) -> PartialFunction:
    """Query F on every point outside D_f whose magnitude under ext(f) reaches the threshold."""
    budget = SimBudget.for_params(A.query_count, delta)
    _, ledger = run_circuit(A, _extender(fill)(f), inputs)
    new = [
        (x, F(x))
        for x, q in enumerate(ledger.per_point)
        if x not in f and q >= budget.threshold - MAGNITUDE_TOL
    ]
    if not new:
        return f
    return PartialFunction(f.n, f.m, f.entries + tuple(new))


def get_point(
    A: QueryCircuit,
    f0: PartialFunction,
    F: Callable[[int], int],
    delta: float,
    *,
    fill: Oracle | None = None,
    inputs: int | None = None,
) -> tuple[PartialFunction, int]:
    """Update until the canonical output under ext(f_c) moves off its initial value.

    Returns ``(f_c, c)``; the loop guard is ``c <= k`` so an unchanged
    output ends with ``c = k + 1``.
    """
    k = SimBudget.for_params(A.query_count, delta).k
    ext = _extender(fill)
    y_old = canonical_output(A, ext(f0), inputs).y
    f, c = f0, 0
    while c <= k and canonical_output(A, ext(f), inputs).y == y_old:
        c += 1
        f = update(A, f, F, delta, fill=fill, inputs=inputs)
    return f, c


@dataclass
class SimResult:
    oracle: Oracle
    queries_used: int
    queries: list[int]
    trace: list[dict] = field(default_factory=list)


def sim_oracle(
    A: QueryCircuit,
    F: Callable[[int], int],
    delta: float,
    *,
    fill: Oracle | None = None,
    inputs: int | None = None,
) -> SimResult:
    """Learn enough of F classically to reproduce A^F's canonical output."""
    budget = SimBudget.for_params(A.query_count, delta)
    k = budget.k
    ext = _extender(fill)
    access = _Access(F)
    n, m = A.n, A.m
    f = PartialFunction.empty(n, m)
    trace: list[dict] = []

    def done(result: PartialFunction) -> SimResult:
        return SimResult(ext(result), len(access.queries), list(access.queries), trace)

    for i in range(1, k + 1):
        f_mid, c1 = get_point(A, f, access, delta, fill=fill, inputs=inputs)
        trace.append({"iteration": i, "call": 1, "c": c1, "f": str(f_mid)})
        if c1 >= k:
            if c1 > k:
                log.debug("getPoint returned c=%d > k=%d", c1, k)
            return done(f_mid)
        f, c2 = get_point(A, f_mid, access, delta, fill=fill, inputs=inputs)
        trace.append({"iteration": i, "call": 2, "c": c2, "f": str(f)})
        if c2 >= k:
            if c2 > k:
                log.debug("getPoint returned c=%d > k=%d", c2, k)
            return done(f)
    return done(f)


# -- critical set ----------------------------------------------------------------


@dataclass(frozen=True)
class CriticalSet:
    points: tuple[int, ...]
    magnitudes: dict

    def __contains__(self, x: int) -> bool:
        return x in self.points

    def __len__(self) -> int:
        return len(self.points)


def _partials_over(points: list[int], n: int, m: int):
    """Partial functions with domain in ``points``: by domain size, then lexicographically."""
    for size in range(1, len(points) + 1):
        for dom in itertools.combinations(points, size):
            for values in itertools.product(range(2**m), repeat=size):
                yield PartialFunction(n, m, zip(dom, values))


def critical_set_bruteforce(
    A: QueryCircuit,
    F: Oracle,
    delta: float,
    *,
    inputs: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> CriticalSet:
    """Greedy critical set: repeatedly take the smallest R that changes the canonical output.

    Each round adds the point of D_R with the largest query magnitude under
    F and removes it from the candidate pool.
    """
    if (F.n, F.m) != (A.n, A.m):
        raise SignatureMismatch(f"oracle ({F.n},{F.m}) vs algorithm ({A.n},{A.m})")
    needed = (1 + 2**A.m) ** (2**A.n)
    if needed > budget:
        raise BudgetExceeded(needed, budget, "candidate partial functions")
    _, ledger = run_circuit(A, F, inputs)
    pool = list(range(2**A.n))
    chosen: list[int] = []
    while pool:
        R = next(
            (R for R in _partials_over(pool, A.n, A.m) if not qeq(A, F, patch(F, R), delta, inputs)),
            None,
        )
        if R is None:
            break
        x_m = max(sorted(R.domain), key=lambda x: ledger[x])
        chosen.append(x_m)
        pool.remove(x_m)
    points = tuple(sorted(chosen))
    return CriticalSet(points, {x: ledger[x] for x in points})


@dataclass(frozen=True)
class CriticalSetCheck:
    size_ok: bool
    stable_ok: bool
    magnitude_ok: bool
    size_bound: float
    threshold: float
    unstable: Oracle | None = None

    @property
    def ok(self) -> bool:
        return self.size_ok and self.stable_ok and self.magnitude_ok


def check_critical_set(
    A: QueryCircuit,
    F: Oracle,
    delta: float,
    S: CriticalSet,
    *,
    inputs: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> CriticalSetCheck:
    """Size bound, stability under every H agreeing with F on S, magnitude floor."""
    sb = SimBudget.for_params(A.query_count, delta)
    gap = 1 - 2 * delta
    size_bound = A.query_count**4 / gap**4
    unstable = next(
        (H for H in iter_consistent(F.as_partial().restrict(S.points), budget) if not qeq(A, F, H, delta, inputs)),
        None,
    )
    magnitude_ok = all(q >= sb.threshold - MAGNITUDE_TOL for q in S.magnitudes.values())
    return CriticalSetCheck(
        size_ok=len(S) <= size_bound + 1e-9,
        stable_ok=unstable is None,
        magnitude_ok=magnitude_ok,
        size_bound=size_bound,
        threshold=sb.threshold,
        unstable=unstable,
    )


# -- quantum PRG derandomisation -------------------------------------------------


def derandomize_prg(
    Gq: QueryCircuit,
    k: int,
    delta: float,
    *,
    fill: Oracle | None = None,
    name: str | None = None,
) -> ClassicalPrg:
    """Classical PRG that simulates the seed-indexed circuit ``Gq`` via :func:`sim_oracle`.

    The transcript is padded with fresh points, smallest first, up to
    ``min(query cap, 2^n)`` queries.
    """
    if len(Gq.input_wires) != k:
        raise SignatureMismatch(f"{Gq.name} has {len(Gq.input_wires)} seed wires, expected {k}")
    ell = len(Gq.output_wires)
    cap = SimBudget.for_params(Gq.query_count, delta).query_cap
    padded = int(min(math.floor(cap + 1e-9), 2**Gq.n))

    def body(s: int, query: Callable[[int], int]) -> int:
        result = sim_oracle(Gq, query, delta, fill=fill, inputs=s)
        asked = set(result.queries)
        for x in range(2**Gq.n):
            if len(asked) >= padded:
                break
            if x not in asked:
                query(x)
                asked.add(x)
        return canonical_output(Gq, result.oracle, s).y

    return ClassicalPrg(name or f"derandomized[{Gq.name}]", k, ell, Gq.n, Gq.m, padded, body)
