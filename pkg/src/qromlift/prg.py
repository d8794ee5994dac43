"""Classical oracle PRGs and their exact conditional distributions.

A PRG is a deterministic procedure ``body(s, query) -> g`` that calls
``query(x)`` exactly ``Q_G`` times on distinct points. :func:`run_prg`
wraps it, records the transcript and enforces the query contract.
Everything downstream is computed by exhaustive enumeration over
``Func_{n,m} x {0,1}^k`` with :class:`~fractions.Fraction` weights, so the
identities between processes hold exactly rather than to rounding.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

from .distribution import Distribution
from .errors import BudgetExceeded, QueryCountError, SignatureMismatch, UndefinedDistribution
from .oracles import (
    DEFAULT_BUDGET,
    Oracle,
    PartialFunction,
    count_consistent,
    iter_consistent,
    to_bits,
)

QueryFn = Callable[[int], int]


@dataclass(frozen=True)
class Transcript:
    """Ordered (query, answer) pairs with distinct query points."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(x), int(y)) for x, y in self.pairs)
        xs = [x for x, _ in pairs]
        if len(set(xs)) != len(xs):
            raise ValueError(f"transcript repeats a query point: {xs}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def points(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.pairs)

    def __contains__(self, x: int) -> bool:
        return any(px == x for px, _ in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def as_partial(self, n: int, m: int) -> PartialFunction:
        return PartialFunction(n, m, self.pairs)

    def render(self, n: int, m: int) -> str:
        return "(" + ",".join(f"({to_bits(x, n)},{to_bits(y, m)})" for x, y in self.pairs) + ")"


@dataclass(frozen=True, eq=False)
class ClassicalPrg:
    """G: {0,1}^k -> {0,1}^ell with exactly ``queries`` classical oracle queries."""

    name: str
    k: int
    ell: int
    n: int
    m: int
    queries: int
    body: Callable[[int, QueryFn], int]

    def __post_init__(self):
        if self.ell <= self.k:
            raise ValueError(f"{self.name}: output length {self.ell} must exceed seed length {self.k}")

    @property
    def seeds(self) -> range:
        return range(2**self.k)

    def __call__(self, H: Oracle, s: int) -> tuple[int, Transcript]:
        return run_prg(self, H, s)


def _execute(G: ClassicalPrg, query: QueryFn, s: int) -> tuple[int, Transcript]:
    if not 0 <= s < 2**G.k:
        raise ValueError(f"seed {s} out of range for k={G.k}")
    log: list[tuple[int, int]] = []

    def recorded(x: int) -> int:
        y = query(x)
        log.append((x, y))
        return y

    g = G.body(s, recorded)
    xs = [x for x, _ in log]
    if len(xs) != G.queries or len(set(xs)) != len(xs):
        raise QueryCountError(
            f"{G.name}(s={s}) made queries {xs}; expected exactly {G.queries} distinct points"
        )
    if not 0 <= g < 2**G.ell:
        raise ValueError(f"{G.name} output {g} does not fit {G.ell} bits")
    return g, Transcript(tuple(log))


@functools.lru_cache(maxsize=None)
def _run_cached(G: ClassicalPrg, H: Oracle, s: int) -> tuple[int, Transcript]:
    return _execute(G, H.__getitem__, s)


def run_prg(G: ClassicalPrg, H: Oracle | QueryFn, s: int) -> tuple[int, Transcript]:
    """Run G^H(s) and return ``(g, tau)``.

    ``H`` is either an :class:`Oracle` (results are memoised) or any
    callable answering classical queries.
    """
    if isinstance(H, Oracle):
        if (H.n, H.m) != (G.n, G.m):
            raise SignatureMismatch(f"{G.name} expects ({G.n},{G.m}) oracle, got ({H.n},{H.m})")
        return _run_cached(G, H, s)
    return _execute(G, H, s)


def _check_budget(G: ClassicalPrg, h: PartialFunction, budget: int) -> None:
    if (h.n, h.m) != (G.n, G.m):
        raise SignatureMismatch(f"partial function ({h.n},{h.m}) vs PRG ({G.n},{G.m})")
    pairs = count_consistent(h) * 2**G.k
    if pairs > budget:
        raise BudgetExceeded(pairs, budget, "(oracle, seed) pairs")


@functools.lru_cache(maxsize=None)
def _conditioned_runs(G: ClassicalPrg, g: int, h: PartialFunction, budget: int):
    """All (H, s, tau) with H in Func(h) and G^H(s) = (g, tau)."""
    _check_budget(G, h, budget)
    runs = []
    for H in iter_consistent(h, budget):
        for s in G.seeds:
            out, tau = run_prg(G, H, s)
            if out == g:
                runs.append((H, s, tau))
    return tuple(runs)


def empty_partial(G: ClassicalPrg) -> PartialFunction:
    return PartialFunction.empty(G.n, G.m)


def transcript_distribution(
    G: ClassicalPrg, g: int, h: PartialFunction | None = None, budget: int = DEFAULT_BUDGET
) -> Distribution | None:
    """T_{g,h}; ``None`` when no (H, s) with H in Func(h) outputs g."""
    h = empty_partial(G) if h is None else h
    runs = _conditioned_runs(G, g, h, budget)
    if not runs:
        return None
    w = Fraction(1, len(runs))
    return Distribution.from_pairs((tau, w) for _, _, tau in runs)


def conditional_oracle_distribution(
    G: ClassicalPrg, g: int, h: PartialFunction | None = None, budget: int = DEFAULT_BUDGET
) -> Distribution | None:
    """O_{g,h}: uniform H in Func(h) conditioned on G^H(s) = g for uniform s."""
    h = empty_partial(G) if h is None else h
    runs = _conditioned_runs(G, g, h, budget)
    if not runs:
        return None
    w = Fraction(1, len(runs))
    return Distribution.from_pairs((H, w) for H, _, _ in runs)


def uniform_oracles(n: int, m: int, budget: int = DEFAULT_BUDGET) -> Distribution:
    """O: the uniform distribution over Func_{n,m}."""
    return Distribution.uniform(iter_consistent(PartialFunction.empty(n, m), budget))


@functools.lru_cache(maxsize=None)
def prg_range(G: ClassicalPrg, budget: int = DEFAULT_BUDGET) -> frozenset[int]:
    return frozenset(g for g in range(2**G.ell) if _conditioned_runs(G, g, empty_partial(G), budget))


def output_distribution(G: ClassicalPrg, budget: int = DEFAULT_BUDGET) -> Distribution:
    """Pr[g] for (H, s, g, tau) drawn from the joint process."""
    _check_budget(G, empty_partial(G), budget)
    total = count_consistent(empty_partial(G)) * 2**G.k
    counts = {g: len(_conditioned_runs(G, g, empty_partial(G), budget)) for g in range(2**G.ell)}
    return Distribution({g: Fraction(c, total) for g, c in counts.items() if c})


def inclusion_probabilities(T: Distribution, n: int) -> list[Fraction]:
    """p_x = Pr_{tau <- T}[(x, *) in tau] for every x."""
    probs = [Fraction(0)] * 2**n
    for tau, p in T.items():
        for x in tau.points:
            probs[x] += p
    return probs


class HeavyPoint(NamedTuple):
    point: int | None
    weight: Fraction
    max_all: Fraction


def heavy_point(
    G: ClassicalPrg, g: int, h: PartialFunction | None = None, budget: int = DEFAULT_BUDGET
) -> HeavyPoint:
    """Most likely transcript point outside D_h (smallest x on ties).

    ``weight`` is its inclusion probability (0 with ``point=None`` once the
    domain is exhausted); ``max_all`` is the same maximum taken over every
    x, including points already in D_h.
    """
    h = empty_partial(G) if h is None else h
    T = transcript_distribution(G, g, h, budget)
    if T is None:
        raise UndefinedDistribution(f"T_(g={g}, h={h}) is undefined")
    probs = inclusion_probabilities(T, G.n)
    best, weight = None, Fraction(0)
    for x, p in enumerate(probs):
        if x in h:
            continue
        if best is None or p > weight:
            best, weight = x, p
    return HeavyPoint(best, weight, max(probs))
