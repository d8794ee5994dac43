"""PRG / Rand / hybrid games with exact (or seeded Monte Carlo) evaluation.

Every game fixes how the oracle handed to ``A`` is generated. In exact mode
the oracle-generation process is materialised as a :class:`Distribution`
over oracles with Fraction weights, and the game's acceptance probability
is its expectation of ``Pr[A^{|H>}(g) = 1]``.
"""

from __future__ import annotations

import functools

import numpy as np

from .distribution import EXACT, Distribution, mixture, sampled
from .errors import BudgetExceeded, UndefinedDistribution
from .lifting import QueryLog, find_transcript, transcript_limit
from .oracles import (
    DEFAULT_BUDGET,
    PartialFunction,
    all_oracles,
    iter_consistent,
    patch,
    sample_consistent,
    subtract,
)
from .prg import (
    ClassicalPrg,
    conditional_oracle_distribution,
    output_distribution as prg_output_distribution,
    run_prg,
    transcript_distribution,
)
from .quantum import QueryCircuit, acceptance_probability, output_probabilities

GAMES = ("PRG", "Rand", "PRGg", "Randg", "Hyb1", "Hyb2", "Hyb3")


def _uniform_over(h: PartialFunction, budget: int) -> Distribution:
    return Distribution.uniform(iter_consistent(h, budget))


def findtranscript_outcomes(
    G: ClassicalPrg, g: int, delta: float, limit: int | None = None, budget: int = DEFAULT_BUDGET
) -> Distribution:
    """Distribution of findTranscript's learned partial function for H <- O_g.

    On a bottom result the partial function of the points actually queried
    is used, so the hybrids stay defined; keys are ``(h, ok)``.
    """
    O_g = conditional_oracle_distribution(G, g, budget=budget)
    if O_g is None:
        raise UndefinedDistribution(f"g={g} is outside the range of {G.name}")
    if limit is None:
        limit = transcript_limit(delta, G.queries)
    pairs = []
    for H, p in O_g.items():
        access = QueryLog(H)
        h = find_transcript(access, G, g, delta, limit, budget)
        pairs.append(((access.learned() if h is None else h, h is not None), p))
    return Distribution.from_pairs(pairs)


@functools.lru_cache(maxsize=None)
def reprogrammed_oracles(G: ClassicalPrg, g: int, h: PartialFunction, budget: int = DEFAULT_BUDGET) -> Distribution:
    """O'_{g,h}: tau <- T_{g,h}, H0 <- Func(h), output H0^(tau \\ h)."""
    T = transcript_distribution(G, g, h, budget)
    if T is None:
        raise UndefinedDistribution(f"T_(g={g}, h={h}) is undefined")
    base = _uniform_over(h, budget)
    parts = []
    for tau, p_tau in T.items():
        delta_part = subtract(tau.as_partial(G.n, G.m), h)
        parts.append((p_tau, base.map(lambda H0, d=delta_part: patch(H0, d))))
    return mixture(parts)


def conditioned_oracles(G: ClassicalPrg, g: int, h: PartialFunction, budget: int = DEFAULT_BUDGET) -> Distribution:
    O = conditional_oracle_distribution(G, g, h, budget)
    if O is None:
        raise UndefinedDistribution(f"O_(g={g}, h={h}) is undefined")
    return O


def game_oracles(
    which: str,
    G: ClassicalPrg,
    g: int,
    delta: float | None = None,
    limit: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Distribution:
    """Exact distribution of the oracle that a fixed-g game hands to A."""
    if which == "Randg":
        return _uniform_over(PartialFunction.empty(G.n, G.m), budget)
    if which == "PRGg":
        O_g = conditional_oracle_distribution(G, g, budget=budget)
        if O_g is None:
            raise UndefinedDistribution(f"g={g} is outside the range of {G.name}")
        return O_g
    if which not in ("Hyb1", "Hyb2", "Hyb3"):
        raise ValueError(f"unknown fixed-g game {which!r}")
    if delta is None:
        raise ValueError(f"{which} needs delta")
    outcomes = findtranscript_outcomes(G, g, delta, limit, budget)
    parts = []
    for (h, _ok), p in outcomes.items():
        if which == "Hyb1":
            dist = conditioned_oracles(G, g, h, budget)
        elif which == "Hyb2":
            dist = reprogrammed_oracles(G, g, h, budget)
        else:
            dist = _uniform_over(h, budget)
        parts.append((p, dist))
    return mixture(parts)


def _bit_distribution(p1: float, provenance: str = EXACT) -> Distribution:
    p1 = float(p1)
    return Distribution({0: 1.0 - p1, 1: p1}, provenance)


def _accept_under(A: QueryCircuit, g: int, oracles: Distribution) -> float:
    return sum(float(p) * acceptance_probability(A, H, g) for H, p in oracles.items())


def prg_advantage_parts(A: QueryCircuit, G: ClassicalPrg, budget: int = DEFAULT_BUDGET) -> tuple[float, float]:
    """Exact ``(Pr[PRG_{A,G} = 1], Pr[Rand_{A,G} = 1])``."""
    oracles = all_oracles(G.n, G.m, budget)
    pairs = len(oracles) * 2**G.k
    if pairs > budget:
        raise BudgetExceeded(pairs, budget, "(oracle, seed) pairs")
    prg = sum(acceptance_probability(A, H, run_prg(G, H, s)[0]) for H in oracles for s in G.seeds) / pairs
    rand = sum(acceptance_probability(A, H, g) for H in oracles for g in range(2**G.ell)) / (
        len(oracles) * 2**G.ell
    )
    return prg, rand


def _sample_game(which: str, A, G, g, rng: np.random.Generator, trials: int) -> float:
    empty = PartialFunction.empty(G.n, G.m)
    total = 0.0
    for _ in range(trials):
        H = sample_consistent(empty, rng)
        if which == "PRG":
            gg = run_prg(G, H, int(rng.integers(0, 2**G.k)))[0]
        elif which == "Rand":
            gg = int(rng.integers(0, 2**G.ell))
        else:
            gg = g
        total += acceptance_probability(A, H, gg)
    return total / trials


def prg_advantage(
    A: QueryCircuit,
    G: ClassicalPrg,
    mode: str = EXACT,
    seed: int | None = None,
    trials: int = 4096,
    budget: int = DEFAULT_BUDGET,
) -> float:
    """|Pr[PRG_{A,G} = 1] - Pr[Rand_{A,G} = 1]|."""
    if len(A.input_wires) != G.ell or len(A.output_wires) != 1:
        raise ValueError(f"distinguisher needs {G.ell} input wires and one output wire")
    if mode == EXACT:
        prg, rand = prg_advantage_parts(A, G, budget)
        return abs(prg - rand)
    if seed is None:
        raise ValueError("sampled mode needs a seed")
    rng = np.random.default_rng(seed)
    prg = _sample_game("PRG", A, G, None, rng, trials)
    rand = _sample_game("Rand", A, G, None, rng, trials)
    return abs(prg - rand)


def run_experiment(
    which: str,
    A: QueryCircuit,
    G: ClassicalPrg,
    g: int | None = None,
    delta: float | None = None,
    mode: str = EXACT,
    seed: int | None = None,
    trials: int = 4096,
    limit: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Distribution:
    """Output distribution over {0,1} of the named game."""
    if which not in GAMES:
        raise ValueError(f"unknown game {which!r}; expected one of {GAMES}")
    if which not in ("PRG", "Rand") and g is None:
        raise ValueError(f"{which} needs g")
    if mode != EXACT:
        if which not in ("PRG", "Rand", "Randg"):
            raise ValueError(f"sampled mode supports PRG, Rand and Randg only, not {which}")
        if seed is None:
            raise ValueError("sampled mode needs a seed")
        p1 = _sample_game(which, A, G, g, np.random.default_rng(seed), trials)
        return _bit_distribution(p1, sampled(seed, trials))
    if which == "PRG":
        return _bit_distribution(prg_advantage_parts(A, G, budget)[0])
    if which == "Rand":
        return _bit_distribution(prg_advantage_parts(A, G, budget)[1])
    return _bit_distribution(_accept_under(A, g, game_oracles(which, G, g, delta, limit, budget)))


def prg_mixture_of_fixed_g(A: QueryCircuit, G: ClassicalPrg, budget: int = DEFAULT_BUDGET) -> float:
    """sum_g Pr[g out of the PRG] * Pr[PRG_{A,G}(g) = 1]."""
    weights = prg_output_distribution(G, budget)
    return sum(float(p) * run_experiment("PRGg", A, G, g=g, budget=budget)[1] for g, p in weights.items())


# -- quantum PRGs ----------------------------------------------------------------


def quantum_prg_advantage_parts(
    A: QueryCircuit, Gq: QueryCircuit, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[float, float]:
    """Exact ``(Pr[PRG=1], Pr[Rand=1])`` when the generator is itself a quantum circuit.

    ``Gq`` takes the ``k``-bit seed on its input wires and its measured
    ``output_wires`` are the PRG output g.
    """
    ell = len(Gq.output_wires)
    oracles = all_oracles(Gq.n, Gq.m, budget)
    prg = 0.0
    for H in oracles:
        for s in range(2**k):
            out = output_probabilities(Gq, H, s)
            prg += sum(p * acceptance_probability(A, H, g) for g, p in enumerate(out) if p)
    prg /= len(oracles) * 2**k
    rand = sum(acceptance_probability(A, H, g) for H in oracles for g in range(2**ell)) / (
        len(oracles) * 2**ell
    )
    return prg, rand
