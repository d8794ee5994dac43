"""Built-in PRGs, distinguishers, pseudo-deterministic algorithms and reprogramming setups.

Every fixture is small enough for exhaustive enumeration. Registries map a
CLI-facing name to a zero-argument factory so construction stays cheap.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import gates as gt
from .lifting import ReprogramDistinguisher, Sampler
from .oracles import Oracle, PartialFunction
from .prg import ClassicalPrg, transcript_distribution
from .quantum import ORACLE, QueryCircuit


# -- classical PRGs ----------------------------------------------------------------


def _g_id(s: int, query) -> int:
    a = query(s)
    b = query(1 - s)
    return (a << 1) | b


def _g_adaptive(s: int, query) -> int:
    y1 = query(s)
    x2 = s ^ (0b10 if y1 else 0b01)
    y2 = query(x2)
    return (y1 << 2) | (y2 << 1) | ((s & 1) ^ y2)


def _g_const(s: int, query) -> int:
    query(0)
    return 0


@functools.lru_cache(maxsize=None)
def g_id() -> ClassicalPrg:
    """g = H(s) || H(1 - s) on n = m = k = 1."""
    return ClassicalPrg("G_id", k=1, ell=2, n=1, m=1, queries=2, body=_g_id)


@functools.lru_cache(maxsize=None)
def g_adaptive() -> ClassicalPrg:
    """Two adaptive queries on n = 2, m = 1; the second point depends on the first answer."""
    return ClassicalPrg("G_adaptive", k=2, ell=3, n=2, m=1, queries=2, body=_g_adaptive)


@functools.lru_cache(maxsize=None)
def g_const() -> ClassicalPrg:
    return ClassicalPrg("G_const", k=1, ell=2, n=1, m=1, queries=1, body=_g_const)


PRGS: dict[str, Callable[[], ClassicalPrg]] = {
    "G_id": g_id,
    "G_adaptive": g_adaptive,
    "G_const": g_const,
}


# -- quantum distinguishers ----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def a_par() -> QueryCircuit:
    """Accepts iff g1 xor g2 equals H(0) xor H(1), using one Deutsch query."""
    layers = (
        gt.x(1), gt.h(1), gt.h(0), ORACLE, gt.h(0), gt.h(1), gt.x(1),
        gt.cnot(2, 0), gt.cnot(3, 0), gt.x(0),
    )
    return QueryCircuit(1, 1, 2, layers, (0,), (2, 3), "A_par")


@functools.lru_cache(maxsize=None)
def a_par2() -> QueryCircuit:
    """Accepts iff g1 xor g2 equals H(b) xor H(b + 2) where b = g2 xor g3."""
    layers = (
        gt.cnot(4, 1), gt.cnot(5, 1),
        gt.x(2), gt.h(2), gt.h(0), ORACLE, gt.h(0), gt.h(2), gt.x(2),
        gt.cnot(3, 0), gt.cnot(4, 0), gt.x(0),
    )
    return QueryCircuit(2, 1, 3, layers, (0,), (3, 4, 5), "A_par2")


@functools.lru_cache(maxsize=None)
def a_reject() -> QueryCircuit:
    """Ignores input and oracle and outputs 0."""
    return QueryCircuit(1, 1, 2, (gt.identity(0),), (0,), (2, 3), "A_reject")


DISTINGUISHERS: dict[str, Callable[[], QueryCircuit]] = {
    "A_par": a_par,
    "A_par2": a_par2,
    "A_reject": a_reject,
}

# distinguisher -> PRG it is built for
PAIRINGS = {"A_par": "G_id", "A_par2": "G_adaptive", "A_reject": "G_id"}


# -- pseudo-deterministic algorithms --------------------------------------------------


@dataclass(frozen=True)
class DetFixture:
    """An algorithm with its tolerance and, for m != n, the extension oracle."""

    name: str
    circuit: QueryCircuit
    delta: float
    fill: Oracle | None = None
    classical: bool = True


def _det(name, n, m, w, layers, out, delta=0.0, classical=True):
    circ = QueryCircuit(n, m, w, tuple(layers), tuple(out), (), name)
    fill = None if n == m else Oracle.zero(n, m)
    return DetFixture(name, circ, delta, fill, classical)


@functools.lru_cache(maxsize=None)
def det_fixtures() -> tuple[DetFixture, ...]:
    return (
        _det("const", 1, 1, 0, [gt.identity(0)], [0]),
        _det("eval0", 1, 1, 0, [ORACLE], [1]),
        _det("eval1", 1, 1, 0, [gt.x(0), ORACLE], [1]),
        _det("eval2_n2", 2, 2, 0, [gt.x(0), ORACLE], [2, 3]),
        _det("eval1_m1", 2, 1, 0, [gt.x(1), ORACLE], [2]),
        _det("parity_classical", 1, 1, 0, [ORACLE, gt.x(0), ORACLE], [1]),
        _det(
            "and_classical", 1, 1, 2,
            [ORACLE, gt.cnot(1, 2), ORACLE, gt.x(0), ORACLE, gt.toffoli(1, 2, 3)], [3],
        ),
        _det("eval0_noisy", 1, 1, 0, [ORACLE, gt.ry(0.2, 1)], [1], delta=0.05),
        _det("deutsch", 1, 1, 0, [gt.x(1), gt.h(1), gt.h(0), ORACLE, gt.h(0)], [0], classical=False),
        _det(
            "deutsch_pair", 2, 1, 0, [gt.x(2), gt.h(2), gt.h(1), ORACLE, gt.h(1)], [1], classical=False,
        ),
    )


def det_fixture(name: str) -> DetFixture:
    for fx in det_fixtures():
        if fx.name == name:
            return fx
    raise KeyError(name)


# -- quantum PRGs (seed on input wires, output on output_wires) ------------------------


@dataclass(frozen=True)
class QuantumPrgFixture:
    name: str
    circuit: QueryCircuit
    k: int
    delta: float
    fill: Oracle | None = None


@functools.lru_cache(maxsize=None)
def gq_id() -> QuantumPrgFixture:
    """H(s) || H(1 - s) with two queries; wires: 0 query, 1 answer, 2 seed, 3-4 output."""
    layers = (
        gt.cnot(2, 0), ORACLE, gt.cnot(1, 3),
        gt.x(0), ORACLE, gt.cnot(1, 4), gt.cnot(3, 4),
    )
    circ = QueryCircuit(1, 1, 3, layers, (3, 4), (2,), "Gq_id")
    return QuantumPrgFixture("Gq_id", circ, 1, 0.0)


@functools.lru_cache(maxsize=None)
def gq_eval() -> QuantumPrgFixture:
    """Outputs H(s) on n = 1, m = 2."""
    circ = QueryCircuit(1, 2, 1, (gt.cnot(3, 0), ORACLE), (1, 2), (3,), "Gq_eval")
    return QuantumPrgFixture("Gq_eval", circ, 1, 0.0, Oracle.zero(1, 2))


QUANTUM_PRGS: dict[str, Callable[[], QuantumPrgFixture]] = {"Gq_id": gq_id, "Gq_eval": gq_eval}


# -- reprogramming games ----------------------------------------------------------------


@dataclass(frozen=True)
class ReprogramFixture:
    name: str
    distinguisher: ReprogramDistinguisher
    F0: Oracle
    sampler: Sampler


def _classical_eval(n: int, m: int, x0: int) -> QueryCircuit:
    layers = tuple(gt.load_bits(x0, range(n))) + (ORACLE,)
    return QueryCircuit(n, m, 0, layers or (gt.identity(0),), tuple(range(n, n + m)), (), f"eval@{x0}")


def _grover2() -> QueryCircuit:
    layers = (gt.x(2), gt.h(2), gt.h(0), gt.h(1), ORACLE, gt.diffusion((0, 1)))
    return QueryCircuit(2, 1, 0, layers, (0, 1), (), "grover2")


def _flip_sampler(F0: Oracle, x0: int) -> Sampler:
    return Sampler(((x0, Fraction(1), PartialFunction(F0.n, F0.m, [(x0, F0[x0] ^ 1)])),), "flip")


def _uniform_mark_sampler(n: int) -> Sampler:
    w = Fraction(1, 2**n)
    return Sampler(tuple((x, w, PartialFunction(n, 1, [(x, 1)])) for x in range(2**n)), "uniform-mark")


def _transcript_sampler(G: ClassicalPrg, g: int) -> Sampler:
    """R = tau drawn from T_g, reprogrammed as-is."""
    T = transcript_distribution(G, g)
    return Sampler(
        tuple((tau, p, tau.as_partial(G.n, G.m)) for tau, p in T.items()), f"T[{G.name},g={g}]"
    )


def _decide_equal(r, y) -> int:
    return int(y == r)


def _decide_flip(r, y) -> int:
    return int(y == 1)


def _decide_in_transcript(r, y) -> int:
    return int(y in r.points)


@dataclass(frozen=True)
class _IndexedParity:
    """Accept iff the parity of y matches bit ``r`` of a fixed mask."""

    mask: int

    def __call__(self, r, y) -> int:
        return int((bin(y).count("1") & 1) == (self.mask >> r) & 1)


def random_reprogram_fixture(seed: int, n: int = 2, m: int = 1, queries: int = 2) -> ReprogramFixture:
    """Haar circuit, random F0 and a four-outcome sampler over random partial functions."""
    rng = np.random.default_rng(seed)
    circ = gt.random_query_circuit(n, m, 1, queries, rng)
    F0 = Oracle(n, m, tuple(int(v) for v in rng.integers(0, 2**m, 2**n)))
    weights = rng.integers(1, 5, 4)
    outcomes = []
    for r, wt in enumerate(weights):
        dom = [x for x in range(2**n) if rng.random() < 0.4]
        R = PartialFunction(n, m, [(x, int(rng.integers(0, 2**m))) for x in dom])
        outcomes.append((r, Fraction(int(wt), int(weights.sum())), R))
    D = ReprogramDistinguisher(circ, _IndexedParity(int(rng.integers(0, 16))), None, circ.name)
    return ReprogramFixture(f"random_{seed}", D, F0, Sampler(tuple(outcomes), "random"))


@functools.lru_cache(maxsize=None)
def reprogram_fixtures() -> tuple[ReprogramFixture, ...]:
    zero11 = Oracle.zero(1, 1)
    zero21 = Oracle.zero(2, 1)
    grover = ReprogramDistinguisher(_grover2(), _decide_equal, None, "grover2")
    deutsch = ReprogramDistinguisher(
        QueryCircuit(1, 1, 0, (gt.x(1), gt.h(1), gt.h(0), ORACLE, gt.h(0)), (0,), (), "deutsch"),
        _decide_flip, None, "deutsch",
    )
    fixtures = [
        ReprogramFixture(
            "empty", ReprogramDistinguisher(_classical_eval(1, 1, 0), _decide_flip, None, "eval0"),
            zero11, Sampler(((None, Fraction(1), PartialFunction.empty(1, 1)),), "empty"),
        ),
        ReprogramFixture(
            "flip_point", ReprogramDistinguisher(_classical_eval(1, 1, 0), _decide_flip, None, "eval0"),
            zero11, _flip_sampler(zero11, 0),
        ),
        ReprogramFixture("grover_uniform", grover, zero21, _uniform_mark_sampler(2)),
        ReprogramFixture("deutsch_flip", deutsch, zero11, _flip_sampler(zero11, 1)),
    ]
    ga = g_adaptive()
    grover_in = ReprogramDistinguisher(_grover2(), _decide_in_transcript, None, "grover2")
    for g in (0b000, 0b101):
        fixtures.append(
            ReprogramFixture(
                f"grover_transcript_g{g:03b}", grover_in, zero21, _transcript_sampler(ga, g),
            )
        )
    fixtures.extend(random_reprogram_fixture(seed) for seed in range(8))
    return tuple(fixtures)
