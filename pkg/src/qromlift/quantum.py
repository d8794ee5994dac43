"""Exact statevector simulation of quantum oracle algorithms.

Wire layout for a circuit with register sizes ``(n, m, w)``::

    wires 0 .. n-1          query register   (wire 0 = most significant bit of x)
    wires n .. n+m-1        answer register
    wires n+m .. n+m+w-1    workspace

Basis index ``(x << (m + w)) | (y << w) | z``, i.e. wire ``i`` is bit
``N - 1 - i`` of the index where ``N = n + m + w``.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distribution import Distribution
from .errors import NonUnitaryError, NormViolation, ParseError, SignatureMismatch
from .oracles import Oracle

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    m: int
    w: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** (self.n + self.m + self.w):
            raise SignatureMismatch(
                f"{amps.size} amplitudes for registers ({self.n},{self.m},{self.w})"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL:
            raise NormViolation(f"state norm {norm!r} differs from 1 by more than {TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n: int, m: int, w: int, index: int = 0) -> "StateVector":
        amps = np.zeros(2 ** (n + m + w), dtype=complex)
        amps[index] = 1.0
        return cls(n, m, w, amps)

    @property
    def num_wires(self) -> int:
        return self.n + self.m + self.w

    @property
    def registers(self) -> tuple[int, int, int]:
        return (self.n, self.m, self.w)

    def _replace(self, amps: np.ndarray) -> "StateVector":
        return StateVector(self.n, self.m, self.w, amps)


@dataclass(frozen=True, eq=False)
class Unitary:
    """A dense unitary acting on ``wires`` (first listed wire = row MSB)."""

    matrix: np.ndarray
    wires: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        wires = tuple(int(w) for w in self.wires)
        dim = 2 ** len(wires)
        if mat.shape != (dim, dim):
            raise SignatureMismatch(f"matrix shape {mat.shape} does not act on {len(wires)} wires")
        if len(set(wires)) != len(wires):
            raise ValueError(f"repeated wire in {wires}")
        err = np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) if dim else 0.0
        if err > TOL:
            raise NonUnitaryError(f"max|U^dag U - I| = {err:.3g} on wires {wires}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "wires", wires)


@dataclass(frozen=True)
class OracleCall:
    pass


ORACLE = OracleCall()


@dataclass(frozen=True, eq=False)
class QueryCircuit:
    """Unitaries interleaved with oracle calls, plus output wires.

    ``input_wires`` lists where a classical input string is loaded (first
    wire = most significant input bit); loading is a bit-flip preamble on
    the all-zero state. Circuits hash by identity so they can key caches.
    """

    n: int
    m: int
    w: int
    layers: tuple = ()
    output_wires: tuple[int, ...] = ()
    input_wires: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "output_wires", tuple(int(w) for w in self.output_wires))
        object.__setattr__(self, "input_wires", tuple(int(w) for w in self.input_wires))
        total = self.num_wires
        for layer in self.layers:
            if isinstance(layer, Unitary):
                bad = [w for w in layer.wires if not 0 <= w < total]
                if bad:
                    raise ValueError(f"unitary wires {bad} out of range 0..{total - 1}")
            elif not isinstance(layer, OracleCall):
                raise TypeError(f"unknown layer {layer!r}")
        for label, wires in (("output", self.output_wires), ("input", self.input_wires)):
            if len(set(wires)) != len(wires):
                raise ValueError(f"{label} wires not distinct: {wires}")
            if any(not 0 <= w < total for w in wires):
                raise ValueError(f"{label} wires {wires} out of range 0..{total - 1}")

    @property
    def num_wires(self) -> int:
        return self.n + self.m + self.w

    @property
    def query_count(self) -> int:
        return sum(isinstance(layer, OracleCall) for layer in self.layers)

    def initial_index(self, inputs: int | None = None) -> int:
        if not inputs:
            return 0
        k = len(self.input_wires)
        if not 0 <= inputs < 2**k:
            raise ValueError(f"input {inputs} does not fit {k} input wires")
        idx = 0
        total = self.num_wires
        for pos, wire in enumerate(self.input_wires):
            if (inputs >> (k - 1 - pos)) & 1:
                idx |= 1 << (total - 1 - wire)
        return idx

    def with_input(self, inputs: int) -> "QueryCircuit":
        """Equivalent circuit with the input loaded by explicit X layers."""
        from .gates import x

        k = len(self.input_wires)
        flips = [x(w) for pos, w in enumerate(self.input_wires) if (inputs >> (k - 1 - pos)) & 1]
        return QueryCircuit(
            self.n, self.m, self.w, tuple(flips) + self.layers, self.output_wires, (), self.name
        )


@dataclass(frozen=True)
class QueryMagnitudeLedger:
    """Total query magnitude per oracle point, summed over all queries."""

    per_point: tuple[float, ...]
    queries: int = 0

    @property
    def total(self) -> float:
        return float(sum(self.per_point))

    def __getitem__(self, x: int) -> float:
        return self.per_point[x]

    def as_dict(self) -> dict[int, float]:
        return dict(enumerate(self.per_point))

    def mass_on(self, points) -> float:
        return float(sum(self.per_point[x] for x in points))


def _check_oracle(n: int, m: int, H: Oracle) -> None:
    if (H.n, H.m) != (n, m):
        raise SignatureMismatch(f"oracle signature ({H.n},{H.m}) != registers ({n},{m})")


def _apply_matrix(psi: np.ndarray, num_wires: int, U: Unitary) -> np.ndarray:
    k = len(U.wires)
    tensor = psi.reshape((2,) * num_wires)
    gate = U.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), list(U.wires)))
    out = np.moveaxis(out, list(range(k)), list(U.wires))
    return out.reshape(-1)


def _apply_oracle(psi: np.ndarray, n: int, m: int, w: int, H: Oracle) -> np.ndarray:
    block = psi.reshape(2**n, 2**m, 2**w)
    table = np.asarray(H.table)
    src = np.arange(2**m)[None, :] ^ table[:, None]
    return block[np.arange(2**n)[:, None], src, :].reshape(-1)


def _query_magnitudes(psi: np.ndarray, n: int) -> np.ndarray:
    return (np.abs(psi.reshape(2**n, -1)) ** 2).sum(axis=1)


def apply_oracle(state: StateVector, H: Oracle) -> StateVector:
    """|x>|y>|z> -> |x>|y xor H(x)>|z>."""
    _check_oracle(state.n, state.m, H)
    return state._replace(_apply_oracle(state.amplitudes, state.n, state.m, state.w, H))


def apply_unitary(state: StateVector, U: Unitary) -> StateVector:
    if any(not 0 <= w < state.num_wires for w in U.wires):
        raise SignatureMismatch(f"wires {U.wires} out of range for {state.num_wires}-wire state")
    return state._replace(_apply_matrix(state.amplitudes, state.num_wires, U))


def _check_norm(psi: np.ndarray, where: str) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > TOL:
        raise NormViolation(f"norm {norm!r} after {where}")


def run_circuit(
    circ: QueryCircuit,
    H: Oracle | None,
    inputs: int | None = None,
    *,
    query_states: list | None = None,
) -> tuple[StateVector, QueryMagnitudeLedger]:
    """Run ``circ`` from |0...0> (with ``inputs`` loaded) against ``H``.

    Before every oracle call the query magnitudes of the current state are
    added to the ledger. If ``query_states`` is a list, the state presented
    to each query is appended to it.
    """
    n, m, w = circ.n, circ.m, circ.w
    if circ.query_count:
        if H is None:
            raise SignatureMismatch("circuit makes oracle calls but no oracle was given")
        _check_oracle(n, m, H)
    total = circ.num_wires
    psi = np.zeros(2**total, dtype=complex)
    psi[circ.initial_index(inputs)] = 1.0
    mags = np.zeros(2**n)
    for i, layer in enumerate(circ.layers):
        if isinstance(layer, OracleCall):
            mags += _query_magnitudes(psi, n)
            if query_states is not None:
                query_states.append(StateVector(n, m, w, psi))
            psi = _apply_oracle(psi, n, m, w, H)
        else:
            psi = _apply_matrix(psi, total, layer)
        _check_norm(psi, f"layer {i}")
    ledger = QueryMagnitudeLedger(tuple(float(v) for v in mags), circ.query_count)
    return StateVector(n, m, w, psi), ledger


def _output_probs(circ: QueryCircuit, psi: np.ndarray) -> np.ndarray:
    total = circ.num_wires
    probs = (np.abs(psi) ** 2).reshape((2,) * total)
    out = list(circ.output_wires)
    rest = tuple(i for i in range(total) if i not in out)
    marg = probs.sum(axis=rest) if rest else probs
    # remaining axes are in increasing wire order; reorder to output_wires order
    order = sorted(out)
    marg = np.transpose(marg, [order.index(wire) for wire in out]) if out else marg
    return np.asarray(marg).reshape(-1)


def output_distribution(circ: QueryCircuit, H: Oracle | None, inputs: int | None = None) -> Distribution:
    """Distribution of the measured ``output_wires`` string (as an int)."""
    final, _ = run_circuit(circ, H, inputs)
    probs = _output_probs(circ, final.amplitudes)
    return Distribution({y: float(p) for y, p in enumerate(probs)})


@functools.lru_cache(maxsize=None)
def _cached_probs(circ: QueryCircuit, H: Oracle | None, inputs: int | None) -> tuple[float, ...]:
    return tuple(output_distribution(circ, H, inputs).probs.values())


def output_probabilities(circ: QueryCircuit, H: Oracle | None, inputs: int | None = None) -> tuple[float, ...]:
    """Memoised ``output_distribution`` as a plain tuple indexed by outcome."""
    return _cached_probs(circ, H, inputs)


def acceptance_probability(circ: QueryCircuit, H: Oracle | None, inputs: int | None = None) -> float:
    """Pr[output = 1] for a one-bit-output circuit."""
    if len(circ.output_wires) != 1:
        raise SignatureMismatch(f"acceptance needs one output wire, circuit has {len(circ.output_wires)}")
    return _cached_probs(circ, H, inputs)[1]


def _same_dims(a: StateVector, b: StateVector) -> None:
    if a.amplitudes.shape != b.amplitudes.shape:
        raise SignatureMismatch(f"dimension {a.amplitudes.size} != {b.amplitudes.size}")


def euclidean_distance(a: StateVector, b: StateVector) -> float:
    """Raw l2 distance; sensitive to global phase."""
    _same_dims(a, b)
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def trace_distance_pure(a: StateVector, b: StateVector) -> float:
    _same_dims(a, b)
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(math.sqrt(max(0.0, 1.0 - overlap)))


def measure_bound(eps: float) -> float:
    """eps * sqrt(1 - eps^2/4): the trace-distance bound at Euclidean distance eps."""
    return eps * math.sqrt(max(0.0, 1.0 - eps * eps / 4.0))


def swapping_check(
    circ: QueryCircuit, f: Oracle, g: Oracle, inputs: int | None = None
) -> tuple[float, float]:
    """``(||phi_f - phi_g||, sqrt(Q * sum_{f(x) != g(x)} q_x^f))``."""
    if (f.n, f.m) != (g.n, g.m):
        raise SignatureMismatch("f and g have different signatures")
    phi_f, ledger = run_circuit(circ, f, inputs)
    phi_g, _ = run_circuit(circ, g, inputs)
    differ = [x for x in range(2**f.n) if f[x] != g[x]]
    rhs = math.sqrt(circ.query_count * ledger.mass_on(differ))
    return euclidean_distance(phi_f, phi_g), rhs


# -- JSON circuit format ------------------------------------------------------


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def circuit_to_dict(circ: QueryCircuit) -> dict:
    layers = []
    for layer in circ.layers:
        if isinstance(layer, OracleCall):
            layers.append({"oracle": True})
        else:
            layers.append({"unitary": {"wires": list(layer.wires), "matrix": _matrix_to_json(layer.matrix)}})
    doc = {"n": circ.n, "m": circ.m, "w": circ.w, "layers": layers, "output_wires": list(circ.output_wires)}
    if circ.input_wires:
        doc["input_wires"] = list(circ.input_wires)
    if circ.name:
        doc["name"] = circ.name
    return doc


def circuit_to_json(circ: QueryCircuit) -> str:
    return json.dumps(circuit_to_dict(circ), indent=1)


def _parse_matrix(raw, where: str) -> np.ndarray:
    try:
        return np.array([[complex(float(re), float(im)) for re, im in row] for row in raw])
    except (TypeError, ValueError):
        raise ParseError(f"{where}: matrix entries must be [re, im] pairs") from None


def circuit_from_dict(doc: dict) -> QueryCircuit:
    if not isinstance(doc, dict):
        raise ParseError("circuit document must be a JSON object")
    try:
        n, m, w = int(doc["n"]), int(doc["m"]), int(doc.get("w", 0))
        raw_layers = doc["layers"]
        output_wires = [int(v) for v in doc["output_wires"]]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad field value: {exc}") from None
    layers: list = []
    for i, raw in enumerate(raw_layers):
        if isinstance(raw, dict) and raw.get("oracle") is True:
            layers.append(ORACLE)
            continue
        if not isinstance(raw, dict) or "unitary" not in raw:
            raise ParseError(f"layer {i}: expected {{'oracle': true}} or {{'unitary': ...}}")
        entry = raw["unitary"]
        wires = entry.get("wires")
        mat = _parse_matrix(entry.get("matrix"), f"layer {i}")
        if wires is None or mat.shape != (2 ** len(wires), 2 ** len(wires)):
            raise ParseError(f"layer {i}: matrix dimension must be 2^|wires|")
        try:
            layers.append(Unitary(mat, tuple(wires)))
        except (NonUnitaryError, ValueError) as exc:
            raise ParseError(f"layer {i}: {exc}") from None
    try:
        return QueryCircuit(
            n, m, w, tuple(layers), tuple(output_wires),
            tuple(doc.get("input_wires", ())), str(doc.get("name", "")),
        )
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from None


def circuit_from_json(text: str) -> QueryCircuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return circuit_from_dict(doc)


def load_circuit(path) -> QueryCircuit:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return circuit_from_json(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.args[0]}") from exc


def identity_circuit(n: int, m: int, w: int = 0, output_wires: Sequence[int] = (0,)) -> QueryCircuit:
    from .gates import identity

    return QueryCircuit(n, m, w, (identity(0),), tuple(output_wires))
