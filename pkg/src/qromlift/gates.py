"""Gate matrices and small circuit-building helpers."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .quantum import Unitary

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _controlled(target: np.ndarray, controls: int = 1) -> np.ndarray:
    dim = 2 ** (controls + 1)
    mat = np.eye(dim, dtype=complex)
    mat[dim - 2 :, dim - 2 :] = target
    return mat


CNOT = _controlled(X)
TOFFOLI = _controlled(X, 2)


def identity(wire: int) -> Unitary:
    return Unitary(I2, (wire,), "I")


def x(wire: int) -> Unitary:
    return Unitary(X, (wire,), "X")


def z(wire: int) -> Unitary:
    return Unitary(Z, (wire,), "Z")


def h(wire: int) -> Unitary:
    return Unitary(HAD, (wire,), "H")


def ry(theta: float, wire: int) -> Unitary:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Unitary(np.array([[c, -s], [s, c]], dtype=complex), (wire,), f"RY({theta:.6g})")


def cnot(control: int, target: int) -> Unitary:
    return Unitary(CNOT, (control, target), "CNOT")


def toffoli(a: int, b: int, target: int) -> Unitary:
    return Unitary(TOFFOLI, (a, b, target), "TOFFOLI")


def permutation(perm: Sequence[int], wires: Sequence[int]) -> Unitary:
    """Basis permutation |i> -> |perm[i]> on ``wires``."""
    dim = len(perm)
    mat = np.zeros((dim, dim), dtype=complex)
    for i, j in enumerate(perm):
        mat[j, i] = 1.0
    return Unitary(mat, tuple(wires), "PERM")


def diffusion(wires: Sequence[int]) -> Unitary:
    """Grover diffusion 2|s><s| - I on ``wires``."""
    dim = 2 ** len(wires)
    mat = np.full((dim, dim), 2.0 / dim, dtype=complex) - np.eye(dim)
    return Unitary(mat, tuple(wires), "DIFFUSION")


def random_unitary(wires: Sequence[int], rng: np.random.Generator) -> Unitary:
    """Haar-random unitary on ``wires``."""
    dim = 2 ** len(wires)
    if dim == 1:
        return Unitary(np.eye(1), tuple(wires))
    mat = unitary_group.rvs(dim, random_state=rng)
    return Unitary(mat, tuple(wires), "HAAR")


def load_bits(value: int, wires: Sequence[int]) -> list[Unitary]:
    """X gates writing ``value`` (MSB first) onto |0> wires."""
    k = len(wires)
    return [x(w) for pos, w in enumerate(wires) if (value >> (k - 1 - pos)) & 1]


def random_query_circuit(
    n: int, m: int, w: int, queries: int, rng: np.random.Generator, output_wires: Sequence[int] | None = None
):
    """Haar layers on all wires interleaved with ``queries`` oracle calls."""
    from .quantum import ORACLE, QueryCircuit

    wires = tuple(range(n + m + w))
    layers = [random_unitary(wires, rng)]
    for _ in range(queries):
        layers += [ORACLE, random_unitary(wires, rng)]
    out = tuple(range(n)) if output_wires is None else tuple(output_wires)
    return QueryCircuit(n, m, w, tuple(layers), out, (), f"haar-{queries}q")
