"""Finite probability distributions with enumeration provenance."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

EXACT = "exact"


def sampled(seed: int, trials: int) -> str:
    return f"sampled(seed={seed}, trials={trials})"


@dataclass(frozen=True)
class Distribution:
    """A finite distribution ``value -> probability``.

    Probabilities may be :class:`fractions.Fraction` (combinatorial
    enumerations, which keeps identities exact) or ``float`` (anything that
    passed through a statevector). Support order is the insertion order of
    the producing enumeration, so iteration is deterministic.
    """

    probs: Mapping[Hashable, Any]
    provenance: str = EXACT
    _frozen: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        merged: dict = {}
        for value, p in self.probs.items():
            if p < 0:
                raise ValueError(f"negative probability {p} for {value!r}")
            merged[value] = p
        object.__setattr__(self, "probs", merged)
        object.__setattr__(self, "_frozen", tuple(merged.items()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Hashable, Any]], provenance: str = EXACT) -> "Distribution":
        acc: dict = {}
        for value, p in pairs:
            acc[value] = acc.get(value, 0) + p
        return cls(acc, provenance)

    @classmethod
    def uniform(cls, values: Iterable[Hashable], provenance: str = EXACT) -> "Distribution":
        values = list(values)
        w = Fraction(1, len(values))
        return cls.from_pairs(((v, w) for v in values), provenance)

    @classmethod
    def point(cls, value: Hashable) -> "Distribution":
        return cls({value: Fraction(1)})

    def prob(self, value: Hashable):
        return self.probs.get(value, 0)

    def __getitem__(self, value: Hashable):
        return self.prob(value)

    def __iter__(self) -> Iterator:
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def items(self):
        return self.probs.items()

    @property
    def support(self) -> list:
        return [v for v, p in self.probs.items() if p > 0]

    def total(self):
        return sum(self.probs.values())

    def expect(self, fn: Callable[[Hashable], Any]):
        return sum(p * fn(v) for v, p in self.probs.items())

    def map(self, fn: Callable[[Hashable], Hashable]) -> "Distribution":
        """Push-forward through ``fn``."""
        return Distribution.from_pairs(((fn(v), p) for v, p in self.probs.items()), self.provenance)

    def as_float(self) -> "Distribution":
        return Distribution({v: float(p) for v, p in self.probs.items()}, self.provenance)

    def is_exact(self) -> bool:
        return self.provenance == EXACT


def mixture(components: Iterable[tuple[Any, Distribution]], provenance: str = EXACT) -> Distribution:
    """``sum_i w_i * D_i`` for weighted components."""
    acc: dict = {}
    for w, dist in components:
        for v, p in dist.items():
            acc[v] = acc.get(v, 0) + w * p
    return Distribution(acc, provenance)


def tv_distance(a: Distribution, b: Distribution):
    keys = list(a.probs) + [v for v in b.probs if v not in a.probs]
    return sum(abs(a.prob(v) - b.prob(v)) for v in keys) / 2
