"""Partial functions, total oracles and the algebra between them.

Points ``x`` and values ``y`` are plain integers; ``x`` ranges over
``[0, 2**n)`` and ``y`` over ``[0, 2**m)``. When rendered as bit strings the
most significant bit comes first, so ``x = 0b01`` with ``n = 2`` prints as
``01``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    BudgetExceeded,
    ConflictError,
    InconsistencyError,
    ParseError,
    SignatureMismatch,
    WidthMismatch,
)

DEFAULT_BUDGET = 2**20


def to_bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def from_bits(bits: str) -> int:
    bits = bits.strip()
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def _check_point(x: int, n: int, label: str = "x") -> None:
    if not 0 <= x < 2**n:
        raise ValueError(f"{label}={x} out of range for {n} bits")


@dataclass(frozen=True)
class PartialFunction:
    """A map from a subset of {0,1}^n to {0,1}^m.

    ``entries`` may be given as a mapping or as ``(x, y)`` pairs; it is
    stored as a tuple sorted by ``x``. Repeating a point with two different
    values raises :class:`ConflictError`.
    """

    n: int
    m: int
    entries: tuple[tuple[int, int], ...] = ()
    _map: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        raw = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        table: dict[int, int] = {}
        for x, y in raw:
            x, y = int(x), int(y)
            _check_point(x, self.n)
            _check_point(y, self.m, "y")
            if x in table and table[x] != y:
                raise ConflictError(x, table[x], y)
            table[x] = y
        object.__setattr__(self, "entries", tuple(sorted(table.items())))
        object.__setattr__(self, "_map", dict(self.entries))

    @classmethod
    def empty(cls, n: int, m: int) -> "PartialFunction":
        return cls(n, m, ())

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __contains__(self, x: int) -> bool:
        return x in self._map

    def __getitem__(self, x: int) -> int:
        return self._map[x]

    def get(self, x: int, default=None):
        return self._map.get(x, default)

    def items(self):
        return self.entries

    def as_dict(self) -> dict[int, int]:
        return dict(self._map)

    def restrict(self, points: Iterable[int]) -> "PartialFunction":
        keep = set(points)
        return PartialFunction(self.n, self.m, [(x, y) for x, y in self.entries if x in keep])

    def is_total(self) -> bool:
        return len(self._map) == 2**self.n

    def __str__(self) -> str:
        body = ", ".join(f"{to_bits(x, self.n)}->{to_bits(y, self.m)}" for x, y in self.entries)
        return "{" + body + "}"


@dataclass(frozen=True)
class Oracle:
    """A total function {0,1}^n -> {0,1}^m stored as a value table."""

    n: int
    m: int
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != 2**self.n:
            raise ValueError(f"oracle table needs {2**self.n} entries, got {len(table)}")
        for y in table:
            _check_point(y, self.m, "y")
        object.__setattr__(self, "table", table)

    @classmethod
    def zero(cls, n: int, m: int) -> "Oracle":
        return cls(n, m, (0,) * 2**n)

    @classmethod
    def identity(cls, n: int) -> "Oracle":
        return cls(n, n, tuple(range(2**n)))

    @classmethod
    def from_function(cls, n: int, m: int, fn) -> "Oracle":
        return cls(n, m, tuple(fn(x) for x in range(2**n)))

    @classmethod
    def from_bits(cls, n: int, m: int, *values: str) -> "Oracle":
        """``Oracle.from_bits(1, 1, "1", "0")`` is the NOT function."""
        return cls(n, m, tuple(from_bits(v) for v in values))

    def __getitem__(self, x: int) -> int:
        return self.table[x]

    def __call__(self, x: int) -> int:
        return self.table[x]

    def as_partial(self) -> PartialFunction:
        return PartialFunction(self.n, self.m, enumerate(self.table))

    def __str__(self) -> str:
        return "(" + ",".join(to_bits(y, self.m) for y in self.table) + ")"


def _same_signature(a, b) -> None:
    if (a.n, a.m) != (b.n, b.m):
        raise SignatureMismatch(f"signature ({a.n},{a.m}) != ({b.n},{b.m})")


def patch(H: Oracle, f: PartialFunction) -> Oracle:
    """H^(f): f on its domain, H elsewhere."""
    _same_signature(H, f)
    return Oracle(H.n, H.m, tuple(f.get(x, y) for x, y in enumerate(H.table)))


def combine(f: PartialFunction, g: PartialFunction) -> PartialFunction:
    _same_signature(f, g)
    merged = f.as_dict()
    for x, y in g.entries:
        if x in merged and merged[x] != y:
            raise ConflictError(x, merged[x], y)
        merged[x] = y
    return PartialFunction(f.n, f.m, merged)


def is_consistent(H: Oracle | PartialFunction, h: PartialFunction) -> bool:
    """True when H agrees with h on every point both define."""
    getter = H.get if isinstance(H, PartialFunction) else (lambda x, _=None: H[x])
    return all(getter(x, y) == y for x, y in h.entries)


def subtract(H: Oracle | PartialFunction, f: PartialFunction) -> PartialFunction:
    """H \\ f: the part of H defined exactly where f is not.

    ``H`` may itself be partial (a transcript, say); consistency is only
    required where both are defined.
    """
    _same_signature(H, f)
    source = H if isinstance(H, PartialFunction) else H.as_partial()
    for x, y in f.entries:
        if x in source and source[x] != y:
            raise InconsistencyError(f"H({x})={source[x]} disagrees with f({x})={y}")
    return PartialFunction(H.n, H.m, [(x, y) for x, y in source.entries if x not in f])


def default_extend(f: PartialFunction, fill: Oracle) -> Oracle:
    """Total oracle equal to f on D_f and to ``fill`` elsewhere."""
    return patch(fill, f)


def identity_extend(f: PartialFunction) -> Oracle:
    if f.m != f.n:
        raise WidthMismatch(f"identity extension needs m == n, got n={f.n}, m={f.m}")
    return default_extend(f, Oracle.identity(f.n))


def count_consistent(h: PartialFunction) -> int:
    return 2 ** (h.m * (2**h.n - len(h)))


def iter_consistent(h: PartialFunction, budget: int = DEFAULT_BUDGET) -> Iterator[Oracle]:
    total = count_consistent(h)
    if total > budget:
        raise BudgetExceeded(total, budget)
    free = [x for x in range(2**h.n) if x not in h]
    base = [h.get(x, 0) for x in range(2**h.n)]
    for values in itertools.product(range(2**h.m), repeat=len(free)):
        table = list(base)
        for x, y in zip(free, values):
            table[x] = y
        yield Oracle(h.n, h.m, tuple(table))


def enumerate_consistent(h: PartialFunction, budget: int = DEFAULT_BUDGET) -> list[Oracle]:
    """Every oracle in Func_{n,m}(h), lexicographic in the free-point values."""
    return list(iter_consistent(h, budget))


def all_oracles(n: int, m: int, budget: int = DEFAULT_BUDGET) -> list[Oracle]:
    return enumerate_consistent(PartialFunction.empty(n, m), budget)


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_consistent(h: PartialFunction, rng) -> Oracle:
    """Uniform draw from Func_{n,m}(h). ``rng`` is a Generator or a seed."""
    gen = _rng(rng)
    draws = gen.integers(0, 2**h.m, size=2**h.n)
    return Oracle(h.n, h.m, tuple(h.get(x, int(v)) for x, v in enumerate(draws)))


# -- text format -------------------------------------------------------------


def _parse_header(line: str, lineno: int) -> tuple[int, int]:
    fields = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep or key not in ("n", "m"):
            raise ParseError(f"bad header token {tok!r}", lineno)
        try:
            fields[key] = int(val)
        except ValueError:
            raise ParseError(f"bad integer in header {tok!r}", lineno) from None
    if set(fields) != {"n", "m"}:
        raise ParseError("header must be 'n=<int> m=<int>'", lineno)
    return fields["n"], fields["m"]


def parse_partial(text: str) -> PartialFunction:
    """Parse ``n=<int> m=<int>`` followed by ``x_bits -> y_bits`` lines."""
    header = None
    pairs: list[tuple[int, int]] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = _parse_header(line, lineno)
            continue
        n, m = header
        lhs, sep, rhs = line.partition("->")
        if not sep:
            raise ParseError(f"expected 'x -> y', got {line!r}", lineno)
        lhs, rhs = lhs.strip(), rhs.strip()
        if len(lhs) != n or len(rhs) != m:
            raise ParseError(f"expected {n}-bit input and {m}-bit output", lineno)
        try:
            x, y = from_bits(lhs), from_bits(rhs)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if x in seen:
            raise ParseError(f"point {lhs} listed twice", lineno)
        seen[x] = lineno
        pairs.append((x, y))
    if header is None:
        raise ParseError("missing 'n=<int> m=<int>' header")
    return PartialFunction(header[0], header[1], pairs)


def parse_oracle(text: str) -> Oracle:
    f = parse_partial(text)
    if not f.is_total():
        missing = [to_bits(x, f.n) for x in range(2**f.n) if x not in f]
        raise ParseError(f"oracle file is partial; missing {', '.join(missing)}")
    return Oracle(f.n, f.m, tuple(f[x] for x in range(2**f.n)))


def format_partial(f: PartialFunction | Oracle) -> str:
    if isinstance(f, Oracle):
        f = f.as_partial()
    lines = [f"n={f.n} m={f.m}"]
    lines += [f"{to_bits(x, f.n)} -> {to_bits(y, f.m)}" for x, y in f.entries]
    return "\n".join(lines) + "\n"
