import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from qromlift.errors import BudgetExceeded, ConflictError, InconsistencyError, ParseError, WidthMismatch
from qromlift.oracles import (
    Oracle,
    PartialFunction,
    combine,
    count_consistent,
    default_extend,
    enumerate_consistent,
    format_partial,
    identity_extend,
    is_consistent,
    parse_oracle,
    parse_partial,
    patch,
    sample_consistent,
    subtract,
)


def pf(n, m, *pairs):
    return PartialFunction(n, m, pairs)


class TestPatch:
    def test_empty_patch_keeps_oracle(self):
        H = Oracle.from_bits(1, 1, "0", "1")
        assert patch(H, PartialFunction.empty(1, 1)) == H

    def test_total_patch_replaces_everything(self):
        f = pf(1, 1, (0, 1), (1, 1))
        assert patch(Oracle.zero(1, 1), f).table == (1, 1)

    def test_single_point(self):
        assert patch(Oracle.zero(1, 1), pf(1, 1, (1, 1))).table == (0, 1)


class TestCombine:
    def test_with_empty(self):
        f = pf(1, 1, (0, 1))
        assert combine(f, PartialFunction.empty(1, 1)) == f

    def test_disjoint_singletons(self):
        assert combine(pf(1, 1, (0, 1)), pf(1, 1, (1, 0))).as_dict() == {0: 1, 1: 0}

    def test_conflict_names_the_point(self):
        with pytest.raises(ConflictError) as info:
            combine(pf(1, 1, (0, 1)), pf(1, 1, (0, 0)))
        assert info.value.x == 0


class TestSubtract:
    H = Oracle.from_bits(1, 1, "1", "0")

    def test_empty_gives_total_graph(self):
        assert subtract(self.H, PartialFunction.empty(1, 1)) == self.H.as_partial()

    def test_full_graph_gives_empty(self):
        assert len(subtract(self.H, self.H.as_partial())) == 0

    def test_removes_defined_points(self):
        assert subtract(self.H, pf(1, 1, (0, 1))).as_dict() == {1: 0}

    def test_inconsistent_oracle_raises(self):
        with pytest.raises(InconsistencyError):
            subtract(self.H, pf(1, 1, (0, 0)))


class TestIdentityExtend:
    def test_empty_is_identity(self):
        assert identity_extend(PartialFunction.empty(2, 2)).table == (0, 1, 2, 3)

    def test_one_point_overrides(self):
        assert identity_extend(pf(2, 2, (0, 3))).table == (3, 1, 2, 3)

    def test_total_is_itself(self):
        f = pf(1, 1, (0, 1), (1, 0))
        assert identity_extend(f).table == (1, 0)

    def test_width_mismatch(self):
        with pytest.raises(WidthMismatch):
            identity_extend(PartialFunction.empty(2, 1))

    def test_default_extend_uses_fill(self):
        assert default_extend(pf(2, 1, (3, 1)), Oracle.zero(2, 1)).table == (0, 0, 0, 1)


class TestEnumeration:
    def test_sizes(self):
        assert len(enumerate_consistent(PartialFunction.empty(1, 1))) == 4
        assert len(enumerate_consistent(pf(1, 1, (0, 1)))) == 2
        assert len(enumerate_consistent(pf(1, 1, (0, 1), (1, 1)))) == 1

    def test_lexicographic_in_free_values(self):
        tables = [H.table for H in enumerate_consistent(pf(2, 1, (1, 1)))]
        assert tables == [(a, 1, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_consistent(PartialFunction.empty(2, 2), budget=100)


class TestSampling:
    def test_total_h_is_returned_for_any_seed(self):
        h = pf(1, 1, (0, 1), (1, 0))
        assert all(sample_consistent(h, s).table == (1, 0) for s in range(5))

    def test_fixed_seed_reproduces(self):
        h = PartialFunction.empty(2, 2)
        assert sample_consistent(h, 42) == sample_consistent(h, 42)

    def test_uniform_frequencies(self):
        rng = np.random.default_rng(20240917)
        h = PartialFunction.empty(1, 1)
        index = {H: i for i, H in enumerate(enumerate_consistent(h))}
        counts = np.zeros(4)
        for _ in range(40000):
            counts[index[sample_consistent(h, rng)]] += 1
        freq = counts / counts.sum()
        assert np.all(np.abs(freq - 0.25) <= 0.02)
        assert chisquare(counts).pvalue > 1e-4


partials = st.integers(1, 3).flatmap(
    lambda n: st.integers(1, 2 if n < 3 else 1).flatmap(
        lambda m: st.tuples(
            st.just(n), st.just(m),
            st.dictionaries(st.integers(0, 2**n - 1), st.integers(0, 2**m - 1)),
            st.lists(st.integers(0, 2**m - 1), min_size=2**n, max_size=2**n),
        )
    )
)


@settings(max_examples=150, deadline=None)
@given(partials)
def test_algebra_laws(case):
    n, m, entries, table = case
    f = PartialFunction(n, m, entries)
    H = Oracle(n, m, tuple(table))
    patched = patch(H, f)
    assert is_consistent(patched, f)
    assert combine(subtract(patched, f), f) == patched.as_partial()
    members = enumerate_consistent(f)
    assert len(members) == count_consistent(f) == 2 ** (m * (2**n - len(f)))
    assert len(set(members)) == len(members)
    assert sample_consistent(f, table[0]) in set(members)


class TestTextFormat:
    def test_round_trip(self):
        f = pf(2, 1, (0, 1), (3, 0))
        assert parse_partial(format_partial(f)) == f

    def test_comments_and_blank_lines(self):
        text = "# oracle\nn=1 m=1\n\n0 -> 1  # first\n1 -> 0\n"
        assert parse_oracle(text).table == (1, 0)

    @pytest.mark.parametrize(
        "text,line",
        [("n=1 m=1\n0 -> 11\n", 2), ("n=1\n", 1), ("n=1 m=1\n0 1\n", 2), ("n=1 m=1\n0 -> 1\n0 -> 0\n", 3)],
    )
    def test_errors_name_the_line(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_partial(text)
        assert info.value.line == line

    def test_oracle_must_be_total(self):
        with pytest.raises(ParseError):
            parse_oracle("n=1 m=1\n0 -> 1\n")
