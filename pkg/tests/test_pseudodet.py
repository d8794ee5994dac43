import math

import pytest

import reference as ref
from qromlift import fixtures as fx
from qromlift import gates as gt
from qromlift.errors import DeterminismViolation, SignatureMismatch
from qromlift.experiments import prg_advantage_parts, quantum_prg_advantage_parts
from qromlift.oracles import Oracle, PartialFunction, all_oracles, is_consistent
from qromlift.prg import run_prg
from qromlift.pseudodet import (
    SimBudget,
    canonical_output,
    check_critical_set,
    critical_set_bruteforce,
    derandomize_prg,
    get_point,
    is_delta_deterministic,
    qeq,
    sim_oracle,
    update,
)
from qromlift.quantum import ORACLE, QueryCircuit

CONST = fx.det_fixture("const").circuit
EVAL0 = fx.det_fixture("eval0").circuit
UNIFORM = QueryCircuit(1, 1, 0, (gt.h(0),), (0,), name="coin")


def pf(*pairs, n=1, m=1):
    return PartialFunction(n, m, pairs)


class TestCanonicalOutput:
    def test_constant_algorithm(self):
        assert canonical_output(CONST, Oracle.zero(1, 1)) == (0, 1.0)

    def test_single_query_reads_the_bit(self):
        y, p = canonical_output(EVAL0, Oracle.from_bits(1, 1, "1", "0"))
        assert y == 1 and p == pytest.approx(1.0)

    def test_exact_tie_goes_to_smaller_output(self):
        y, p = canonical_output(UNIFORM, None)
        assert y == 0 and p == pytest.approx(0.5)

    def test_agrees_with_reference_acceptance(self):
        A = fx.det_fixture("eval0_noisy").circuit
        for H in all_oracles(1, 1):
            p1 = ref.accept(A, H.table)
            assert canonical_output(A, H).y == int(p1 > 0.5)


class TestDeterminism:
    def test_classical_fixtures_are_zero_deterministic(self):
        for name in ("const", "eval0", "eval2_n2", "parity_classical", "and_classical"):
            A = fx.det_fixture(name).circuit
            assert is_delta_deterministic(A, 0.0, all_oracles(A.n, A.m)) is None

    def test_coin_flip_is_not_deterministic_and_reports_a_witness(self):
        witness = is_delta_deterministic(UNIFORM, 0.25, all_oracles(1, 1))
        assert witness is not None
        assert witness.canonical.p == pytest.approx(0.5)
        assert witness.distribution.total() == pytest.approx(1.0)

    def test_noisy_fixture_needs_its_tolerance(self):
        A = fx.det_fixture("eval0_noisy").circuit
        assert is_delta_deterministic(A, 0.05, all_oracles(1, 1)) is None
        assert is_delta_deterministic(A, 0.001, all_oracles(1, 1)) is not None


class TestQeq:
    def test_equal_outputs(self):
        assert qeq(EVAL0, Oracle.zero(1, 1), Oracle.from_bits(1, 1, "0", "1"), 0.0)

    def test_different_outputs(self):
        assert not qeq(EVAL0, Oracle.zero(1, 1), Oracle.from_bits(1, 1, "1", "0"), 0.0)

    def test_ignoring_algorithm_never_distinguishes(self):
        assert all(qeq(CONST, Oracle.zero(1, 1), H, 0.0) for H in all_oracles(1, 1))

    def test_undeterministic_run_raises(self):
        with pytest.raises(DeterminismViolation):
            qeq(UNIFORM, Oracle.zero(1, 1), Oracle.zero(1, 1), 0.25)


class TestSimBudget:
    def test_two_queries_quarter_delta(self):
        b = SimBudget.for_params(2, 0.25)
        assert b.k == 256
        assert b.threshold == 0.0078125
        assert b.query_cap == pytest.approx(2 * 2**12 * 2**12)

    def test_one_query_no_error(self):
        b = SimBudget.for_params(1, 0.0)
        assert (b.k, b.threshold, b.query_cap) == (1, 1.0, 2.0)

    def test_no_queries(self):
        b = SimBudget.for_params(0, 0.1)
        assert b.k == 0 and math.isinf(b.threshold) and b.query_cap == 0

    @pytest.mark.parametrize("delta", [-0.01, 0.5, 0.7])
    def test_delta_range(self, delta):
        with pytest.raises(ValueError):
            SimBudget.for_params(1, delta)


class TestUpdate:
    def test_queries_the_heavy_point(self):
        F = Oracle.from_bits(1, 1, "1", "0")
        assert update(EVAL0, PartialFunction.empty(1, 1), F, 0.0).as_dict() == {0: 1}

    def test_already_defined_points_are_not_requeried(self):
        asked = []
        f = pf((0, 1))
        out = update(EVAL0, f, lambda x: asked.append(x) or 0, 0.0)
        assert out == f and asked == []

    def test_no_query_algorithm_learns_nothing(self):
        assert len(update(CONST, PartialFunction.empty(1, 1), Oracle.zero(1, 1), 0.0)) == 0

    def test_uniform_query_magnitude_meets_low_threshold(self):
        A = QueryCircuit(2, 1, 0, (gt.h(0), gt.h(1), ORACLE, gt.h(0), gt.h(1), ORACLE), (0,))
        # Q = 2, delta = 1/4: every point carries magnitude 1/2 >= 1/128
        out = update(A, PartialFunction.empty(2, 1), Oracle.zero(2, 1), 0.25, fill=Oracle.zero(2, 1))
        assert sorted(out.domain) == [0, 1, 2, 3]


class TestGetPoint:
    def test_output_change_stops_after_one_round(self):
        f, c = get_point(EVAL0, PartialFunction.empty(1, 1), Oracle.from_bits(1, 1, "1", "0"), 0.0)
        assert f.as_dict() == {0: 1} and c == 1

    def test_unchanged_output_runs_to_k_plus_one(self):
        f, c = get_point(EVAL0, PartialFunction.empty(1, 1), Oracle.zero(1, 1), 0.0)
        assert f.as_dict() == {0: 0} and c == SimBudget.for_params(1, 0.0).k + 1

    def test_no_query_algorithm(self):
        f, c = get_point(CONST, PartialFunction.empty(1, 1), Oracle.zero(1, 1), 0.0)
        assert len(f) == 0 and c == 1

    def test_result_extends_start_and_agrees_with_oracle(self):
        A = fx.det_fixture("parity_classical").circuit
        for F in all_oracles(1, 1):
            f0 = pf((1, F[1]))
            f, _ = get_point(A, f0, F, 0.0)
            assert f0.domain <= f.domain
            assert is_consistent(F, f)

    def test_output_can_change_exactly_at_k(self):
        # k = 1 here, so c = k is returned even though the output moved
        _, c = get_point(EVAL0, PartialFunction.empty(1, 1), Oracle.from_bits(1, 1, "1", "1"), 0.0)
        k = SimBudget.for_params(1, 0.0).k
        assert c == k
        assert canonical_output(EVAL0, Oracle.from_bits(1, 1, "1", "1")).y != canonical_output(EVAL0, Oracle.from_bits(1, 1, "0", "1")).y


class TestSimOracle:
    def test_no_query_algorithm_uses_no_queries(self):
        res = sim_oracle(CONST, Oracle.from_bits(1, 1, "1", "1"), 0.0)
        assert res.queries_used == 0 and res.oracle.table == (0, 1)

    def test_eval0_learns_the_bit(self):
        res = sim_oracle(EVAL0, Oracle.from_bits(1, 1, "1", "0"), 0.0)
        assert res.queries == [0]
        assert res.oracle.table == (1, 1)
        assert canonical_output(EVAL0, res.oracle).y == 1

    @pytest.mark.parametrize("name", ["eval0", "eval1", "eval2_n2", "eval1_m1", "parity_classical", "and_classical", "eval0_noisy"])
    def test_classical_fixtures_reproduce_output_within_cap(self, name):
        fixture = fx.det_fixture(name)
        A = fixture.circuit
        cap = SimBudget.for_params(A.query_count, fixture.delta).query_cap
        for F in all_oracles(A.n, A.m):
            res = sim_oracle(A, F, fixture.delta, fill=fixture.fill)
            assert qeq(A, F, res.oracle, fixture.delta)
            assert res.queries_used <= cap
            assert len(set(res.queries)) == len(res.queries)

    def test_learned_partial_function_only_grows(self):
        A = fx.det_fixture("and_classical").circuit
        res = sim_oracle(A, Oracle.from_bits(1, 1, "1", "1"), 0.0)
        sizes = [s["f"].count("->") for s in res.trace]
        assert sizes == sorted(sizes)


class TestCriticalSet:
    def test_constant_algorithm_has_empty_set(self):
        S = critical_set_bruteforce(CONST, Oracle.zero(1, 1), 0.0)
        assert len(S) == 0
        assert check_critical_set(CONST, Oracle.zero(1, 1), 0.0, S).ok

    def test_single_query_has_its_point(self):
        F = Oracle.from_bits(1, 1, "0", "1")
        S = critical_set_bruteforce(EVAL0, F, 0.0)
        assert S.points == (0,) and S.magnitudes[0] == pytest.approx(1.0)
        assert check_critical_set(EVAL0, F, 0.0, S).ok

    def test_parity_needs_both_points(self):
        A = fx.det_fixture("parity_classical").circuit
        F = Oracle.from_bits(1, 1, "1", "0")
        S = critical_set_bruteforce(A, F, 0.0)
        assert S.points == (0, 1) and check_critical_set(A, F, 0.0, S).ok

    def test_signature_checked(self):
        with pytest.raises(SignatureMismatch):
            critical_set_bruteforce(EVAL0, Oracle.zero(2, 1), 0.0)


class TestDerandomize:
    def test_eval_generator_outputs_oracle_value(self):
        qf = fx.gq_eval()
        G2 = derandomize_prg(qf.circuit, qf.k, qf.delta, fill=qf.fill)
        for H in all_oracles(1, 2):
            for s in G2.seeds:
                assert run_prg(G2, H, s)[0] == H[s]

    def test_transcript_is_padded_to_the_cap(self):
        qf = fx.gq_eval()
        G2 = derandomize_prg(qf.circuit, qf.k, qf.delta, fill=qf.fill)
        assert G2.queries == 2
        _, tau = run_prg(G2, Oracle.zero(1, 2), 1)
        assert [x for x, _ in tau.pairs] == [1, 0]

    def test_seed_width_checked(self):
        qf = fx.gq_eval()
        with pytest.raises(SignatureMismatch):
            derandomize_prg(qf.circuit, 2, qf.delta, fill=qf.fill)

    def test_advantage_survives_derandomisation(self):
        qf = fx.gq_id()
        A = fx.a_par()
        q_prg, q_rand = quantum_prg_advantage_parts(A, qf.circuit, qf.k)
        G2 = derandomize_prg(qf.circuit, qf.k, qf.delta)
        c_prg, c_rand = prg_advantage_parts(A, G2)
        assert abs(c_prg - c_rand) >= abs(q_prg - q_rand) - qf.delta - 1e-9
        assert (c_prg, c_rand) == pytest.approx((1.0, 0.5), abs=1e-12)
