import math
from fractions import Fraction

import pytest

from qromlift import fixtures as fx
from qromlift.errors import SignatureMismatch
from qromlift.lifting import (
    LiftParams,
    QueryLog,
    ReprogramDistinguisher,
    Sampler,
    distinguisher_B,
    find_transcript,
    lifting_report,
    reprogram_game,
    transcript_limit,
)
from qromlift.oracles import Oracle, PartialFunction, all_oracles, is_consistent
from qromlift.quantum import acceptance_probability

G_ID = fx.g_id()
G_AD = fx.g_adaptive()


class TestParams:
    def test_delta_from_advantage(self):
        p = LiftParams.for_advantage(0.5, q_a=1, q_g=2)
        assert p.delta == pytest.approx((0.5 / 6) ** 2)
        assert p.limit == math.ceil(-math.log(p.delta) * 16 / p.delta**2) + 1

    def test_limit_is_at_least_one(self):
        assert transcript_limit(1.0, 2) == 1
        assert transcript_limit(0.999999, 0) == 1

    def test_zero_delta_means_no_limit(self):
        assert transcript_limit(0.0, 2) is None

    def test_overrides_win(self):
        p = LiftParams.for_advantage(0.5, 1, 2, delta=0.3, limit=7)
        assert (p.delta, p.limit) == (0.3, 7)

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            LiftParams.for_advantage(0.5, 1, 2, delta=-0.1)


class TestFindTranscript:
    def test_large_delta_returns_empty_without_queries(self):
        log = QueryLog(Oracle.zero(1, 1))
        h = find_transcript(log, G_ID, 0b00, 1.0, transcript_limit(1.0, 2))
        assert h == PartialFunction.empty(1, 1) and log.count == 0

    def test_zero_oracle_learns_both_points(self):
        log = QueryLog(Oracle.zero(1, 1))
        h = find_transcript(log, G_ID, 0b00, 0.4, transcript_limit(0.4, 2))
        assert h.as_dict() == {0: 0, 1: 0}
        assert log.queries == [0, 1]

    def test_contradicting_answer_gives_bottom(self):
        log = QueryLog(Oracle.from_bits(1, 1, "1", "0"))
        assert find_transcript(log, G_ID, 0b00, 0.4, transcript_limit(0.4, 2)) is None
        assert log.queries == [0]

    def test_limit_hit_gives_bottom(self):
        assert find_transcript(Oracle.zero(1, 1), G_ID, 0b00, 0.4, 1) is None

    def test_trail_records_every_step(self):
        trail = []
        find_transcript(Oracle.zero(1, 1), G_ID, 0b00, 0.4, None, trail=trail)
        assert [len(h) for h in trail] == [0, 1, 2]

    @pytest.mark.parametrize("delta", [0.5, 0.1, 0.01])
    def test_returned_entries_were_genuinely_queried(self, delta):
        for G in (G_ID, G_AD):
            for g in range(2**G.ell):
                for H in all_oracles(G.n, G.m):
                    log = QueryLog(H)
                    h = find_transcript(log, G, g, delta, transcript_limit(delta, G.queries))
                    if h is not None:
                        assert is_consistent(H, h)
                        assert h.domain == frozenset(log.queries)
                        assert log.count == len(h)


class TestDistinguisherB:
    params = LiftParams.for_advantage(0.5, 1, 2)

    def test_out_of_range_rejects_without_queries(self):
        dist, q = distinguisher_B(Oracle.zero(1, 1), fx.g_const(), 0b11, fx.a_par(), self.params)
        assert dist[0] == 1 and q == 0

    def test_large_delta_runs_a_on_a_fresh_uniform_oracle(self):
        params = LiftParams.for_advantage(0.5, 1, 2, delta=1.0)
        for g in range(4):
            fresh = sum(acceptance_probability(fx.a_par(), H, g) for H in all_oracles(1, 1)) / 4
            for H in all_oracles(1, 1):
                dist, q = distinguisher_B(H, G_ID, g, fx.a_par(), params)
                assert q == 0
                assert dist[1] == pytest.approx(fresh, abs=1e-12)

    def test_query_count_equals_learned_domain(self):
        dist, q = distinguisher_B(Oracle.zero(1, 1), G_ID, 0b00, fx.a_par(), self.params)
        assert q == 2
        assert dist[1] == pytest.approx(1.0, abs=1e-12)

    def test_sampled_mode(self):
        dist, _ = distinguisher_B(Oracle.zero(1, 1), G_ID, 0b00, fx.a_par(), self.params, mode="sampled", seed=1)
        assert dist.provenance.startswith("sampled")
        with pytest.raises(ValueError):
            distinguisher_B(Oracle.zero(1, 1), G_ID, 0b00, fx.a_par(), self.params, mode="sampled")


class TestReprogramGame:
    def test_empty_sampler_gives_zero_and_zero(self):
        f = {x.name: x for x in fx.reprogram_fixtures()}["empty"]
        assert reprogram_game(f.distinguisher, f.F0, f.sampler) == (0.0, 0.0)

    def test_deterministic_flip_is_fully_distinguishable(self):
        f = {x.name: x for x in fx.reprogram_fixtures()}["flip_point"]
        adv, bound = reprogram_game(f.distinguisher, f.F0, f.sampler)
        assert adv == pytest.approx(1.0) and bound == 2.0

    def test_grover_against_uniform_single_point(self):
        f = {x.name: x for x in fx.reprogram_fixtures()}["grover_uniform"]
        adv, bound = reprogram_game(f.distinguisher, f.F0, f.sampler)
        assert bound == pytest.approx(2 * math.sqrt(1 / 4))
        assert adv == pytest.approx(0.75, abs=1e-12)
        assert adv <= bound + 1e-9

    def test_sampler_epsilon_and_normalisation(self):
        assert fx._uniform_mark_sampler(2).epsilon == Fraction(1, 4)
        with pytest.raises(ValueError):
            Sampler(((0, Fraction(1, 2), PartialFunction.empty(1, 1)),))

    def test_signature_checked(self):
        f = {x.name: x for x in fx.reprogram_fixtures()}["grover_uniform"]
        D = ReprogramDistinguisher(f.distinguisher.circuit, f.distinguisher.decide)
        with pytest.raises(SignatureMismatch):
            reprogram_game(D, Oracle.zero(1, 1), f.sampler)


class TestLiftingReport:
    def test_zero_advantage_passes_trivially(self):
        report = lifting_report(fx.a_reject(), G_ID)
        assert report.adv_A == 0 and report.passed and report.adv_B >= -1e-9

    @pytest.mark.parametrize("pair", [("G_id", "A_par"), ("G_adaptive", "A_par2")])
    def test_built_in_fixtures_lift(self, pair):
        report = lifting_report(fx.DISTINGUISHERS[pair[1]](), fx.PRGS[pair[0]]())
        assert report.adv_A > 0
        assert report.adv_B >= report.adv_A / 2 - 1e-9
        assert report.delta_prg <= report.adv_A / 2 + 1e-12
        assert report.queries_within_limit
        for row in report.per_g.values():
            assert row["gap"] <= row["hybrid_bound"] + 1e-9

    def test_pinned_values_for_parity_fixture(self):
        report = lifting_report(fx.a_par(), G_ID)
        assert report.adv_A == pytest.approx(0.5, abs=1e-12)
        assert report.prg_B == pytest.approx(1.0, abs=1e-12)
        assert report.max_queries == 2

    def test_rand_acceptance_of_b_equals_that_of_a(self):
        report = lifting_report(fx.a_par(), G_ID)
        assert abs(report.rand_B - report.rand_A) <= 1e-12

    def test_report_dict_is_flat_json_ready(self):
        d = lifting_report(fx.a_par(), G_ID).as_dict()
        assert {"adv_A", "adv_B", "passed", "delta", "limit", "per_g"} <= set(d)
