import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muxdesigner.design import (
    DEFAULT_N_CAP,
    InfeasibleDesignError,
    candidate_counts,
    max_tolerable_switch_loss,
    optimal_source_count,
    optimal_source_count_exact,
    sweep,
)
from muxdesigner.hsps import PairSourceSpec
from muxdesigner.mux import Architecture, MPhotonTarget, chain_length_for_fraction, mux_metrics, ArchitectureSpec, q_star
from muxdesigner.photonics import DomainError, db_to_transmission

LOGTREE, GMZ, CHAIN = Architecture.LOGTREE, Architecture.GMZ, Architecture.CHAIN


class TestOptimalCount:
    @pytest.mark.parametrize("p_trig, loss_db, n", [(0.01, 0.05, 512), (0.1, 0.07, 64), (0.25, 0.1, 16)])
    def test_logtree_anchors(self, p_trig, loss_db, n):
        assert optimal_source_count(LOGTREE, loss_db, p_trig).n_opt == n

    @pytest.mark.parametrize("p_trig", [0.01, 0.3, 1.0])
    def test_lossless_saturates(self, p_trig):
        sol = optimal_source_count(LOGTREE, 0.0, p_trig, n_cap=1024)
        assert sol.n_opt == 1024 and sol.saturated

    def test_default_cap(self):
        assert optimal_source_count(LOGTREE, 0.0, 0.1).n_opt == DEFAULT_N_CAP

    def test_ties_go_to_fewer_sources(self):
        assert optimal_source_count(LOGTREE, 0.5, 0.2, p_single=0.0).n_opt == 1
        assert optimal_source_count(GMZ, 0.5, 0.2, p_single=0.0).n_opt == 1

    def test_candidates(self):
        assert candidate_counts(LOGTREE, 20) == [1, 2, 4, 8, 16]
        assert candidate_counts(CHAIN, 4) == [1, 2, 3, 4]
        with pytest.raises(DomainError):
            candidate_counts(GMZ, 0)

    @pytest.mark.parametrize("p_trig, loss_db", [(0.01, 0.05), (0.1, 0.3), (0.25, 1.0), (0.6, 2.0)])
    def test_powers_of_two_dominate(self, p_trig, loss_db):
        eta = db_to_transmission(loss_db)
        q = [q_star(LOGTREE, n, p_trig, eta_switch=eta) for n in range(1, 1025)]
        for n in range(1, 1025):
            top = 1 << (n - 1).bit_length()
            assert q[top - 1] >= q[n - 1]
        best = optimal_source_count(LOGTREE, loss_db, p_trig, n_cap=1024)
        assert best.q_at_opt == pytest.approx(max(q), abs=1e-15)

    def test_gmz_uses_coupler(self):
        sol = optimal_source_count(GMZ, 0.05, 0.1, eta_modulator=0.9)
        assert sol.arch is GMZ and sol.n_opt >= 2 and not sol.saturated
        eta = db_to_transmission(0.05)
        assert sol.q_at_opt == pytest.approx(q_star(GMZ, sol.n_opt, 0.1, eta_coupler=eta, eta_modulator=0.9))

    def test_chain_fraction(self):
        sol = optimal_source_count(CHAIN, 0.1, 0.25, fraction=0.9)
        assert sol.n_opt == chain_length_for_fraction(0.9, 0.25, db_to_transmission(0.1)) == 8
        assert not sol.saturated

    def test_chain_without_fraction_saturates(self):
        sol = optimal_source_count(CHAIN, 0.1, 0.25, n_cap=500)
        assert sol.n_opt == 500 and sol.saturated

    def test_exact_objective(self):
        src = PairSourceSpec.from_p_pair(0.1, 0.99, 0.99)
        sol = optimal_source_count_exact(LOGTREE, 0.0877392, src, "nrd")
        eta = db_to_transmission(sol.loss_db)
        direct = mux_metrics(src, "nrd", ArchitectureSpec(LOGTREE, sol.n_opt, eta_switch=eta))
        assert sol.q_at_opt == direct.q_exact and sol.objective == "q_exact"
        for n in (sol.n_opt // 2, sol.n_opt * 2):
            other = mux_metrics(src, "nrd", ArchitectureSpec(LOGTREE, n, eta_switch=eta))
            assert other.q_exact <= sol.q_at_opt


SOURCE = PairSourceSpec.from_p_pair(0.1, 0.9, 0.9)


class TestMaxLoss:
    def test_bracketing_certificate(self):
        target = MPhotonTarget(14, 1e8, 100)
        sol = max_tolerable_switch_loss(LOGTREE, target, SOURCE, "nrd")
        assert not sol.capped and sol.rate_hz >= 100
        above = optimal_source_count_exact(LOGTREE, sol.loss_db + 2e-3, SOURCE, "nrd")
        assert not target.met_by(above.q_at_opt)
        assert sol.p_multi_m == pytest.approx(1 - (1 - sol.p_multi_at_opt) ** 14)

    def test_monotone_in_m(self):
        losses = [max_tolerable_switch_loss(LOGTREE, MPhotonTarget(m), SOURCE, "nrd").loss_db
                  for m in range(2, 41, 3)]
        assert np.all(np.diff(losses) <= 0)

    @given(st.floats(1e-3, 1e3))
    def test_rate_rescaling(self, scale):
        base = max_tolerable_switch_loss(LOGTREE, MPhotonTarget(10, 1e8, 100), SOURCE, "nrd")
        scaled = max_tolerable_switch_loss(LOGTREE, MPhotonTarget(10, 1e8 * scale, 100 * scale), SOURCE, "nrd")
        assert scaled.loss_db == pytest.approx(base.loss_db, abs=2e-3)

    def test_target_above_pump_rate(self):
        with pytest.raises(InfeasibleDesignError):
            max_tolerable_switch_loss(GMZ, MPhotonTarget(2, 1e3, 1e4), SOURCE, "nrd")

    def test_infeasible_reports_rate(self):
        with pytest.raises(InfeasibleDesignError) as info:
            max_tolerable_switch_loss(LOGTREE, MPhotonTarget(40), PairSourceSpec(0.1, 0.5, 0.5), "nrd")
        assert 0 < info.value.achieved_rate_hz < 100

    def test_loose_target_capped(self):
        sol = max_tolerable_switch_loss(LOGTREE, MPhotonTarget(1), PairSourceSpec(0.5), "nrd")
        assert sol.capped and sol.loss_db == 3.0 and sol.rate_hz >= 100


class TestSweep:
    def test_lexicographic_order(self):
        rows = sweep({"a": [2, 1], "b": ["x", "y", "z"]}, lambda a, b: {"v": f"{a}{b}"})
        assert [r["v"] for r in rows] == ["2x", "2y", "2z", "1x", "1y", "1z"]

    def test_single_point(self):
        rows = sweep({"loss_db": [0.07]}, lambda loss_db: {"n": optimal_source_count(LOGTREE, loss_db, 0.1).n_opt})
        assert rows == [{"loss_db": 0.07, "n": 64}]

    @pytest.mark.parametrize("axes", [{}, {"a": []}, {"a": [1.0, float("nan")]}])
    def test_bad_grid(self, axes):
        with pytest.raises(DomainError):
            sweep(axes, lambda **k: {})

    def test_thread_count_invariant(self):
        def ev(p_trig, loss_db):
            return {"q": optimal_source_count(LOGTREE, loss_db, p_trig).q_at_opt}

        axes = {"p_trig": [0.01, 0.25], "loss_db": list(np.linspace(0, 3, 31))}
        assert sweep(axes, ev, threads=1) == sweep(axes, ev, threads=4)

    def test_fig3_columns_monotone(self):
        for p_trig in (0.01, 0.1, 0.25):
            rows = sweep({"loss_db": [i / 100 for i in range(301)]},
                         lambda loss_db: {"q": optimal_source_count(LOGTREE, loss_db, p_trig).q_at_opt})
            assert np.all(np.diff([r["q"] for r in rows]) <= 1e-15)
