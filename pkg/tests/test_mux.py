import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muxdesigner.hsps import PairSourceSpec, heralded_metrics, heralded_multi_prob, herald_trigger_prob
from muxdesigner.mux import (
    Architecture,
    ArchitectureSpec,
    MPhotonTarget,
    ResourceCounts,
    chain_length_for_fraction,
    chain_metrics_exact,
    chain_q_lower,
    chain_q_max,
    m_photon_multi,
    m_photon_rate,
    mux_metrics,
    mux_metrics_balanced,
    mux_trigger_prob,
    network_transmission,
    q_star,
    resource_counts,
)
from muxdesigner.oracle import exact_truncated_hsps
from muxdesigner.photonics import DomainError, db_to_transmission, p_pair_to_xi2
from tests.conftest import detectors, etas, positive_etas

LOGTREE, GMZ, CHAIN = Architecture.LOGTREE, Architecture.GMZ, Architecture.CHAIN
ETA_01DB = db_to_transmission(0.1)
HEADLINE = PairSourceSpec(p_pair_to_xi2(0.1), 0.99, 0.99)


class TestTrigger:
    def test_seventeen_sources(self):
        p = mux_trigger_prob(0.25, 17)
        assert p > 0.99 and p == pytest.approx(0.99248, abs=1e-5)

    @given(st.floats(0, 1))
    def test_single_source(self, p):
        assert mux_trigger_prob(p, 1) == pytest.approx(p, abs=1e-15)

    def test_sixty_four(self):
        assert mux_trigger_prob(0.1, 64) == pytest.approx(1 - 0.9**64, abs=1e-15)
        assert mux_trigger_prob(0.1, 64) == pytest.approx(0.99882, abs=1e-5)

    def test_bad_inputs(self):
        with pytest.raises(DomainError):
            mux_trigger_prob(1.2, 3)
        with pytest.raises(DomainError):
            mux_trigger_prob(0.5, 0)


class TestNetwork:
    def test_logtree_depth(self):
        spec = ArchitectureSpec(LOGTREE, 16, eta_switch=0.97724)
        assert network_transmission(spec) == pytest.approx(0.97724**4, abs=1e-15)
        assert network_transmission(spec) == pytest.approx(0.9120, abs=1e-4)
        assert network_transmission(ArchitectureSpec(LOGTREE, 1, eta_switch=0.5, eta_delay=0.9)) == 0.9
        # non powers of two use the ceiling of log2
        assert network_transmission(ArchitectureSpec(LOGTREE, 17, eta_switch=0.9)) == pytest.approx(0.9**5)

    def test_gmz(self):
        spec = ArchitectureSpec(GMZ, 4, eta_coupler=0.99, eta_modulator=0.98)
        assert network_transmission(spec) == pytest.approx(0.99**6 * 0.98, abs=1e-15)
        assert network_transmission(spec) == pytest.approx(0.92265, abs=1e-5)

    def test_gmz_power_of_two(self):
        with pytest.raises(DomainError):
            ArchitectureSpec(GMZ, 6)

    def test_chain_unsupported(self):
        with pytest.raises(DomainError):
            network_transmission(ArchitectureSpec(CHAIN, 4))


class TestBalanced:
    def test_lossless_reduces_to_trigger(self):
        m = mux_metrics_balanced(PairSourceSpec(0.5), "nrd", ArchitectureSpec(LOGTREE, 17))
        assert m.q_exact == pytest.approx(mux_trigger_prob(0.25, 17), abs=1e-12)

    def test_tenth_db_sixteen_sources(self):
        m = mux_metrics_balanced(PairSourceSpec(0.5), "nrd", ArchitectureSpec(LOGTREE, 16, eta_switch=ETA_01DB))
        assert m.q_lower == pytest.approx(0.9029, abs=1e-4) and m.q_lower > 0.9

    def test_headline_point(self):
        m = mux_metrics(HEADLINE, "nrd", ArchitectureSpec(LOGTREE, 64, eta_switch=0.98))
        assert m.q_exact == pytest.approx(0.8744, abs=1e-3)
        assert m.p_multi_mux == pytest.approx(0.0017, abs=2e-4)

    @given(st.floats(0.01, 0.6), positive_etas, etas, detectors, st.integers(0, 10), st.floats(0.5, 1))
    def test_substitution_rule_and_bounds(self, x, ei, es, det, depth, eta):
        src = PairSourceSpec(x, ei, es)
        spec = ArchitectureSpec(LOGTREE, 2**depth, eta_switch=eta, eta_delay=0.95)
        m = mux_metrics(src, det, spec)
        sub = heralded_metrics(src.attenuated(m.eta_network), det)
        assert m.q_exact == pytest.approx(sub.p_single * m.p_trig_mux, abs=1e-12)
        assert m.p_multi_mux == pytest.approx(sub.p_multi, abs=1e-12)
        assert m.q_lower <= m.q_exact + 1e-12
        assert m.p_multi_mux <= heralded_multi_prob(src, det) + 1e-12

    @pytest.mark.parametrize("det", ["td", "nrd"])
    def test_substitution_matches_oracle(self, det):
        src = PairSourceSpec(0.25, 0.9, 0.95)
        spec = ArchitectureSpec(GMZ, 8, eta_coupler=0.99, eta_modulator=0.97, eta_delay=0.98)
        m = mux_metrics(src, det, spec)
        oracle = exact_truncated_hsps(src.attenuated(network_transmission(spec)), det)
        assert m.p_single_mux == pytest.approx(oracle.p_single, abs=1e-10)
        assert m.p_multi_mux == pytest.approx(oracle.p_multi, abs=1e-10)

    def test_q_star_matches_lower_bound(self):
        src = PairSourceSpec(0.3, 0.9, 0.9)
        spec = ArchitectureSpec(LOGTREE, 32, eta_switch=0.97)
        m = mux_metrics(src, "td", spec)
        p_trig = herald_trigger_prob(src, "td")
        p_single = heralded_metrics(src, "td").p_single
        assert q_star(LOGTREE, 32, p_trig, p_single, eta_switch=0.97) == pytest.approx(m.q_lower, abs=1e-14)


class TestChain:
    def test_infinite_limit(self):
        expected = 0.25 * 0.97724 / (1 - 0.75 * 0.97724)
        assert chain_q_max(1.0, 0.25, 0.97724) == pytest.approx(expected, abs=1e-15)
        assert chain_q_max(1.0, 0.25, 0.97724) == pytest.approx(0.91479, abs=2e-5)
        assert chain_q_lower(1.0, 0.25, 0.97724, 1.0, 10_000) == pytest.approx(expected, abs=1e-12)

    def test_single_cell(self):
        assert chain_q_lower(0.8, 0.3, 0.9, 0.95, 1) == pytest.approx(0.8 * 0.95 * 0.3 * 0.9, abs=1e-15)

    @given(st.floats(0.01, 1), st.floats(0.01, 0.99), st.integers(1, 200))
    def test_lossless_matches_general(self, ps, pt, n):
        assert chain_q_lower(ps, pt, 1.0, 1.0, n) == pytest.approx(ps * mux_trigger_prob(pt, n), abs=1e-12)

    @given(st.floats(0.01, 0.99), st.floats(0.5, 0.999), st.floats(0.01, 0.99))
    def test_increasing_and_reaches_fraction(self, pt, eta, f):
        qs = [chain_q_lower(1.0, pt, eta, 1.0, n) for n in range(1, 60)]
        assert np.all(np.diff(qs) >= 0)
        assert np.all(np.diff(qs[:5]) > 0)
        n = chain_length_for_fraction(f, pt, eta)
        q_max = chain_q_max(1.0, pt, eta)
        assert chain_q_lower(1.0, pt, eta, 1.0, n) >= f * q_max * (1 - 1e-12)
        if n > 1:
            assert chain_q_lower(1.0, pt, eta, 1.0, n - 1) < f * q_max

    def test_length_examples(self):
        assert chain_length_for_fraction(0.9, 0.25, 0.97724) == 8
        assert chain_length_for_fraction(0.9, 0.25, 1.0) == 9
        assert chain_length_for_fraction(1e-9, 0.25, 0.9) == 1
        with pytest.raises(DomainError):
            chain_length_for_fraction(1.0, 0.25, 0.9)

    def test_exact_single_cell(self):
        src = PairSourceSpec(0.3, 0.9, 0.8)
        m = chain_metrics_exact(src, "td", 0.95, 0.9, 1)
        h = heralded_metrics(src.attenuated(0.95 * 0.9), "td")
        assert m.q_exact == pytest.approx(h.p_single * h.p_trig, abs=1e-14)
        assert m.p_multi_mux == pytest.approx(h.p_multi, abs=1e-14)

    @given(st.floats(0.01, 0.6), positive_etas, detectors, st.integers(1, 64))
    def test_exact_lossless(self, x, ei, det, n):
        src = PairSourceSpec(x, ei, 1.0)
        m = chain_metrics_exact(src, det, 1.0, 1.0, n)
        h = heralded_metrics(src, det)
        assert m.q_exact == pytest.approx(h.p_single * mux_trigger_prob(h.p_trig, n), abs=1e-12)
        balanced = mux_metrics(src, det, ArchitectureSpec(LOGTREE, n))
        assert m.q_exact == pytest.approx(balanced.q_exact, abs=1e-12)
        assert m.p_multi_mux == pytest.approx(balanced.p_multi_mux, abs=1e-12)

    def test_lower_bound_below_exact(self):
        src = PairSourceSpec(0.5, 0.99, 0.99)
        m = chain_metrics_exact(src, "nrd", 0.98, 1.0, 8)
        assert m.q_lower <= m.q_exact


class TestResources:
    @pytest.mark.parametrize("arch, n, expected", [
        (LOGTREE, 8, (7, 14, 3, 6)), (GMZ, 8, (8, 20, 1, 14)), (LOGTREE, 1, (0, 0, 0, 0)), (CHAIN, 5, (5, 5, 1, 5)),
    ])
    def test_table(self, arch, n, expected):
        assert resource_counts(arch, n) == ResourceCounts(*expected)

    @pytest.mark.parametrize("d", range(0, 16))
    def test_logtree_modulators(self, d):
        assert resource_counts(LOGTREE, 2**d).modulators_total + 1 == 2**d

    def test_gmz_rejects(self):
        with pytest.raises(DomainError):
            resource_counts(GMZ, 12)


class TestMPhoton:
    def test_rate(self):
        assert m_photon_rate(MPhotonTarget(7, 1e8), 1.0) == 1e8
        assert m_photon_rate(MPhotonTarget(20, 1e8), 0.5) == pytest.approx(95.37, abs=0.01)
        assert m_photon_rate(MPhotonTarget(20, 1e8), 10**-0.3) == pytest.approx(100.0, rel=1e-12)

    def test_multi(self):
        assert m_photon_multi(0.0, 9) == 0.0
        assert m_photon_multi(0.03, 1) == pytest.approx(0.03)
        assert m_photon_multi(0.005, 20) == pytest.approx(0.09539, abs=1e-5)

    def test_required_q(self):
        t = MPhotonTarget(20, 1e8, 100)
        assert t.required_q == pytest.approx(10**-0.3)
        assert t.met_by(0.51) and not t.met_by(0.49)

    def test_validation(self):
        with pytest.raises(DomainError):
            MPhotonTarget(0)
        with pytest.raises(DomainError):
            MPhotonTarget(3, rep_rate_hz=-1)


def test_architecture_parse():
    assert Architecture.parse("logtree") is LOGTREE
    assert Architecture.parse("GMZ") is GMZ
    with pytest.raises(DomainError):
        Architecture.parse("ring")
    assert math.isclose(network_transmission(ArchitectureSpec(LOGTREE, 64, eta_switch=0.98)), 0.98**6)
