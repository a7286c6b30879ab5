"""Cross-checks of the closed forms against both oracles."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from muxdesigner.hsps import PairSourceSpec, heralded_metrics
from muxdesigner.mux import Architecture, ArchitectureSpec, mux_metrics
from muxdesigner.oracle import RngSeed, exact_truncated_hsps, mc_hsps, mc_mux
from muxdesigner.output import OutputTable
from muxdesigner.photonics import DetectorModel, p_pair_to_xi2

__all__ = ["GRID_XI2", "GRID_ETA", "MonteCarloCase", "DEFAULT_CASES", "run_validation"]

GRID_XI2 = (0.01, 0.05, 0.1, 0.25, 0.5, 0.6)
GRID_ETA = (0.0, 0.5, 0.9, 0.99, 1.0)

COLUMNS = ["check", "label", "detector", "xi2", "eta_i", "eta_s", "quantity",
           "reference", "estimate", "deviation", "limit", "passed"]


@dataclass(frozen=True)
class MonteCarloCase:
    label: str
    source: PairSourceSpec
    detector: DetectorModel
    network: ArchitectureSpec | None = None


NRD, TD = DetectorModel.NUMBER_RESOLVING, DetectorModel.THRESHOLD

DEFAULT_CASES = (
    MonteCarloCase("hsps-nrd-strong", PairSourceSpec(0.5, 0.9, 1.0), NRD),
    MonteCarloCase("hsps-td-weak", PairSourceSpec(0.1, 0.9, 0.8), TD),
    MonteCarloCase("hsps-td-lossy", PairSourceSpec(0.3, 0.8, 0.7), TD),
    MonteCarloCase("logtree-64", PairSourceSpec(p_pair_to_xi2(0.1), 0.99, 0.99), NRD,
                   ArchitectureSpec(Architecture.LOGTREE, 64, eta_switch=0.98)),
    MonteCarloCase("gmz-8", PairSourceSpec(0.25, 0.95, 0.9), TD,
                   ArchitectureSpec(Architecture.GMZ, 8, eta_coupler=0.99, eta_modulator=0.98)),
    MonteCarloCase("chain-8", PairSourceSpec(0.5, 0.99, 0.99), NRD,
                   ArchitectureSpec(Architecture.CHAIN, 8, eta_switch=0.98)),
)


def _truncation_rows(tolerance: float) -> list[list]:
    worst: dict[tuple, list] = {}
    failures = []
    for det, xi2, eta_i, eta_s in product((TD, NRD), GRID_XI2, GRID_ETA, GRID_ETA):
        if eta_i == 0.0:
            continue
        spec = PairSourceSpec(xi2, eta_i, eta_s)
        oracle = exact_truncated_hsps(spec, det)
        closed = heralded_metrics(spec, det, n_max=oracle.fock.n_max)
        pairs = {
            "p_trig": (closed.p_trig, oracle.p_trig),
            "p_single": (closed.p_single, oracle.p_single),
            "p_multi": (closed.p_multi, oracle.p_multi),
            "fock_max": (0.0, float(np.max(np.abs(closed.fock.probs - oracle.fock.probs)))),
        }
        for quantity, (ref, est) in pairs.items():
            dev = abs(est - ref)
            row = ["truncated-sum", "grid", det.value, xi2, eta_i, eta_s, quantity, ref, est, dev,
                   tolerance, dev <= tolerance]
            key = (det.value, quantity)
            if key not in worst or dev > worst[key][9]:
                worst[key] = row
            if dev > tolerance:
                failures.append(row)
    kept = list(worst.values())
    return kept + [r for r in failures if not any(r is k for k in kept)]


def _monte_carlo_rows(case: MonteCarloCase, index: int, trials: int, seed: int, z_max: float,
                      threads: int | None) -> list[list]:
    rng = RngSeed(seed, stream_id=index)
    src = case.source
    if case.network is None:
        est = mc_hsps(src, case.detector, trials, rng, threads=threads)
        ref = heralded_metrics(src, case.detector)
        pairs = {"p_trig": ref.p_trig, "p_single": ref.p_single, "p_multi": ref.p_multi}
    else:
        est = mc_mux(src, case.detector, case.network, trials, rng, threads=threads)
        ref = mux_metrics(src, case.detector, case.network)
        pairs = {"p_trig": ref.p_trig_mux, "q": ref.q_exact, "p_multi": ref.p_multi_mux}
    rows = []
    for quantity, reference in pairs.items():
        estimate = est.q if quantity == "q" else getattr(est, quantity)
        dev = abs(estimate - reference)
        limit = z_max * est.stderr[quantity]
        rows.append(["monte-carlo", case.label, case.detector.value, src.xi2, src.eta_i, src.eta_s,
                     quantity, reference, estimate, dev, limit, bool(dev <= limit)])
    return rows


def run_validation(trials: int = 10**6, seed: int = 0, tolerance: float = 1e-10, z_max: float = 5.0,
                   cases: tuple[MonteCarloCase, ...] = DEFAULT_CASES,
                   threads: int | None = None) -> tuple[OutputTable, list[list]]:
    """Return the table of worst deviations and the list of failing rows."""
    rows = _truncation_rows(tolerance)
    for i, case in enumerate(cases):
        rows += _monte_carlo_rows(case, i, trials, seed, z_max, threads)
    table = OutputTable(COLUMNS, rows, name="validate")
    failures = [r for r in rows if not r[-1]]
    return table, failures
