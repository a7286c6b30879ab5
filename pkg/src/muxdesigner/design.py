"""Design-space search: optimal array size and the largest tolerable switch loss."""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from muxdesigner.hsps import PairSourceSpec, herald_trigger_prob
from muxdesigner.mux import (
    Architecture,
    ArchitectureSpec,
    MPhotonTarget,
    ResourceCounts,
    chain_length_for_fraction,
    m_photon_multi,
    m_photon_rate,
    mux_metrics,
    q_star,
    resource_counts,
)
from muxdesigner.parallel import ordered_map
from muxdesigner.photonics import DetectorModel, DomainError, db_to_transmission

__all__ = [
    "DEFAULT_N_CAP",
    "DesignSolution",
    "InfeasibleDesignError",
    "candidate_counts",
    "optimal_source_count",
    "optimal_source_count_exact",
    "max_tolerable_switch_loss",
    "sweep",
]

DEFAULT_N_CAP = 2**20
LOSS_BRACKET_DB = (0.0, 3.0)
LOSS_TOL_DB = 1e-3


class InfeasibleDesignError(DomainError):
    """The rate target cannot be met even with lossless switching."""

    def __init__(self, message: str, achieved_rate_hz: float):
        super().__init__(message)
        self.achieved_rate_hz = achieved_rate_hz


@dataclass(frozen=True)
class DesignSolution:
    """Result of a design search.

    ``saturated`` means the optimum sits on the largest admissible ``n``, so
    a bigger ``n_cap`` could still help. ``capped`` means the loss search
    stopped at the top of its bracket while still feasible.
    """

    arch: Architecture
    n_opt: int
    q_at_opt: float
    loss_db: float
    resources: ResourceCounts
    p_multi_at_opt: float | None = None
    p_multi_m: float | None = None
    rate_hz: float | None = None
    objective: str = "q_star"
    saturated: bool = False
    capped: bool = False


def candidate_counts(arch: Architecture, n_cap: int) -> list[int]:
    """Source counts worth searching: powers of two for tree networks, every integer for the chain.

    Within one log-tree depth band the loss is fixed while the herald
    probability grows with ``n``, so the top of each band dominates.
    """
    if n_cap < 1:
        raise DomainError(f"n_cap must be >= 1, got {n_cap}")
    if arch is Architecture.CHAIN:
        return list(range(1, n_cap + 1))
    return [2**d for d in range(n_cap.bit_length()) if 2**d <= n_cap]


def _component_etas(arch: Architecture, loss_db: float, eta_delay: float, eta_modulator: float) -> dict:
    eta = db_to_transmission(loss_db)
    if arch is Architecture.GMZ:
        return dict(eta_coupler=eta, eta_modulator=eta_modulator, eta_delay=eta_delay)
    return dict(eta_switch=eta, eta_delay=eta_delay)


def _argmax(values: Sequence[float]) -> int:
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def optimal_source_count(arch: Architecture | str, loss_db: float, p_trig: float, *,
                         p_single: float = 1.0, eta_delay: float = 1.0, eta_modulator: float = 1.0,
                         n_cap: int = DEFAULT_N_CAP, fraction: float | None = None) -> DesignSolution:
    """Maximise the lower bound ``q*`` over the number of sources.

    ``loss_db`` is the loss of one 2x2 switch (log-tree, chain) or one
    coupler (GMZ). The chain bound grows with every added cell, so without
    ``fraction`` it saturates at ``n_cap``; with ``fraction`` the chain
    length is the shortest reaching that fraction of the infinite-chain limit.
    """
    arch = Architecture.parse(arch)
    etas = _component_etas(arch, loss_db, eta_delay, eta_modulator)
    eta = db_to_transmission(loss_db)

    def objective(n: int) -> float:
        return q_star(arch, n, p_trig, p_single, **etas)

    if arch is Architecture.CHAIN:
        if fraction is not None and (1.0 - p_trig) * eta < 1.0:
            n = min(chain_length_for_fraction(fraction, p_trig, eta), n_cap)
            saturated = n == n_cap
        else:
            n, saturated = n_cap, True
        return DesignSolution(arch, n, objective(n), loss_db, resource_counts(arch, n), saturated=saturated)

    counts = candidate_counts(arch, n_cap)
    if eta == 1.0:
        n = counts[-1]
    else:
        n = counts[_argmax([objective(c) for c in counts])]
    return DesignSolution(arch, n, objective(n), loss_db, resource_counts(arch, n),
                          saturated=n == counts[-1])


def optimal_source_count_exact(arch: Architecture | str, loss_db: float, source: PairSourceSpec,
                               detector: DetectorModel, *, eta_delay: float = 1.0,
                               eta_modulator: float = 1.0, n_cap: int = DEFAULT_N_CAP,
                               fraction: float | None = None) -> DesignSolution:
    """Maximise the exact single-photon probability ``q_exact`` over the number of sources."""
    arch = Architecture.parse(arch)
    detector = DetectorModel.parse(detector)
    etas = _component_etas(arch, loss_db, eta_delay, eta_modulator)
    eta = db_to_transmission(loss_db)

    def evaluate(n: int):
        return mux_metrics(source, detector, ArchitectureSpec(arch, n, **etas))

    if arch is Architecture.CHAIN:
        p_trig = herald_trigger_prob(source, detector)
        if fraction is not None and (1.0 - p_trig) * eta < 1.0:
            n = min(chain_length_for_fraction(fraction, p_trig, eta), n_cap)
        else:
            n = n_cap
        saturated = n == n_cap
    else:
        counts = candidate_counts(arch, n_cap)
        if eta == 1.0:
            n = counts[-1]
        else:
            n = counts[_argmax([evaluate(c).q_exact for c in counts])]
        saturated = n == counts[-1]
    m = evaluate(n)
    return DesignSolution(arch, n, m.q_exact, loss_db, resource_counts(arch, n),
                          p_multi_at_opt=m.p_multi_mux, objective="q_exact", saturated=saturated)


def max_tolerable_switch_loss(arch: Architecture | str, target: MPhotonTarget, source: PairSourceSpec,
                              detector: DetectorModel, *, eta_delay: float = 1.0,
                              eta_modulator: float = 1.0, n_cap: int = DEFAULT_N_CAP,
                              bracket_db: tuple[float, float] = LOSS_BRACKET_DB,
                              tol_db: float = LOSS_TOL_DB, fraction: float | None = None) -> DesignSolution:
    """Largest per-component loss at which ``m`` sources still reach the target rate.

    Each candidate loss re-optimises the array size on ``q_exact``; the
    returned loss is feasible and ``loss + 2 * tol_db`` is not (unless the
    search is ``capped`` at the top of the bracket).
    """
    arch = Architecture.parse(arch)
    lo, hi = bracket_db
    if target.target_rate_hz > target.rep_rate_hz:
        raise InfeasibleDesignError(
            f"target {target.target_rate_hz} Hz exceeds the pump rate {target.rep_rate_hz} Hz",
            achieved_rate_hz=target.rep_rate_hz,
        )

    def solve(loss_db: float) -> DesignSolution:
        return optimal_source_count_exact(arch, loss_db, source, detector, eta_delay=eta_delay,
                                          eta_modulator=eta_modulator, n_cap=n_cap, fraction=fraction)

    def finish(sol: DesignSolution, capped: bool) -> DesignSolution:
        return DesignSolution(
            arch=sol.arch, n_opt=sol.n_opt, q_at_opt=sol.q_at_opt, loss_db=sol.loss_db,
            resources=sol.resources, p_multi_at_opt=sol.p_multi_at_opt,
            p_multi_m=m_photon_multi(sol.p_multi_at_opt, target.m),
            rate_hz=m_photon_rate(target, sol.q_at_opt), objective=sol.objective,
            saturated=sol.saturated, capped=capped,
        )

    best = solve(lo)
    if not target.met_by(best.q_at_opt):
        rate = m_photon_rate(target, best.q_at_opt)
        raise InfeasibleDesignError(
            f"M={target.m} reaches only {rate:.6g} Hz < {target.target_rate_hz} Hz at {lo} dB loss",
            achieved_rate_hz=rate,
        )
    top = solve(hi)
    if target.met_by(top.q_at_opt):
        return finish(top, capped=True)
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        sol = solve(mid)
        if target.met_by(sol.q_at_opt):
            lo, best = mid, sol
        else:
            hi = mid
    return finish(best, capped=False)


def sweep(axes: Mapping[str, Sequence[Any]], evaluate: Callable[..., Mapping[str, Any]],
          threads: int | None = None) -> list[dict[str, Any]]:
    """Evaluate ``evaluate(**point)`` on the Cartesian grid of ``axes``.

    Rows come back in lexicographic order over the axes as given (last axis
    fastest) whatever the thread count.
    """
    if not axes:
        raise DomainError("sweep grid has no axes")
    names = list(axes)
    values = [list(axes[name]) for name in names]
    if any(len(v) == 0 for v in values):
        raise DomainError("sweep grid is empty")
    for v in values:
        for x in v:
            if isinstance(x, float) and not math.isfinite(x):
                raise DomainError("sweep grid values must be finite")
    points = [dict(zip(names, combo)) for combo in itertools.product(*values)]
    results = ordered_map(lambda p: evaluate(**p), points, threads)
    return [{**p, **r} for p, r in zip(points, results)]
