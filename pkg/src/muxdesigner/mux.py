"""Multiplexed sources: general relations and the log-tree, GMZ and chain architectures.

An array of ``N`` identical heralded sources feeds a switching network that
routes one heralded photon to a single output. Log-tree and GMZ networks
apply the same loss to every input (balanced), so their output statistics
follow from the single-source closed forms with ``eta_s`` replaced by
``eta_s * eta_network``. The chain applies ``eta_switch**(j + 1)`` to cell
``j`` (cell 0 sits next to the output) and is summed cell by cell.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from muxdesigner.hsps import (
    PairSourceSpec,
    _require_trigger,
    herald_trigger_prob,
    heralded_multi_prob,
    heralded_single_prob,
    nonvacuum_given_herald,
    single_given_herald,
)
from muxdesigner.photonics import DetectorModel, DomainError, check_transmission

__all__ = [
    "Architecture",
    "ArchitectureSpec",
    "MuxMetrics",
    "ResourceCounts",
    "MPhotonTarget",
    "is_power_of_two",
    "tree_depth",
    "mux_trigger_prob",
    "network_transmission",
    "q_star",
    "mux_metrics_balanced",
    "mux_metrics",
    "chain_q_lower",
    "chain_q_max",
    "chain_length_for_fraction",
    "chain_metrics_exact",
    "resource_counts",
    "m_photon_rate",
    "m_photon_multi",
]


class Architecture(enum.Enum):
    LOGTREE = "logtree"
    GMZ = "gmz"
    CHAIN = "chain"

    @classmethod
    def parse(cls, value: str | Architecture) -> Architecture:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"logtree": cls.LOGTREE, "tree": cls.LOGTREE, "gmz": cls.GMZ, "chain": cls.CHAIN}
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown architecture {value!r}; expected logtree, gmz or chain") from None

    @property
    def balanced(self) -> bool:
        return self is not Architecture.CHAIN


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def tree_depth(n: int) -> int:
    """Number of 2x2 switches, ``ceil(log2 n)``, between any source and the tree output."""
    if n < 1:
        raise DomainError(f"source count must be >= 1, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class ArchitectureSpec:
    """Network layout and component transmissions.

    ``eta_switch`` is the transmission of one 2x2 switch (log-tree and chain),
    ``eta_coupler`` of one 2x2 directional coupler and ``eta_modulator`` of
    the phase-modulator section (GMZ only).
    """

    arch: Architecture
    n_sources: int
    eta_switch: float = 1.0
    eta_coupler: float = 1.0
    eta_modulator: float = 1.0
    eta_delay: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "arch", Architecture.parse(self.arch))
        n = int(self.n_sources)
        if n != self.n_sources or n < 1:
            raise DomainError(f"n_sources must be an integer >= 1, got {self.n_sources}")
        object.__setattr__(self, "n_sources", n)
        if self.arch is Architecture.GMZ and not is_power_of_two(n):
            raise DomainError(f"GMZ needs a power-of-two source count, got {n}")
        for name in ("eta_switch", "eta_coupler", "eta_modulator", "eta_delay"):
            object.__setattr__(self, name, check_transmission(getattr(self, name), name))


@dataclass(frozen=True)
class MuxMetrics:
    """Per-clock-cycle statistics of a multiplexed source.

    ``q_exact`` is the probability of a heralded single photon at the output;
    ``q_lower`` is the bound that ignores multi-photon terms degraded to one
    photon by network loss. ``p_single_mux`` and ``p_multi_mux`` are
    conditional on the array triggering.
    """

    p_trig_mux: float
    q_exact: float
    q_lower: float
    p_single_mux: float
    p_multi_mux: float
    eta_network: float | None = None


@dataclass(frozen=True)
class ResourceCounts:
    modulators_total: int
    couplers_total: int
    modulator_depth: int
    coupler_depth: int


@dataclass(frozen=True)
class MPhotonTarget:
    """``m`` multiplexed sources run in parallel at pump rate ``rep_rate_hz``.

    The ratio of target to pump rate is not checked here; an unreachable
    target is reported by the optimiser.
    """

    m: int
    rep_rate_hz: float = 1e8
    target_rate_hz: float = 100.0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be an integer >= 1, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if not (self.rep_rate_hz > 0 and self.target_rate_hz > 0):
            raise DomainError("rates must be positive")

    @property
    def required_q(self) -> float:
        """Smallest per-source efficiency meeting the target rate."""
        return (self.target_rate_hz / self.rep_rate_hz) ** (1.0 / self.m)

    def met_by(self, q_mux: float) -> bool:
        return m_photon_rate(self, q_mux) >= self.target_rate_hz


def mux_trigger_prob(p_trig: float, n: int) -> float:
    """Probability that at least one of ``n`` sources heralds."""
    if not 0.0 <= p_trig <= 1.0:
        raise DomainError(f"p_trig must lie in [0, 1], got {p_trig}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if p_trig == 1.0:
        return 1.0
    return -math.expm1(n * math.log1p(-p_trig))


def network_transmission(spec: ArchitectureSpec) -> float:
    """Balanced transmission applied by the network to whichever photon it routes."""
    if spec.arch is Architecture.LOGTREE:
        return spec.eta_switch ** tree_depth(spec.n_sources) * spec.eta_delay
    if spec.arch is Architecture.GMZ:
        splitter = spec.eta_coupler ** (spec.n_sources - 1)
        return spec.eta_delay * spec.eta_modulator * splitter**2
    raise DomainError("the chain network is unbalanced; use the chain_* functions")


def q_star(arch: Architecture | str, n: int, p_trig: float, p_single: float = 1.0, *,
           eta_switch: float = 1.0, eta_coupler: float = 1.0, eta_modulator: float = 1.0,
           eta_delay: float = 1.0) -> float:
    """Lower bound on the triggered single-photon probability for ``n`` sources.

    Depends on the heralded source only through ``p_trig`` and ``p_single``.
    """
    arch = Architecture.parse(arch)
    if arch is Architecture.CHAIN:
        return chain_q_lower(p_single, p_trig, eta_switch, eta_delay, n)
    spec = ArchitectureSpec(arch, n, eta_switch, eta_coupler, eta_modulator, eta_delay)
    return p_single * mux_trigger_prob(p_trig, n) * network_transmission(spec)


def mux_metrics_balanced(source: PairSourceSpec, detector: DetectorModel,
                         spec: ArchitectureSpec) -> MuxMetrics:
    detector = DetectorModel.parse(detector)
    eta_net = network_transmission(spec)
    p_trig = herald_trigger_prob(source, detector)
    p_trig_mux = mux_trigger_prob(p_trig, spec.n_sources)
    routed = source.attenuated(eta_net)
    p_single_mux = heralded_single_prob(routed, detector)
    q_lower = heralded_single_prob(source, detector) * p_trig_mux * eta_net
    return MuxMetrics(
        p_trig_mux=p_trig_mux,
        q_exact=p_single_mux * p_trig_mux,
        q_lower=q_lower,
        p_single_mux=p_single_mux,
        p_multi_mux=heralded_multi_prob(routed, detector),
        eta_network=eta_net,
    )


def chain_q_lower(p_single: float, p_trig: float, eta_switch: float, eta_delay: float, n: int) -> float:
    """Lower bound for a chain of ``n`` cells (geometric sum over the firing cell)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    r = (1.0 - p_trig) * eta_switch
    scale = p_single * eta_delay * p_trig * eta_switch
    if r == 1.0:
        return scale * n
    if r == 0.0:
        return scale
    return scale * -math.expm1(n * math.log(r)) / (1.0 - r)


def chain_q_max(p_single: float, p_trig: float, eta_switch: float, eta_delay: float = 1.0) -> float:
    """Limit of :func:`chain_q_lower` for an infinite chain."""
    r = (1.0 - p_trig) * eta_switch
    if r >= 1.0:
        raise DomainError("an infinite lossless chain of never-triggering cells has no limit")
    return p_single * eta_delay * p_trig * eta_switch / (1.0 - r)


def chain_length_for_fraction(f: float, p_trig: float, eta_switch: float) -> int:
    """Shortest chain whose lower bound reaches a fraction ``f`` of the infinite-chain limit."""
    if not 0.0 < f < 1.0:
        raise DomainError(f"fraction f must lie in (0, 1), got {f}")
    r = (1.0 - p_trig) * eta_switch
    if r >= 1.0:
        raise DomainError("(1 - p_trig) * eta_switch must be < 1")
    if r == 0.0:
        return 1
    return max(1, math.ceil(math.log1p(-f) / math.log(r)))


def chain_metrics_exact(source: PairSourceSpec, detector: DetectorModel, eta_switch: float,
                        eta_delay: float, n: int) -> MuxMetrics:
    """Exact chain statistics, summing over which cell's photon reaches the output.

    The cell nearest the output wins whenever it fires, so cell ``j`` is used
    with probability ``p_trig * (1 - p_trig)**j`` and its photon crosses
    ``j + 1`` switches and one delay line.
    """
    detector = DetectorModel.parse(detector)
    _require_trigger(source)
    eta_switch = check_transmission(eta_switch, "eta_switch")
    eta_delay = check_transmission(eta_delay, "eta_delay")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    p_trig = herald_trigger_prob(source, detector)
    j = np.arange(n)
    weights = p_trig * (1.0 - p_trig) ** j
    es = source.eta_s * eta_delay * eta_switch ** (j + 1.0)
    x, ei = source.xi2, source.eta_i
    single = single_given_herald(x, ei, es, detector)
    multi = np.maximum(nonvacuum_given_herald(x, ei, es, detector) - single, 0.0)
    p_trig_mux = mux_trigger_prob(p_trig, n)
    q_exact = float(weights @ single) * source.purity
    p_single = heralded_single_prob(source, detector)
    return MuxMetrics(
        p_trig_mux=p_trig_mux,
        q_exact=q_exact,
        q_lower=chain_q_lower(p_single, p_trig, eta_switch, eta_delay, n),
        p_single_mux=q_exact / p_trig_mux,
        p_multi_mux=float(weights @ multi) / p_trig_mux,
    )


def mux_metrics(source: PairSourceSpec, detector: DetectorModel, spec: ArchitectureSpec) -> MuxMetrics:
    if spec.arch is Architecture.CHAIN:
        return chain_metrics_exact(source, detector, spec.eta_switch, spec.eta_delay, spec.n_sources)
    return mux_metrics_balanced(source, detector, spec)


def resource_counts(arch: Architecture | str, n: int) -> ResourceCounts:
    """Component totals and per-photon depths of the switching network.

    Chain counts treat each cell's switch as one modulator and one coupler
    stage: ``(n, n, 1, n)``.
    """
    arch = Architecture.parse(arch)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if arch is Architecture.LOGTREE:
        d = tree_depth(n)
        return ResourceCounts(n - 1, 2 * (n - 1), d, 2 * d)
    if arch is Architecture.GMZ:
        if not is_power_of_two(n):
            raise DomainError(f"GMZ needs a power-of-two source count, got {n}")
        d = tree_depth(n)
        return ResourceCounts(n, n * (n + d - 1) // 4, 1, 2 * (n - 1))
    return ResourceCounts(n, n, 1, n)


def m_photon_rate(target: MPhotonTarget, q_mux: float) -> float:
    if not 0.0 <= q_mux <= 1.0:
        raise DomainError(f"q_mux must lie in [0, 1], got {q_mux}")
    return target.rep_rate_hz * q_mux**target.m


def m_photon_multi(p_multi_mux: float, m: int) -> float:
    """Probability that at least one of ``m`` heralded outputs is multi-photon."""
    if not 0.0 <= p_multi_mux <= 1.0:
        raise DomainError(f"p_multi_mux must lie in [0, 1], got {p_multi_mux}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return -math.expm1(m * math.log1p(-p_multi_mux)) if p_multi_mux < 1.0 else 1.0
