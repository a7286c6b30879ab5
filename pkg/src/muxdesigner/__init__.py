"""Loss-aware statistics and design optimisation for multiplexed heralded single-photon sources."""

from muxdesigner.photonics import (
    DetectorModel,
    DomainError,
    PhotonNumberDist,
    db_to_transmission,
    default_n_max,
    detector_outcome_probs,
    loss_channel,
    p_pair_to_xi2,
    pair_number_distribution,
    transmission_to_db,
)
from muxdesigner.hsps import (
    HeraldedMetrics,
    NeverTriggersError,
    PairSourceSpec,
    herald_trigger_prob,
    heralded_fock_dist,
    heralded_metrics,
    heralded_multi_prob,
    heralded_single_prob,
)
from muxdesigner.mux import (
    Architecture,
    ArchitectureSpec,
    MPhotonTarget,
    MuxMetrics,
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
from muxdesigner.design import (
    DesignSolution,
    InfeasibleDesignError,
    max_tolerable_switch_loss,
    optimal_source_count,
    optimal_source_count_exact,
    sweep,
)
from muxdesigner.oracle import (
    OracleResult,
    RngSeed,
    exact_truncated_hsps,
    mc_hsps,
    mc_mux,
)

__version__ = "0.1.0"
