"""Closed-form figures of merit for a single heralded single-photon source.

The source emits a two-mode squeezed vacuum with squeezing ``xi2 = |xi|^2``.
The idler arm (collection plus detector efficiency ``eta_i``) heralds the
signal arm (transmission ``eta_s``). All expressions are conditional on a
herald, so they are undefined when the source can never trigger.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from muxdesigner.photonics import (
    DetectorModel,
    DomainError,
    PhotonNumberDist,
    check_transmission,
    check_xi2,
    default_n_max,
    p_pair_to_xi2,
)

__all__ = [
    "NeverTriggersError",
    "PairSourceSpec",
    "HeraldedMetrics",
    "herald_trigger_prob",
    "heralded_single_prob",
    "heralded_multi_prob",
    "heralded_fock_dist",
    "heralded_metrics",
    "single_given_herald",
    "nonvacuum_given_herald",
]


class NeverTriggersError(DomainError):
    """The herald probability is zero, so heralded quantities are undefined."""


@dataclass(frozen=True)
class PairSourceSpec:
    xi2: float
    eta_i: float = 1.0
    eta_s: float = 1.0
    purity: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi2", check_xi2(self.xi2))
        object.__setattr__(self, "eta_i", check_transmission(self.eta_i, "eta_i"))
        object.__setattr__(self, "eta_s", check_transmission(self.eta_s, "eta_s"))
        purity = float(self.purity)
        if not 0.0 < purity <= 1.0:
            raise DomainError(f"purity must lie in (0, 1], got {purity}")
        object.__setattr__(self, "purity", purity)

    @classmethod
    def from_p_pair(cls, p_pair: float, eta_i: float = 1.0, eta_s: float = 1.0,
                    purity: float = 1.0) -> PairSourceSpec:
        return cls(p_pair_to_xi2(p_pair), eta_i, eta_s, purity)

    @property
    def p_pair(self) -> float:
        return self.xi2 * (1.0 - self.xi2)

    def attenuated(self, eta: float) -> PairSourceSpec:
        """The same source with an extra transmission ``eta`` on the signal arm."""
        return replace(self, eta_s=self.eta_s * check_transmission(eta))


@dataclass(frozen=True)
class HeraldedMetrics:
    """Statistics of the heralded signal state.

    ``p_single`` is purity-weighted. The remaining single-photon mass,
    ``(1 - purity)`` times the raw single-photon probability, is kept in
    ``p_impure_single`` so that the four buckets always sum to one.
    ``fock`` is the raw photon-number diagonal, so ``fock[1]`` equals
    ``p_single / purity``.
    """

    p_trig: float
    p_single: float
    p_impure_single: float
    p_multi: float
    p_vacuum: float
    fock: PhotonNumberDist


def _require_trigger(spec: PairSourceSpec) -> None:
    if spec.xi2 == 0.0 or spec.eta_i == 0.0:
        raise NeverTriggersError(
            f"source never triggers (xi2={spec.xi2}, eta_i={spec.eta_i}); heralded statistics undefined"
        )


def herald_trigger_prob(spec: PairSourceSpec, detector: DetectorModel) -> float:
    detector = DetectorModel.parse(detector)
    x, ei = spec.xi2, spec.eta_i
    if detector is DetectorModel.THRESHOLD:
        return x * ei / (1.0 - x * (1.0 - ei))
    return (1.0 - x) * x * ei / (1.0 - (1.0 - ei) * x) ** 2


def single_given_herald(x, ei, es, detector: DetectorModel):
    """Raw heralded single-photon probability; ``es`` may be an array."""
    if detector is DetectorModel.THRESHOLD:
        num = (1.0 - (x * (1.0 - es)) ** 2 * (1.0 - ei)) * (1.0 - x * (1.0 - ei))
        den = (1.0 - x * (1.0 - es)) ** 2 * (1.0 - x * (1.0 - es) * (1.0 - ei)) ** 2
        return (1.0 - x) * es * num / den
    a = (1.0 - ei) * (1.0 - es) * x
    return (1.0 - (1.0 - ei) * x) ** 2 * es * (1.0 + a) / (1.0 - a) ** 3


def nonvacuum_given_herald(x, ei, es, detector: DetectorModel):
    """Normalisation constant Z over the trigger probability; ``es`` may be an array."""
    if detector is DetectorModel.THRESHOLD:
        z = (1.0 - x) * x * (
            1.0 / (1.0 - x)
            + (1.0 - es) * (1.0 - ei) / (1.0 - x * (1.0 - es) * (1.0 - ei))
            - (1.0 - ei) / (1.0 - x * (1.0 - ei))
            - (1.0 - es) / (1.0 - x * (1.0 - es))
        )
        return z * (1.0 - x * (1.0 - ei)) / (x * ei)
    return es * (1.0 - (1.0 - es) * (x * (1.0 - ei)) ** 2) / (1.0 - x * (1.0 - ei) * (1.0 - es)) ** 2


def _raw_single(spec: PairSourceSpec, detector: DetectorModel) -> float:
    _require_trigger(spec)
    return single_given_herald(spec.xi2, spec.eta_i, spec.eta_s, detector)


def _nonvacuum(spec: PairSourceSpec, detector: DetectorModel) -> float:
    _require_trigger(spec)
    return nonvacuum_given_herald(spec.xi2, spec.eta_i, spec.eta_s, detector)


def heralded_single_prob(spec: PairSourceSpec, detector: DetectorModel) -> float:
    """Probability that the heralded state is one photon, weighted by the source purity."""
    detector = DetectorModel.parse(detector)
    return _raw_single(spec, detector) * spec.purity


def heralded_multi_prob(spec: PairSourceSpec, detector: DetectorModel) -> float:
    """Probability that the heralded state holds two or more photons.

    Purity does not enter: it relabels single photons, it does not move
    photon-number weight.
    """
    detector = DetectorModel.parse(detector)
    p_single = _raw_single(spec, detector)
    return max(0.0, _nonvacuum(spec, detector) - p_single)


def heralded_fock_dist(spec: PairSourceSpec, detector: DetectorModel,
                       n_max: int | None = None) -> PhotonNumberDist:
    """Photon-number diagonal of the heralded signal state, in closed form per entry."""
    detector = DetectorModel.parse(detector)
    _require_trigger(spec)
    if n_max is None:
        n_max = default_n_max(spec.xi2)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    x, ei, es = spec.xi2, spec.eta_i, spec.eta_s
    p_trig = herald_trigger_prob(spec, detector)
    k = np.arange(n_max + 1, dtype=float)
    c = 1.0 - es
    if detector is DetectorModel.THRESHOLD:
        # sum_n x^n (1 - (1-ei)^n) C(n,k) es^k c^(n-k), via sum_n C(n,k) y^n = y^k / (1-y)^(k+1)
        kept = (x * es) ** k / (1.0 - x * c) ** (k + 1)
        lost = ((1.0 - ei) * x * es) ** k / (1.0 - x * (1.0 - ei) * c) ** (k + 1)
        probs = (1.0 - x) / p_trig * (kept - lost)
    else:
        # derivative in y of sum_n C(n,k) y^n es^k c^(n-k), evaluated at y = x (1 - ei)
        y = x * (1.0 - ei)
        first = np.zeros_like(k)
        first[1:] = k[1:] * y ** (k[1:] - 1) / (1.0 - c * y) ** (k[1:] + 1)
        second = (k + 1) * c * y**k / (1.0 - c * y) ** (k + 2)
        probs = (1.0 - x) * ei * x * es**k * (first + second) / p_trig
    probs = np.clip(probs, 0.0, 1.0)
    # entries are exact, so the missing mass is the truncated tail
    tail = max(0.0, 1.0 - float(probs.sum()))
    return PhotonNumberDist(probs, tail_bound=tail)


def heralded_metrics(spec: PairSourceSpec, detector: DetectorModel,
                     n_max: int | None = None) -> HeraldedMetrics:
    detector = DetectorModel.parse(detector)
    p_trig = herald_trigger_prob(spec, detector)
    raw_single = _raw_single(spec, detector)
    p_multi = heralded_multi_prob(spec, detector)
    fock = heralded_fock_dist(spec, detector, n_max)
    return HeraldedMetrics(
        p_trig=p_trig,
        p_single=raw_single * spec.purity,
        p_impure_single=raw_single * (1.0 - spec.purity),
        p_multi=p_multi,
        p_vacuum=min(1.0, max(0.0, 1.0 - _nonvacuum(spec, detector))),
        fock=fock,
    )
