"""Photon-number distributions, loss channels and detector outcomes.

Every state handled by this package is diagonal in the Fock basis, so a
single mode is fully described by a vector of photon-number probabilities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

__all__ = [
    "DomainError",
    "DetectorModel",
    "PhotonNumberDist",
    "TAIL_TARGET",
    "default_n_max",
    "check_xi2",
    "check_transmission",
    "pair_number_distribution",
    "loss_channel",
    "detector_outcome_probs",
    "db_to_transmission",
    "transmission_to_db",
    "p_pair_to_xi2",
]

TAIL_TARGET = 1e-14
MIN_N_MAX = 40


class DomainError(ValueError):
    """An argument lies outside the domain where the model is defined."""


class DetectorModel(enum.Enum):
    THRESHOLD = "td"
    NUMBER_RESOLVING = "nrd"

    @classmethod
    def parse(cls, value: str | DetectorModel) -> DetectorModel:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "td": cls.THRESHOLD,
            "threshold": cls.THRESHOLD,
            "nrd": cls.NUMBER_RESOLVING,
            "number_resolving": cls.NUMBER_RESOLVING,
            "number-resolving": cls.NUMBER_RESOLVING,
        }
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown detector {value!r}; expected 'td' or 'nrd'") from None


def check_xi2(xi2: float) -> float:
    xi2 = float(xi2)
    if not 0.0 <= xi2 < 1.0:
        raise DomainError(f"squeezing xi2 must lie in [0, 1), got {xi2}")
    return xi2


def check_transmission(eta: float, name: str = "eta") -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmission {name} must lie in [0, 1], got {eta}")
    return eta


def default_n_max(xi2: float, tail: float = TAIL_TARGET) -> int:
    """Smallest truncation (at least 40) whose geometric tail xi2**(n+1) is below ``tail``."""
    xi2 = check_xi2(xi2)
    if xi2 == 0.0:
        return MIN_N_MAX
    return max(MIN_N_MAX, math.ceil(math.log(tail) / math.log(xi2)))


@dataclass(frozen=True)
class PhotonNumberDist:
    """Photon-number probabilities ``probs[n]`` for ``n = 0..n_max``.

    ``tail_bound`` bounds the probability mass beyond ``n_max`` that the
    truncated vector does not carry.
    """

    probs: np.ndarray
    tail_bound: float = 0.0
    n_max: int = field(init=False)

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size < 1:
            raise DomainError("probs must be a non-empty 1-d vector")
        if np.any(probs < -1e-15) or np.any(probs > 1 + 1e-15):
            raise DomainError("photon-number probabilities must lie in [0, 1]")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "n_max", probs.size - 1)

    def __getitem__(self, n: int) -> float:
        if n < 0:
            raise IndexError(n)
        return float(self.probs[n]) if n <= self.n_max else 0.0

    def __len__(self) -> int:
        return self.probs.size

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    @property
    def mean(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    def multi(self) -> float:
        """Mass on two or more photons."""
        return float(self.probs[2:].sum())

    @classmethod
    def vacuum(cls, n_max: int = 1) -> PhotonNumberDist:
        probs = np.zeros(n_max + 1)
        probs[0] = 1.0
        return cls(probs)


def pair_number_distribution(xi2: float, n_max: int | None = None) -> PhotonNumberDist:
    """Geometric pair-number law ``(1 - xi2) * xi2**n`` of a two-mode squeezed vacuum."""
    xi2 = check_xi2(xi2)
    if n_max is None:
        n_max = default_n_max(xi2)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    n = np.arange(n_max + 1)
    probs = (1.0 - xi2) * xi2**n
    return PhotonNumberDist(probs, tail_bound=xi2 ** (n_max + 1))


def _thinning_matrix(n_max: int, eta: float) -> np.ndarray:
    # T[n, k] = C(n, k) eta^k (1 - eta)^(n - k)
    # built from powers rather than scipy.stats.binom, which overflows for subnormal eta
    n = np.arange(n_max + 1)[:, None]
    k = np.arange(n_max + 1)[None, :]
    lower = k <= n
    gap = np.where(lower, n - k, 0)
    return np.where(lower, comb(n, k) * eta**k * (1.0 - eta) ** gap, 0.0)


def loss_channel(dist: PhotonNumberDist, eta: float) -> PhotonNumberDist:
    """Pass ``dist`` through a beamsplitter of transmission ``eta`` and trace out the loss mode."""
    eta = check_transmission(eta)
    if eta == 1.0:
        return dist
    out = dist.probs @ _thinning_matrix(dist.n_max, eta)
    return PhotonNumberDist(out, tail_bound=dist.tail_bound)


def detector_outcome_probs(dist: PhotonNumberDist, detector: DetectorModel) -> tuple[float, float]:
    """Return ``(p_click_as_single, p_no_click)`` for a detector facing ``dist``.

    A threshold detector reports any non-vacuum input as a click. A
    number-resolving detector only accepts exactly one photon as a herald.
    """
    detector = DetectorModel.parse(detector)
    p_no_click = dist[0]
    if detector is DetectorModel.THRESHOLD:
        p_click = float(dist.probs[1:].sum())
    else:
        p_click = dist[1]
    return p_click, p_no_click


def db_to_transmission(loss_db: float) -> float:
    loss_db = float(loss_db)
    if not loss_db >= 0.0:
        raise DomainError(f"loss in dB must be >= 0, got {loss_db}")
    return 10.0 ** (-loss_db / 10.0)


def transmission_to_db(eta: float) -> float:
    eta = check_transmission(eta)
    if eta == 0.0:
        return math.inf
    return -10.0 * math.log10(eta)


def p_pair_to_xi2(p_pair: float) -> float:
    """Invert ``p_pair = xi2 * (1 - xi2)`` on the weak-pump branch ``xi2 <= 1/2``."""
    p_pair = float(p_pair)
    if not 0.0 < p_pair <= 0.25:
        raise DomainError(f"p_pair must lie in (0, 0.25], got {p_pair}")
    disc = max(0.0, 1.0 - 4.0 * p_pair)
    # 2p / (1 + sqrt(1 - 4p)) is the small root without cancellation
    return 2.0 * p_pair / (1.0 + math.sqrt(disc))
