"""Independent ground truth for the closed forms.

Two engines, neither of which touches the closed-form statistics:

* ``exact_truncated_hsps`` sums the lossy two-mode state literally over
  pair number ``n``, idler count ``p`` and signal count ``k``.
* ``mc_hsps`` / ``mc_mux`` sample pair numbers, thin each arm with a
  binomial draw and apply the detector and routing rules trial by trial.

Monte Carlo streams are counter-based (Philox keyed by seed, stream id and
chunk index), so a run is reproducible regardless of thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from muxdesigner.hsps import NeverTriggersError, PairSourceSpec
from muxdesigner.mux import Architecture, ArchitectureSpec, network_transmission
from muxdesigner.parallel import ordered_map
from muxdesigner.photonics import DetectorModel, DomainError, PhotonNumberDist, default_n_max

__all__ = ["OracleResult", "RngSeed", "exact_truncated_hsps", "mc_hsps", "mc_mux", "CHUNK_TRIALS"]

CHUNK_TRIALS = 1 << 18
EXTRA_LEVELS = 10


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.stream_id < 0:
            raise DomainError(f"stream_id must be >= 0, got {self.stream_id}")

    def generator(self, chunk: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, chunk))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class OracleResult:
    """Heralded statistics from an oracle.

    For Monte Carlo results ``stderr`` maps field names to standard errors,
    ``trials`` and ``heralds`` hold the sample sizes, and ``q`` is the
    unconditional single-photon frequency per trial. ``defined`` is false
    when no trial heralded; the conditional fields are then NaN.
    """

    p_trig: float
    p_single: float
    p_multi: float
    fock: PhotonNumberDist | None
    tail_bound: float | None = None
    stderr: dict[str, float] | None = None
    trials: int | None = None
    heralds: int | None = None
    q: float | None = None
    cell_counts: np.ndarray | None = field(default=None, repr=False)
    defined: bool = True

    @property
    def p_vacuum(self) -> float:
        return float("nan") if self.fock is None else self.fock[0]


def _binomial_table(n_max: int, eta: float) -> np.ndarray:
    table = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for k in range(n + 1):
            table[n, k] = math.comb(n, k) * eta**k * (1.0 - eta) ** (n - k)
    return table


def exact_truncated_hsps(spec: PairSourceSpec, detector: DetectorModel,
                         n_max: int | None = None) -> OracleResult:
    """Heralded statistics by finite summation over ``(n, p, k)`` up to ``n_max`` pairs."""
    detector = DetectorModel.parse(detector)
    x = spec.xi2
    if n_max is None:
        n_max = default_n_max(x) + EXTRA_LEVELS
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    pairs = np.array([(1.0 - x) * x**n for n in range(n_max + 1)])
    idler = _binomial_table(n_max, spec.eta_i)
    signal = _binomial_table(n_max, spec.eta_s)
    joint = np.einsum("n,np,nk->pk", pairs, idler, signal)
    if detector is DetectorModel.THRESHOLD:
        heralded = joint[1:].sum(axis=0)
    else:
        heralded = joint[1]
    p_trig = float(heralded.sum())
    if p_trig == 0.0:
        raise NeverTriggersError(f"source never triggers (xi2={x}, eta_i={spec.eta_i})")
    fock = heralded / p_trig
    tail = x ** (n_max + 1) / p_trig
    return OracleResult(
        p_trig=p_trig,
        p_single=float(fock[1]) * spec.purity,
        p_multi=float(fock[2:].sum()),
        fock=PhotonNumberDist(np.clip(fock, 0.0, 1.0), tail_bound=tail),
        tail_bound=tail,
    )


def _heralds(idler: np.ndarray, detector: DetectorModel) -> np.ndarray:
    if detector is DetectorModel.THRESHOLD:
        return idler >= 1
    return idler == 1


def _draw_source(rng: np.random.Generator, xi2: float, eta_i: float, size: int):
    # numpy's geometric counts trials to first success, starting at 1
    pairs = rng.geometric(1.0 - xi2, size) - 1
    idler = rng.binomial(pairs, eta_i)
    return pairs, idler


@dataclass
class _Tally:
    trials: int = 0
    heralds: int = 0
    singles: int = 0
    multis: int = 0
    photons: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    cells: np.ndarray | None = None

    def add(self, other: _Tally) -> None:
        self.trials += other.trials
        self.heralds += other.heralds
        self.singles += other.singles
        self.multis += other.multis
        self.photons = _padded_sum(self.photons, other.photons)
        if other.cells is not None:
            self.cells = other.cells.copy() if self.cells is None else self.cells + other.cells

    @classmethod
    def from_outputs(cls, size: int, k: np.ndarray, cells: np.ndarray | None = None) -> _Tally:
        return cls(
            trials=size,
            heralds=int(k.size),
            singles=int(np.count_nonzero(k == 1)),
            multis=int(np.count_nonzero(k >= 2)),
            photons=np.bincount(k, minlength=1).astype(np.int64),
            cells=cells,
        )


def _padded_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(max(a.size, b.size), dtype=np.int64)
    out[: a.size] += a
    out[: b.size] += b
    return out


def _chunks(trials: int, chunk: int) -> list[tuple[int, int]]:
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    return [(i, min(chunk, trials - i * chunk)) for i in range(math.ceil(trials / chunk))]


def _result(tally: _Tally, purity: float) -> OracleResult:
    n, h = tally.trials, tally.heralds
    p_trig = h / n

    def se(p: float, m: int) -> float:
        return math.sqrt(p * (1.0 - p) / m)

    q = tally.singles / n
    if h == 0:
        nan = float("nan")
        return OracleResult(p_trig=0.0, p_single=nan, p_multi=nan, fock=None,
                            stderr={"p_trig": 0.0, "p_single": nan, "p_multi": nan, "q": 0.0},
                            trials=n, heralds=0, q=0.0, cell_counts=tally.cells, defined=False)
    p_single = tally.singles / h
    p_multi = tally.multis / h
    fock = PhotonNumberDist(tally.photons / h)
    return OracleResult(
        p_trig=p_trig,
        p_single=p_single * purity,
        p_multi=p_multi,
        fock=fock,
        stderr={
            "p_trig": se(p_trig, n),
            "p_single": se(p_single, h) * purity,
            "p_multi": se(p_multi, h),
            "q": se(q, n) * purity,
        },
        trials=n,
        heralds=h,
        q=q * purity,
        cell_counts=tally.cells,
    )


def _collect(tallies: list[_Tally]) -> _Tally:
    total = _Tally()
    for t in tallies:
        total.add(t)
    return total


def mc_hsps(spec: PairSourceSpec, detector: DetectorModel, trials: int, seed: RngSeed,
            threads: int | None = None) -> OracleResult:
    """Sample ``trials`` pump pulses of one source and estimate its heralded statistics."""
    detector = DetectorModel.parse(detector)

    def run(chunk: tuple[int, int]) -> _Tally:
        index, size = chunk
        rng = seed.generator(index)
        pairs, idler = _draw_source(rng, spec.xi2, spec.eta_i, size)
        signal = rng.binomial(pairs, spec.eta_s)
        return _Tally.from_outputs(size, signal[_heralds(idler, detector)])

    tally = _collect(ordered_map(run, _chunks(trials, CHUNK_TRIALS), threads))
    return _result(tally, spec.purity)


def _path_transmissions(spec: ArchitectureSpec) -> np.ndarray:
    """Transmission from each source to the output, not counting the source's own ``eta_s``."""
    if spec.arch is Architecture.CHAIN:
        return spec.eta_delay * spec.eta_switch ** np.arange(1.0, spec.n_sources + 1.0)
    return np.full(spec.n_sources, network_transmission(spec))


def mc_mux(source: PairSourceSpec, detector: DetectorModel, spec: ArchitectureSpec, trials: int,
           seed: RngSeed, policy: str = "first", threads: int | None = None) -> OracleResult:
    """Sample a full multiplexed source, clock cycle by clock cycle.

    Sources are indexed from the output. With ``policy="first"`` the routed
    photon comes from the lowest-index source that heralded; this is the
    chain's physical rule and one admissible choice for balanced networks,
    where later sources cannot affect the output and are not sampled. With
    ``policy="random"`` every source is sampled and a heralded one is
    picked uniformly (balanced networks only).
    """
    detector = DetectorModel.parse(detector)
    if policy not in ("first", "random"):
        raise DomainError(f"unknown routing policy {policy!r}")
    if policy == "random" and spec.arch is Architecture.CHAIN:
        raise DomainError("the chain always routes the heralded cell nearest the output")
    n_src = spec.n_sources
    path = _path_transmissions(spec) * source.eta_s
    x, ei = source.xi2, source.eta_i

    def run_first(chunk: tuple[int, int]) -> _Tally:
        index, size = chunk
        rng = seed.generator(index)
        waiting = np.arange(size)
        photons = np.empty(size, dtype=np.int64)
        cell = np.full(size, -1, dtype=np.int64)
        for j in range(n_src):
            if waiting.size == 0:
                break
            pairs, idler = _draw_source(rng, x, ei, waiting.size)
            fired = _heralds(idler, detector)
            routed = waiting[fired]
            photons[routed] = rng.binomial(pairs[fired], path[j])
            cell[routed] = j
            waiting = waiting[~fired]
        ok = cell >= 0
        cells = np.bincount(cell[ok], minlength=n_src).astype(np.int64)
        return _Tally.from_outputs(size, photons[ok], cells)

    def run_random(chunk: tuple[int, int]) -> _Tally:
        index, size = chunk
        rng = seed.generator(index)
        pairs, idler = _draw_source(rng, x, ei, (n_src, size))
        fired = _heralds(idler, detector)
        count = fired.sum(axis=0)
        pick = np.floor(rng.random(size) * count).astype(np.int64) + 1
        chosen = fired & (np.cumsum(fired, axis=0) == pick)
        ok = count > 0
        src = np.argmax(chosen, axis=0)[ok]
        photons = rng.binomial(pairs[src, np.flatnonzero(ok)], path[src])
        cells = np.bincount(src, minlength=n_src).astype(np.int64)
        return _Tally.from_outputs(size, photons, cells)

    if policy == "first":
        chunks, run = _chunks(trials, CHUNK_TRIALS), run_first
    else:
        chunks, run = _chunks(trials, max(1024, CHUNK_TRIALS // n_src)), run_random
    tally = _collect(ordered_map(run, chunks, threads))
    return _result(tally, source.purity)
