"""Data series behind the figures: one table per plotted curve, no rendering."""

from __future__ import annotations

from collections.abc import Callable, Sequence

from muxdesigner.design import (
    DEFAULT_N_CAP,
    max_tolerable_switch_loss,
    optimal_source_count,
    sweep,
)
from muxdesigner.hsps import NeverTriggersError, PairSourceSpec, heralded_multi_prob
from muxdesigner.mux import Architecture, MPhotonTarget, chain_q_lower, chain_q_max
from muxdesigner.output import OutputTable
from muxdesigner.photonics import DetectorModel, db_to_transmission

__all__ = ["FIGURES", "loss_grid", "figure_tables"]

FIG2_XI2 = (0.01, 0.05, 0.1, 0.25, 0.5)
FIG3_PTRIG = (0.01, 0.1, 0.25)
FIG6_PTRIG = (0.1, 0.25)
FIG7_ETAS = (0.9, 0.99)
FIG7_M = tuple(range(2, 41))


def loss_grid(stop_db: float = 3.0, step_db: float = 0.01) -> list[float]:
    count = int(round(stop_db / step_db))
    return [round(i * step_db, 10) for i in range(count + 1)]


def _tag(value: float) -> str:
    return f"{value:g}"


def _fig2(detector: DetectorModel, *, eta_s: float = 1.0, xi2_values: Sequence[float] = FIG2_XI2,
          **_) -> list[OutputTable]:
    eta_i_values = [round(0.01 * i, 10) for i in range(1, 101)]
    panel = "fig2a" if detector is DetectorModel.THRESHOLD else "fig2b"
    tables = []
    for xi2 in xi2_values:
        table = OutputTable(["eta_i", "p_multi"], name=f"{panel}_xi2_{_tag(xi2)}")
        for eta_i in eta_i_values:
            try:
                p = heralded_multi_prob(PairSourceSpec(xi2, eta_i, eta_s), detector)
            except NeverTriggersError:
                continue
            table.append([eta_i, p])
        table.metadata.update(xi2=xi2, eta_s=eta_s, detector=detector.value)
        tables.append(table)
    return tables


def fig2a(**kw) -> list[OutputTable]:
    return _fig2(DetectorModel.THRESHOLD, **kw)


def fig2b(**kw) -> list[OutputTable]:
    return _fig2(DetectorModel.NUMBER_RESOLVING, **kw)


def _optimal_curves(arch: Architecture, label: str, component: str, p_trigs: Sequence[float],
                    n_cap: int, losses: Sequence[float]) -> list[OutputTable]:
    def evaluate(p_trig: float, loss_db: float) -> dict:
        sol = optimal_source_count(arch, loss_db, p_trig, n_cap=n_cap)
        return {"q_star": sol.q_at_opt, "n_opt": sol.n_opt, "saturated": sol.saturated}

    rows = sweep({"p_trig": list(p_trigs), "loss_db": list(losses)}, evaluate)
    tables = []
    for p_trig in p_trigs:
        table = OutputTable(["loss_db", f"eta_{component}", "q_star", "n_opt", "saturated"],
                            name=f"{label}_ptrig_{_tag(p_trig)}")
        for r in rows:
            if r["p_trig"] == p_trig:
                table.append([r["loss_db"], db_to_transmission(r["loss_db"]), r["q_star"], r["n_opt"], r["saturated"]])
        table.metadata.update(arch=arch.value, p_trig=p_trig, p_single=1.0, eta_delay=1.0, n_cap=n_cap)
        tables.append(table)
    return tables


def fig3(*, n_cap: int = DEFAULT_N_CAP, p_trigs: Sequence[float] = FIG3_PTRIG,
         losses: Sequence[float] | None = None, **_) -> list[OutputTable]:
    return _optimal_curves(Architecture.LOGTREE, "fig3", "switch", p_trigs, n_cap, losses or loss_grid())


def fig5(*, n_cap: int = DEFAULT_N_CAP, p_trigs: Sequence[float] = FIG3_PTRIG,
         losses: Sequence[float] | None = None, **_) -> list[OutputTable]:
    tables = _optimal_curves(Architecture.GMZ, "fig5", "coupler", p_trigs, n_cap, losses or loss_grid())
    for t in tables:
        t.metadata["eta_modulator"] = 1.0
    return tables


def fig6b(*, fraction: float = 0.9, p_trigs: Sequence[float] = FIG6_PTRIG,
          losses: Sequence[float] | None = None, n_cap: int = DEFAULT_N_CAP, **_) -> list[OutputTable]:
    tables = []
    for p_trig in p_trigs:
        table = OutputTable(["loss_db", "eta_switch", "q_star", "n_cells"], name=f"fig6b_ptrig_{_tag(p_trig)}")
        for loss_db in losses or loss_grid():
            sol = optimal_source_count(Architecture.CHAIN, loss_db, p_trig, fraction=fraction, n_cap=n_cap)
            table.append([loss_db, db_to_transmission(loss_db), sol.q_at_opt, sol.n_opt])
        table.metadata.update(arch="chain", p_trig=p_trig, fraction=fraction, p_single=1.0, eta_delay=1.0)
        tables.append(table)
    return tables


def fig6c(*, p_trigs: Sequence[float] = FIG6_PTRIG, losses: Sequence[float] | None = None,
          n_cap: int = DEFAULT_N_CAP, **_) -> list[OutputTable]:
    tables = []
    for p_trig in p_trigs:
        table = OutputTable(["loss_db", "q_max_chain", "q_star_logtree", "n_opt_logtree"],
                            name=f"fig6c_ptrig_{_tag(p_trig)}")
        for loss_db in losses or loss_grid():
            eta = db_to_transmission(loss_db)
            chain = chain_q_max(1.0, p_trig, eta) if (1 - p_trig) * eta < 1 else chain_q_lower(1.0, p_trig, eta, 1.0, n_cap)
            tree = optimal_source_count(Architecture.LOGTREE, loss_db, p_trig, n_cap=n_cap)
            table.append([loss_db, chain, tree.q_at_opt, tree.n_opt])
        table.metadata.update(p_trig=p_trig, chain_fraction=1.0, p_single=1.0, eta_delay=1.0)
        tables.append(table)
    return tables


def _fig7_rows(eta: float, p_pair: float, detector: DetectorModel, ms: Sequence[int],
               rep_rate_hz: float, target_rate_hz: float, n_cap: int, eta_s: float | None = None):
    source = PairSourceSpec.from_p_pair(p_pair, eta, eta if eta_s is None else eta_s)
    for m in ms:
        target = MPhotonTarget(m, rep_rate_hz, target_rate_hz)
        yield m, max_tolerable_switch_loss(Architecture.LOGTREE, target, source, detector, n_cap=n_cap)


def _fig7(columns: list[str], pick: Callable, label: str, *, eta_values: Sequence[float] = FIG7_ETAS,
          p_pair: float = 0.1, detector: DetectorModel | str = DetectorModel.NUMBER_RESOLVING,
          ms: Sequence[int] = FIG7_M, rep_rate_hz: float = 1e8, target_rate_hz: float = 100.0,
          n_cap: int = DEFAULT_N_CAP, eta_s: float | None = None, **_) -> list[OutputTable]:
    detector = DetectorModel.parse(detector)
    tables = []
    for eta in eta_values:
        table = OutputTable(columns, name=f"{label}_eta_{_tag(eta)}")
        for m, sol in _fig7_rows(eta, p_pair, detector, ms, rep_rate_hz, target_rate_hz, n_cap, eta_s):
            table.append(pick(m, sol))
        table.metadata.update(arch="logtree", eta_i=eta, eta_s=eta if eta_s is None else eta_s,
                              p_pair=p_pair, detector=detector.value, rep_rate_hz=rep_rate_hz,
                              target_rate_hz=target_rate_hz, eta_delay=1.0)
        tables.append(table)
    return tables


def fig7a(**kw) -> list[OutputTable]:
    return _fig7(["m", "loss_db", "eta_switch", "p_multi_m", "q_exact", "capped"],
                 lambda m, s: [m, s.loss_db, db_to_transmission(s.loss_db), s.p_multi_m, s.q_at_opt, s.capped],
                 "fig7a", **kw)


def fig7b(**kw) -> list[OutputTable]:
    return _fig7(["m", "n_opt", "loss_db"], lambda m, s: [m, s.n_opt, s.loss_db], "fig7b", **kw)


FIGURES: dict[str, Callable[..., list[OutputTable]]] = {
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig3": fig3,
    "fig5": fig5,
    "fig6b": fig6b,
    "fig6c": fig6c,
    "fig7a": fig7a,
    "fig7b": fig7b,
}


def figure_tables(name: str, **overrides) -> list[OutputTable]:
    try:
        build = FIGURES[name]
    except KeyError:
        raise KeyError(f"unknown figure {name!r}; valid names: {', '.join(FIGURES)}") from None
    return build(**overrides)
