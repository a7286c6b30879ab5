"""Command-line front end.

Exit codes: 0 success, 1 validation or feasibility failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from muxdesigner import __version__
from muxdesigner.design import (
    DEFAULT_N_CAP,
    InfeasibleDesignError,
    max_tolerable_switch_loss,
    optimal_source_count,
    optimal_source_count_exact,
    sweep,
)
from muxdesigner.figures import FIGURES, figure_tables
from muxdesigner.hsps import PairSourceSpec, herald_trigger_prob, heralded_metrics, heralded_single_prob
from muxdesigner.mux import (
    Architecture,
    ArchitectureSpec,
    MPhotonTarget,
    m_photon_multi,
    m_photon_rate,
    mux_metrics,
    resource_counts,
)
from muxdesigner.output import OutputTable, digest
from muxdesigner.photonics import DetectorModel, DomainError, db_to_transmission, p_pair_to_xi2
from muxdesigner.validation import run_validation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CONVENTION = "p_pair = xi2*(1-xi2), weak-pump root xi2 <= 0.5"
COMPONENTS = ("switch", "coupler", "modulator", "delay")
FOCK_COLUMNS = 6

SOURCE_KEYS = {"xi2", "p_pair", "eta_i", "eta_s", "purity"}
ARCH_KEYS = {"arch", "n_sources"} | {f"eta_{c}" for c in COMPONENTS} | {f"loss_db_{c}" for c in COMPONENTS}
TARGET_KEYS = {"m", "rep_rate_hz", "target_rate_hz"}
DEFAULTS: dict[str, Any] = {
    "p_pair": 0.1, "eta_i": 1.0, "eta_s": 1.0, "purity": 1.0, "detector": "nrd",
    "arch": "logtree", "n_sources": 16,
    "eta_switch": 1.0, "eta_coupler": 1.0, "eta_modulator": 1.0, "eta_delay": 1.0,
    "rep_rate_hz": 1e8, "target_rate_hz": 100.0,
}


class ConfigError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class Scenario:
    """Fully resolved inputs of one run. ``params`` holds the flat key/value view."""

    source: PairSourceSpec
    detector: DetectorModel
    architecture: ArchitectureSpec
    target: MPhotonTarget | None
    axes: dict[str, list] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    defaulted: list[str] = field(default_factory=list)

    def digest(self) -> str:
        return digest({"params": self.params, "axes": self.axes})


def _flatten_config(raw: Any) -> tuple[dict[str, Any], dict[str, list]]:
    if raw is None:
        return {}, {}
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping")
    flat: dict[str, Any] = {}
    axes: dict[str, list] = {}
    sections = {"source": SOURCE_KEYS, "architecture": ARCH_KEYS, "target": TARGET_KEYS}
    for key, value in raw.items():
        if key in sections:
            if not isinstance(value, dict):
                raise ConfigError(key, "must be a mapping")
            for sub, v in value.items():
                if sub not in sections[key]:
                    raise ConfigError(f"{key}.{sub}", "unknown field")
                flat[sub] = v
        elif key == "detector":
            flat["detector"] = value
        elif key == "sweep":
            if not isinstance(value, dict):
                raise ConfigError("sweep", "must map field names to lists")
            for axis, values in value.items():
                if axis not in (SOURCE_KEYS | ARCH_KEYS | TARGET_KEYS) - {"arch"}:
                    raise ConfigError(f"sweep.{axis}", "not a sweepable field")
                if not isinstance(values, list) or not values:
                    raise ConfigError(f"sweep.{axis}", "must be a non-empty list")
                axes[axis] = values
        else:
            raise ConfigError(key, "unknown section")
    return flat, axes


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Apply ``override`` on ``base``; setting one of an exclusive pair drops the other."""
    out = dict(base)
    exclusive = [("xi2", "p_pair")] + [(f"eta_{c}", f"loss_db_{c}") for c in COMPONENTS]
    for key, value in override.items():
        for a, b in exclusive:
            if key == a:
                out.pop(b, None)
            elif key == b:
                out.pop(a, None)
        out[key] = value
    return out


def _number(params: dict[str, Any], key: str, kind=float) -> Any:
    value = params[key]
    try:
        number = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {value!r}") from None
    if kind is int and number != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    return number


def build_scenario(params: dict[str, Any], axes: dict[str, list] | None = None) -> Scenario:
    """Resolve a flat parameter mapping into validated domain objects."""
    if "xi2" in params and "p_pair" in params:
        raise ConfigError("source", "give exactly one of xi2 and p_pair")
    defaulted = [k for k in DEFAULTS if k not in params and not (k == "p_pair" and "xi2" in params)]
    for c in COMPONENTS:
        if f"loss_db_{c}" in params and f"eta_{c}" in defaulted:
            defaulted.remove(f"eta_{c}")
    resolved = {**{k: DEFAULTS[k] for k in defaulted}, **params}
    try:
        if "xi2" in resolved:
            xi2 = _number(resolved, "xi2")
        else:
            try:
                xi2 = p_pair_to_xi2(_number(resolved, "p_pair"))
            except DomainError as exc:
                raise ConfigError("p_pair", str(exc)) from None
        etas = {}
        for c in COMPONENTS:
            if f"loss_db_{c}" in resolved:
                try:
                    etas[c] = db_to_transmission(_number(resolved, f"loss_db_{c}"))
                except DomainError as exc:
                    raise ConfigError(f"loss_db_{c}", str(exc)) from None
            else:
                etas[c] = _number(resolved, f"eta_{c}")
        source = _checked("source", lambda: PairSourceSpec(
            xi2, _number(resolved, "eta_i"), _number(resolved, "eta_s"), _number(resolved, "purity")))
        detector = _checked("detector", lambda: DetectorModel.parse(resolved["detector"]))
        arch = _checked("arch", lambda: ArchitectureSpec(
            Architecture.parse(resolved["arch"]), _number(resolved, "n_sources", int),
            etas["switch"], etas["coupler"], etas["modulator"], etas["delay"]))
        target = None
        if "m" in resolved:
            target = _checked("target", lambda: MPhotonTarget(
                _number(resolved, "m", int), _number(resolved, "rep_rate_hz"),
                _number(resolved, "target_rate_hz")))
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]), "missing") from None
    return Scenario(source, detector, arch, target, dict(axes or {}), resolved, defaulted)


def _checked(field_name: str, make):
    try:
        return make()
    except DomainError as exc:
        raise ConfigError(field_name, str(exc)) from None


def _flag_params(args: argparse.Namespace) -> dict[str, Any]:
    names = ["xi2", "p_pair", "eta_i", "eta_s", "purity", "detector", "arch", "n_sources",
             "m", "rep_rate_hz", "target_rate_hz"]
    names += [f"eta_{c}" for c in COMPONENTS] + [f"loss_db_{c}" for c in COMPONENTS]
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def load_scenario(args: argparse.Namespace) -> Scenario:
    file_params, axes = {}, {}
    if args.config:
        path = Path(args.config)
        try:
            raw = yaml.safe_load(path.read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"malformed YAML in {path}: {exc}") from None
        file_params, axes = _flatten_config(raw)
        for a, b in [("xi2", "p_pair")]:
            if a in file_params and b in file_params:
                raise ConfigError("source", "give exactly one of xi2 and p_pair")
    return build_scenario(_merge(file_params, _flag_params(args)), axes)


def _metadata(scenario: Scenario | None, args: argparse.Namespace, **extra) -> dict[str, Any]:
    meta: dict[str, Any] = {"tool": f"muxdesigner {__version__}", "command": args.command}
    if scenario is not None:
        meta["scenario_digest"] = scenario.digest()
        meta["convention"] = CONVENTION
        meta["parameters"] = " ".join(f"{k}={v}" for k, v in sorted(scenario.params.items()))
        meta["defaulted"] = " ".join(scenario.defaulted) or "none"
        if scenario.axes:
            meta["sweep_axes"] = " ".join(scenario.axes)
    meta.update(extra)
    return meta


def _points(scenario: Scenario, evaluate) -> list[dict[str, Any]]:
    if not scenario.axes:
        return [evaluate(scenario)]

    def at_point(**point):
        return evaluate(build_scenario(_merge(scenario.params, point)))

    return sweep(scenario.axes, at_point)


def _hsps_record(s: Scenario) -> dict[str, Any]:
    m = heralded_metrics(s.source, s.detector)
    rec = {"xi2": s.source.xi2, "p_pair": s.source.p_pair, "eta_i": s.source.eta_i,
           "eta_s": s.source.eta_s, "purity": s.source.purity, "detector": s.detector.value,
           "p_trig": m.p_trig, "p_single": m.p_single, "p_impure_single": m.p_impure_single,
           "p_multi": m.p_multi, "p_vacuum": m.p_vacuum}
    rec.update({f"fock_{n}": m.fock[n] for n in range(FOCK_COLUMNS)})
    return rec


def _mux_record(s: Scenario) -> dict[str, Any]:
    a = s.architecture
    m = mux_metrics(s.source, s.detector, a)
    res = resource_counts(a.arch, a.n_sources)
    rec = {"arch": a.arch.value, "n_sources": a.n_sources, "xi2": s.source.xi2,
           "eta_i": s.source.eta_i, "eta_s": s.source.eta_s, "detector": s.detector.value,
           "eta_switch": a.eta_switch, "eta_coupler": a.eta_coupler, "eta_modulator": a.eta_modulator,
           "eta_delay": a.eta_delay, "eta_network": m.eta_network,
           "p_trig_mux": m.p_trig_mux, "q_exact": m.q_exact, "q_lower": m.q_lower,
           "p_single_mux": m.p_single_mux, "p_multi_mux": m.p_multi_mux, **asdict(res)}
    if s.target is not None:
        rec.update(m=s.target.m, rate_hz=m_photon_rate(s.target, m.q_exact),
                   p_multi_m=m_photon_multi(m.p_multi_mux, s.target.m))
    return rec


def _emit(tables: list[OutputTable], args: argparse.Namespace) -> None:
    if args.out:
        for t in tables:
            print(t.write(args.out))
    else:
        for t in tables:
            sys.stdout.write(t.to_csv())


def cmd_hsps(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    table = OutputTable.from_records(_points(scenario, _hsps_record), "hsps", _metadata(scenario, args))
    _emit([table], args)
    return EXIT_OK


def cmd_mux(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    table = OutputTable.from_records(_points(scenario, _mux_record), "mux", _metadata(scenario, args))
    _emit([table], args)
    return EXIT_OK


def _component_loss_db(a: ArchitectureSpec) -> float:
    from muxdesigner.photonics import transmission_to_db

    eta = a.eta_coupler if a.arch is Architecture.GMZ else a.eta_switch
    return transmission_to_db(eta)


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = load_scenario(args)
    a, src, det = scenario.architecture, scenario.source, scenario.detector
    if scenario.target is not None:
        sol = max_tolerable_switch_loss(a.arch, scenario.target, src, det, eta_delay=a.eta_delay,
                                        eta_modulator=a.eta_modulator, n_cap=args.n_cap,
                                        fraction=args.fraction)
        mode = "max_tolerable_loss"
    elif args.objective == "q_star":
        sol = optimal_source_count(a.arch, _component_loss_db(a), herald_trigger_prob(src, det),
                                   p_single=heralded_single_prob(src, det), eta_delay=a.eta_delay,
                                   eta_modulator=a.eta_modulator, n_cap=args.n_cap, fraction=args.fraction)
        mode = "optimal_count"
    else:
        sol = optimal_source_count_exact(a.arch, _component_loss_db(a), src, det, eta_delay=a.eta_delay,
                                         eta_modulator=a.eta_modulator, n_cap=args.n_cap,
                                         fraction=args.fraction)
        mode = "optimal_count"
    rec = {"mode": mode, "arch": sol.arch.value, "objective": sol.objective, "n_opt": sol.n_opt,
           "q_at_opt": sol.q_at_opt, "loss_db": sol.loss_db, "eta_component": db_to_transmission(sol.loss_db),
           "p_multi_at_opt": sol.p_multi_at_opt, "p_multi_m": sol.p_multi_m, "rate_hz": sol.rate_hz,
           "saturated": sol.saturated, "capped": sol.capped, **asdict(sol.resources)}
    meta = _metadata(scenario, args, n_cap=args.n_cap)
    _emit([OutputTable.from_records([rec], "optimize", meta)], args)
    return EXIT_OK


def cmd_figure(args: argparse.Namespace) -> int:
    if args.name not in FIGURES:
        print(f"error: unknown figure {args.name!r}; valid names: {', '.join(FIGURES)}", file=sys.stderr)
        return EXIT_USAGE
    overrides: dict[str, Any] = {"n_cap": args.n_cap}
    flags = _flag_params(args)
    file_params: dict[str, Any] = {}
    if args.config:
        scenario = load_scenario(args)
        file_params = scenario.params
    params = _merge(file_params, flags)
    if args.name.startswith("fig7"):
        if "p_pair" in params:
            overrides["p_pair"] = float(params["p_pair"])
        elif "xi2" in params:
            xi2 = float(params["xi2"])
            overrides["p_pair"] = xi2 * (1 - xi2)
        if "eta_i" in params:
            overrides["eta_values"] = [float(params["eta_i"])]
        if "eta_s" in params:
            overrides["eta_s"] = float(params["eta_s"])
        if "detector" in params:
            overrides["detector"] = params["detector"]
        for key in ("rep_rate_hz", "target_rate_hz"):
            if key in params:
                overrides[key] = float(params[key])
    elif args.name.startswith("fig2"):
        if "eta_s" in params:
            overrides["eta_s"] = float(params["eta_s"])
        if "xi2" in params:
            overrides["xi2_values"] = [float(params["xi2"])]
    elif args.name == "fig6b" and args.fraction is not None:
        overrides["fraction"] = args.fraction
    try:
        tables = figure_tables(args.name, **overrides)
    except DomainError as exc:
        raise ConfigError(args.name, str(exc)) from None
    for t in tables:
        t.metadata = {**_metadata(None, args, figure=args.name, convention=CONVENTION), **t.metadata}
    _emit(tables, args)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    table, failures = run_validation(trials=args.trials, seed=args.seed, tolerance=args.tolerance,
                                     z_max=args.z_max)
    table.metadata = _metadata(None, args, seed=args.seed, trials=args.trials,
                               tolerance=args.tolerance, z_max=args.z_max, convention=CONVENTION)
    _emit([table], args)
    for row in failures:
        print("FAIL " + " ".join(f"{c}={v}" for c, v in zip(table.columns, row)), file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML scenario file; flags override its values")
    p.add_argument("--out", help="output directory (default: stdout)")
    strength = p.add_mutually_exclusive_group()
    strength.add_argument("--p-pair", dest="p_pair", type=float)
    strength.add_argument("--xi2", type=float)
    p.add_argument("--eta-i", dest="eta_i", type=float, help="idler collection and detection efficiency")
    p.add_argument("--eta-s", dest="eta_s", type=float, help="signal-arm transmission")
    p.add_argument("--purity", type=float)
    p.add_argument("--detector", choices=["td", "nrd"])
    p.add_argument("--arch", choices=["logtree", "gmz", "chain"])
    p.add_argument("--n-sources", dest="n_sources", type=int)
    for c in COMPONENTS:
        g = p.add_mutually_exclusive_group()
        g.add_argument(f"--loss-db-{c}", dest=f"loss_db_{c}", type=float, help=f"{c} loss in dB")
        g.add_argument(f"--eta-{c}", dest=f"eta_{c}", type=float, help=f"{c} transmission")
    p.add_argument("--m", type=int, help="photons per event in the M-photon target")
    p.add_argument("--rep-rate", dest="rep_rate_hz", type=float)
    p.add_argument("--target-rate", dest="target_rate_hz", type=float)
    p.add_argument("--n-cap", dest="n_cap", type=int, default=DEFAULT_N_CAP)
    p.add_argument("--fraction", type=float, help="chain length as a fraction of the infinite-chain limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muxdesigner", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"muxdesigner {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hsps", help="heralded-source statistics")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_hsps)

    p = sub.add_parser("mux", help="multiplexed-source statistics")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_mux)

    p = sub.add_parser("optimize", help="optimal source count, or max tolerable loss when --m is given")
    _add_scenario_flags(p)
    p.add_argument("--objective", choices=["q_exact", "q_star"], default="q_exact")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("figure", help="write the data series of one figure as CSV files")
    p.add_argument("name", help=f"one of: {', '.join(FIGURES)}")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="closed forms vs truncated sums and Monte Carlo")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--tolerance", type=float, default=1e-10, help="truncated-sum tolerance")
    p.add_argument("--z-max", dest="z_max", type=float, default=5.0, help="Monte Carlo limit in standard errors")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc} (achieved {exc.achieved_rate_hz:.6g} Hz)", file=sys.stderr)
        return EXIT_FAIL
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
