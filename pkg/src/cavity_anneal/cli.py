"""Command-line front end.

Usage::

    cavity-anneal <subcommand> [--config FILE] [--out DIR] [--J ...] ...

Subcommands: spectrum, gap-scan, anneal, ramp-scan, phase-diagram, cutoff-scan.
Configuration is resolved as defaults < ``key = value`` config file < flags.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import observables as obs
from . import spectrum as spec
from . import svgplot
from . import sweeps
from .dynamics import DEFAULT_CADENCE, IntegrationError, evolve
from .hamiltonians import MODELS, AnnealParams
from .output import columns_to_rows, write_csv

SUBCOMMANDS = ("spectrum", "gap-scan", "anneal", "ramp-scan", "phase-diagram", "cutoff-scan")

# config key -> AnnealParams field
PARAM_KEYS = {
    "J": "J", "U": "U", "V": "V", "Jt": "Jt_final", "Delta": "Delta", "kappa": "kappa",
    "nc": "nc", "t_f": "t_f", "dt": "dt", "L": "L", "N": "N",
}
INT_KEYS = {"nc", "L", "N", "workers", "cadence", "n_levels", "n_grid"}
STR_KEYS = {"model", "out", "grid_U", "grid_V", "tf_grid", "nc_set", "plots"}
CONFIG_KEYS = set(PARAM_KEYS) | INT_KEYS | STR_KEYS


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: AnnealParams
    out: Path = Path("out")
    models: tuple = ("full",)
    grid_U: tuple = sweeps.DEFAULT_U_GRID
    grid_V: tuple = sweeps.DEFAULT_V_GRID
    tf_grid: tuple = sweeps.DEFAULT_TF_GRID
    nc_set: tuple = (1, 2, 3)
    workers: int = 1
    cadence: int = DEFAULT_CADENCE
    plots: bool = True
    n_levels: int = spec.DEFAULT_LEVELS
    n_grid: int = spec.DEFAULT_GRID
    resolved: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        prov = {"subcommand": self.subcommand, "code_version": __version__}
        prov.update(self.resolved)
        return prov


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key = key.strip().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = val.strip()
    return values


def _default_models(subcommand: str) -> str:
    return {
        "ramp-scan": "full,adiabatic",
        "phase-diagram": "semiclassical,full",
        "cutoff-scan": "full",
    }.get(subcommand, "full")


def resolve(subcommand: str, file_values: dict, flag_values: dict) -> RunConfig:
    merged = {k: v for k, v in file_values.items()}
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    unknown = set(merged) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def num(key, cast=float):
        try:
            return cast(merged[key])
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {merged[key]!r}") from None

    pkw = {}
    for key, name in PARAM_KEYS.items():
        if key in merged:
            pkw[name] = num(key, int if key in INT_KEYS else float)
    models_spec = str(merged.get("model", _default_models(subcommand)))
    models = tuple(m.strip() for m in models_spec.split(",") if m.strip())
    for m in models:
        if m not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {m!r}")
    if subcommand in ("spectrum", "gap-scan", "anneal") and len(models) != 1:
        raise ConfigError(f"{subcommand} takes a single model")
    if subcommand in ("spectrum", "gap-scan") and models[0] == "semiclassical":
        raise ConfigError("spectra are defined for the full and adiabatic models only")
    try:
        params = AnnealParams(model=models[0], **pkw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    cfg = RunConfig(subcommand=subcommand, params=params, models=models)
    try:
        if "out" in merged:
            cfg.out = Path(merged["out"])
        if "grid_U" in merged:
            cfg.grid_U = sweeps.grid_from_spec(merged["grid_U"])
        if "grid_V" in merged:
            cfg.grid_V = sweeps.grid_from_spec(merged["grid_V"])
        elif subcommand == "gap-scan":
            cfg.grid_V = sweeps.grid_from_spec("1.0:1.2:0.01")
        if "tf_grid" in merged:
            cfg.tf_grid = sweeps.grid_from_spec(merged["tf_grid"])
        if "nc_set" in merged:
            cfg.nc_set = tuple(int(float(x)) for x in sweeps.grid_from_spec(merged["nc_set"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.workers = num("workers", int) if "workers" in merged else sweeps.default_workers()
    if "cadence" in merged:
        cfg.cadence = num("cadence", int)
    if "n_levels" in merged:
        cfg.n_levels = num("n_levels", int)
    if "n_grid" in merged:
        cfg.n_grid = num("n_grid", int)
    if "plots" in merged:
        p = str(merged["plots"]).lower()
        if p not in ("on", "off"):
            raise ConfigError(f"plots must be on or off, got {merged['plots']!r}")
        cfg.plots = p == "on"
    if cfg.workers < 1 or cfg.cadence < 1 or cfg.n_grid < 2 or cfg.n_levels < 1:
        raise ConfigError("workers, cadence, n_levels must be >= 1 and n_grid >= 2")
    if subcommand == "cutoff-scan" and not set(cfg.nc_set) <= {1, 2, 3, 4}:
        raise ConfigError("nc-set must be a subset of {1,2,3,4}")
    if subcommand in ("ramp-scan", "cutoff-scan"):
        if any(t <= 0 for t in cfg.tf_grid) or list(cfg.tf_grid) != sorted(cfg.tf_grid):
            raise ConfigError("tf-grid must be positive and ascending")

    cfg.resolved = {k: getattr(params, name) for k, name in PARAM_KEYS.items()}
    cfg.resolved.update(
        model=",".join(models),
        grid_U=",".join(repr(float(u)) for u in cfg.grid_U),
        grid_V=",".join(repr(float(v)) for v in cfg.grid_V),
        tf_grid=",".join(repr(float(t)) for t in cfg.tf_grid),
        nc_set=",".join(str(n) for n in cfg.nc_set),
        cadence=cfg.cadence,
        n_levels=cfg.n_levels,
        n_grid=cfg.n_grid,
    )
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cavity-anneal", description=__doc__.split("\n\n")[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="plain 'key = value' file; flags override it")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--model", help="full, adiabatic or semiclassical (comma list for scans)")
    for key in ("J", "U", "V", "Jt", "Delta", "kappa", "t_f", "dt"):
        p.add_argument(f"--{key}", dest=key, metavar="X")
    p.add_argument("--nc", metavar="N")
    p.add_argument("--grid-U", dest="grid_U", metavar="A:B:STEP")
    p.add_argument("--grid-V", dest="grid_V", metavar="A:B:STEP")
    p.add_argument("--tf-grid", dest="tf_grid", metavar="T1,T2,...")
    p.add_argument("--nc-set", dest="nc_set", metavar="1,2,3")
    p.add_argument("--workers", metavar="N", help=f"worker processes (default ${sweeps.WORKERS_ENV} or 1)")
    p.add_argument("--cadence", metavar="STEPS", help="observer sampling interval in steps")
    p.add_argument("--n-levels", dest="n_levels", metavar="N")
    p.add_argument("--n-grid", dest="n_grid", metavar="N")
    p.add_argument("--plots", choices=("on", "off"))
    return p


# -- subcommands ---------------------------------------------------------------


def _run_spectrum(cfg: RunConfig) -> str:
    sw = spec.spectrum_sweep(cfg.params, n_levels=cfg.n_levels, n_grid=cfg.n_grid)
    gap = spec.minimal_gap(sw) if cfg.n_levels >= 2 else None
    cols = {"s": sw.s, "Jt": sw.Jt}
    for k in range(sw.n_levels):
        cols[f"E{k + 1}_rel"] = sw.levels[:, k]
    prov = cfg.provenance()
    if gap is not None:
        prov.update(minimal_gap=gap.gap, s_at_min=gap.s_at_min, gap_refined=gap.refined)
    write_csv(cfg.out / "spectrum.csv", columns_to_rows(cols), prov)
    if cfg.plots:
        svgplot.line_plot(cfg.out / "spectrum.svg", sw.Jt,
                          {f"E{k + 1}-E1": sw.levels[:, k] for k in range(sw.n_levels)},
                          title=f"Spectrum ({cfg.params.model})", xlabel="pump Jt", ylabel="E - E0")
    if gap is None:
        return "spectrum written (single level, no gap)"
    flag = "" if gap.refined else " (unrefined: grid endpoint)"
    return (f"minimal gap {gap.gap:.6g} at s={gap.s_at_min:.4f} "
            f"(Jt={gap.s_at_min * cfg.params.Jt_final:.4f}){flag}")


def _run_gap_scan(cfg: RunConfig) -> str:
    pairs = spec.gap_vs_impurity(cfg.params, cfg.grid_V, n_grid=cfg.n_grid)
    write_csv(cfg.out / "gap_scan.csv", [{"V": v, "minimal_gap": g} for v, g in pairs], cfg.provenance())
    if cfg.plots:
        svgplot.line_plot(cfg.out / "gap_scan.svg", [v for v, _ in pairs], {"gap": [g for _, g in pairs]},
                          title="Minimal gap vs impurity", xlabel="V", ylabel="min(E1-E0)")
    gaps = np.array([g for _, g in pairs])
    mono = "monotone increasing" if np.all(np.diff(gaps) > 0) else "NOT monotone"
    return f"gap from {gaps[0]:.6g} (V={pairs[0][0]:g}) to {gaps[-1]:.6g} (V={pairs[-1][0]:g}), {mono}"


def _run_anneal(cfg: RunConfig) -> str:
    rec = evolve(cfg.params, cadence=cfg.cadence)
    prov = cfg.provenance()
    prov.update(final_fidelity=rec.final_fidelity, target_gap=rec.target.gap,
                target_degenerate=rec.target.degenerate)
    name = f"anneal_{cfg.params.model}"
    write_csv(cfg.out / f"{name}.csv", columns_to_rows(rec.columns()), prov)
    if cfg.plots:
        occ = {f"n{k + 1}": rec.occupations[:, k] for k in range(rec.occupations.shape[1])}
        svgplot.line_plot(cfg.out / f"{name}_occupations.svg", rec.times, occ,
                          title="Site occupations", xlabel="t", ylabel="<n_k>")
        svgplot.line_plot(cfg.out / f"{name}_fidelity.svg", rec.times,
                          {"fidelity": rec.fidelity, "P(n3=2)": rec.p_site3},
                          title="Fidelity to target", xlabel="t", ylabel="probability")
        if rec.photons is not None:
            svgplot.line_plot(cfg.out / f"{name}_photons.svg", rec.pump,
                              {"mode 1": rec.photons[:, 0], "mode 2": rec.photons[:, 1],
                               "sum": rec.photons.sum(axis=1)},
                              title="Photon numbers", xlabel="pump Jt", ylabel="<a+a>")
            svgplot.line_plot(cfg.out / f"{name}_entropy.svg", rec.times, {"S": rec.entropy},
                              title="Atom-field entanglement", xlabel="t", ylabel="S [nats]")
    msg = f"final fidelity {rec.final_fidelity:.6f}, P(n3=2) {rec.p_site3[-1]:.6f}"
    if rec.entropy is not None:
        msg += f", final entropy {rec.final_entropy:.3e}, max entropy {rec.max_entropy:.4f}"
    return msg


def _sweep_outputs(cfg: RunConfig, result: sweeps.SweepResult, name: str):
    prov = cfg.provenance()
    prov.update({f"sweep.{k}": v for k, v in result.provenance.items() if not k.startswith("base.")})
    write_csv(cfg.out / f"{name}.csv", result.rows(), prov)
    failed = [c for c in result.cells.values() if not c.ok]
    return failed


def _report_failures(failed) -> None:
    for c in failed:
        print(f"cell {c.index} failed ({c.params.to_dict()}): {c.error}", file=sys.stderr)


def _run_ramp_scan(cfg: RunConfig):
    res = sweeps.ramp_time_scan(cfg.models, cfg.tf_grid, cfg.params, cfg.workers, cfg.cadence)
    failed = _sweep_outputs(cfg, res, "ramp_scan")
    if cfg.plots:
        nli = res.grid("neg_log_infidelity")
        fid = res.grid("final_fidelity")
        svgplot.line_plot(cfg.out / "ramp_scan_fidelity.svg", cfg.tf_grid,
                          {m: fid[i] for i, m in enumerate(cfg.models)},
                          title="Final fidelity", xlabel="t_f", ylabel="F")
        svgplot.line_plot(cfg.out / "ramp_scan_neglog.svg", cfg.tf_grid,
                          {m: nli[i] for i, m in enumerate(cfg.models)},
                          title="-log10(1-F)", xlabel="t_f", ylabel="-log10 infidelity")
    parts = []
    for i, m in enumerate(cfg.models):
        nli = res.grid("neg_log_infidelity")[i]
        if np.all(np.isnan(nli)):
            parts.append(f"{m}: all cells failed")
            continue
        k = int(np.nanargmax(nli))
        parts.append(f"{m}: best -log10(1-F)={nli[k]:.3f} at t_f={cfg.tf_grid[k]:g}")
    return "; ".join(parts), failed


def _run_phase_diagram(cfg: RunConfig):
    parts, failed = [], []
    for m in cfg.models:
        res = sweeps.phase_diagram(m, cfg.grid_U, cfg.grid_V, cfg.params, cfg.workers, cfg.cadence)
        failed += _sweep_outputs(cfg, res, f"phase_diagram_{m}")
        fid = res.grid("final_fidelity")
        if cfg.plots:
            svgplot.heatmap(cfg.out / f"phase_diagram_{m}.svg", cfg.grid_U, cfg.grid_V, fid,
                            title=f"Final fidelity ({m})", xlabel="U", ylabel="V", label="F")
            if m == "full":
                svgplot.heatmap(cfg.out / "max_entropy_full.svg", cfg.grid_U, cfg.grid_V,
                                res.grid("max_entropy"), title="Max entanglement (full)",
                                xlabel="U", ylabel="V", label="S [nats]")
        parts.append(f"{m}: fidelity < 0.5 in {int(np.nansum(fid < 0.5))}/{fid.size} cells")
    return "; ".join(parts), failed


def _run_cutoff_scan(cfg: RunConfig):
    res = sweeps.cutoff_scan(cfg.nc_set, cfg.tf_grid, cfg.params, cfg.workers, cfg.cadence)
    failed = _sweep_outputs(cfg, res, "cutoff_scan")
    nli = res.grid("neg_log_infidelity")
    if cfg.plots:
        svgplot.line_plot(cfg.out / "cutoff_scan_neglog.svg", cfg.tf_grid,
                          {f"nc={n}": nli[i] for i, n in enumerate(cfg.nc_set)},
                          title="-log10(1-F) by photon cutoff", xlabel="t_f", ylabel="-log10 infidelity")
        svgplot.line_plot(cfg.out / "cutoff_scan_entropy.svg", cfg.tf_grid,
                          {**{f"final nc={n}": res.grid("final_entropy")[i] for i, n in enumerate(cfg.nc_set)},
                           **{f"max nc={n}": res.grid("max_entropy")[i] for i, n in enumerate(cfg.nc_set)}},
                          title="Entanglement by photon cutoff", xlabel="t_f", ylabel="S [nats]")
    best = {n: np.nanmax(nli[i]) for i, n in enumerate(cfg.nc_set)}
    return ", ".join(f"nc={n}: best -log10(1-F)={v:.3f}" for n, v in best.items()), failed


RUNNERS = {
    "spectrum": _run_spectrum,
    "gap-scan": _run_gap_scan,
    "anneal": _run_anneal,
    "ramp-scan": _run_ramp_scan,
    "phase-diagram": _run_phase_diagram,
    "cutoff-scan": _run_cutoff_scan,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "config")}
    try:
        file_values = read_config_file(ns.config) if ns.config else {}
        cfg = resolve(ns.subcommand, file_values, flags)
    except (ConfigError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"cavity-anneal: error: {exc}", file=sys.stderr)
        return 2
    try:
        result = RUNNERS[cfg.subcommand](cfg)
    except IntegrationError as exc:
        print(f"numerical abort ({cfg.params.to_dict()}): {exc}", file=sys.stderr)
        return 1
    summary, failed = result if isinstance(result, tuple) else (result, [])
    print(f"{cfg.subcommand}: {summary}")
    if failed:
        _report_failures(failed)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
