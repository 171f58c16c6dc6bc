"""Parameter-grid harnesses: U-V phase diagrams, ramp-time and cutoff scans."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import observables as obs
from .dynamics import DEFAULT_CADENCE, IntegrationError, evolve, target_state
from .hamiltonians import AnnealParams

WORKERS_ENV = "CAVITY_ANNEAL_WORKERS"

DEFAULT_U_GRID = tuple(np.round(np.arange(0.0, 1.0 + 1e-9, 0.05), 10))
DEFAULT_V_GRID = tuple(np.round(np.arange(1.0, 1.2 + 1e-9, 0.01), 10))
DEFAULT_TF_GRID = (100.0, 200.0, 400.0, 800.0, 1300.0, 2000.0)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def grid_from_spec(spec: str) -> tuple[float, ...]:
    """Parse ``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    spec = spec.strip()
    if ":" in spec:
        parts = [float(p) for p in spec.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"grid {spec!r} must be a:b:step with step > 0 and b >= a")
        a, b, step = parts
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return tuple(float(np.round(a + k * step, 10)) for k in range(n))
    vals = tuple(float(v) for v in spec.split(",") if v.strip())
    if not vals:
        raise ValueError(f"empty grid {spec!r}")
    return vals


@dataclass
class CellResult:
    index: tuple
    params: AnnealParams
    final_fidelity: float = math.nan
    final_entropy: float = math.nan
    max_entropy: float = math.nan
    p_site3: float = math.nan
    photon_distribution: Optional[list] = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    @property
    def neg_log_infidelity(self) -> float:
        inf = 1.0 - self.final_fidelity
        if not math.isfinite(inf):
            return math.nan
        return -math.log10(max(inf, 1e-16))

    @property
    def params_hash(self) -> str:
        return self.params.digest()


@dataclass
class SweepResult:
    kind: str
    axes: list  # [(name, grid), ...]
    cells: dict  # index tuple -> CellResult
    provenance: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(g) for _, g in self.axes)

    def grid(self, attr: str) -> np.ndarray:
        """Cell attribute as an array shaped like the axes (failed cells are NaN)."""
        out = np.full(self.shape, np.nan)
        for idx, cell in self.cells.items():
            if cell.ok:
                out[idx] = getattr(cell, attr)
        return out

    def rows(self) -> list[dict]:
        rows = []
        for idx in itertools.product(*(range(len(g)) for _, g in self.axes)):
            cell = self.cells[idx]
            row = {name: grid[i] for (name, grid), i in zip(self.axes, idx)}
            row.update(
                model=cell.params.model,
                final_fidelity=cell.final_fidelity,
                neg_log10_infidelity=cell.neg_log_infidelity,
                final_entropy_nats=cell.final_entropy,
                max_entropy_nats=cell.max_entropy,
                p_site3=cell.p_site3,
                params_hash=cell.params_hash,
                error=cell.error,
            )
            if cell.photon_distribution is not None:
                for n, p in enumerate(cell.photon_distribution):
                    row[f"P_mode1_{n}"] = p
            rows.append(row)
        return rows


def run_cell(index: tuple, params: AnnealParams, cadence: int = DEFAULT_CADENCE,
             photon_stats: bool = False) -> CellResult:
    cell = CellResult(index=index, params=params)
    try:
        rec = evolve(params, cadence=cadence, target=target_state(params))
    except (IntegrationError, ValueError, FloatingPointError) as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
        return cell
    cell.final_fidelity = rec.final_fidelity
    cell.p_site3 = float(rec.p_site3[-1])
    if params.model == "full":
        cell.final_entropy = rec.final_entropy
        cell.max_entropy = rec.max_entropy
        if photon_stats:
            cell.photon_distribution = obs.photon_distribution(rec.final_state, mode=1).tolist()
    return cell


def _run_star(args):
    return run_cell(*args)


def run_cells(tasks: Sequence[tuple], workers: int = 1) -> dict:
    """Evaluate ``(index, params, cadence, photon_stats)`` tasks; merge by index."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_star, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_star(t) for t in tasks]
    return {r.index: r for r in results}


def _provenance(kind: str, params: AnnealParams, cadence: int, axes) -> dict:
    prov = {"sweep": kind, "code_version": __version__, "cadence": cadence, "entropy_base": "e"}
    prov.update({f"base.{k}": v for k, v in params.to_dict().items()})
    for name, grid in axes:
        prov[f"axis.{name}"] = ",".join(str(g) for g in grid)
    return prov


def phase_diagram(model: str, U_grid: Sequence[float], V_grid: Sequence[float],
                  params: AnnealParams, workers: int = 1,
                  cadence: int = DEFAULT_CADENCE) -> SweepResult:
    """Final fidelity (and entanglement for the full model) on a U x V grid."""
    if model not in ("full", "semiclassical", "adiabatic"):
        raise ValueError(f"unknown model {model!r}")
    if not len(U_grid) or not len(V_grid):
        raise ValueError("phase diagram grids must be non-empty")
    axes = [("U", tuple(U_grid)), ("V", tuple(V_grid))]
    tasks = [
        ((i, j), params.replace(model=model, U=float(u), V=float(v)), cadence, False)
        for i, u in enumerate(U_grid)
        for j, v in enumerate(V_grid)
    ]
    cells = run_cells(tasks, workers)
    return SweepResult("phase_diagram", axes, cells, _provenance("phase_diagram", params.replace(model=model), cadence, axes))


def ramp_time_scan(models: Sequence[str], tf_grid: Sequence[float], params: AnnealParams,
                   workers: int = 1, cadence: int = DEFAULT_CADENCE) -> SweepResult:
    tf_grid = tuple(float(t) for t in tf_grid)
    if not tf_grid or any(t <= 0 for t in tf_grid) or list(tf_grid) != sorted(tf_grid):
        raise ValueError("t_f grid must be positive and ascending")
    axes = [("model", tuple(models)), ("t_f", tf_grid)]
    tasks = [
        ((i, j), params.replace(model=m, t_f=t), cadence, False)
        for i, m in enumerate(models)
        for j, t in enumerate(tf_grid)
    ]
    return SweepResult("ramp_time_scan", axes, run_cells(tasks, workers),
                       _provenance("ramp_time_scan", params, cadence, axes))


def cutoff_scan(nc_set: Sequence[int], tf_grid: Sequence[float], params: AnnealParams,
                workers: int = 1, cadence: int = DEFAULT_CADENCE) -> SweepResult:
    nc_set = tuple(int(n) for n in nc_set)
    if not nc_set or not set(nc_set) <= {1, 2, 3, 4}:
        raise ValueError("cutoff set must be a non-empty subset of {1, 2, 3, 4}")
    tf_grid = tuple(float(t) for t in tf_grid)
    if not tf_grid or any(t <= 0 for t in tf_grid) or list(tf_grid) != sorted(tf_grid):
        raise ValueError("t_f grid must be positive and ascending")
    axes = [("nc", nc_set), ("t_f", tf_grid)]
    tasks = [
        ((i, j), params.replace(model="full", nc=n, t_f=t), cadence, True)
        for i, n in enumerate(nc_set)
        for j, t in enumerate(tf_grid)
    ]
    return SweepResult("cutoff_scan", axes, run_cells(tasks, workers),
                       _provenance("cutoff_scan", params.replace(model="full"), cadence, axes))
