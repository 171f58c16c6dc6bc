"""Instantaneous spectra along the pump ramp and minimal-gap extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .hamiltonians import AnnealParams, adiabatic_parts, full_parts

DEFAULT_GRID = 201
DEFAULT_LEVELS = 10


@dataclass(frozen=True)
class SpectrumSweep:
    s: np.ndarray
    Jt: np.ndarray
    levels: np.ndarray  # (n_grid, n_levels), relative to the ground energy
    ground: np.ndarray  # absolute ground energy per grid point

    @property
    def n_levels(self) -> int:
        return self.levels.shape[1]

    def gaps(self) -> np.ndarray:
        return self.levels[:, 1]


class GapResult(NamedTuple):
    gap: float
    s_at_min: float
    refined: bool


def _ramp_parts(params: AnnealParams):
    if params.model == "full":
        h0, h1 = full_parts(params)
        return h0.matrix, h1.matrix, 1
    if params.model == "adiabatic":
        h0, h1 = adiabatic_parts(params)
        return h0.matrix, h1.matrix, 2
    raise ValueError("the semiclassical Hamiltonian has no state-independent spectrum")


def spectrum_sweep(params: AnnealParams, n_levels: int = DEFAULT_LEVELS,
                   n_grid: int = DEFAULT_GRID) -> SpectrumSweep:
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    h0, h1, power = _ramp_parts(params)
    if not 1 <= n_levels <= h0.shape[0]:
        raise ValueError(f"n_levels must be in [1, {h0.shape[0]}]")
    s = np.linspace(0.0, 1.0, n_grid)
    Jt = s * params.Jt_final
    levels = np.empty((n_grid, n_levels))
    ground = np.empty(n_grid)
    for i, j in enumerate(Jt):
        e = np.linalg.eigvalsh(h0 + j**power * h1)[:n_levels]
        ground[i] = e[0]
        levels[i] = e - e[0]
    return SpectrumSweep(s, Jt, levels, ground)


def minimal_gap(sweep: SpectrumSweep) -> GapResult:
    """Smallest ``E1 - E0`` on the grid, refined by a parabola through the neighbours."""
    if sweep.n_levels < 2:
        raise ValueError("minimal_gap needs at least two levels")
    g = sweep.gaps()
    i = int(np.argmin(g))
    if i == 0 or i == len(g) - 1:
        return GapResult(float(g[i]), float(sweep.s[i]), False)
    x0, x1, x2 = sweep.s[i - 1:i + 2]
    y0, y1, y2 = g[i - 1:i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a <= 0:
        return GapResult(float(y1), float(x1), False)
    xv = -b / (2 * a)
    yv = y1 + a * (xv - x1) ** 2 + (2 * a * x1 + b) * (xv - x1)
    return GapResult(float(yv), float(xv), True)


def gap_vs_impurity(params: AnnealParams, V_grid: Sequence[float],
                    n_grid: int = DEFAULT_GRID) -> list[tuple[float, float]]:
    out = []
    for V in V_grid:
        sweep = spectrum_sweep(params.replace(V=float(V)), n_levels=2, n_grid=n_grid)
        out.append((float(V), minimal_gap(sweep).gap))
    return out
