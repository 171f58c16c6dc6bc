"""Model Hamiltonians for two bosons on a four-site ring coupled to two cavity modes.

Energies are in recoil units (hbar = omega_r = 1). Three levels of description
share the Bose-Hubbard part:

``full``
    atoms and both quantised cavity modes, ``H0 + Jt * H1`` on the composite space.
``adiabatic``
    modes eliminated at the operator level, ``H_hub + g(Jt) (M1^2 + M2^2)``.
``semiclassical``
    modes replaced by coherent amplitudes fixed by the instantaneous
    ``<M_m>``, which makes the evolution nonlinear.

with ``g(Jt) = Delta Jt^2 / (kappa^2 + Delta^2)``.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fockspace import (
    CompositeBasis,
    FockBasis,
    QOperator,
    StateVector,
    build_composite,
    build_lattice_basis,
    embed,
    hopping_operator,
    identity,
    ladder_operator,
)

MODELS = ("full", "adiabatic", "semiclassical")


@dataclass(frozen=True)
class AnnealParams:
    J: float = 0.1
    U: float = 0.7
    V: float = 1.1
    Jt_final: float = math.sqrt(5.0)
    Delta: float = -5.0
    kappa: float = 1.0
    nc: int = 3
    L: int = 4
    N: int = 2
    t_f: float = 1000.0
    dt: float = 0.01
    model: str = "full"

    def __post_init__(self):
        for name in ("J", "kappa", "t_f", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.U >= 0:
            raise ValueError(f"U must be >= 0, got {self.U!r}")
        if not self.V >= 1:
            raise ValueError(f"V must be >= 1, got {self.V!r}")
        if not self.Jt_final >= 0:
            raise ValueError(f"Jt_final must be >= 0, got {self.Jt_final!r}")
        if not math.isfinite(self.Delta):
            raise ValueError("Delta must be finite")
        if self.nc < 0:
            raise ValueError(f"nc must be >= 0, got {self.nc!r}")
        if self.L != 4:
            raise ValueError(f"the scattering patterns are defined for L=4 only, got L={self.L}")
        if self.N < 0:
            raise ValueError(f"N must be >= 0, got {self.N!r}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")

    def replace(self, **changes) -> "AnnealParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """Short stable hash of all parameter values."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def prefactor_per_pump2(self) -> float:
        """``Delta / (kappa^2 + Delta^2)``, the effective coupling per unit ``Jt^2``."""
        return self.Delta / (self.kappa**2 + self.Delta**2)

    def lattice_basis(self) -> FockBasis:
        return build_lattice_basis(self.L, self.N)

    def composite_basis(self) -> CompositeBasis:
        return build_composite(self.L, self.N, self.nc)


class ScatteringOps(NamedTuple):
    M1: QOperator
    M2: QOperator


def interaction_prefactor(params: AnnealParams, Jt: float) -> float:
    return params.prefactor_per_pump2 * Jt**2


def scattering_ops(basis: FockBasis, V: float) -> ScatteringOps:
    """Site-signed number sums coupling the atoms to mode 1 and mode 2.

    The impurity enters as the weight ``V`` on site 3 (index 2).
    """
    if basis.kind != "lattice" or basis.sites != 4:
        raise ValueError("scattering operators are defined on a 4-site lattice basis")
    n = [ladder_operator(basis, k, "number").matrix for k in range(4)]
    m1 = -n[0] + n[1] - V * n[2] + n[3]
    m2 = n[0] + n[1] - V * n[2] - n[3]
    return ScatteringOps(QOperator(basis, m1), QOperator(basis, m2))


def h_hubbard(basis: FockBasis, J: float, U: float) -> QOperator:
    """Ring hopping ``J sum (b_k^+ b_{k+1} + h.c.)`` plus on-site ``U/2 n(n-1)``."""
    L = basis.sites
    m = np.zeros((basis.dim, basis.dim))
    bonds = [(k, (k + 1) % L) for k in range(L)] if L > 2 else [(0, 1)] if L == 2 else []
    for i, j in bonds:
        h = hopping_operator(basis, i, j).matrix
        m += J * (h + h.T)
    m += np.diag([0.5 * U * sum(n * (n - 1) for n in s) for s in basis.states])
    return QOperator(basis, m)


def full_parts(params: AnnealParams) -> tuple[QOperator, QOperator]:
    """``(H0, H1)`` with ``H_full(Jt) = H0 + Jt * H1`` on ``[lattice, mode1, mode2]``."""
    comp = params.composite_basis()
    lat, mode = comp.factors[0], comp.factors[1]
    hub = h_hubbard(lat, params.J, params.U)
    ops = scattering_ops(lat, params.V)
    a = ladder_operator(mode, 0, "annihilate")
    x = a + a.dag()
    nphot = ladder_operator(mode, 0, "number")

    h0 = embed(hub, comp, 0) - params.Delta * (embed(nphot, comp, 1) + embed(nphot, comp, 2))
    h1 = embed(ops.M1, comp, 0) @ embed(x, comp, 1) + embed(ops.M2, comp, 0) @ embed(x, comp, 2)
    return h0, h1


def h_full(params: AnnealParams, Jt: float) -> QOperator:
    h0, h1 = full_parts(params)
    return h0 + Jt * h1


def adiabatic_parts(params: AnnealParams) -> tuple[QOperator, QOperator]:
    """``(H0, H1)`` with ``H_ad(Jt) = H0 + Jt^2 * H1`` on the lattice basis."""
    lat = params.lattice_basis()
    ops = scattering_ops(lat, params.V)
    h1 = params.prefactor_per_pump2 * (ops.M1 @ ops.M1 + ops.M2 @ ops.M2)
    return h_hubbard(lat, params.J, params.U), h1


def h_adiabatic(params: AnnealParams, Jt: float) -> QOperator:
    h0, h1 = adiabatic_parts(params)
    return h0 + Jt**2 * h1


def _lattice_amplitudes(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, StateVector) else np.asarray(state, dtype=complex)


def mean_field_alphas(state, params: AnnealParams, Jt: float) -> tuple[complex, complex]:
    """Coherent mode amplitudes ``-i Jt <M_m> / (kappa - i Delta)`` slaved to the atoms."""
    lat = params.lattice_basis()
    ops = scattering_ops(lat, params.V)
    w = np.abs(_lattice_amplitudes(state)) ** 2
    denom = params.kappa - 1j * params.Delta
    return tuple(-1j * Jt * float(w @ np.diag(M.matrix)) / denom for M in ops)


def h_semiclassical(state, params: AnnealParams, Jt: float) -> QOperator:
    lat = params.lattice_basis()
    ops = scattering_ops(lat, params.V)
    w = np.abs(_lattice_amplitudes(state)) ** 2
    g = interaction_prefactor(params, Jt)
    m = h_hubbard(lat, params.J, params.U).matrix.copy()
    eye = np.eye(lat.dim)
    for M in ops:
        mean = float(w @ np.diag(M.matrix))
        m += g * (2.0 * mean * M.matrix - mean**2 * eye)
    return QOperator(lat, m)


def model_hamiltonian(params: AnnealParams, Jt: float, state=None) -> QOperator:
    if params.model == "full":
        return h_full(params, Jt)
    if params.model == "adiabatic":
        return h_adiabatic(params, Jt)
    if state is None:
        raise ValueError("the semiclassical Hamiltonian needs the current atomic state")
    return h_semiclassical(state, params, Jt)


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate ``vec`` so that its largest-magnitude amplitude is real and positive."""
    vec = np.asarray(vec, dtype=complex)
    k = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[k]) / vec[k])


def ground_state(H: QOperator) -> tuple[float, StateVector]:
    if not H.is_hermitian():
        raise ValueError("ground_state needs a Hermitian operator")
    evals, evecs = np.linalg.eigh(H.matrix)
    return float(evals[0]), StateVector(H.basis, fix_phase(evecs[:, 0]))


def lowest_levels(H: QOperator, n: int) -> np.ndarray:
    if not H.is_hermitian():
        raise ValueError("spectrum needs a Hermitian operator")
    return np.linalg.eigvalsh(H.matrix)[:n]
