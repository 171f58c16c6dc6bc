"""Measured quantities: fidelities, occupations, photon statistics, entanglement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fockspace import CompositeBasis, FockBasis, StateVector, partial_trace

EIG_CUTOFF = 1e-14
TARGET_PATTERN = (0, 0, 2, 0)


def _unpack(psi, basis=None):
    if isinstance(psi, StateVector):
        if basis is not None and basis != psi.basis:
            raise ValueError("state basis differs from the basis given")
        return psi.amplitudes, psi.basis
    if basis is None:
        raise ValueError("raw amplitude arrays need an explicit basis")
    a = np.asarray(psi, dtype=complex)
    if a.shape != (basis.dim,):
        raise ValueError(f"amplitude shape {a.shape} does not match basis dim {basis.dim}")
    return a, basis


def _lattice_weights(amps: np.ndarray, basis) -> tuple[np.ndarray, FockBasis]:
    """Probability of each atomic configuration, photons summed out."""
    if isinstance(basis, FockBasis):
        if basis.kind != "lattice":
            raise ValueError("expected a lattice basis")
        return np.abs(amps) ** 2, basis
    lat = basis.factors[0]
    w = np.abs(amps.reshape(lat.dim, -1)) ** 2
    return w.sum(axis=1), lat


def fidelity(psi, phi) -> float:
    """``|<phi|psi>|^2`` between two states on the same basis."""
    if isinstance(psi, StateVector) and isinstance(phi, StateVector):
        if psi.basis != phi.basis:
            raise ValueError("fidelity between states on different bases")
        a, b = psi.amplitudes, phi.amplitudes
    else:
        a = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
        b = phi.amplitudes if isinstance(phi, StateVector) else np.asarray(phi)
        if a.shape != b.shape:
            raise ValueError("fidelity between states of different dimension")
    return float(min(1.0, abs(np.vdot(b, a)) ** 2))


def site_occupations(psi, basis=None) -> np.ndarray:
    amps, basis = _unpack(psi, basis)
    w, lat = _lattice_weights(amps, basis)
    occ = np.array(lat.states, dtype=float)
    return w @ occ


def photon_numbers(psi, basis=None) -> tuple[float, float]:
    amps, basis = _unpack(psi, basis)
    if not isinstance(basis, CompositeBasis) or len(basis.factors) < 3:
        raise ValueError("photon numbers need a state on [lattice, mode1, mode2]")
    d = basis.dims
    w = np.abs(amps.reshape(d[0], d[1], d[2])) ** 2
    n1 = np.arange(d[1]) @ w.sum(axis=(0, 2))
    n2 = np.arange(d[2]) @ w.sum(axis=(0, 1))
    return float(n1), float(n2)


def photon_distribution(psi, basis=None, mode: int = 1) -> np.ndarray:
    """Occupation probabilities ``P(n)`` of one cavity mode (``mode`` is 1 or 2)."""
    amps, basis = _unpack(psi, basis)
    if not isinstance(basis, CompositeBasis) or len(basis.factors) < 3:
        raise ValueError("photon statistics need a state on [lattice, mode1, mode2]")
    d = basis.dims
    w = np.abs(amps.reshape(d[0], d[1], d[2])) ** 2
    return w.sum(axis=(0, 2)) if mode == 1 else w.sum(axis=(0, 1))


def two_atom_prob_site3(psi, basis=None) -> float:
    amps, basis = _unpack(psi, basis)
    w, lat = _lattice_weights(amps, basis)
    return float(w[lat.index(TARGET_PATTERN)])


def von_neumann(eigenvalues) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    lam = lam[lam > EIG_CUTOFF]
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def entanglement_entropy(psi, basis=None, keep=(1, 2)) -> float:
    """Atom-field entanglement in nats, from the reduced density matrix of ``keep``."""
    amps, basis = _unpack(psi, basis)
    if not isinstance(basis, CompositeBasis):
        raise ValueError("entanglement entropy needs a composite state")
    return von_neumann(partial_trace(amps, basis, keep).eigenvalues())


def atomic_marginal_fidelity(psi, target, basis=None) -> float:
    """Weight of the target's dominant atomic Schmidt vector in the atomic marginal of ``psi``."""
    amps, basis = _unpack(psi, basis)
    t_amps, _ = _unpack(target, basis)
    rho_t = partial_trace(t_amps, basis, [0]).matrix
    _, vecs = np.linalg.eigh(rho_t)
    chi = vecs[:, -1]
    rho = partial_trace(amps, basis, [0]).matrix
    return float(np.real(np.vdot(chi, rho @ chi)))


@dataclass(frozen=True)
class EntropyReport:
    times: np.ndarray
    entropy: np.ndarray

    @property
    def max_entropy(self) -> float:
        return float(np.max(self.entropy))

    @property
    def final_entropy(self) -> float:
        return float(self.entropy[-1])


def entropy_bound(basis: CompositeBasis) -> float:
    d_atoms = basis.dims[0]
    d_fields = int(np.prod(basis.dims[1:]))
    return float(np.log(min(d_atoms, d_fields)))
