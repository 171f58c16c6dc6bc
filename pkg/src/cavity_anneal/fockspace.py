"""Truncated bosonic Fock spaces and the dense linear algebra built on them.

Two kinds of factor space are used throughout the package:

* a *lattice* basis holding ``N`` bosons on ``L`` sites (fixed particle number
  sector, dimension ``C(N+L-1, L-1)``), and
* a *mode* basis for one cavity field truncated at ``nc`` photons.

Composite spaces are Kronecker products in the fixed order
``[lattice, mode1, mode2]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

LATTICE = "lattice"
MODE = "mode"

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FockBasis:
    """Ordered occupation-number basis of a single factor space.

    For ``kind == "lattice"`` each state is a tuple of site occupations summing
    to ``particles``; for ``kind == "mode"`` each state is a photon number.
    """

    kind: str
    states: tuple
    sites: int = 0
    particles: int = 0
    cutoff: int = 0
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        try:
            return self._index[tuple(state) if self.kind == LATTICE else int(state)]
        except KeyError:
            raise ValueError(f"{state!r} is not a state of this basis") from None

    def basis_vector(self, state) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(state)] = 1.0
        return v


@dataclass(frozen=True)
class CompositeBasis:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("composite basis needs at least one factor")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def product_vector(self, states: Sequence) -> np.ndarray:
        """Amplitudes of the product basis state ``|s0> (x) |s1> (x) ...``."""
        if len(states) != len(self.factors):
            raise ValueError("one state per factor required")
        v = np.ones(1, dtype=complex)
        for f, s in zip(self.factors, states):
            v = np.kron(v, f.basis_vector(s))
        return v


Basis = Union[FockBasis, CompositeBasis]


@dataclass(frozen=True)
class QOperator:
    """A square matrix tied to the basis it acts on."""

    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] != self.basis.dim:
            raise ValueError(f"matrix dim {m.shape[0]} does not match basis dim {self.basis.dim}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> "QOperator":
        return QOperator(self.basis, self.matrix.conj().T)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def _check(self, other: "QOperator"):
        if other.basis != self.basis:
            raise ValueError("operators act on different bases")

    def __add__(self, other: "QOperator") -> "QOperator":
        self._check(other)
        return QOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "QOperator") -> "QOperator":
        self._check(other)
        return QOperator(self.basis, self.matrix - other.matrix)

    def __neg__(self) -> "QOperator":
        return QOperator(self.basis, -self.matrix)

    def __mul__(self, scalar) -> "QOperator":
        return QOperator(self.basis, scalar * self.matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            self._check(other)
            return QOperator(self.basis, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if other.basis != self.basis:
                raise ValueError("operator and state act on different bases")
            return self.matrix @ other.amplitudes
        return self.matrix @ other

    def expect(self, psi: "StateVector") -> complex:
        return complex(np.vdot(psi.amplitudes, self @ psi))


@dataclass(frozen=True)
class StateVector:
    basis: Basis
    amplitudes: np.ndarray
    norm_tol: float = 1e-9

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (self.basis.dim,):
            raise ValueError(f"amplitude shape {a.shape} does not match basis dim {self.basis.dim}")
        if not np.all(np.isfinite(a)):
            raise ValueError("state contains non-finite amplitudes")
        if abs(np.linalg.norm(a) - 1.0) > self.norm_tol:
            raise ValueError(f"state is not normalized (norm={np.linalg.norm(a)!r})")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, basis: Basis, amplitudes) -> "StateVector":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(basis, a / np.linalg.norm(a))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"density matrix shape {m.shape} does not match basis dim {self.basis.dim}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-9:
            raise ValueError(f"density matrix trace is {np.trace(m).real!r}, expected 1")
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


# -- bases -----------------------------------------------------------------


def build_lattice_basis(L: int, N: int) -> FockBasis:
    """All occupation tuples of ``N`` bosons on ``L`` sites, lexicographically sorted."""
    if L < 1:
        raise ValueError(f"lattice needs at least one site, got L={L}")
    if N < 0:
        raise ValueError(f"particle number must be non-negative, got N={N}")
    # stars and bars: choose the L-1 bar positions among N+L-1 slots
    states = []
    for bars in itertools.combinations(range(N + L - 1), L - 1):
        edges = (-1,) + bars + (N + L - 1,)
        states.append(tuple(edges[i + 1] - edges[i] - 1 for i in range(L)))
    return FockBasis(LATTICE, tuple(sorted(states)), sites=L, particles=N)


def build_mode_basis(nc: int) -> FockBasis:
    if nc < 0:
        raise ValueError(f"photon cutoff must be non-negative, got nc={nc}")
    return FockBasis(MODE, tuple(range(nc + 1)), cutoff=nc)


def build_composite(L: int, N: int, nc: int, n_modes: int = 2) -> CompositeBasis:
    lattice = build_lattice_basis(L, N)
    mode = build_mode_basis(nc)
    return CompositeBasis((lattice,) + (mode,) * n_modes)


# -- operators -------------------------------------------------------------


def identity(basis: Basis) -> QOperator:
    return QOperator(basis, np.eye(basis.dim))


def ladder_operator(basis: FockBasis, index: int, kind: str) -> QOperator:
    """Creation, annihilation or number operator for one site or mode.

    On a lattice basis only ``kind="number"`` is available: a single ladder
    operator leaves the fixed-N sector, so use :func:`hopping_operator` for
    the bilinears ``b_i^dagger b_j``.
    """
    if kind not in ("create", "annihilate", "number"):
        raise ValueError(f"unknown operator kind {kind!r}")
    if basis.kind == MODE:
        if index != 0:
            raise IndexError(f"mode basis has a single index 0, got {index}")
        n = np.arange(basis.dim, dtype=float)
        if kind == "number":
            return QOperator(basis, np.diag(n))
        a = np.diag(np.sqrt(n[1:]), 1)
        return QOperator(basis, a if kind == "annihilate" else a.T.copy())

    if not 0 <= index < basis.sites:
        raise IndexError(f"site index {index} out of range for {basis.sites} sites")
    if kind != "number":
        raise ValueError("single ladder operators leave the fixed-N sector; use hopping_operator")
    return QOperator(basis, np.diag([float(s[index]) for s in basis.states]))


def hopping_operator(basis: FockBasis, i: int, j: int) -> QOperator:
    """``b_i^dagger b_j`` restricted to the fixed-N lattice sector."""
    if basis.kind != LATTICE:
        raise ValueError("hopping operators need a lattice basis")
    for k in (i, j):
        if not 0 <= k < basis.sites:
            raise IndexError(f"site index {k} out of range for {basis.sites} sites")
    m = np.zeros((basis.dim, basis.dim))
    for col, s in enumerate(basis.states):
        if s[j] == 0:
            continue
        t = list(s)
        amp = np.sqrt(t[j])
        t[j] -= 1
        amp *= np.sqrt(t[i] + 1)
        t[i] += 1
        m[basis.index(t), col] += amp
    return QOperator(basis, m)


def embed(op: QOperator, composite: CompositeBasis, slot: int) -> QOperator:
    """Lift ``op`` to the composite space, identity on every other factor."""
    if not 0 <= slot < len(composite.factors):
        raise IndexError(f"slot {slot} out of range")
    if op.basis != composite.factors[slot]:
        raise ValueError(f"operator basis does not match composite factor {slot}")
    m = np.ones((1, 1))
    for k, f in enumerate(composite.factors):
        m = np.kron(m, op.matrix if k == slot else np.eye(f.dim))
    return QOperator(composite, m)


def _as_array(x) -> np.ndarray:
    if isinstance(x, (StateVector, DensityMatrix)):
        return x.amplitudes if isinstance(x, StateVector) else x.matrix
    return np.asarray(x, dtype=complex)


def partial_trace(state, composite: CompositeBasis, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix on the factors listed in ``keep``.

    ``state`` may be a :class:`StateVector`, a :class:`DensityMatrix` or a raw
    vector/matrix over ``composite``.
    """
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= len(composite.factors):
        raise IndexError(f"keep slots {keep} out of range")
    dims = composite.dims
    traced = [k for k in range(len(dims)) if k not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    kept_basis = (
        composite.factors[keep[0]] if len(keep) == 1
        else CompositeBasis(tuple(composite.factors[k] for k in keep))
    )
    arr = _as_array(state)
    if arr.ndim == 1:
        psi = arr.reshape(dims).transpose(keep + traced).reshape(dk, -1)
        rho = psi @ psi.conj().T
    else:
        n = len(dims)
        r = arr.reshape(dims + dims)
        # contract each traced ket axis with its bra axis
        letters = "abcdefghijklmnopqrstuvwxyz"
        ket = list(letters[:n])
        bra = list(letters[n:2 * n])
        for k in traced:
            bra[k] = ket[k]
        out = "".join(ket[k] for k in keep) + "".join(bra[k] for k in keep)
        rho = np.einsum("".join(ket) + "".join(bra) + "->" + out, r).reshape(dk, dk)
    return DensityMatrix(kept_basis, 0.5 * (rho + rho.conj().T))
