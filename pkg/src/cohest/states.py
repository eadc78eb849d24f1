"""GHZ, graph and linear-cluster states, global depolarizing noise, entropies.

Qubit 0 is the most significant bit of the computational-basis index, so
``|a_0 a_1 ... a_{n-1}>`` sits at index ``sum(a_q * 2**(n-1-q))``.
Edges are 0-based qubit index pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EtaOutOfRange, InvalidEdge, InvalidState, NotHermitian
from .tensor_core import CLAMP_TOL, HERMITIAN_TOL, clamp_spectrum, hermitian_eigenvalues, is_hermitian


def qubit_bits(n: int) -> np.ndarray:
    """(d, n) array with bit q of every basis index, qubit 0 first."""
    idx = np.arange(2**n)
    shifts = np.arange(n - 1, -1, -1)
    return (idx[:, None] >> shifts[None, :]) & 1


@dataclass(frozen=True)
class PureState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n:
            raise InvalidState(f"expected {2**self.n} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > HERMITIAN_TOL:
            raise InvalidState(f"state norm {norm!r} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return 2**self.n

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.n, self.projector())

    def diagonal(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = 2**self.n
        if m.shape != (d, d):
            raise InvalidState(f"expected a {d}x{d} matrix, got {m.shape}")
        if not is_hermitian(m):
            raise NotHermitian("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise InvalidState(f"trace {tr!r} is not 1")
        ev = hermitian_eigenvalues(m)
        if ev[-1] < -CLAMP_TOL:
            raise InvalidState(f"negative eigenvalue {ev[-1]:.3e}")
        m.setflags(write=False)
        ev.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_eigenvalues", ev)

    @property
    def d(self) -> int:
        return 2**self.n

    def diagonal(self) -> np.ndarray:
        """Computational-basis populations."""
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, descending, with round-off negatives clamped to zero."""
        return clamp_spectrum(self._eigenvalues)


def ghz(n: int) -> PureState:
    if n < 2:
        raise InvalidState("GHZ needs n >= 2")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(n, amps)


def _check_edges(n: int, edges: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    out = []
    for e in edges:
        if len(e) != 2:
            raise InvalidEdge(f"edge {e!r} is not a pair")
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise InvalidEdge(f"edge {e!r} invalid for {n} qubits")
        out.append((i, j))
    return out


def graph_state(n: int, edges: Iterable[Sequence[int]] = ()) -> PureState:
    """Apply CZ on every edge to |+>^n."""
    if n < 1:
        raise InvalidState("need at least one qubit")
    edges = _check_edges(n, edges)
    bits = qubit_bits(n)
    parity = np.zeros(2**n, dtype=int)
    for i, j in edges:
        parity ^= bits[:, i] & bits[:, j]
    amps = (1 - 2 * parity) / np.sqrt(2**n)
    return PureState(n, amps.astype(complex))


def path_edges(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


def star_edges(n: int, center: int = 0) -> list[tuple[int, int]]:
    return [(center, j) for j in range(n) if j != center]


def linear_cluster(n: int) -> PureState:
    if n < 3:
        raise InvalidState("linear cluster needs n >= 3")
    return graph_state(n, path_edges(n))


def basis_state(n: int, index: int = 0) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return PureState(n, amps)


def maximally_mixed(n: int) -> DensityMatrix:
    d = 2**n
    return DensityMatrix(n, np.eye(d) / d)


def depolarize(psi: PureState, eta: float) -> DensityMatrix:
    """(1 - eta) |psi><psi| + eta I/d."""
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRange(f"eta={eta!r} outside [0, 1]")
    d = psi.d
    return DensityMatrix(psi.n, (1 - eta) * psi.projector() + (eta / d) * np.eye(d))


def _as_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size and p.min() < -CLAMP_TOL:
        raise InvalidState(f"negative probability {p.min():.3e}")
    return np.clip(p, 0.0, None)


def von_neumann(p) -> float:
    """Shannon/von Neumann entropy in bits, with 0 log 0 = 0."""
    p = _as_distribution(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def linear_entropy(p) -> float:
    p = _as_distribution(p)
    return float(1.0 - np.sum(p**2))


def entropies(p) -> tuple[float, float]:
    """(S_VN in bits, S_L) of a probability vector or spectrum."""
    return von_neumann(p), linear_entropy(p)
