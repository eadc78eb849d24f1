"""Pauli strings, stabilizer groups and the graph-basis character matrix.

Paulis are multiplied symbolically through their (x, z) bit masks; dense
matrices are only built on request. Group element labels are integers whose
bit ``n-1-j`` is the exponent of generator ``j``, so generator 0 is the most
significant bit, mirroring the qubit ordering of :mod:`cohest.states`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DependentGenerators, DimensionMismatch, UnknownOperator
from .states import DensityMatrix, PureState, _check_edges

_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_LETTER = {v: k for k, v in _XZ.items()}
# exponent of i in sigma_a @ sigma_b for single-qubit letters
_IPOW = {("X", "Y"): 1, ("Y", "Z"): 1, ("Z", "X"): 1, ("Y", "X"): -1, ("Z", "Y"): -1, ("X", "Z"): -1}

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _parity(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    a = arr.copy()
    while np.any(a):
        out ^= a & 1
        a >>= 1
    return out


@dataclass(frozen=True)
class PauliString:
    """A Hermitian Pauli operator ``sign * P_0 (x) P_1 (x) ... (x) P_{n-1}``."""

    letters: str
    sign: int = 1

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(c not in _XZ for c in letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"XZIZ"``, ``"+XZIZ"`` or ``"-XZIZ"``."""
        t = text.strip()
        sign = 1
        if t[:1] in "+-" and t:
            sign = -1 if t[0] == "-" else 1
            t = t[1:]
        return cls(t, sign)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def from_masks(cls, n: int, xmask: int, zmask: int, sign: int = 1) -> "PauliString":
        letters = "".join(
            _LETTER[((xmask >> (n - 1 - q)) & 1, (zmask >> (n - 1 - q)) & 1)] for q in range(n)
        )
        return cls(letters, sign)

    @classmethod
    def on_qubits(cls, n: int, ops: dict[int, str]) -> "PauliString":
        """Build e.g. ``{0: "X", 1: "Z"}`` -> ``XZI...``."""
        letters = ["I"] * n
        for q, c in ops.items():
            letters[q] = c
        return cls("".join(letters))

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.letters

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def xmask(self) -> int:
        m = 0
        for c in self.letters:
            m = (m << 1) | _XZ[c][0]
        return m

    @property
    def zmask(self) -> int:
        m = 0
        for c in self.letters:
            m = (m << 1) | _XZ[c][1]
        return m

    @property
    def key(self) -> tuple[int, int]:
        """Sign-free identity of the operator."""
        return self.xmask, self.zmask

    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def commutes(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise DimensionMismatch("Pauli strings act on different qubit counts")
        sym = bin(self.xmask & other.zmask).count("1") + bin(self.zmask & other.xmask).count("1")
        return sym % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise DimensionMismatch("Pauli strings act on different qubit counts")
        ipow = 0
        letters = []
        for a, b in zip(self.letters, other.letters):
            ipow += _IPOW.get((a, b), 0)
            xa, za = _XZ[a]
            xb, zb = _XZ[b]
            letters.append(_LETTER[(xa ^ xb, za ^ zb)])
        ipow %= 4
        if ipow % 2:
            raise ValueError(f"{self} and {other} anticommute; product is not Hermitian")
        sign = self.sign * other.sign * (-1 if ipow == 2 else 1)
        return PauliString("".join(letters), sign)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, -self.sign)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for c in self.letters:
            out = np.kron(out, _PAULI_MATRICES[c])
        return self.sign * out

    def _action(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (target, phase) with P|x> = phase[x] |target[x]>."""
        d = 2**self.n
        x = np.arange(d)
        ny = self.letters.count("Y")
        phase = self.sign * (1j**ny) * (1 - 2 * _parity(x & self.zmask))
        return x ^ self.xmask, phase.astype(complex)

    def apply(self, psi) -> np.ndarray:
        """P applied to a state vector (or to each column of a matrix)."""
        v = np.asarray(psi, dtype=complex)
        if v.shape[0] != 2**self.n:
            raise DimensionMismatch(f"vector of length {v.shape[0]} vs {self.n} qubits")
        target, phase = self._action()
        out = np.empty_like(v)
        if v.ndim == 1:
            out[target] = phase * v
        else:
            out[target] = phase[:, None] * v
        return out


def expectation(rho, p: PauliString) -> float:
    """Tr(P rho) in O(d), imaginary round-off discarded."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    d = 2**p.n
    if m.shape != (d, d):
        raise DimensionMismatch(f"state of shape {m.shape} vs {p.n}-qubit operator")
    target, phase = p._action()
    # Tr(P rho) = sum_x P[target[x], x] rho[x, target[x]]
    val = np.sum(phase * m[np.arange(d), target])
    return float(val.real)


def ghz_generators(n: int) -> list[PauliString]:
    """X^n followed by Z_i Z_{i+1}."""
    if n < 2:
        raise ValueError("GHZ needs n >= 2")
    gens = [PauliString("X" * n)]
    for i in range(n - 1):
        gens.append(PauliString.on_qubits(n, {i: "Z", i + 1: "Z"}))
    return gens


def graph_generators(n: int, edges: Iterable[Sequence[int]] = ()) -> list[PauliString]:
    """K_i = X_i prod_{j in N(i)} Z_j for every vertex."""
    edges = _check_edges(n, edges)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    return [PauliString.on_qubits(n, {i: "X", **{j: "Z" for j in nbrs[i]}}) for i in range(n)]


def _gf2_solve(h: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve h @ x = rhs over GF(2) for every column of rhs (free vars = 0)."""
    a = np.concatenate([h % 2, rhs % 2], axis=1).astype(np.uint8)
    rows, cols = h.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.nonzero(a[r:, c])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if r < rows:
        raise DependentGenerators("generators are not independent")
    x = np.zeros((cols, rhs.shape[1]), dtype=np.uint8)
    for i, c in enumerate(pivots):
        x[c] = a[i, cols:]
    return x


def destabilizers(generators: Sequence[PauliString]) -> list[PauliString]:
    """Paulis D_j anticommuting with generator j and commuting with the rest."""
    n = generators[0].n
    sym = np.zeros((len(generators), 2 * n), dtype=np.uint8)
    for i, g in enumerate(generators):
        for q, c in enumerate(g.letters):
            x, z = _XZ[c]
            # symplectic form pairs x of D with z of g and vice versa
            sym[i, q] = z
            sym[i, n + q] = x
    sol = _gf2_solve(sym, np.eye(len(generators), dtype=np.uint8))
    out = []
    for j in range(len(generators)):
        letters = "".join(_LETTER[(int(sol[q, j]), int(sol[n + q, j]))] for q in range(n))
        out.append(PauliString(letters))
    return out


@dataclass(frozen=True)
class StabilizerGroup:
    n: int
    generators: tuple[PauliString, ...]
    elements: tuple[PauliString, ...] = field(repr=False)

    @property
    def d(self) -> int:
        return 2**self.n

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        return {e.key: a for a, e in enumerate(self.elements)}

    def exponents(self, label: int) -> list[int]:
        return [(label >> (self.n - 1 - j)) & 1 for j in range(self.n)]

    def lookup(self, p: PauliString) -> tuple[int, int]:
        """Return (label, relative sign) with ``p == sign * elements[label]``."""
        if p.n != self.n:
            raise UnknownOperator(f"{p} acts on {p.n} qubits, group on {self.n}")
        try:
            a = self._index[p.key]
        except KeyError:
            raise UnknownOperator(f"{p} is not (up to sign) in the stabilizer group") from None
        return a, p.sign * self.elements[a].sign

    def label_of(self, text: str) -> int:
        return self.lookup(PauliString.parse(text))[0]

    @cached_property
    def destabilizers(self) -> list[PauliString]:
        return destabilizers(self.generators)


def expand_group(generators: Sequence[PauliString]) -> StabilizerGroup:
    gens = tuple(generators)
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].n
    if len(gens) != n:
        raise DependentGenerators(f"{len(gens)} generators for {n} qubits; need exactly n")
    for i, g in enumerate(gens):
        if g.n != n:
            raise DimensionMismatch("generators act on different qubit counts")
        for h in gens[i + 1:]:
            if not g.commutes(h):
                raise ValueError(f"generators {g} and {h} do not commute")
    # product always taken in generator order
    elements = []
    for a in range(2**n):
        e = PauliString.identity(n)
        for j in range(n):
            if (a >> (n - 1 - j)) & 1:
                e = e * gens[j]
        elements.append(e)
    seen = {}
    for a, e in enumerate(elements):
        if e.key in seen:
            raise DependentGenerators(f"labels {seen[e.key]} and {a} give the same operator {e}")
        seen[e.key] = a
    return StabilizerGroup(n, gens, tuple(elements))


def stabilized_state(generators: Sequence[PauliString]) -> PureState:
    """The joint +1 eigenvector, with its first nonzero amplitude real positive."""
    n = generators[0].n
    d = 2**n
    for x in range(d):
        v = np.zeros(d, dtype=complex)
        v[x] = 1.0
        for g in generators:
            v = 0.5 * (v + g.apply(v))
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            v /= norm
            first = v[np.argmax(np.abs(v) > 1e-12)]
            v *= abs(first) / first
            return PureState(n, v)
    raise DependentGenerators("generators stabilize no state (contain -I)")


def graph_basis(group: StabilizerGroup, root: PureState | None = None) -> np.ndarray:
    """Columns |psi_k> = prod_j D_j^{k_j} |root>, the joint eigenbasis of the group.

    For graph-state generators the destabilizers are single-qubit Z's, so
    |psi_k> = Z^k |G> up to phase.
    """
    if root is None:
        root = stabilized_state(group.generators)
    if root.n != group.n:
        raise DimensionMismatch("root state and group have different qubit counts")
    n, d = group.n, group.d
    basis = np.empty((d, d), dtype=complex)
    basis[:, 0] = root.amplitudes
    dest = group.destabilizers
    for k in range(1, d):
        j = next(j for j in range(n) if (k >> (n - 1 - j)) & 1)
        basis[:, k] = dest[j].apply(basis[:, k ^ (1 << (n - 1 - j))])
    return basis


def graph_basis_probabilities(rho, group: StabilizerGroup, root: PureState | None = None) -> np.ndarray:
    """p_k = <psi_k| rho |psi_k> over the group's joint eigenbasis."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (group.d, group.d):
        raise DimensionMismatch(f"state of shape {m.shape} vs {group.n}-qubit group")
    basis = graph_basis(group, root)
    p = np.einsum("ik,ij,jk->k", basis.conj(), m, basis).real
    return np.clip(p, 0.0, None)


def character_matrix(group: StabilizerGroup, labels: Sequence[int] | None = None) -> np.ndarray:
    """B[i, k] = (-1)^{popcount(a_i & k)}; rows default to every label."""
    d = group.d
    rows = np.arange(d) if labels is None else np.asarray(labels, dtype=int)
    k = np.arange(d)
    return (1 - 2 * _parity(rows[:, None] & k[None, :])).astype(float)
