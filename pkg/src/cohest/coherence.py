"""Exact coherence measures and their spectrum-estimation lower bounds.

All entropies are in bits. Lower bounds are computed from two inputs: the
computational-basis populations ``diag`` and a distribution ``meet`` that is
majorized by every graph-basis distribution compatible with the data.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, ExactIsZero, InternalMismatch, L2OutOfRange, ZeroL2
from .majorization import as_sorted, join
from .tensor_core import clamp_spectrum, hermitian_eigenvalues
from .states import DensityMatrix, PureState, ghz, linear_entropy, von_neumann

ZERO_L2 = 1e-12
SUM_SLACK = 1e-12


class Measure(str, enum.Enum):
    CR_ENTROPY = "Cr"
    CL1 = "Cl1"
    CL2 = "Cl2"
    CG = "Cg"
    ROBUSTNESS = "CR"
    FORMATION = "Cf"
    CONCURRENCE = "Cl1tilde"


ALL_MEASURES = tuple(Measure)


class Family(str, enum.Enum):
    NOISY_GHZ = "ghz"
    NOISY_CLUSTER = "cluster"


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    if isinstance(rho, PureState):
        return rho.projector()
    return np.asarray(rho, dtype=complex)


def exact_cr(rho) -> float:
    """Relative entropy of coherence S(diag) - S(rho)."""
    if isinstance(rho, PureState):
        return max(von_neumann(rho.diagonal()), 0.0)
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(int(np.log2(len(rho))), rho)
    val = von_neumann(rho.diagonal()) - von_neumann(rho.spectrum())
    return max(val, 0.0) if val > -1e-9 else val


def exact_cl1(rho) -> float:
    m = _matrix(rho)
    return float(np.abs(m).sum() - np.abs(np.diag(m)).sum())


def exact_cl2(rho) -> float:
    """Sum of squared off-diagonal moduli, cross-checked against S_L(diag) - S_L(spectrum)."""
    m = _matrix(rho)
    direct = float(np.sum(np.abs(m) ** 2) - np.sum(np.abs(np.diag(m)) ** 2))
    diag = np.clip(np.diag(m).real, 0.0, None)
    spectrum = clamp_spectrum(hermitian_eigenvalues(m))
    via_entropy = linear_entropy(diag) - linear_entropy(spectrum)
    if abs(direct - via_entropy) > 1e-7:
        raise InternalMismatch(f"C_l2 routes disagree: {direct!r} vs {via_entropy!r}")
    return max(direct, 0.0)


def exact_cg_pure(psi: PureState) -> float:
    """Geometric coherence of a pure state, 1 - max_i |psi_i|^2."""
    return float(1.0 - np.max(np.abs(psi.amplitudes) ** 2))


def exact_robustness_pure(psi: PureState) -> float:
    """For pure states the robustness equals the l1-norm: (sum_i |psi_i|)^2 - 1."""
    return float(np.sum(np.abs(psi.amplitudes)) ** 2 - 1.0)


def _noisy_spectrum(d: int, eta: float) -> np.ndarray:
    lam = np.full(d, eta / d)
    lam[0] += 1.0 - eta
    return lam


def family_diagonal(family: Family | str, n: int, eta: float) -> np.ndarray:
    family = Family(family)
    d = 2**n
    if family is Family.NOISY_GHZ:
        diag = np.full(d, eta / d)
        diag[0] += (1 - eta) / 2
        diag[-1] += (1 - eta) / 2
        return diag
    return np.full(d, 1.0 / d)


def family_exact(family: Family | str, n: int, eta: float, measure: Measure | str) -> float | None:
    """Closed-form exact value for the depolarized GHZ / cluster families.

    Returns None where no closed form is available: C_g, C_f and the
    coherence concurrence of the mixed (eta > 0) members.
    """
    family, measure = Family(family), Measure(measure)
    d = 2**n
    pure = eta == 0.0
    lam = _noisy_spectrum(d, eta)
    diag = family_diagonal(family, n, eta)
    cr = max(von_neumann(diag) - von_neumann(lam), 0.0)
    if family is Family.NOISY_GHZ:
        cl1 = 1.0 - eta
        cl2 = (1.0 - eta) ** 2 / 2.0
        cg = 0.5 if pure else None
    else:
        cl1 = (d - 1) * (1.0 - eta)
        cl2 = (d - 1) / d * (1.0 - eta) ** 2
        cg = 1.0 - 1.0 / d if pure else None
    return {
        Measure.CR_ENTROPY: cr,
        Measure.CL1: cl1,
        Measure.CL2: cl2,
        Measure.CG: cg,
        Measure.ROBUSTNESS: cl1,
        Measure.FORMATION: cr if pure else None,
        Measure.CONCURRENCE: cl1 if pure else None,
    }[measure]


def _joined(diag, meet) -> tuple[np.ndarray, np.ndarray]:
    d = max(np.size(diag), np.size(meet))
    dsort = as_sorted(diag, d)
    return dsort, join(dsort, as_sorted(meet, d))


def lower_cr(diag, meet) -> float:
    dsort, j = _joined(diag, meet)
    return max(von_neumann(dsort) - von_neumann(j), 0.0)


def lower_cl2(diag, meet) -> float:
    dsort, j = _joined(diag, meet)
    return max(linear_entropy(dsort) - linear_entropy(j), 0.0)


@dataclass(frozen=True)
class UVSequence:
    """Descending pair weights ``u`` and the greedy minimizer ``vhat``.

    ``uhat`` is the weight sequence that enters the robustness sum. It
    coincides with ``vhat``: when ``u[0] >= 1`` both collapse to (1, 0, ...)
    and otherwise the tail beyond M + 1 carries no weight.
    """

    u: np.ndarray
    vhat: np.ndarray
    uhat: np.ndarray
    M: int


def uv_sequence(diag, l2: float) -> UVSequence:
    if l2 <= ZERO_L2:
        raise ZeroL2(f"l2={l2!r} is zero; every derived bound vanishes")
    diag = np.clip(np.asarray(diag, dtype=float).reshape(-1), 0.0, None)
    iu, ju = np.triu_indices(diag.size, k=1)
    u = np.sort(2.0 * diag[iu] * diag[ju] / l2)[::-1]
    vhat = np.zeros_like(u)
    # u[0] >= 1 gives M <= 1 and vhat = (1, 0, ...) through the same caselist
    csum = np.cumsum(u)
    M = int(np.searchsorted(csum, 1.0 + SUM_SLACK, side="right"))
    vhat[:M] = u[:M]
    if M < u.size:
        rest = 1.0 - (csum[M - 1] if M else 0.0)
        # a remainder inside the slack that fixed M is round-off, not weight
        vhat[M] = rest if rest > SUM_SLACK else 0.0
    return UVSequence(u, vhat, vhat.copy(), M)


def lower_cl1_cr_pair(diag, l2: float, literal_u: bool = False) -> tuple[float, float]:
    """(l_Cl1, l_CR) from the diagonal and an l2-coherence bound.

    With ``literal_u=True`` the robustness sum divides by ``sqrt(u_k)``
    instead of ``sqrt(uhat_k)``, which for equal-weight diagonals reduces the
    bound to exactly ``(d - 1)(1 - eta)^2``-type values.
    """
    if l2 <= ZERO_L2:
        return 0.0, 0.0
    uv = uv_sequence(diag, l2)
    scale = math.sqrt(2.0 * l2)
    l1 = scale * float(np.sum(np.sqrt(uv.vhat)))
    den = uv.u if literal_u else uv.uhat
    live = uv.vhat > 0
    rob = scale * float(np.sum(uv.vhat[live] / np.sqrt(den[live])))
    return l1, rob


def lower_cg(l2: float, d: int) -> float:
    """Geometric-coherence bound (d-1)/d * (1 - sqrt(1 - d/(d-1) * l2))."""
    cap = (d - 1) / d
    if l2 < -1e-12 or l2 > cap + 1e-12:
        raise L2OutOfRange(f"l2={l2!r} outside [0, {cap}]")
    arg = max(1.0 - l2 / cap, 0.0)
    return cap * (1.0 - math.sqrt(arg))


def convex_roof_passthrough(l_cr: float, l_cl1: float) -> tuple[float, float]:
    """Bounds on C_f and the coherence concurrence inherited from C_r and C_l1."""
    return l_cr, l_cl1


def witness_bound(rho, which: str, n: int) -> float:
    """-Tr(W rho) for W3 = I/2 - |GHZ><GHZ| or W1 = Delta(|GHZ><GHZ|) - |GHZ><GHZ|."""
    m = _matrix(rho)
    d = 2**n
    if m.shape != (d, d):
        raise DimensionMismatch(f"state of shape {m.shape} vs {n} qubits")
    amp = ghz(n).amplitudes
    fidelity = float(np.real(amp.conj() @ m @ amp))
    if which.upper() == "W3":
        return fidelity - 0.5
    if which.upper() == "W1":
        dephased = float(np.sum(np.abs(amp) ** 2 * np.diag(m).real))
        return fidelity - dephased
    raise ValueError(f"unknown witness {which!r}")


def tightness(exact: float, lower: float) -> float:
    if exact <= 1e-12:
        raise ExactIsZero("tightness undefined for zero exact coherence")
    return lower / exact


def spectrum_bounds(diag, meet) -> dict[Measure, float]:
    """Every lower bound derivable from ``diag`` and the meet."""
    d = max(np.size(diag), np.size(meet))
    l_cr = lower_cr(diag, meet)
    l2 = lower_cl2(diag, meet)
    l_cl1, l_rob = lower_cl1_cr_pair(diag, l2)
    l_cf, l_conc = convex_roof_passthrough(l_cr, l_cl1)
    return {
        Measure.CR_ENTROPY: l_cr,
        Measure.CL1: l_cl1,
        Measure.CL2: l2,
        Measure.CG: lower_cg(min(l2, (d - 1) / d), d),
        Measure.ROBUSTNESS: l_rob,
        Measure.FORMATION: l_cf,
        Measure.CONCURRENCE: l_conc,
    }


@dataclass
class CoherenceReport:
    measure: Measure
    lower_bound: float
    exact: float | None = None
    ratio: float | None = None
    # exact value is a stand-in (C_r for C_f, C_l1 for the concurrence)
    surrogate: bool = False

    def __post_init__(self):
        self.measure = Measure(self.measure)
        if self.exact is not None and self.ratio is None and self.exact > 1e-12:
            self.ratio = tightness(self.exact, self.lower_bound)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["measure"] = self.measure.value
        return out
