"""1 -> 2 universal asymmetric cloning machine.

The machine maps a qubit |φ> to three qubits ordered (C1, C2, AC):

    ν |φ>_C1 |Ψ->_{C2,AC} + μ |φ>_C2 |Ψ->_{C1,AC}

with real μ, ν >= 0 and μ² + μν + ν² = 1. C1 and C2 are the clones, AC the
anticlone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .qmath import (
    I2,
    KET0,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    STRUCT_TOL,
    DensityMatrix,
    PureState,
    bloch_vector,
    from_bloch_vector,
    partial_trace,
)

C1, C2, AC = 0, 1, 2

_R2 = np.sqrt(2.0)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / _R2
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / _R2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / _R2
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / _R2

BELL_LABELS = ("psi-", "psi+", "phi-", "phi+")
BELL_VECTORS = dict(zip(BELL_LABELS, (PSI_MINUS, PSI_PLUS, PHI_MINUS, PHI_PLUS)))
# Pauli that maps each Bell branch back to |φ>; the same pairing appears
# for the (C2, AC) measurement of the asymmetric machine and for the
# (C1, C2) measurement of the symmetric one.
BELL_PAULI = {"psi-": I2, "psi+": SIGMA_Z, "phi-": SIGMA_X, "phi+": SIGMA_Y}
# Exact phases of the four branches with the sign conventions above:
# |Ψ> = (μ/2+ν)|φ>|Ψ-> + (μ/2)[σz|φ>|Ψ+> - σx|φ>|Φ-> + iσy|φ>|Φ+>].
_BRANCH_PHASE = {"psi-": 1.0, "psi+": 1.0, "phi-": -1.0, "phi+": 1j}

SYMMETRIC_MU = 1 / np.sqrt(3.0)


@dataclass(frozen=True)
class ClonerParams:
    mu: float
    nu: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.mu <= 1.0 and 0.0 <= self.nu <= 1.0):
            raise ValueError(f"mu, nu must lie in [0, 1]: {self.mu}, {self.nu}")
        norm = self.mu**2 + self.mu * self.nu + self.nu**2
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"mu^2 + mu*nu + nu^2 = {norm}, expected 1")

    @classmethod
    def symmetric(cls) -> "ClonerParams":
        return params_from_mu(SYMMETRIC_MU)


def params_from_mu(mu: float) -> ClonerParams:
    """Complete ``mu`` to a normalized parameter pair (nonnegative root for ν)."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    nu = (-mu + np.sqrt(4.0 - 3.0 * mu * mu)) / 2.0
    return ClonerParams(float(mu), float(max(nu, 0.0)))


class CloneTriple(NamedTuple):
    """Cloner output; qubit order (C1, C2, AC)."""

    state: PureState
    params: ClonerParams

    @property
    def tensor(self) -> np.ndarray:
        return self.state.amplitudes.reshape(2, 2, 2)


def cloner_tensor(phi: np.ndarray, p: ClonerParams) -> np.ndarray:
    """Raw output amplitudes for one ket (shape (2,)) or a batch (shape (n, 2)).

    Returns shape (..., 2, 2, 2) indexed [C1, C2, AC].
    """
    singlet = PSI_MINUS.reshape(2, 2)
    a = np.einsum("...i,jk->...ijk", phi, singlet)
    b = np.einsum("...j,ik->...ijk", phi, singlet)
    return p.nu * a + p.mu * b


def apply_cloner(phi: PureState, p: ClonerParams) -> CloneTriple:
    if phi.n_qubits != 1:
        raise ValueError("the cloner acts on a single qubit")
    out = cloner_tensor(phi.amplitudes, p).reshape(8)
    return CloneTriple(PureState(out), p)


def clone_fidelities(p: ClonerParams) -> tuple[float, float]:
    return 1.0 - p.mu**2 / 2.0, 1.0 - p.nu**2 / 2.0


def reduced_clone1(t: CloneTriple) -> DensityMatrix:
    return partial_trace(t.state, [C1])


def reduced_clone2(t: CloneTriple) -> DensityMatrix:
    return partial_trace(t.state, [C2])


def reduced_anticlone(t: CloneTriple) -> DensityMatrix:
    return partial_trace(t.state, [AC])


def reduced_pair(t: CloneTriple, pair: tuple[int, int]) -> DensityMatrix:
    return partial_trace(t.state, list(pair))


def bell_basis() -> tuple[PureState, PureState, PureState, PureState]:
    """(Ψ-, Ψ+, Φ-, Φ+) with Ψ± = (|01> ± |10>)/√2, Φ± = (|00> ± |11>)/√2."""
    return tuple(PureState(BELL_VECTORS[k]) for k in BELL_LABELS)


@dataclass(frozen=True)
class BellBranch:
    coefficient: complex
    correction: np.ndarray

    @property
    def probability(self) -> float:
        return abs(self.coefficient) ** 2


def bell_coefficients(phi: PureState, p: ClonerParams) -> dict[str, BellBranch]:
    """Decomposition of the cloner output over Bell states of (C2, AC).

    Each branch is ``coefficient * (correction† |φ>)_C1 ⊗ |Bell>_{C2,AC}``; applying
    ``correction`` to C1 after observing that Bell state returns |φ>. The
    coefficient is independent of |φ>.
    """
    del phi  # the decomposition is state independent
    half = p.mu / 2.0
    mags = {"psi-": half + p.nu, "psi+": half, "phi-": half, "phi+": half}
    return {
        k: BellBranch(complex(_BRANCH_PHASE[k] * mags[k]), BELL_PAULI[k]) for k in BELL_LABELS
    }


def assemble_from_bell(phi: PureState, p: ClonerParams) -> PureState:
    """Rebuild the cloner output from ``bell_coefficients``."""
    out = np.zeros(8, dtype=complex)
    for k, br in bell_coefficients(phi, p).items():
        c1 = br.correction.conj().T @ phi.amplitudes
        out += br.coefficient * np.kron(c1, BELL_VECTORS[k])
    return PureState(out)


def _unot_pure(phi: np.ndarray) -> np.ndarray:
    t = cloner_tensor(phi, ClonerParams.symmetric()).reshape(4, 2)
    return t.T @ t.conj()


@lru_cache(maxsize=None)
def _unot_bloch_map() -> tuple[np.ndarray, np.ndarray]:
    """Affine Bloch representation v -> A v + b of the U-NOT channel.

    Fixed by the images of I/2 and of the +1 eigenstates of σx, σy, σz.
    """
    ket1 = np.array([0, 1], dtype=complex)
    centre = bloch_vector(DensityMatrix((_unot_pure(KET0) + _unot_pure(ket1)) / 2))
    cols = [
        bloch_vector(DensityMatrix(_unot_pure(vec))) - centre
        for vec in (
            np.array([1, 1], dtype=complex) / _R2,
            np.array([1, 1j], dtype=complex) / _R2,
            KET0,
        )
    ]
    return np.column_stack(cols), centre


def unot_channel(rho: DensityMatrix) -> DensityMatrix:
    """Approximate universal NOT: the anticlone marginal of the symmetric cloner,
    extended linearly to mixed inputs. Acts on Bloch vectors as v -> -v/3."""
    if rho.n_qubits != 1:
        raise ValueError("unot_channel acts on one qubit")
    a, b = _unot_bloch_map()
    return from_bloch_vector(a @ bloch_vector(rho) + b)
