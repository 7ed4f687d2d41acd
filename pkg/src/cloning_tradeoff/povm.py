"""Measurements used by the cloning-based estimation schemes.

Discrete POVMs (tetrahedron, Bell, incomplete Bell) are ``Povm`` objects with
explicit effects. Continuous covariant POVMs are ``CovariantPovm`` objects: a
rank-one seed ``|s>`` generates the effects ``(U⊗U)|s><s|(U⊗U)†`` for U over
SU(2), normalized against the Haar probability measure, and an outcome U is
read as the guess ``U|0>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Hashable, Literal, Sequence

import numpy as np

from .cloner import BELL_LABELS, BELL_VECTORS, PSI_MINUS
from .qmath import (
    KET0,
    POSITIVITY_TOL,
    DensityMatrix,
    PureState,
    SphereAngles,
    SphereRule,
    bloch_state,
    dag,
    frobenius_distance,
    haar_angles,
    u_omega,
    u_omega_batch,
)

log = logging.getLogger(__name__)

Support = Literal["full", "symmetric"]
SUPPORT_TOL = 1e-9

SQRT3 = np.sqrt(3.0)
XI_MIN = np.sqrt(1.5)
XI_MAX = SQRT3


def support_projector(support: Support) -> np.ndarray:
    if support == "full":
        return np.eye(4, dtype=complex)
    if support == "symmetric":
        return np.eye(4, dtype=complex) - np.outer(PSI_MINUS, PSI_MINUS.conj())
    raise ValueError(f"unknown support {support!r}")


@dataclass(frozen=True, eq=False)
class PovmEffect:
    label: Hashable
    operator: np.ndarray
    guess: PureState | None = None

    def probability(self, rho: DensityMatrix | np.ndarray) -> float:
        m = rho.matrix if isinstance(rho, DensityMatrix) else rho
        return float(np.trace(self.operator @ m).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.operator).min())


@dataclass(frozen=True, eq=False)
class Povm:
    effects: tuple[PovmEffect, ...]
    support: Support = "full"
    completeness_residual: float = field(default=np.nan)
    # Σ effects = constant * support projector before any rescaling
    normalization_constant: float = 1.0

    def __post_init__(self) -> None:
        for e in self.effects:
            if e.min_eigenvalue() < -POSITIVITY_TOL:
                raise ValueError(f"effect {e.label!r} is not positive semidefinite")
        if np.isnan(self.completeness_residual):
            object.__setattr__(self, "completeness_residual", completeness_residual(self))

    @property
    def labels(self) -> list[Hashable]:
        return [e.label for e in self.effects]

    def total(self) -> np.ndarray:
        return sum(e.operator for e in self.effects)

    def probabilities(self, rho: DensityMatrix | np.ndarray) -> np.ndarray:
        m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        ops = np.stack([e.operator for e in self.effects])
        return np.einsum("kij,...ji->...k", ops, m).real

    def effect(self, label: Hashable) -> PovmEffect:
        for e in self.effects:
            if e.label == label:
                return e
        raise KeyError(label)


@dataclass(frozen=True, eq=False)
class CovariantPovm:
    """Continuous POVM generated from a rank-one seed by U⊗U, U in SU(2)."""

    seed: np.ndarray
    support: Support = "full"

    def __post_init__(self) -> None:
        s = np.array(self.seed, dtype=complex).reshape(4)
        s.setflags(write=False)
        object.__setattr__(self, "seed", s)

    @property
    def seed_norm2(self) -> float:
        return float(np.vdot(self.seed, self.seed).real)

    @property
    def phase_sensitive(self) -> bool:
        """Whether effects depend on the SU(2) angle χ above the sphere point.

        Components on |01>, |10> are invariant under U -> U exp(iχσz); components
        on |00>, |11> pick up phases e^{±2iχ}.
        """
        return bool(abs(self.seed[0]) > 0 or abs(self.seed[3]) > 0)

    def element(self, omega: SphereAngles) -> PovmEffect:
        return covariant_element(self.seed, omega)

    def vectors(self, theta, phi, chi) -> np.ndarray:
        """Batch of effect vectors (U⊗U)|seed>, shape (n, 4)."""
        u = u_omega_batch(theta, phi, chi)
        uu = np.einsum("nab,ncd->nacbd", u, u).reshape(-1, 4, 4)
        return uu @ self.seed

    def integral(self, order: int = 8) -> np.ndarray:
        rule = SphereRule(order, su2=self.phase_sensitive)
        t, p, c, w = rule.nodes()
        v = self.vectors(t, p, c)
        return np.einsum("n,ni,nj->ij", w, v, v.conj())

    def density(self, rho: DensityMatrix | np.ndarray, theta, phi, chi) -> np.ndarray:
        """Outcome density tr(Π(Ω)ρ) with respect to the Haar probability measure."""
        m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        v = self.vectors(theta, phi, chi)
        return np.einsum("ni,ij,nj->n", v.conj(), m, v).real


def pi0_orthogonal() -> np.ndarray:
    """Seed for estimating |φ> from |φ>|φ⊥>: ((√3+1)/√2)(|01> + (2-√3)|10>).

    Unnormalized; <π0|π0> = 4 so that the SU(2) average of its orbit is 𝕀.
    """
    return (SQRT3 + 1) / np.sqrt(2.0) * np.array([0, 1, 2 - SQRT3, 0], dtype=complex)


def covariant_element(seed: np.ndarray, omega: SphereAngles) -> PovmEffect:
    u = u_omega(omega)
    v = np.kron(u, u) @ np.asarray(seed, dtype=complex)
    return PovmEffect(omega, np.outer(v, v.conj()), PureState(u @ KET0))


def orthogonal_pair_povm() -> CovariantPovm:
    return CovariantPovm(pi0_orthogonal(), "full")


# --- tetrahedron --------------------------------------------------------------

_S2, _S6 = np.sqrt(2.0), np.sqrt(6.0)
TETRAHEDRON_VERTICES = np.array(
    [
        [0.0, 0.0, 1.0],
        [np.sqrt(8.0) / 3, 0.0, -1.0 / 3],
        [-_S2 / 3, _S6 / 3, -1.0 / 3],
        [-_S2 / 3, -_S6 / 3, -1.0 / 3],
    ]
)
_TET_DEN = 6 * _S6 - 2 * _S2
TETRAHEDRON_GAMMA = 13 / _TET_DEN
TETRAHEDRON_DELTA = (5 - 2 * SQRT3) / _TET_DEN


def antipodal_pair(direction: Sequence[float]) -> np.ndarray:
    """|n, -n> = U⊗U |01> with U in SU(2) and U|0> along ``direction``.

    The product is independent of which SU(2) element is chosen, which fixes
    the relative phase between the four terms of each tetrahedron vector.
    """
    u = u_omega(SphereAngles.from_direction(direction))
    return np.kron(u[:, 0], u[:, 1])


def tetrahedron_povm() -> Povm:
    """Four-outcome POVM for guessing |φ> from |φ>|φ⊥>; outcome i guesses |n_i>."""
    pairs = [antipodal_pair(n) for n in TETRAHEDRON_VERTICES]
    vecs = [
        TETRAHEDRON_GAMMA * pairs[i] - TETRAHEDRON_DELTA * sum(pairs[k] for k in range(4) if k != i)
        for i in range(4)
    ]
    ops = [np.outer(v, v.conj()) for v in vecs]
    total = sum(ops)
    const = float(np.trace(total).real / 4)
    if abs(const - 1.0) > 1e-12:
        log.warning("tetrahedron effects sum to %.15g * identity; rescaling", const)
        ops = [op / const for op in ops]
    effects = tuple(
        PovmEffect(i, op, bloch_state(n)) for i, (op, n) in enumerate(zip(ops, TETRAHEDRON_VERTICES))
    )
    # residual of the raw sum from its best-fit multiple of the identity
    residual = frobenius_distance(total, const * np.eye(4))
    return Povm(effects, "full", residual, const)


# --- ξ family -----------------------------------------------------------------

@dataclass(frozen=True)
class XiFamily:
    """Interpolates between the Bell measurement (ξ = √(3/2)) and optimal
    two-copy estimation (ξ = √3)."""

    xi: float

    def __post_init__(self) -> None:
        if not XI_MIN - 1e-12 <= self.xi <= XI_MAX + 1e-12:
            raise ValueError(f"xi must lie in [sqrt(3/2), sqrt(3)], got {self.xi}")

    @classmethod
    def from_g(cls, g: float) -> "XiFamily":
        """Inverse of G = 1/3 + ξ²/9."""
        return cls(float(np.sqrt(max(9 * (g - 1 / 3), 0.0))))


def _complement(xi: float) -> float:
    """√(3 - ξ²), factored so that ξ = √3 gives exactly zero."""
    return float(np.sqrt(max((SQRT3 - xi) * (SQRT3 + xi), 0.0)))


def xi_seed(f: XiFamily) -> np.ndarray:
    """ξ|00> + √(3-ξ²)|11>; squared norm 3."""
    return np.array([f.xi, 0, 0, _complement(f.xi)], dtype=complex)


def xi_povm(f: XiFamily) -> CovariantPovm:
    return CovariantPovm(xi_seed(f), "symmetric")


# --- Bell measurements ----------------------------------------------------------

def bell_povm() -> Povm:
    return Povm(
        tuple(PovmEffect(k, np.outer(BELL_VECTORS[k], BELL_VECTORS[k].conj())) for k in BELL_LABELS),
        "full",
    )


def incomplete_bell_povm() -> Povm:
    """Projectors onto Ψ+, Φ-, Φ+: a three-outcome (one trit) measurement on the
    symmetric subspace."""
    labels = ("psi+", "phi-", "phi+")
    return Povm(
        tuple(PovmEffect(k, np.outer(BELL_VECTORS[k], BELL_VECTORS[k].conj())) for k in labels),
        "symmetric",
    )


# --- validation -----------------------------------------------------------------

def completeness_residual(m: Povm | CovariantPovm | np.ndarray, support: Support | None = None,
                          order: int = 8) -> float:
    """Frobenius distance between Σ effects (or ∫ Π dU) and the support projector.

    A bare seed array is treated as a covariant POVM on ``support``.
    """
    if isinstance(m, np.ndarray):
        m = CovariantPovm(m, support or "full")
    target = support_projector(support or m.support)
    total = m.total() if isinstance(m, Povm) else m.integral(order)
    return frobenius_distance(total, target)


# --- sampling -----------------------------------------------------------------

def _check_support(rho: np.ndarray, support: Support) -> None:
    leak = 1.0 - np.einsum("ij,...ji->...", support_projector(support), rho).real
    if np.max(np.abs(leak)) > SUPPORT_TOL:
        raise ValueError(
            f"state has weight {np.max(np.abs(leak)):.3g} outside the {support} subspace"
        )


def sample_outcome(rho: DensityMatrix | np.ndarray, m: Povm | CovariantPovm,
                   rng: np.random.Generator) -> Hashable:
    """Draw one outcome label (an effect label, or ``SphereAngles`` for a covariant POVM)."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if isinstance(m, Povm):
        idx = sample_discrete(mat[None], m, rng)[0]
        return m.effects[idx].label
    t, p, c = sample_covariant(mat[None], m, rng)
    return SphereAngles(float(t[0]), float(p[0]), float(c[0]))


def sample_discrete(rhos: np.ndarray, m: Povm, rng: np.random.Generator) -> np.ndarray:
    """Effect indices for a batch of density matrices of shape (n, 4, 4)."""
    probs = m.probabilities(rhos)
    return sample_categorical(probs, rng)


def sample_categorical(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Row-wise categorical draw; rows must sum to one within ``SUPPORT_TOL``."""
    probs = np.atleast_2d(probs)
    sums = probs.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > SUPPORT_TOL:
        raise ValueError(f"outcome probabilities sum to {sums[np.argmax(np.abs(sums - 1))]!r}")
    cdf = np.cumsum(np.clip(probs, 0.0, None), axis=1)
    u = rng.random(len(probs)) * cdf[:, -1]
    return np.minimum((cdf < u[:, None]).sum(axis=1), probs.shape[1] - 1)


def sample_covariant(rhos: np.ndarray, m: CovariantPovm, rng: np.random.Generator,
                     max_rounds: int = 10_000) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rejection-sample SU(2) outcomes for a batch of states (n, 4, 4).

    Proposals are Haar on SU(2); acceptance is tr(Π(U)ρ) / (λ_max(ρ)·<s|s>).
    Returns (theta, phi, chi) arrays.
    """
    rhos = np.asarray(rhos)
    _check_support(rhos, m.support)
    n = len(rhos)
    envelope = np.linalg.eigvalsh(rhos)[:, -1] * m.seed_norm2
    theta, phi, chi = np.empty(n), np.empty(n), np.empty(n)
    pending = np.arange(n)
    for _ in range(max_rounds):
        if pending.size == 0:
            return theta, phi, chi
        t, p, c = haar_angles(rng, pending.size, with_chi=True)
        dens = np.einsum("ni,nij,nj->n", (v := m.vectors(t, p, c)).conj(), rhos[pending], v).real
        ok = rng.random(pending.size) * envelope[pending] < dens
        idx = pending[ok]
        theta[idx], phi[idx], chi[idx] = t[ok], p[ok], c[ok]
        pending = pending[~ok]
    raise RuntimeError("rejection sampler did not converge")
