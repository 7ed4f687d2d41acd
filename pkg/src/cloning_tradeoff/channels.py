"""Transmission over a lossy channel and storage in an erasing memory.

Each strategy has a closed-form average fidelity and a trial-by-trial Monte
Carlo simulation built from the cloner and measurement primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from . import cloner as cl
from .montecarlo import McEstimate, estimate
from .povm import (
    XI_MAX,
    XiFamily,
    incomplete_bell_povm,
    sample_categorical,
    sample_covariant,
    sample_discrete,
    tetrahedron_povm,
    xi_povm,
)
from .qmath import (
    KET0,
    KET1,
    PureState,
    fidelity_to_pure,
    haar_kets,
    u_omega_batch,
)
from .tradeoff import _guess_kets, _pair_rho, asym_g_analytic, asym_reversal

Strategy = Literal["direct", "classicalAssist", "quantumMemory"]
STRATEGIES: tuple[str, ...] = ("direct", "classicalAssist", "quantumMemory")
OPTIMIZER_TOL = 1e-10


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"transmittivity must lie in [0, 1], got {p}")
    return float(p)


@dataclass(frozen=True)
class LossyChannel:
    p: float

    def __post_init__(self) -> None:
        _check_p(self.p)


@dataclass(frozen=True)
class CurvePoint:
    p: float
    analytic: float
    mc: McEstimate | None = None


@dataclass(frozen=True)
class StrategyCurve:
    strategy: str
    points: list[CurvePoint] = field(default_factory=list)

    def __post_init__(self) -> None:
        ps = [pt.p for pt in self.points]
        if ps != sorted(ps):
            raise ValueError("curve points must be sorted by p")
        if any(not 0.5 - 1e-12 <= pt.analytic <= 1 + 1e-12 for pt in self.points):
            raise ValueError("analytic fidelities must lie in [1/2, 1]")


# --- closed forms -----------------------------------------------------------------

def f_direct(p: float) -> float:
    return (1 + _check_p(p)) / 2


def f_classical_at(p: float, mu: float) -> float:
    """Sent clone C1 when delivered, estimate from (C2, AC) when lost."""
    p = _check_p(p)
    return p * (1 - mu * mu / 2) + (1 - p) * asym_g_analytic(mu)


@lru_cache(maxsize=4096)
def optimal_mu(p: float) -> float:
    """Asymmetry maximizing ``f_classical_at`` (bounded scalar search on [0, 1])."""
    p = _check_p(p)
    res = minimize_scalar(
        lambda mu: -f_classical_at(p, mu),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": OPTIMIZER_TOL},
    )
    return float(res.x)


def f_classical(p: float) -> float:
    p = _check_p(p)
    return (3 + p + np.sqrt(1 + p * (5 * p - 2))) / 6


def f_classical_optimized(p: float) -> float:
    return f_classical_at(p, optimal_mu(p))


def f_quantum_memory(p: float) -> float:
    return 2 / 3 + _check_p(p) / 3


def f_storage_plain(p: float) -> float:
    return (1 + _check_p(p)) / 2


def f_storage_cloned(p: float) -> float:
    p = _check_p(p)
    return (1 + 2 * p) * (9 - 5 * p + 2 * p * p) / 18


def storage_advantage(p: float) -> float:
    return f_storage_cloned(p) - f_storage_plain(p)


ANALYTIC = {
    "direct": f_direct,
    "classicalAssist": f_classical,
    "quantumMemory": f_quantum_memory,
    "storagePlain": f_storage_plain,
    "storageCloned": f_storage_cloned,
}


def strategy_curve(strategy: str, ps, n: int | None = None, seed: int = 0) -> StrategyCurve:
    if strategy not in ANALYTIC:
        raise ValueError(f"unknown strategy {strategy!r}")
    points = []
    for k, p in enumerate(sorted(ps)):
        mc = None
        if n is not None and strategy in STRATEGIES:
            mc = simulate_strategy(strategy, p, n, seed + k)
        elif n is not None and strategy == "storageCloned":
            mc = simulate_storage(p, n, seed + k)
        points.append(CurvePoint(float(p), ANALYTIC[strategy](p), mc))
    return StrategyCurve(strategy, points)


# --- feed-forward table for the quantum-memory strategy --------------------------------

def _ac_given_pair_outcome(ket: np.ndarray, bell: np.ndarray) -> np.ndarray:
    """Unnormalized anticlone ket after projecting (C1, C2) of the symmetric
    cloner output onto ``bell``."""
    t = cl.cloner_tensor(ket, cl.ClonerParams.symmetric()).reshape(4, 2)
    return bell.conj() @ t


@lru_cache(maxsize=1)
def _reversal_table() -> tuple[tuple[str, np.ndarray], ...]:
    table = []
    for label in incomplete_bell_povm().labels:
        bell = cl.BELL_VECTORS[label]
        # the conditional AC ket is linear in |φ>: a(φ) = M φ; the correction is M^{-1}
        m = np.column_stack([_ac_given_pair_outcome(KET0, bell), _ac_given_pair_outcome(KET1, bell)])
        v = np.linalg.inv(m)
        v = v / np.sqrt(abs(np.linalg.det(v)))
        table.append((label, v))
    return tuple(table)


def sym_reversal_table(n_check: int = 100, seed: int = 12345) -> dict[str, np.ndarray]:
    """Correction on AC for each incomplete-Bell outcome on (C1, C2).

    Derived from the action on |0>, |1> and verified on Haar-random inputs.
    """
    table = dict(_reversal_table())
    kets = haar_kets(np.random.default_rng(seed), n_check)
    for label, v in table.items():
        if np.linalg.norm(v.conj().T @ v - np.eye(2)) > 1e-12:
            raise RuntimeError(f"correction for {label} is not unitary")
        for ket in kets:
            a = v @ _ac_given_pair_outcome(ket, cl.BELL_VECTORS[label])
            fid = abs(np.vdot(ket, a)) ** 2 / np.vdot(a, a).real
            if fid < 1 - 1e-12:
                raise RuntimeError(f"reversal after outcome {label} failed: fidelity {fid}")
    return table


# --- Monte Carlo ------------------------------------------------------------------

def _random_guess_scores(kets: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    guesses = haar_kets(rng, len(kets))
    return np.abs(np.einsum("ni,ni->n", kets.conj(), guesses)) ** 2


def _direct_scores(k: int, rng: np.random.Generator, p: float) -> np.ndarray:
    kets = haar_kets(rng, k)
    delivered = rng.random(k) < p
    return np.where(delivered, 1.0, _random_guess_scores(kets, rng))


def _classical_scores(k: int, rng: np.random.Generator, p: float, mu: float) -> np.ndarray:
    params = cl.params_from_mu(mu)
    povm = tetrahedron_povm()
    kets = haar_kets(rng, k)
    tensor = cl.cloner_tensor(kets, params)
    delivered = rng.random(k) < p
    # C1 fidelity <φ|ρ_C1|φ>
    c1 = tensor.reshape(k, 2, 4)
    rho_c1 = np.einsum("nai,nbi->nab", c1, c1.conj())
    f_c1 = np.einsum("na,nab,nb->n", kets.conj(), rho_c1, kets).real
    idx = sample_discrete(_pair_rho(tensor, "c2ac"), povm, rng)
    g = np.abs(np.einsum("ni,ni->n", kets.conj(), _guess_kets(povm)[idx])) ** 2
    return np.where(delivered, f_c1, g)


def _quantum_memory_scores(k: int, rng: np.random.Generator, p: float) -> np.ndarray:
    table = sym_reversal_table()
    bell = incomplete_bell_povm()
    estimator = xi_povm(XiFamily(XI_MAX))
    kets = haar_kets(rng, k)
    tensor = cl.cloner_tensor(kets, cl.ClonerParams.symmetric())
    rho_pair = _pair_rho(tensor, "c1c2")
    delivered = rng.random(k) < p
    scores = np.empty(k)

    d = np.flatnonzero(delivered)
    if d.size:
        idx = sample_categorical(bell.probabilities(rho_pair[d]), rng)
        labels = bell.labels
        vecs = np.stack([cl.BELL_VECTORS[lab] for lab in labels])[idx]
        corr = np.stack([table[lab] for lab in labels])[idx]
        ac = np.einsum("ni,nia->na", vecs.conj(), tensor[d].reshape(-1, 4, 2))
        fixed = np.einsum("nab,nb->na", corr, ac)
        scores[d] = np.abs(np.einsum("ni,ni->n", kets[d].conj(), fixed)) ** 2 / np.sum(
            np.abs(ac) ** 2, axis=1
        )
    lost = np.flatnonzero(~delivered)
    if lost.size:
        t, ph, c = sample_covariant(rho_pair[lost], estimator, rng)
        guesses = u_omega_batch(t, ph, c)[..., :, 0]
        scores[lost] = np.abs(np.einsum("ni,ni->n", kets[lost].conj(), guesses)) ** 2
    return scores


def simulate_strategy(strategy: str, p: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Trial-by-trial simulation of one transmission strategy over a channel of transmittivity p."""
    p = _check_p(p)
    if strategy == "direct":
        return estimate(lambda k, rng: _direct_scores(k, rng, p), n, seed, workers)
    if strategy == "classicalAssist":
        mu = optimal_mu(p)
        return estimate(lambda k, rng: _classical_scores(k, rng, p, mu), n, seed, workers)
    if strategy == "quantumMemory":
        return estimate(lambda k, rng: _quantum_memory_scores(k, rng, p), n, seed, workers)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


# --- erasure-protected storage ------------------------------------------------------

CLONE_SCORE = 5 / 6
UNOT_SCORE = 5 / 9


def _storage_scores(k: int, rng: np.random.Generator, p: float, full_state: bool) -> np.ndarray:
    kets = haar_kets(rng, k)
    alive = rng.random((k, 3)) < p
    all_alive = alive.all(axis=1)
    clone_alive = (alive[:, 0] | alive[:, 1]) & ~all_alive
    only_ac = alive[:, 2] & ~alive[:, 0] & ~alive[:, 1]
    none = ~alive.any(axis=1)

    scores = np.empty(k)
    if not full_state:
        scores[all_alive] = 1.0
        scores[clone_alive] = CLONE_SCORE
        scores[only_ac] = UNOT_SCORE
        scores[none] = _random_guess_scores(kets[none], rng)
        return scores

    params = cl.ClonerParams.symmetric()
    for i in range(k):
        phi = PureState(kets[i])
        if none[i]:
            continue
        triple = cl.apply_cloner(phi, params)
        if all_alive[i]:
            branches = cl.bell_coefficients(phi, params)
            probs = np.array([b.probability for b in branches.values()])
            outcome = list(branches)[int(sample_categorical(probs, rng)[0])]
            scores[i] = abs(asym_reversal(triple, outcome).overlap(phi)) ** 2
        elif clone_alive[i]:
            marginal = cl.reduced_clone1(triple) if alive[i, 0] else cl.reduced_clone2(triple)
            scores[i] = fidelity_to_pure(marginal, phi)
        else:
            recovered = cl.unot_channel(cl.reduced_anticlone(triple))
            scores[i] = fidelity_to_pure(recovered, phi)
    scores[none] = _random_guess_scores(kets[none], rng)
    return scores


def simulate_storage(p: float, n: int, seed: int, full_state: bool = False, workers: int = 1) -> McEstimate:
    """Clone before storing; each of the three qubits survives independently with
    probability p and the best available recovery is scored.

    ``full_state`` recomputes every branch from the three-qubit state instead of
    using the known branch fidelities.
    """
    p = _check_p(p)
    return estimate(lambda k, rng: _storage_scores(k, rng, p, full_state), n, seed, workers)
