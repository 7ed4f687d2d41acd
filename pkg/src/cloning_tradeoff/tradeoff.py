"""Estimation fidelity G versus output fidelity F for the two cloning schemes.

Asymmetric scheme: clone with (μ, ν), keep C1 as the output, measure (C2, AC)
with the tetrahedron POVM. Symmetric scheme: clone symmetrically, measure
(C1, C2) with the ξ-family covariant POVM, and correct AC with U Uᵀ σ_Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from . import cloner as cl
from .montecarlo import McEstimate, estimate, estimate_columns
from .povm import (
    XI_MAX,
    CovariantPovm,
    Povm,
    XiFamily,
    orthogonal_pair_povm,
    sample_covariant,
    sample_discrete,
    _complement,
    tetrahedron_povm,
    xi_povm,
)
from .qmath import (
    KET0,
    SIGMA_Y,
    PureState,
    SphereAngles,
    SphereRule,
    haar_kets,
    u_omega,
    u_omega_batch,
)

G_RANDOM = 0.5
G_MAX = 2.0 / 3.0
BOUND_SLACK = 1e-9
CROSS_CHECK_TOL = 1e-10


def banaszek_f(g: float) -> float:
    """Largest output fidelity compatible with estimation fidelity ``g`` (one qubit)."""
    if not G_RANDOM - 1e-12 <= g <= G_MAX + 1e-12:
        raise ValueError(f"G must lie in [1/2, 2/3], got {g}")
    g = min(max(g, G_RANDOM), G_MAX)
    return 1 / 3 + (np.sqrt(g - 1 / 3) + np.sqrt(2 / 3 - g)) ** 2


def satisfies_bound(f: float, g: float, slack: float = BOUND_SLACK) -> bool:
    return np.sqrt(max(f - 1 / 3, 0.0)) <= np.sqrt(g - 1 / 3) + np.sqrt(max(2 / 3 - g, 0.0)) + slack


def g_opt_n_copies(n: int) -> float:
    if n < 1:
        raise ValueError("need at least one copy")
    return (n + 1) / (n + 2)


@dataclass(frozen=True)
class TradeoffPoint:
    F: float
    G: float
    strategy: str
    parameter: float

    def __post_init__(self) -> None:
        if not satisfies_bound(self.F, self.G):
            raise ValueError(f"(F={self.F}, G={self.G}) violates the gain/disturbance bound")


# --- asymmetric scheme -----------------------------------------------------------

def _pair_rho(tensor: np.ndarray, pair: Literal["c2ac", "c1c2"]) -> np.ndarray:
    """Batch two-qubit marginals from cloner tensors of shape (..., 2, 2, 2)."""
    if pair == "c2ac":
        m = tensor.reshape(tensor.shape[:-3] + (2, 4))
        return np.einsum("...ai,...aj->...ij", m, m.conj())
    m = tensor.reshape(tensor.shape[:-3] + (4, 2))
    return np.einsum("...ia,...ja->...ij", m, m.conj())


def _guess_kets(povm: Povm) -> np.ndarray:
    return np.stack([e.guess.amplitudes for e in povm.effects])


def asym_g_at_states(kets: np.ndarray, mu: float, povm: Povm | None = None) -> np.ndarray:
    """G(|φ>) = Σ_i p_i |<φ|guess_i>|² for a batch of input kets (n, 2)."""
    povm = povm or tetrahedron_povm()
    p = cl.params_from_mu(mu)
    rho = _pair_rho(cl.cloner_tensor(kets, p), "c2ac")
    probs = povm.probabilities(rho)
    overlaps = np.abs(kets.conj() @ _guess_kets(povm).T) ** 2
    return np.sum(probs * overlaps, axis=-1)


def asym_g_quadrature(mu: float, order: int = 8) -> float:
    """Haar average of G(|φ>) by sphere quadrature (integrand has degree <= 4)."""
    t, p, c, w = SphereRule(order).nodes()
    kets = u_omega_batch(t, p)[..., :, 0]
    return float(w @ asym_g_at_states(kets, mu))


def asym_g_covariant_shortcut(mu: float) -> float:
    return float(asym_g_at_states(KET0[None], mu)[0])


def asym_g_analytic(mu: float, order: int = 8) -> float:
    """Estimation fidelity of the tetrahedron measurement on (C2, AC).

    Computed by quadrature over input states and cross-checked against the
    single-input value G(|0>), which must agree by covariance.
    """
    quad = asym_g_quadrature(mu, order)
    short = asym_g_covariant_shortcut(mu)
    if abs(quad - short) > CROSS_CHECK_TOL:
        raise RuntimeError(f"G quadrature {quad} and covariance shortcut {short} disagree")
    return quad


def asym_g_covariant_povm(mu: float, order: int = 8) -> float:
    """Same quantity with the continuous π0-generated POVM instead of the tetrahedron."""
    cov = orthogonal_pair_povm()
    rho = _pair_rho(cl.cloner_tensor(KET0, cl.params_from_mu(mu)), "c2ac")
    t, p, c, w = SphereRule(order, su2=cov.phase_sensitive).nodes()
    dens = cov.density(rho, t, p, c)
    guess_overlap = np.cos(t / 2) ** 2
    return float(np.sum(w * dens * guess_overlap))


@lru_cache(maxsize=1)
def asym_g_quadratic_form() -> np.ndarray:
    """G as the quadratic form (μ, ν) A (μ, ν)ᵀ.

    The (C2, AC) marginal is quadratic in the cloner amplitudes, so three
    evaluations fix A exactly.
    """
    g_nu = asym_g_analytic(0.0)  # μ = 0, ν = 1
    g_mu = asym_g_analytic(1.0)  # μ = 1, ν = 0
    s = cl.params_from_mu(0.5)
    cross = (asym_g_analytic(0.5) - g_mu * s.mu**2 - g_nu * s.nu**2) / (s.mu * s.nu)
    return np.array([[g_mu, cross / 2], [cross / 2, g_nu]])


_NORM_FORM = np.array([[1.0, 0.5], [0.5, 1.0]])


def asym_g_max() -> tuple[float, float]:
    """(largest reachable G, the μ reaching it), from the generalized eigenproblem
    A x = λ B x with B the cloner normalization form."""
    vals, vecs = eigh(asym_g_quadratic_form(), _NORM_FORM)
    x = vecs[:, -1] * np.sign(vecs[0, -1])
    x = x / np.sqrt(x @ _NORM_FORM @ x)
    return float(vals[-1]), float(x[0])


def asym_mu_for_g(g: float) -> float:
    """Smallest μ whose asymmetric scheme reaches estimation fidelity ``g``.

    On [0, μ*] G increases monotonically from 1/2 to its maximum.
    """
    g_max, mu_star = asym_g_max()
    if g >= g_max - 1e-14:
        return mu_star
    if g <= asym_g_analytic(0.0):
        return 0.0
    a = asym_g_quadratic_form()
    return float(brentq(lambda m: _form_g(a, m) - g, 0.0, mu_star, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def _form_g(a: np.ndarray, mu: float) -> float:
    p = cl.params_from_mu(mu)
    x = np.array([p.mu, p.nu])
    return float(x @ a @ x)


def asym_tradeoff_point(mu: float) -> TradeoffPoint:
    f1, _ = cl.clone_fidelities(cl.params_from_mu(mu))
    return TradeoffPoint(f1, asym_g_analytic(mu), "asymmetric", mu)


def asym_g_monte_carlo(mu: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Full pipeline: Haar input, cloner, sampled tetrahedron outcome on (C2, AC)."""
    povm = tetrahedron_povm()
    params = cl.params_from_mu(mu)
    guesses = _guess_kets(povm)

    def score(k: int, rng: np.random.Generator) -> np.ndarray:
        kets = haar_kets(rng, k)
        rho = _pair_rho(cl.cloner_tensor(kets, params), "c2ac")
        idx = sample_discrete(rho, povm, rng)
        return np.abs(np.einsum("ni,ni->n", kets.conj(), guesses[idx])) ** 2

    return estimate(score, n, seed, workers)


def asym_reversal(t: cl.CloneTriple, outcome: str) -> PureState:
    """C1 after a Bell outcome on (C2, AC) and the matching Pauli correction."""
    if outcome not in cl.BELL_VECTORS:
        raise ValueError(f"unknown Bell outcome {outcome!r}")
    c1 = t.state.amplitudes.reshape(2, 4) @ cl.BELL_VECTORS[outcome].conj()
    if np.linalg.norm(c1) < 1e-14:
        raise ValueError(f"outcome {outcome!r} has zero probability for this machine")
    return PureState.normalized(cl.BELL_PAULI[outcome] @ c1)


# --- symmetric scheme -----------------------------------------------------------

def sym_gf(xi: XiFamily | float) -> TradeoffPoint:
    x = xi.xi if isinstance(xi, XiFamily) else XiFamily(xi).xi
    return _sym_point(x, _complement(x))


def sym_point_for_g(g: float) -> TradeoffPoint:
    """Symmetric-scheme point at estimation fidelity ``g`` (ξ = √(9g - 3))."""
    if not G_RANDOM - 1e-12 <= g <= G_MAX + 1e-12:
        raise ValueError(f"G must lie in [1/2, 2/3], got {g}")
    x = min(np.sqrt(max(9 * g - 3, 1.5)), XI_MAX)
    return _sym_point(float(x), float(3 * np.sqrt(max(G_MAX - g, 0.0))))


def _sym_point(x: float, c: float) -> TradeoffPoint:
    # G = 1/3 + ξ²/9 written via √(3-ξ²) so that G = 2/3 exactly at ξ = √3
    g = 2 / 3 - c * c / 9
    f = 2 / 3 + (2 / 9) * x * c
    return TradeoffPoint(float(f), float(g), "symmetric", float(x))


def sym_correction(omega: SphereAngles) -> np.ndarray:
    """Feed-forward on the anticlone after outcome U: U Uᵀ σ_Y."""
    u = u_omega(omega)
    return u @ u.T @ SIGMA_Y


def _sym_correction_batch(theta, phi, chi) -> np.ndarray:
    u = u_omega_batch(theta, phi, chi)
    return u @ np.swapaxes(u, -1, -2) @ SIGMA_Y


def _sym_branch(tensor: np.ndarray, cov: CovariantPovm, theta, phi, chi):
    """Per-outcome probability density, guess overlap and corrected AC ket (unnormalized)."""
    vecs = cov.vectors(theta, phi, chi)
    ac = np.einsum("ni,nia->na", vecs.conj(), tensor.reshape(-1, 4, 2))
    corrected = np.einsum("nab,nb->na", _sym_correction_batch(theta, phi, chi), ac)
    return ac, corrected


def sym_quadrature(xi: XiFamily | float, phi: PureState | None = None, order: int = 8) -> tuple[float, float]:
    """(G, F) of the symmetric scheme by SU(2) quadrature for one input state."""
    f = xi if isinstance(xi, XiFamily) else XiFamily(xi)
    cov = xi_povm(f)
    ket = KET0 if phi is None else phi.amplitudes
    tensor = cl.cloner_tensor(ket, cl.ClonerParams.symmetric())
    t, p, c, w = SphereRule(order, su2=True).nodes()
    ac, corrected = _sym_branch(np.broadcast_to(tensor, (len(t), 2, 2, 2)), cov, t, p, c)
    guesses = u_omega_batch(t, p, c)[..., :, 0]
    dens = np.sum(np.abs(ac) ** 2, axis=1)
    g = np.sum(w * dens * np.abs(guesses @ ket.conj()) ** 2)
    fid = np.sum(w * np.abs(corrected @ ket.conj()) ** 2)
    return float(g), float(fid)


def sym_monte_carlo(xi: XiFamily | float, n: int, seed: int, workers: int = 1) -> tuple[McEstimate, McEstimate]:
    """Full symmetric pipeline; returns (G estimate, F estimate) from the same trials.

    Per trial: Haar input, symmetric cloner, SU(2) outcome sampled on (C1, C2),
    G scored against U|0>, F scored for the corrected anticlone.
    """
    f = xi if isinstance(xi, XiFamily) else XiFamily(xi)
    cov = xi_povm(f)
    params = cl.ClonerParams.symmetric()

    def score(k: int, rng: np.random.Generator) -> np.ndarray:
        kets = haar_kets(rng, k)
        tensor = cl.cloner_tensor(kets, params)
        t, p, c = sample_covariant(_pair_rho(tensor, "c1c2"), cov, rng)
        ac, corrected = _sym_branch(tensor, cov, t, p, c)
        guesses = u_omega_batch(t, p, c)[..., :, 0]
        g = np.abs(np.einsum("ni,ni->n", kets.conj(), guesses)) ** 2
        fid = np.abs(np.einsum("ni,ni->n", kets.conj(), corrected)) ** 2 / np.sum(np.abs(ac) ** 2, axis=1)
        return np.stack([g, fid], axis=1)

    g_est, f_est = estimate_columns(score, n, seed, workers)
    return g_est, f_est


def sym_g_monte_carlo(xi: XiFamily | float, n: int, seed: int, workers: int = 1) -> McEstimate:
    return sym_monte_carlo(xi, n, seed, workers)[0]


def sym_f_monte_carlo(xi: XiFamily | float, n: int, seed: int, workers: int = 1) -> McEstimate:
    return sym_monte_carlo(xi, n, seed, workers)[1]
