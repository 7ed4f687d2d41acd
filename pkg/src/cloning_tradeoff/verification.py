"""Named numerical checks aggregated by ``cloning-tradeoff verify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterator

import numpy as np

from . import channels as ch
from . import cloner as cl
from . import tradeoff as tr
from .montecarlo import McEstimate, derive_seed
from .povm import (
    XI_MAX,
    XI_MIN,
    XiFamily,
    completeness_residual,
    pi0_orthogonal,
    sample_covariant,
    tetrahedron_povm,
    xi_povm,
    bell_povm,
)
from .qmath import PureState, SphereRule, fidelity_to_pure, haar_kets, u_omega_batch

MC_SIGMAS = 3.0
MU_SATURATED_MAX = math.sqrt(2 / 3)


@dataclass
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float
    # "abs": |measured - expected| <= tol; "min": measured >= expected - tol
    mode: str = "abs"

    @property
    def passed(self) -> bool:
        if not (math.isfinite(self.measured) and math.isfinite(self.tolerance)):
            return False
        if self.mode == "min":
            return self.measured >= self.expected - self.tolerance
        return abs(self.measured - self.expected) <= self.tolerance

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d


def mc_check(name: str, est: McEstimate, expected: float) -> Check:
    return Check(name, est.mean, expected, MC_SIGMAS * est.stderr + 1e-12)


def mu_grid(points: int = 21) -> np.ndarray:
    """μ grid spanning the saturated branch [0, √(2/3)] of the asymmetric scheme."""
    return np.linspace(0.0, MU_SATURATED_MAX, points)


def xi_grid(points: int = 21) -> np.ndarray:
    return np.linspace(XI_MIN, XI_MAX, points)


# --- individual suites --------------------------------------------------------------

def cloner_checks(seed: int) -> Iterator[Check]:
    mus = np.linspace(0, 1, 21)
    yield Check("cloner.normalization", max(
        abs(p.mu**2 + p.mu * p.nu + p.nu**2 - 1) for p in map(cl.params_from_mu, mus)), 0.0, 1e-12)
    rng = np.random.default_rng(derive_seed(seed, 1))
    kets = haar_kets(rng, 20)
    err_eq3, err_f1 = 0.0, 0.0
    for mu in mus:
        p = cl.params_from_mu(mu)
        for k in kets:
            phi = PureState(k)
            t = cl.apply_cloner(phi, p)
            err_eq3 = max(err_eq3, float(np.linalg.norm(cl.assemble_from_bell(phi, p).amplitudes - t.state.amplitudes)))
            err_f1 = max(err_f1, abs(fidelity_to_pure(cl.reduced_clone1(t), phi) - (1 - mu**2 / 2)))
    yield Check("cloner.bell_decomposition", err_eq3, 0.0, 1e-12)
    yield Check("cloner.clone1_fidelity", err_f1, 0.0, 1e-12)


def povm_checks(seed: int, n: int) -> Iterator[Check]:
    yield Check("povm.pi0_completeness", completeness_residual(pi0_orthogonal(), "full"), 0.0, 1e-10)
    yield Check("povm.xi_completeness", max(
        completeness_residual(xi_povm(XiFamily(x))) for x in np.linspace(XI_MIN, XI_MAX, 5)), 0.0, 1e-10)
    tet = tetrahedron_povm()
    yield Check("povm.tetrahedron_constant", tet.normalization_constant, 1.0, 1e-12)
    yield Check("povm.tetrahedron_residual", tet.completeness_residual, 0.0, 1e-12)
    yield Check("povm.bell_completeness", bell_povm().completeness_residual, 0.0, 1e-14)
    yield Check("povm.discretization_consistency", max(
        abs(tr.asym_g_analytic(m) - tr.asym_g_covariant_povm(m)) for m in np.linspace(0, 1, 11)), 0.0, 1e-9)
    yield from histogram_checks(seed, n)


def histogram_checks(seed: int, n: int, bins: int = 20) -> Iterator[Check]:
    """Rejection-sampled cos θ histogram against the analytic outcome density."""
    rho, cov = histogram_fixture()
    counts, expected = sampler_histogram(rho, cov, n, derive_seed(seed, 2), bins)
    sigma = np.sqrt(n * expected * (1 - expected))
    worst = float(np.max(np.abs(counts - n * expected) / sigma))
    yield Check("povm.rejection_histogram_max_z", worst, 0.0, MC_SIGMAS)


def histogram_fixture():
    phi = PureState.normalized([np.cos(0.4), np.exp(0.7j) * np.sin(0.4)])
    t = cl.cloner_tensor(phi.amplitudes, cl.ClonerParams.symmetric())
    m = t.reshape(4, 2)
    return m @ m.conj().T, xi_povm(XiFamily(1.5))


def sampler_histogram(rho: np.ndarray, cov, n: int, seed: int, bins: int = 20):
    """(counts, expected bin probabilities) over equal-width cos θ bins."""
    rng = np.random.default_rng(seed)
    theta, _, _ = sample_covariant(np.broadcast_to(rho, (n, 4, 4)), cov, rng)
    edges = np.linspace(-1, 1, bins + 1)
    counts, _ = np.histogram(np.cos(theta), edges)
    # density integrated per bin: Gauss-Legendre in cos θ, uniform grid in φ and χ
    x, w = np.polynomial.legendre.leggauss(6)
    order = 8
    ang = 2 * np.pi * np.arange(order + 1) / (order + 1)
    expected = np.empty(bins)
    for b in range(bins):
        lo, hi = edges[b], edges[b + 1]
        cos_t = (hi - lo) / 2 * x + (hi + lo) / 2
        tt, pp, cc = np.meshgrid(np.arccos(cos_t), ang, ang, indexing="ij")
        dens = cov.density(rho, tt.ravel(), pp.ravel(), cc.ravel()).reshape(tt.shape).mean(axis=(1, 2))
        expected[b] = (hi - lo) / 2 * (w @ dens) / 2
    return counts, expected


def tradeoff_checks(seed: int, n: int) -> Iterator[Check]:
    yield Check("tradeoff.asym_saturation", max(
        abs((1 - m**2 / 2) - tr.banaszek_f(tr.asym_g_analytic(m))) for m in mu_grid()), 0.0, 1e-9)
    yield Check("tradeoff.sym_saturation", max(
        abs(tr.sym_gf(x).F - tr.banaszek_f(tr.sym_gf(x).G)) for x in xi_grid()), 0.0, 1e-12)
    lo, hi = tr.sym_gf(XI_MIN), tr.sym_gf(XI_MAX)
    yield Check("tradeoff.bell_limit_G", lo.G, 0.5, 1e-12)
    yield Check("tradeoff.bell_limit_F", lo.F, 1.0, 1e-12)
    yield Check("tradeoff.estimation_limit_G", hi.G, 2 / 3, 1e-12)
    yield Check("tradeoff.estimation_limit_F", hi.F, 2 / 3, 1e-12)
    yield Check("tradeoff.asym_reversal_min_fidelity", min_asym_reversal_fidelity(seed), 1.0, 1e-12)

    s = iter(range(100, 200))
    for mu in (0.0, cl.SYMMETRIC_MU):
        est = tr.asym_g_monte_carlo(mu, n, derive_seed(seed, next(s)))
        yield mc_check(f"mc.asym_G(mu={mu:.4f})", est, tr.asym_g_analytic(mu))
    for x in (XI_MAX, 1.5):
        g, f = tr.sym_monte_carlo(x, n, derive_seed(seed, next(s)))
        pt = tr.sym_gf(x)
        yield mc_check(f"mc.sym_G(xi={x:.4f})", g, pt.G)
        yield mc_check(f"mc.sym_F(xi={x:.4f})", f, pt.F)
    _, f = tr.sym_monte_carlo(XI_MIN, max(n // 10, 100), derive_seed(seed, next(s)))
    yield Check(f"mc.sym_F(xi={XI_MIN:.4f})", f.mean, 1.0, 1e-10)


def min_asym_reversal_fidelity(seed: int, n_states: int = 100) -> float:
    rng = np.random.default_rng(derive_seed(seed, 3))
    worst = 1.0
    for mu in np.linspace(0, 1, 5):
        p = cl.params_from_mu(mu)
        for k in haar_kets(rng, n_states):
            phi = PureState(k)
            t = cl.apply_cloner(phi, p)
            for label, br in cl.bell_coefficients(phi, p).items():
                if br.probability < 1e-20:
                    continue
                worst = min(worst, abs(tr.asym_reversal(t, label).overlap(phi)) ** 2)
    return worst


def min_sym_reversal_fidelity(seed: int, n_states: int = 100) -> float:
    table = ch.sym_reversal_table()
    rng = np.random.default_rng(derive_seed(seed, 4))
    worst = 1.0
    for k in haar_kets(rng, n_states):
        for label, v in table.items():
            a = v @ ch._ac_given_pair_outcome(k, cl.BELL_VECTORS[label])
            worst = min(worst, abs(np.vdot(k, a)) ** 2 / np.vdot(a, a).real)
    return worst


def unot_max_deviation(seed: int, n_states: int = 100) -> float:
    rng = np.random.default_rng(derive_seed(seed, 5))
    dev = 0.0
    for k in haar_kets(rng, n_states):
        phi = PureState(k)
        twice = cl.unot_channel(cl.unot_channel(phi.density()))
        dev = max(dev, abs(fidelity_to_pure(twice, phi) - 5 / 9))
    return dev


def channel_checks(seed: int, n: int, grid: int = 101) -> Iterator[Check]:
    ps = np.linspace(0, 1, grid)
    yield Check("channels.sym_reversal_min_fidelity", min_sym_reversal_fidelity(seed), 1.0, 1e-12)
    yield Check("channels.unot_twice", unot_max_deviation(seed), 0.0, 1e-12)
    yield Check("channels.optimizer_vs_closed_form", max(
        abs(ch.f_classical_optimized(p) - ch.f_classical(p)) for p in ps), 0.0, 1e-8)
    gaps = [min(ch.f_quantum_memory(p) - ch.f_classical(p), ch.f_classical(p) - ch.f_direct(p)) for p in ps]
    yield Check("channels.ordering_min_gap", min(gaps), 0.0, 1e-12, mode="min")
    adv = np.array([ch.storage_advantage(p) for p in ps])
    yield Check("storage.advantage_nonnegative", float(adv.min()), 0.0, 1e-12, mode="min")
    fine = np.linspace(0, 1, 30001)
    best = fine[np.argmax([ch.storage_advantage(p) for p in fine])]
    yield Check("storage.argmax", float(best), 1 / 3, 1e-3)
    yield Check("storage.max_advantage", ch.storage_advantage(1 / 3), 0.033, 1e-3)

    s = iter(range(200, 300))
    for strategy, p in (("direct", 0.5), ("classicalAssist", 0.0), ("quantumMemory", 0.5)):
        est = ch.simulate_strategy(strategy, p, n, derive_seed(seed, next(s)))
        yield mc_check(f"mc.{strategy}(p={p})", est, ch.ANALYTIC[strategy](p))
    est = ch.simulate_strategy("quantumMemory", 1.0, max(n // 100, 100), derive_seed(seed, next(s)))
    yield Check("mc.quantumMemory(p=1)", est.mean, 1.0, 1e-10)
    for p in (0.2, 1 / 3, 0.8):
        est = ch.simulate_storage(p, n, derive_seed(seed, next(s)))
        yield mc_check(f"mc.storage(p={p:.4f})", est, ch.f_storage_cloned(p))


SUITES: dict[str, Callable[..., Iterator[Check]]] = {
    "cloner": lambda seed, n: cloner_checks(seed),
    "povm": povm_checks,
    "tradeoff": tradeoff_checks,
    "channels": channel_checks,
}


def run_all(seed: int = 42, n: int = 100_000, tolerance: float | None = None) -> list[Check]:
    checks = [c for suite in SUITES.values() for c in suite(seed, n)]
    if tolerance is not None:
        for c in checks:
            c.tolerance = tolerance
    return checks
