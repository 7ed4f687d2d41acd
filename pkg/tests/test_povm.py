import numpy as np
import pytest

from cloning_tradeoff import cloner as cl
from cloning_tradeoff import povm as pv
from cloning_tradeoff.qmath import (
    KET0,
    DensityMatrix,
    PureState,
    SphereAngles,
    SphereRule,
    haar_angles,
    haar_unitary,
    kron,
    u_omega,
)
from cloning_tradeoff.verification import histogram_fixture, sampler_histogram

from conftest import random_density

SQ3 = np.sqrt(3)


def pair_rho(mu, phi=KET0, pair="c2ac"):
    t = cl.cloner_tensor(phi, cl.params_from_mu(mu))
    m = t.reshape(2, 4) if pair == "c2ac" else t.reshape(4, 2).T
    return m.T @ m.conj()


class TestPi0:
    def test_norm(self):
        s = pv.pi0_orthogonal()
        oracle = (4 + 2 * SQ3) / 2 * (1 + (2 - SQ3) ** 2)
        assert oracle == pytest.approx(4, abs=1e-14)
        assert np.vdot(s, s).real == pytest.approx(oracle, abs=1e-14)

    def test_no_00_component(self):
        assert pv.pi0_orthogonal()[0] == 0

    @pytest.mark.parametrize("order", [4, 8, 12])
    def test_integral_is_identity(self, order):
        m = pv.orthogonal_pair_povm().integral(order)
        assert np.linalg.norm(m - np.eye(4)) < 1e-10

    def test_two_orders_agree(self):
        cov = pv.orthogonal_pair_povm()
        assert np.linalg.norm(cov.integral(6) - cov.integral(16)) < 1e-12


class TestCovariantElement:
    def test_north_pole(self):
        s = pv.pi0_orthogonal()
        e = pv.covariant_element(s, SphereAngles(0.0, 0.0))
        assert np.allclose(e.operator, np.outer(s, s.conj()))
        assert e.guess.equal_up_to_phase(PureState(KET0))

    def test_trace_and_positivity(self, rng):
        s = pv.pi0_orthogonal()
        for _ in range(100):
            e = pv.covariant_element(s, haar_angles(rng, with_chi=True))
            assert np.trace(e.operator).real == pytest.approx(4, abs=1e-12)
            assert e.min_eigenvalue() >= -1e-12

    def test_positivity_many(self, rng):
        for seed in (pv.pi0_orthogonal(), pv.xi_seed(pv.XiFamily(1.4))):
            for _ in range(1000):
                e = pv.covariant_element(seed, haar_angles(rng, with_chi=True))
                assert e.min_eigenvalue() >= -1e-10

    def test_guess_direction(self, rng):
        om = haar_angles(rng)
        e = pv.covariant_element(pv.pi0_orthogonal(), om)
        assert e.guess.equal_up_to_phase(PureState(u_omega(om) @ KET0))

    def test_covariance(self, rng):
        """tr(Π(Ω)·VρV†) = tr(Π(V†Ω)·ρ) with V⊗V acting on the pair."""
        for seed in (pv.pi0_orthogonal(), pv.xi_seed(pv.XiFamily(1.5))):
            for _ in range(20):
                rho = random_density(rng, 4)
                v = haar_unitary(rng)
                u = u_omega(haar_angles(rng, with_chi=True))
                w = np.conj(v).T @ u  # rotated outcome as an SU(2) element
                vv = kron(v, v)
                a = np.vdot(kron(u, u) @ seed, vv @ rho @ vv.conj().T @ (kron(u, u) @ seed)).real
                b = np.vdot(kron(w, w) @ seed, rho @ (kron(w, w) @ seed)).real
                assert a == pytest.approx(b, abs=1e-12)


class TestTetrahedron:
    def test_vertex_gram(self):
        n = pv.TETRAHEDRON_VERTICES
        g = n @ n.T
        assert np.allclose(np.diag(g), 1, atol=1e-15)
        assert np.allclose(g[~np.eye(4, dtype=bool)], -1 / 3, atol=1e-15)

    def test_completeness(self):
        t = pv.tetrahedron_povm()
        raw = sum(
            np.outer(v, v.conj())
            for v in (
                pv.TETRAHEDRON_GAMMA * pv.antipodal_pair(n)
                - pv.TETRAHEDRON_DELTA * sum(pv.antipodal_pair(m) for j, m in enumerate(pv.TETRAHEDRON_VERTICES) if j != i)
                for i, n in enumerate(pv.TETRAHEDRON_VERTICES)
            )
        )
        c = np.trace(raw).real / 4
        assert t.normalization_constant == pytest.approx(c, abs=1e-15)
        assert c == pytest.approx(1, abs=1e-12)
        assert np.linalg.norm(raw - c * np.eye(4)) < 1e-12
        assert t.completeness_residual < 1e-12

    def test_antipodal_products(self):
        for n in pv.TETRAHEDRON_VERTICES:
            pair = pv.antipodal_pair(n).reshape(2, 2)
            # rank one with orthogonal factors
            u, s, vh = np.linalg.svd(pair)
            assert s[1] < 1e-15
            assert abs(np.vdot(u[:, 0], vh[0])) < 1e-15

    def test_guesses(self):
        for e, n in zip(pv.tetrahedron_povm().effects, pv.TETRAHEDRON_VERTICES):
            from cloning_tradeoff.qmath import bloch_vector

            assert np.allclose(bloch_vector(e.guess), n, atol=1e-15)


class TestXiFamily:
    def test_range(self):
        with pytest.raises(ValueError):
            pv.XiFamily(1.0)
        with pytest.raises(ValueError):
            pv.XiFamily(1.8)

    def test_estimation_endpoint(self):
        assert np.allclose(pv.xi_seed(pv.XiFamily(SQ3)), [SQ3, 0, 0, 0])

    def test_bell_endpoint(self):
        assert np.allclose(pv.xi_seed(pv.XiFamily(np.sqrt(1.5))), SQ3 * cl.PHI_PLUS)

    def test_norm(self):
        for x in np.linspace(pv.XI_MIN, pv.XI_MAX, 7):
            s = pv.xi_seed(pv.XiFamily(x))
            assert np.vdot(s, s).real == pytest.approx(3, abs=1e-14)

    @pytest.mark.parametrize("xi", np.linspace(np.sqrt(1.5), np.sqrt(3), 5))
    def test_complete_on_symmetric_subspace(self, xi):
        cov = pv.xi_povm(pv.XiFamily(xi))
        m = cov.integral()
        assert np.linalg.norm(m - pv.support_projector("symmetric")) < 1e-10
        assert abs(np.vdot(cl.PSI_MINUS, m @ cl.PSI_MINUS)) < 1e-12
        assert pv.completeness_residual(cov) < 1e-10

    def test_sphere_alone_is_not_enough(self):
        """Without the χ average the family is not complete away from ξ = √3."""
        cov = pv.xi_povm(pv.XiFamily(1.5))
        t, p, c, w = SphereRule(8, su2=False).nodes()
        v = cov.vectors(t, p, c)
        m = np.einsum("n,ni,nj->ij", w, v, v.conj())
        assert np.linalg.norm(m - pv.support_projector("symmetric")) > 0.1


class TestBellPovms:
    def test_full(self):
        b = pv.bell_povm()
        assert np.allclose(b.total(), np.eye(4))
        assert b.completeness_residual < 1e-14

    def test_incomplete(self):
        b = pv.incomplete_bell_povm()
        assert np.allclose(b.total(), pv.support_projector("symmetric"))
        assert np.linalg.matrix_rank(b.total()) == 3

    def test_incomplete_on_clones(self, haar_states):
        b = pv.incomplete_bell_povm()
        for phi in haar_states[:20]:
            rho = pair_rho(1 / SQ3, phi.amplitudes, "c1c2")
            assert b.probabilities(rho).sum() == pytest.approx(1, abs=1e-12)


class TestSampling:
    def test_tetrahedron_uniform(self):
        rng = np.random.default_rng(3)
        n = 100_000
        rho = np.eye(4) / 4
        idx = pv.sample_discrete(np.broadcast_to(rho, (n, 4, 4)), pv.tetrahedron_povm(), rng)
        freq = np.bincount(idx, minlength=4) / n
        sigma = np.sqrt(0.25 * 0.75 / n)
        assert np.all(np.abs(freq - 0.25) < 3 * sigma)

    def test_single_outcome_label(self, rng):
        rho = DensityMatrix(np.outer(cl.PHI_PLUS, cl.PHI_PLUS))
        for _ in range(20):
            assert pv.sample_outcome(rho, pv.bell_povm(), rng) == "phi+"

    def test_tetrahedron_on_pair(self):
        rng = np.random.default_rng(4)
        n = 100_000
        rho = pair_rho(1.0)
        povm = pv.tetrahedron_povm()
        p1 = povm.effects[0].probability(rho)
        idx = pv.sample_discrete(np.broadcast_to(rho, (n, 4, 4)), povm, rng)
        assert abs(np.mean(idx == 0) - p1) < 3 * np.sqrt(p1 * (1 - p1) / n)

    def test_support_violation(self, rng):
        rho = np.outer(cl.PSI_MINUS, cl.PSI_MINUS)
        with pytest.raises(ValueError):
            pv.sample_outcome(rho, pv.incomplete_bell_povm(), rng)
        with pytest.raises(ValueError):
            pv.sample_outcome(rho, pv.xi_povm(pv.XiFamily(1.5)), rng)

    def test_covariant_outcome_type(self, rng):
        out = pv.sample_outcome(pair_rho(0.3), pv.orthogonal_pair_povm(), rng)
        assert isinstance(out, SphereAngles)

    def test_rejection_histogram(self):
        n = 100_000
        rho, cov = histogram_fixture()
        counts, expected = sampler_histogram(rho, cov, n, seed=11)
        assert expected.sum() == pytest.approx(1, abs=1e-12)
        z = np.abs(counts - n * expected) / np.sqrt(n * expected * (1 - expected))
        assert z.max() < 3

    def test_histogram_density_oracle(self):
        """Bin probabilities from the fine grid agree with a plain Riemann sum."""
        rho, cov = histogram_fixture()
        _, expected = sampler_histogram(rho, cov, 100, seed=0, bins=4)
        m = 200
        cos_t = -1 + (np.arange(m) + 0.5) * 2 / m
        ang = 2 * np.pi * np.arange(24) / 24
        tt, pp, cc = np.meshgrid(np.arccos(cos_t), ang, ang, indexing="ij")
        dens = cov.density(rho, tt.ravel(), pp.ravel(), cc.ravel()).reshape(tt.shape).mean(axis=(1, 2))
        riemann = dens.reshape(4, -1).sum(axis=1) / m
        assert np.allclose(riemann, expected, atol=1e-4)
