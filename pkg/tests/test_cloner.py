import numpy as np
import pytest
from hypothesis import given, strategies as st

from cloning_tradeoff import cloner as cl
from cloning_tradeoff.qmath import (
    I2,
    KET0,
    KET1,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    PureState,
    bloch_vector,
    fidelity_to_pure,
    haar_kets,
    haar_unitary,
    kron,
)

MU_GRID = np.linspace(0, 1, 11)


def explicit_output(phi, mu, nu):
    """Cloner output built term by term with kron and a qubit permutation."""
    singlet = cl.PSI_MINUS
    first = kron(phi, singlet)  # |φ>_C1 |Ψ->_{C2,AC}
    # |φ>_C2 |Ψ->_{C1,AC}: build in order (C2, C1, AC), then swap the first two qubits
    second = kron(phi, singlet).reshape(2, 2, 2).transpose(1, 0, 2).reshape(8)
    return nu * first + mu * second


def orthogonal(phi):
    return np.array([-np.conj(phi[1]), np.conj(phi[0])])


class TestParams:
    @pytest.mark.parametrize("mu, nu", [(0.0, 1.0), (1 / np.sqrt(3), 1 / np.sqrt(3)), (1.0, 0.0)])
    def test_examples(self, mu, nu):
        p = cl.params_from_mu(mu)
        assert p.nu == pytest.approx(nu, abs=1e-15)

    @given(st.floats(0, 1))
    def test_normalization(self, mu):
        p = cl.params_from_mu(mu)
        assert abs(p.mu**2 + p.mu * p.nu + p.nu**2 - 1) < 1e-12

    @pytest.mark.parametrize("mu", [-0.1, 1.1])
    def test_out_of_range(self, mu):
        with pytest.raises(ValueError):
            cl.params_from_mu(mu)

    def test_rejects_unnormalized_pair(self):
        with pytest.raises(ValueError):
            cl.ClonerParams(0.5, 0.5)


class TestApplyCloner:
    def test_matches_explicit_construction(self, haar_states):
        for mu in MU_GRID:
            p = cl.params_from_mu(mu)
            for phi in haar_states[:10]:
                out = cl.apply_cloner(phi, p).state.amplitudes
                assert np.allclose(out, explicit_output(phi.amplitudes, p.mu, p.nu), atol=1e-15)

    def test_trivial_cloner(self, haar_states):
        p = cl.params_from_mu(0.0)
        phi = haar_states[0]
        t = cl.apply_cloner(phi, p)
        assert np.allclose(t.state.amplitudes, kron(phi.amplitudes, cl.PSI_MINUS))
        assert np.allclose(cl.reduced_clone1(t).matrix, phi.projector(), atol=1e-15)
        assert np.allclose(cl.reduced_clone2(t).matrix, I2 / 2, atol=1e-15)

    def test_symmetric_fidelity(self):
        t = cl.apply_cloner(PureState(KET0), cl.ClonerParams.symmetric())
        assert fidelity_to_pure(cl.reduced_clone1(t), PureState(KET0)) == pytest.approx(5 / 6, abs=1e-12)
        assert fidelity_to_pure(cl.reduced_clone2(t), PureState(KET0)) == pytest.approx(5 / 6, abs=1e-12)

    def test_norm(self, haar_states):
        for mu in MU_GRID:
            for phi in haar_states[:10]:
                out = cl.apply_cloner(phi, cl.params_from_mu(mu)).state.amplitudes
                assert abs(np.linalg.norm(out) - 1) < 1e-12


class TestFidelities:
    @pytest.mark.parametrize("mu, expected", [(1 / np.sqrt(3), (5 / 6, 5 / 6)), (0.0, (1.0, 0.5)), (1.0, (0.5, 1.0))])
    def test_examples(self, mu, expected):
        assert cl.clone_fidelities(cl.params_from_mu(mu)) == pytest.approx(expected, abs=1e-15)


class TestReducedStates:
    def test_symmetric_anticlone(self):
        t = cl.apply_cloner(PureState(KET0), cl.ClonerParams.symmetric())
        ac = cl.reduced_anticlone(t)
        assert np.allclose(ac.matrix, np.diag([1 / 3, 2 / 3]), atol=1e-15)
        assert fidelity_to_pure(ac, PureState(KET1)) == pytest.approx(2 / 3, abs=1e-12)

    def test_trivial_anticlone(self, haar_states):
        t = cl.apply_cloner(haar_states[3], cl.params_from_mu(0.0))
        assert np.allclose(cl.reduced_anticlone(t).matrix, I2 / 2, atol=1e-15)

    def test_closed_forms(self, haar_states):
        for mu in MU_GRID:
            p = cl.params_from_mu(mu)
            for phi in haar_states[:20]:
                proj = phi.projector()
                perp = np.outer(orthogonal(phi.amplitudes), orthogonal(phi.amplitudes).conj())
                t = cl.apply_cloner(phi, p)
                c1 = (1 - p.mu**2) * proj + p.mu**2 * I2 / 2
                c2 = (1 - p.nu**2) * proj + p.nu**2 * I2 / 2
                ac = p.mu * p.nu * perp + (p.mu**2 + p.nu**2) * I2 / 2
                assert np.allclose(cl.reduced_clone1(t).matrix, c1, atol=1e-12)
                assert np.allclose(cl.reduced_clone2(t).matrix, c2, atol=1e-12)
                assert np.allclose(cl.reduced_anticlone(t).matrix, ac, atol=1e-12)
                assert fidelity_to_pure(cl.reduced_clone1(t), phi) == pytest.approx(1 - mu**2 / 2, abs=1e-12)

    def test_universality(self, rng):
        """Clone fidelity does not depend on the input state."""
        for mu in MU_GRID:
            p = cl.params_from_mu(mu)
            vals = []
            for _ in range(100):
                phi = PureState(haar_unitary(rng) @ KET0)
                vals.append(fidelity_to_pure(cl.reduced_clone1(cl.apply_cloner(phi, p)), phi))
            assert np.ptp(vals) < 1e-12
            assert vals[0] == pytest.approx(1 - mu**2 / 2, abs=1e-12)

    def test_trace_consistency(self, haar_states):
        t = cl.apply_cloner(haar_states[0], cl.params_from_mu(0.3))
        total = sum(f(t).trace() for f in (cl.reduced_clone1, cl.reduced_clone2, cl.reduced_anticlone))
        assert total == pytest.approx(3, abs=1e-12)


class TestBell:
    def test_gram(self):
        b = np.stack([s.amplitudes for s in cl.bell_basis()])
        assert np.allclose(b.conj() @ b.T, np.eye(4))

    def test_z_maps_psi_plus_to_psi_minus(self):
        # direct expansion: σz⊗𝕀 (|01> + |10>)/√2 = (|01> - |10>)/√2
        assert np.vdot(cl.PSI_MINUS, kron(SIGMA_Z, I2) @ cl.PSI_PLUS) == pytest.approx(1)

    def test_singlet_antisymmetry(self):
        assert np.allclose(kron(SIGMA_X, SIGMA_X) @ cl.PSI_MINUS, -cl.PSI_MINUS)

    def test_symmetric_probabilities(self):
        phi = PureState(KET0)
        p = cl.ClonerParams.symmetric()
        probs = [b.probability for b in cl.bell_coefficients(phi, p).values()]
        assert probs == pytest.approx([3 / 4, 1 / 12, 1 / 12, 1 / 12], abs=1e-15)
        # oracle: project the cloner output on Bell states of (C2, AC)
        t = cl.apply_cloner(phi, p).state.amplitudes.reshape(2, 4)
        projected = [np.linalg.norm(t @ cl.BELL_VECTORS[k].conj()) ** 2 for k in cl.BELL_LABELS]
        assert projected == pytest.approx(probs, abs=1e-12)

    def test_trivial_probabilities(self):
        probs = [b.probability for b in cl.bell_coefficients(PureState(KET0), cl.params_from_mu(0)).values()]
        assert probs == pytest.approx([1, 0, 0, 0], abs=1e-15)

    def test_decomposition_matches_cloner(self, haar_states):
        for mu in MU_GRID:
            p = cl.params_from_mu(mu)
            for phi in haar_states[:20]:
                a = cl.assemble_from_bell(phi, p).amplitudes
                b = cl.apply_cloner(phi, p).state.amplitudes
                assert np.linalg.norm(a - b) < 1e-12

    def test_probabilities_sum_to_one(self):
        for mu in MU_GRID:
            probs = [b.probability for b in cl.bell_coefficients(PureState(KET0), cl.params_from_mu(mu)).values()]
            assert sum(probs) == pytest.approx(1, abs=1e-12)

    def test_corrections_restore_input(self, haar_states):
        for mu in MU_GRID[:-1]:
            p = cl.params_from_mu(mu)
            for phi in haar_states:
                t = cl.apply_cloner(phi, p).state.amplitudes.reshape(2, 4)
                for label, br in cl.bell_coefficients(phi, p).items():
                    if br.probability < 1e-20:
                        continue
                    c1 = br.correction @ (t @ cl.BELL_VECTORS[label].conj())
                    assert abs(np.vdot(phi.amplitudes, c1)) ** 2 / np.vdot(c1, c1).real > 1 - 1e-12


class TestUnot:
    def test_anticlone_fidelity(self, haar_states):
        for phi in haar_states[:20]:
            out = cl.unot_channel(phi.density())
            assert fidelity_to_pure(out, PureState(orthogonal(phi.amplitudes))) == pytest.approx(2 / 3, abs=1e-12)

    def test_matches_partial_trace(self, haar_states):
        for phi in haar_states[:20]:
            t = cl.apply_cloner(phi, cl.ClonerParams.symmetric())
            assert np.allclose(cl.unot_channel(phi.density()).matrix, cl.reduced_anticlone(t).matrix, atol=1e-12)

    def test_twice(self, haar_states):
        for phi in haar_states:
            out = cl.unot_channel(cl.unot_channel(phi.density()))
            assert fidelity_to_pure(out, phi) == pytest.approx(5 / 9, abs=1e-12)

    def test_unital(self):
        assert np.allclose(cl.unot_channel(DensityMatrix.maximally_mixed()).matrix, I2 / 2, atol=1e-15)

    def test_bloch_scaling(self, haar_states):
        for phi in haar_states[:20]:
            v = bloch_vector(phi)
            assert np.allclose(bloch_vector(cl.unot_channel(phi.density())), -v / 3, atol=1e-12)

    @given(st.floats(0, 1))
    def test_linearity(self, alpha):
        kets = haar_kets(np.random.default_rng(1), 2)
        r1, r2 = (PureState(k).density() for k in kets)
        mixed = r1.mix(r2, alpha)
        lhs = cl.unot_channel(mixed).matrix
        rhs = alpha * cl.unot_channel(r1).matrix + (1 - alpha) * cl.unot_channel(r2).matrix
        assert np.linalg.norm(lhs - rhs) < 1e-12
