import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqmac.channels import KrausChannel, depolarizing_channel, identity_channel
from cqmac.qmatrix import (
    DensityMatrix,
    DimensionMismatchError,
    PureState,
    entanglement_fidelity,
    fidelity,
    hermitian_eig,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    partial_trace_mat,
    purify,
    sqrt_psd,
    tensor,
    trace_norm,
)
from cqmac.randutil import complex_gaussian, random_density, random_pure
from cqmac.suites import (
    suite_eig_reconstruction,
    suite_fidelity_monotone,
    suite_gentle_measurement,
    suite_partial_trace,
    suite_product_fidelity_bound,
    suite_pure_fidelity_perturbation,
)


class TestHermitianEig:
    def test_identity(self):
        vals, vecs = hermitian_eig(np.eye(2))
        assert np.allclose(vals, [1.0, 1.0])
        assert np.allclose(vecs.conj().T @ vecs, np.eye(2))

    def test_diagonal(self):
        vals, vecs = hermitian_eig(np.diag([3.0, -1.0]))
        assert np.allclose(vals, [3.0, -1.0])
        # standard basis vectors up to phase
        assert abs(abs(vecs[0, 0]) - 1.0) < 1e-12
        assert abs(abs(vecs[1, 1]) - 1.0) < 1e-12

    def test_random_reconstruction(self, rng):
        g = complex_gaussian(rng, (6, 6))
        h = g + g.conj().T
        vals, vecs = hermitian_eig(h)
        err = np.max(np.abs((vecs * vals) @ vecs.conj().T - h))
        assert err <= 1e-9 * np.linalg.norm(h, 2)
        assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(6))) < 1e-9
        assert np.all(np.diff(vals) <= 1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            hermitian_eig(np.ones((2, 3)))


class TestTensor:
    def test_identities(self):
        assert np.allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_rank_one_projector(self):
        p0 = np.diag([1.0, 0.0])
        p1 = np.diag([0.0, 1.0])
        out = tensor(p0, p1)
        expect = np.zeros((4, 4))
        expect[1, 1] = 1.0
        assert np.allclose(out, expect)

    @given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
    @settings(max_examples=16, deadline=None)
    def test_index_formula(self, i, j, k, l):
        rng = np.random.default_rng(5)
        a = complex_gaussian(rng, (2, 2))
        b = complex_gaussian(rng, (2, 2))
        out = tensor(a, b)
        assert out[i * 2 + k, j * 2 + l] == pytest.approx(a[i, j] * b[k, l])


class TestPartialTrace:
    def test_product_state(self, rng):
        a = random_density(rng, (2,))
        b = random_density(rng, (3,))
        joint = DensityMatrix(tensor(a.mat, b.mat), (2, 3))
        assert np.allclose(partial_trace(joint, [0]).mat, a.mat, atol=1e-12)

    def test_bell_marginal(self):
        bell = maximally_entangled(2).density()
        assert np.allclose(partial_trace(bell, [1]).mat, np.eye(2) / 2)

    def test_summation_oracle(self, rng):
        rho = random_density(rng, (2, 2))
        expect = np.zeros((2, 2), dtype=complex)
        for k in range(2):
            bra = np.zeros((1, 2), dtype=complex)
            bra[0, k] = 1.0
            op = np.kron(np.eye(2), bra)
            expect += op @ rho.mat @ op.conj().T
        assert np.allclose(partial_trace(rho, [0]).mat, expect, atol=1e-12)

    def test_trace_and_psd_preserved(self, rng):
        rho = random_density(rng, (2, 2, 2))
        red = partial_trace(rho, [0, 2])
        assert abs(np.trace(red.mat) - 1.0) < 1e-10
        assert np.linalg.eigvalsh(red.mat)[0] > -1e-10

    def test_index_out_of_range(self, rng):
        rho = random_density(rng, (2, 2))
        with pytest.raises(DimensionMismatchError):
            partial_trace_mat(rho.mat, rho.dims, [5])


class TestFidelity:
    def test_self(self, rng):
        rho = random_density(rng, (3,))
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-8)

    def test_orthogonal(self):
        assert fidelity(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)

    def test_pure_vs_mixed(self):
        assert fidelity(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(0.5, abs=1e-10)

    def test_symmetric(self, rng):
        a = random_density(rng, (3,))
        b = random_density(rng, (3,))
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-8)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            fidelity(random_density(rng, (2,)), random_density(rng, (3,)))


class TestTraceNorm:
    def test_diag(self):
        assert trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0)

    def test_zero(self):
        assert trace_norm(np.zeros((3, 3))) == pytest.approx(0.0)

    def test_eigenvalue_oracle(self, rng):
        diff = random_density(rng, (2,)).mat - random_density(rng, (2,)).mat
        expect = np.sum(np.abs(np.linalg.eigvalsh(diff)))
        assert trace_norm(diff) == pytest.approx(expect, abs=1e-10)


class TestEntanglementFidelity:
    def test_identity_channel(self, rng):
        rho = random_density(rng, (3,))
        assert entanglement_fidelity(rho, identity_channel(3)) == pytest.approx(1.0, abs=1e-10)

    def test_depolarizing_on_mixed(self):
        val = entanglement_fidelity(maximally_mixed(2), depolarizing_channel(2))
        assert val == pytest.approx(0.25, abs=1e-10)

    def test_kraus_formula_oracle(self, rng):
        z = np.diag([1.0, -1.0]).astype(complex)
        ch = KrausChannel(
            (np.sqrt(0.5) * np.eye(2, dtype=complex), np.sqrt(0.5) * z), (2,), (2,)
        )
        rho = maximally_mixed(2)
        expect = sum(abs(np.trace(rho.mat @ k)) ** 2 for k in ch.kraus_ops)
        assert entanglement_fidelity(rho, ch) == pytest.approx(expect, abs=1e-10)

    def test_purification_independent(self, rng):
        rho = random_density(rng, (2,))
        ch = KrausChannel(
            (np.sqrt(0.7) * np.eye(2, dtype=complex), np.sqrt(0.3) * np.diag([1.0, -1.0]).astype(complex)),
            (2,),
            (2,),
        )
        base = entanglement_fidelity(rho, ch)
        # rotate the reference side of a purification: same value must result
        psi = purify(rho)
        u = np.linalg.qr(complex_gaussian(rng, (2, 2)))[0]
        vec = (np.kron(np.eye(2), u) @ psi.vec).reshape(-1)
        out = np.zeros((4, 4), dtype=complex)
        for k in ch.kraus_ops:
            w = np.kron(k, np.eye(2)) @ vec
            out += np.outer(w, w.conj())
        alt = float(np.real(vec.conj() @ out @ vec))
        assert base == pytest.approx(alt, abs=1e-10)


class TestPurify:
    def test_pure_input(self, rng):
        psi = random_pure(rng, (2,))
        out = purify(psi.density())
        red = partial_trace(out.density(), [0])
        assert np.allclose(red.mat, psi.density().mat, atol=1e-9)

    def test_maximally_mixed(self):
        out = purify(maximally_mixed(2))
        # marginal is I/2 and the state is maximally entangled
        red = partial_trace(out.density(), [0])
        assert np.allclose(red.mat, np.eye(2) / 2, atol=1e-9)

    def test_round_trip(self, rng):
        rho = random_density(rng, (2,), rank=2)
        out = purify(rho)
        red = partial_trace(out.density(), [0])
        assert np.max(np.abs(red.mat - rho.mat)) < 1e-9


class TestTypes:
    def test_density_validation(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([0.7, 0.7]), (2,))
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 0.5], [-0.5, 0.5]]), (2,))
        with pytest.raises(DimensionMismatchError):
            DensityMatrix(np.eye(2) / 2, (3,))

    def test_pure_state_validation(self):
        with pytest.raises(ValueError):
            PureState(np.array([1.0, 1.0]), (2,))

    def test_immutable(self, rng):
        rho = random_density(rng, (2,))
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 5.0

    def test_sqrt_psd(self, rng):
        rho = random_density(rng, (3,))
        root = sqrt_psd(rho.mat)
        assert np.allclose(root @ root, rho.mat, atol=1e-9)


class TestLemmaSuites:
    """Random-instance inequality suites (small sample counts here; the
    acceptance run uses the full 500)."""

    def test_eig_reconstruction(self):
        assert suite_eig_reconstruction(seed=1, samples=25).violations == 0

    def test_partial_trace(self):
        assert suite_partial_trace(seed=2, samples=25).violations == 0

    def test_fidelity_monotone(self):
        assert suite_fidelity_monotone(seed=3, samples=25).violations == 0

    def test_gentle_measurement(self):
        assert suite_gentle_measurement(seed=4, samples=50).violations == 0

    def test_pure_fidelity_perturbation(self):
        assert suite_pure_fidelity_perturbation(seed=5, samples=50).violations == 0

    def test_product_fidelity_bound(self):
        assert suite_product_fidelity_bound(seed=6, samples=50).violations == 0
