import numpy as np
import pytest

from conelab.errors import DimensionMismatch, DimensionTooLarge
from conelab.linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    eigen_decompose,
    enumerate_words,
    is_vandergraft,
)


def eig_map(spectrum):
    return {ev.value: (ev.multiplicity, ev.degree) for ev in spectrum.eigenvalues}


class TestEigenDecompose:
    def test_triangular_2x2(self):
        spec = eigen_decompose([[2, 1], [0, 1]])
        assert eig_map(spec) == {(2 + 0j): (1, 1), (1 + 0j): (1, 1)}
        A = np.array([[2.0, 1.0], [0.0, 1.0]])
        for ev in spec.eigenvalues:
            v = ev.eigenvectors[:, 0]
            assert np.linalg.norm(A @ v - ev.value.real * v) < 1e-12

    def test_identity(self):
        spec = eigen_decompose(np.eye(3))
        assert eig_map(spec) == {(1 + 0j): (3, 1)}
        assert spec.eigenvalues[0].eigenvectors.shape == (3, 3)

    def test_jordan_block(self):
        spec = eigen_decompose([[1, 1], [0, 1]])
        assert eig_map(spec) == {(1 + 0j): (2, 2)}

    def test_conjugate_symmetry_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            spec = eigen_decompose(rng.normal(size=(5, 5)))
            values = [ev.value for ev in spec.eigenvalues for _ in range(ev.multiplicity)]
            assert sorted(map(complex, values), key=lambda z: (z.real, z.imag)) == sorted(
                map(lambda z: complex(np.conj(z)), values), key=lambda z: (z.real, z.imag)
            )

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            A = rng.normal(size=(4, 4))
            spec = eigen_decompose(A)
            if len(spec.eigenvalues) != 4 or not all(ev.is_real for ev in spec.eigenvalues):
                continue
            V = np.column_stack([ev.eigenvectors[:, 0] for ev in spec.eigenvalues])
            lam = np.array([ev.value.real for ev in spec.eigenvalues])
            assert np.linalg.norm(A @ V - V @ np.diag(lam)) < 1e-9 * max(1.0, np.linalg.norm(A))

    def test_similarity_with_distinct_diagonal_gives_degree_one(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            S = rng.normal(size=(4, 4)) + 2 * np.eye(4)
            if abs(np.linalg.det(S)) < 0.1:
                continue
            A = S @ np.diag([3.0, 1.5, -0.5, 0.25]) @ np.linalg.inv(S)
            spec = eigen_decompose(A)
            assert all(ev.degree == 1 for ev in spec.eigenvalues)

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLarge):
            eigen_decompose(np.eye(33))

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            eigen_decompose(np.ones((2, 3)))


class TestVandergraft:
    @pytest.mark.parametrize("A,expect,why", [
        ([[1, 1], [0, -1]], True, None),
        ([[0, -1], [1, 0]], False, "rho-not-eigenvalue"),
        (np.diag([1.0, -1.0, -1.0]), True, None),
        ([[-1, 0], [0, 0]], False, "rho-not-eigenvalue"),
    ])
    def test_examples(self, A, expect, why):
        rep = is_vandergraft(A)
        assert rep.is_vandergraft is expect
        assert rep.failed_condition == why

    def test_degree_violation(self):
        # radius attained at +1 with degree 1, while -1 carries a Jordan block
        A = np.array([[1.0, 0, 0], [0, -1.0, 1.0], [0, 0, -1.0]])
        rep = is_vandergraft(A)
        assert not rep.is_vandergraft
        assert rep.failed_condition == "degree-violation"

    def test_nilpotent_is_vandergraft(self):
        assert is_vandergraft([[0, 1], [0, 0]]).is_vandergraft

    def test_closed_form_agrees_with_spectral_test(self):
        # the 2x2 decision must match the generic spectral path
        rng = np.random.default_rng(7)
        tol = DEFAULT_TOL
        for _ in range(10_000):
            A = rng.normal(size=(2, 2)) * rng.choice([0.5, 1.0, 3.0])
            rep = is_vandergraft(A, tol)
            spec = rep.spectrum
            dom = spec.dominant(tol)
            spectral = dom is not None and all(
                ev.degree <= dom.degree for ev in spec.peripheral(tol)
            )
            assert rep.is_vandergraft == spectral, A

    def test_dominant_data_present_iff_vandergraft(self):
        rep = is_vandergraft(np.diag([2.0, 1.0]))
        assert rep.dominant_eigenvalue == pytest.approx(2.0)
        assert rep.dominant_eigenvectors.shape[1] >= 1


class TestEnumerateWords:
    def test_single_matrix(self):
        A = np.array([[2.0, 0], [0, 1.0]])
        words = list(enumerate_words([A], 2))
        assert [w for w, _ in words] == [(0,), (0, 0)]
        assert np.allclose(words[1][1], A @ A)

    def test_order_contract(self):
        A, B = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
        words = [w for w, _ in enumerate_words([A, B], 2)]
        assert words == [(0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]

    def test_products_match_words(self):
        rng = np.random.default_rng(2)
        fam = [rng.normal(size=(3, 3)) for _ in range(2)]
        for word, P in enumerate_words(fam, 3):
            expected = np.eye(3)
            for i in word:
                expected = expected @ fam[i]
            assert np.allclose(P, expected)

    def test_example_7_1_all_words_vandergraft(self):
        A = np.array([[1.0, 1.0], [0.0, -1.0]])
        B = np.array([[1.0, 2.0], [0.0, -1.0]])
        results = [(w, is_vandergraft(P).is_vandergraft) for w, P in enumerate_words([A, B], 4)]
        assert len(results) == 30
        assert all(flag for _, flag in results)


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(eig_cluster_tol=0.0)
