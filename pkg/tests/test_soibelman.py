"""
Tests for the Fock representation of Pol(SU_q(2)) and the representations theta_w.
"""
from fractions import Fraction

import numpy as np
import pytest

from algebra.rootdata import Weight, build_root_datum, weyl_from_word
from polalg.polgq import PolElement
from polalg.soibelman import (
    fock_generators, node_decomposition, su2_matrix_coeff, theta_node_table, theta_w, theta_wz
)
from polalg.tensorop import SafeBlock, TruncationError
from representations.repmod import build_irrep, lowest_extremal_vector

Q = 0.5


@pytest.fixture
def a1():
    return build_root_datum("A", 1, Q)


@pytest.fixture
def a2():
    return build_root_datum("A", 2, Q)


def random_coeff(rng, V):
    xi = rng.normal(size=V.dim) + 1j * rng.normal(size=V.dim)
    eta = rng.normal(size=V.dim) + 1j * rng.normal(size=V.dim)
    return PolElement.matrix_coeff(V, xi / np.linalg.norm(xi), eta / np.linalg.norm(eta))


class TestFockGenerators:
    """Relations of Pol(SU_q(2)) on the top-truncated Fock space."""

    def test_unitarity_relations(self):
        N = 12
        g = fock_generators(Q, N)
        a, b = g["a"].mat, g["b"].mat
        top = slice(0, N - 1)
        one = np.eye(N)
        np.testing.assert_allclose((a.conj().T @ a + b.conj().T @ b), one, atol=1e-14)
        np.testing.assert_allclose((a @ a.conj().T + Q ** 2 * b @ b.conj().T)[top, top], one[top, top], atol=1e-14)

    def test_commutation(self):
        g = fock_generators(Q, 10)
        a, b = g["a"].mat, g["b"].mat
        np.testing.assert_allclose(a @ b, Q * b @ a, atol=1e-14)
        np.testing.assert_allclose(b @ b.conj().T, b.conj().T @ b)

    def test_vacuum(self):
        g = fock_generators(Q, 6)
        np.testing.assert_allclose(g["a"].mat[:, 0], 0)
        assert g["b"].mat[0, 0] == 1

    def test_needs_two_levels(self):
        with pytest.raises(TruncationError):
            fock_generators(Q, 1)


class TestSu2MatrixCoefficients:

    def test_spin_half_is_generators(self):
        g = fock_generators(Q, 8)
        half = Fraction(1, 2)
        np.testing.assert_allclose(su2_matrix_coeff(Q, half, half, half, 8).mat, g["d"].mat, atol=1e-14)
        np.testing.assert_allclose(su2_matrix_coeff(Q, half, -half, -half, 8).mat, g["a"].mat, atol=1e-14)

    def test_spin_zero(self):
        np.testing.assert_allclose(su2_matrix_coeff(Q, 0, 0, 0, 5).mat, np.eye(5))

    def test_spin_one_rows_are_unitary(self):
        """sum_k t_{k i}^* t_{k j} = delta_ij on levels untouched by truncation."""
        N, M = 14, 6
        ms = [1, 0, -1]
        for i in ms:
            for j in ms:
                total = sum(su2_matrix_coeff(Q, 1, k, i, N).mat.conj().T @ su2_matrix_coeff(Q, 1, k, j, N).mat
                            for k in ms)
                expected = np.eye(M) if i == j else np.zeros((M, M))
                np.testing.assert_allclose(total[:M, :M], expected, atol=1e-12)

    @pytest.mark.parametrize("j,m,mp", [(1, 2, 0), (1, Fraction(1, 2), 0), (-1, 0, 0)])
    def test_invalid_spins(self, j, m, mp):
        with pytest.raises(TruncationError):
            su2_matrix_coeff(Q, j, m, mp, 6)


class TestNodeTables:

    def test_node_decomposition_of_adjoint(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        copies = node_decomposition(V, 0)
        assert sorted(c.two_j for c in copies) == [0, 1, 1, 2]

    def test_fundamental_table(self, a1):
        V = build_irrep(a1, Weight((1,)))
        table = theta_node_table(V, 0, 8)
        g = fock_generators(Q, 8)
        np.testing.assert_allclose(table[0][0], g["d"].mat, atol=1e-14)
        np.testing.assert_allclose(table[1][1], g["a"].mat, atol=1e-14)


class TestThetaW:
    """theta_w is a *-homomorphism into operators on l^2(Z_+)^{(x) l(w)}."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(11)

    def test_unit(self, a2):
        op = theta_w(weyl_from_word(a2, [0, 1]), PolElement.one(a2), 6)
        np.testing.assert_allclose(op.to_sparse().toarray(), np.eye(36), atol=1e-14)

    def test_empty_word_is_counit(self, a2, rng):
        p = random_coeff(rng, build_irrep(a2, Weight((1, 0))))
        op = theta_w([], p, 6)
        assert op.legs == 0
        assert sum(c for c, _ in op.terms) == pytest.approx(np.vdot(p.terms[0].bra, p.terms[0].ket))

    def test_homomorphism(self, a2, rng):
        w = weyl_from_word(a2, [0, 1])
        N = 10
        p = random_coeff(rng, build_irrep(a2, Weight((1, 0))))
        p2 = random_coeff(rng, build_irrep(a2, Weight((0, 1))))
        A, B, AB = theta_w(w, p, N), theta_w(w, p2, N), theta_w(w, p * p2, N)
        block = SafeBlock(2, N, 4).fit(depth=2, shift=max(A.max_shift(), B.max_shift()))
        diff = block.evaluate([(1.0, [AB]), (-1.0, [A, B])]).toarray()
        assert np.linalg.norm(diff) < 1e-10

    def test_star(self, a1, rng):
        w = weyl_from_word(a1, [0])
        p = random_coeff(rng, build_irrep(a1, Weight((2,))))
        block = SafeBlock(1, 10, 6)
        np.testing.assert_allclose(block.dense(theta_w(w, p.star(), 10)),
                                   block.dense(theta_w(w, p, 10).adjoint()), atol=1e-12)

    def test_highest_coefficient_fixes_vacuum(self, a2):
        w = weyl_from_word(a2, [0, 1, 0])
        lam = Weight((1, 1))
        V = build_irrep(a2, lam)
        p = PolElement.matrix_coeff(V, V.highest_vector(), lowest_extremal_vector(V, w))
        op = theta_w(w, p, 5)
        dense = op.to_sparse().toarray()
        assert abs(dense[0, 0]) == pytest.approx(1.0)
        assert np.linalg.norm(dense - np.diag(np.diag(dense))) < 1e-10

    def test_demazure_complement_vanishes(self, a2):
        """U(h_lam, eta) with eta outside U_q(b^+) h_{w^{-1} lam} is killed."""
        w = weyl_from_word(a2, [0])
        V = build_irrep(a2, Weight((1, 0)))
        low = V.indices_of(Weight((0, -1)))[0]
        op = theta_w(w, PolElement.matrix_coeff(V, V.highest_vector(), V.basis_vector(low)), 6)
        assert np.linalg.norm(op.to_sparse().toarray()) < 1e-14

    def test_theta_wz_trivial_character(self, a2, rng):
        w = weyl_from_word(a2, [1])
        p = random_coeff(rng, build_irrep(a2, Weight((1, 1))))
        a = theta_wz(w, [1.0, 1.0], p, 6).to_sparse().toarray()
        b = theta_w(w, p, 6).to_sparse().toarray()
        np.testing.assert_allclose(a, b, atol=1e-14)

    def test_theta_wz_wrong_length(self, a2):
        with pytest.raises(ValueError):
            theta_wz([0], [1.0], PolElement.one(a2), 4)
