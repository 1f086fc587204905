"""
Tests for irreducible, conjugate and tensor product modules.
"""
import numpy as np
import pytest

from algebra.rootdata import (
    RootDataError, Weight, build_root_datum, longest_element, shortest_coset_rep, weyl_from_word
)
from representations.repmod import (
    ModuleConstructionError, build_irrep, commutant_dimension, conjugate_module, demazure_span,
    extremal_vector, generator_matrices, highest_weight_vectors, invariant_projector,
    invariant_subspace, invariant_vector, lowest_extremal_vector, relation_residuals, tensor,
    trivial_module
)


@pytest.fixture
def a2():
    return build_root_datum("A", 2, 0.5)


@pytest.fixture
def b2():
    return build_root_datum("B", 2, 0.4)


class TestBuildIrrep:
    """Tests for build_irrep."""

    @pytest.mark.parametrize("lie_type,rank,coords", [
        ("A", 1, (2,)), ("A", 2, (1, 1)), ("B", 2, (1, 1)), ("G", 2, (1, 0)), ("A", 3, (1, 0, 1)),
    ])
    def test_relations_hold(self, lie_type, rank, coords):
        datum = build_root_datum(lie_type, rank, 0.5)
        residuals = relation_residuals(build_irrep(datum, Weight(coords)))
        assert max(residuals.values()) < 1e-9

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("lie_type,rank,coords,dim", [
        ("A", 1, (2,), 3), ("A", 1, (3,), 4), ("A", 2, (2, 0), 6), ("A", 2, (0, 2), 6),
        ("B", 2, (1, 0), 5), ("B", 2, (0, 1), 4), ("C", 2, (1, 0), 4), ("G", 2, (1, 0), 7),
    ])
    def test_no_spurious_basis_vectors(self, lie_type, rank, coords, dim, q):
        """Weight spaces whose Gram block is rounding noise stay empty."""
        datum = build_root_datum(lie_type, rank, q)
        V = build_irrep(datum, Weight(coords))
        assert V.dim == dim
        assert max(relation_residuals(V).values()) < 1e-9

    def test_highest_vector_first(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        assert V.weights[0] == Weight((1, 1))
        assert V.highest == 0
        for e in V.E:
            assert np.linalg.norm(e @ V.highest_vector()) < 1e-14

    def test_weight_multiplicity(self, a2):
        """The adjoint module of A2 has a two-dimensional zero weight space."""
        V = build_irrep(a2, Weight((1, 1)))
        assert V.dim == 8
        assert len(V.indices_of(a2.zero())) == 2

    def test_irreducible(self, b2):
        V = build_irrep(b2, Weight((1, 0)))
        assert commutant_dimension(V) == 1
        assert list(highest_weight_vectors(V)) == [Weight((1, 0))]

    def test_real_and_adjoint(self, a2):
        V = build_irrep(a2, Weight((2, 1)))
        for e, f in zip(V.E, V.F):
            assert np.allclose(e.imag, 0)
            np.testing.assert_array_equal(f, e.T)

    def test_cached(self, a2):
        assert build_irrep(a2, Weight((1, 0))) is build_irrep(a2, Weight((1, 0)))

    def test_trivial(self, a2):
        V = trivial_module(a2)
        assert V.dim == 1
        np.testing.assert_allclose(V.L(a2.rho), np.eye(1))

    def test_rejects_non_dominant(self, a2):
        with pytest.raises(ModuleConstructionError):
            build_irrep(a2, Weight((1, -1)))

    def test_rejects_wrong_rank(self, a2):
        with pytest.raises(ModuleConstructionError):
            build_irrep(a2, Weight((1,)))

    def test_l_action(self):
        """L_omega acts on weight mu by q^{(omega, mu)/2}."""
        a1 = build_root_datum("A", 1, 0.5)
        V = build_irrep(a1, Weight((1,)))
        np.testing.assert_allclose(V.L_diag(Weight((1,))), [0.5 ** 0.25, 0.5 ** -0.25])

    def test_generator_matrices_labels(self, a2):
        names = set(generator_matrices(build_irrep(a2, Weight((1, 0)))))
        assert names == {"E1", "E2", "F1", "F2", "L_omega1", "L_omega2"}


class TestDerivedModules:
    """Conjugate and tensor product modules."""

    def test_conjugate_relations(self, a2):
        Vbar = conjugate_module(build_irrep(a2, Weight((1, 0))))
        assert max(relation_residuals(Vbar).values()) < 1e-10
        assert Vbar.highest_weight == Weight((0, 1))
        assert Vbar.weights[Vbar.highest] == Weight((0, 1))

    def test_conjugate_of_b2_is_self_dual_weightwise(self, b2):
        V = build_irrep(b2, Weight((0, 1)))
        Vbar = conjugate_module(V)
        assert sorted(w.coords for w in Vbar.weights) == sorted(w.coords for w in V.weights)

    def test_tensor_relations(self, b2):
        V = build_irrep(b2, Weight((0, 1)))
        W = build_irrep(b2, Weight((1, 0)))
        VW = tensor(V, W)
        assert VW.dim == 20
        assert max(relation_residuals(VW).values()) < 1e-9

    def test_tensor_decomposition(self, a2):
        """V(1,0) x V(0,1) = V(1,1) + V(0,0)."""
        V = build_irrep(a2, Weight((1, 0)))
        hw = highest_weight_vectors(tensor(V, conjugate_module(V)))
        assert {w: b.shape[1] for w, b in hw.items()} == {Weight((1, 1)): 1, Weight((0, 0)): 1}

    def test_tensor_needs_same_datum(self, a2, b2):
        with pytest.raises(ModuleConstructionError):
            tensor(build_irrep(a2, Weight((1, 0))), build_irrep(b2, Weight((1, 0))))


class TestExtremalVectors:

    def test_longest_gives_lowest_weight(self, a2):
        lam = Weight((1, 1))
        V = build_irrep(a2, lam)
        v = extremal_vector(V, longest_element(a2))
        assert V.weight_of(v) == -lam
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_lowest_extremal_uses_inverse(self, a2):
        lam = Weight((1, 0))
        V = build_irrep(a2, lam)
        w = weyl_from_word(a2, [0, 1])
        v = lowest_extremal_vector(V, w)
        assert V.weight_of(v) == w.inverse().apply(lam)

    def test_demazure_full_flag_is_everything(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        span = demazure_span(V, longest_element(a2))
        assert span.shape == (8, 8)
        np.testing.assert_allclose(span.conj().T @ span, np.eye(8), atol=1e-10)

    def test_demazure_identity_is_highest_line(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        span = demazure_span(V, weyl_from_word(a2, []))
        assert span.shape == (8, 1)


class TestInvariantVectors:
    """U_q(k_S)-invariant vectors."""

    def test_invariant_subspace_of_adjoint(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        assert invariant_subspace(V, []).shape[1] == 2
        assert invariant_subspace(V, [0]).shape[1] == 1
        assert invariant_subspace(V, [0, 1]).shape[1] == 0

    def test_projector(self, a2):
        V = build_irrep(a2, Weight((1, 1)))
        P = invariant_projector(V, [1])
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(V.E[1] @ P, 0, atol=1e-12)

    @pytest.mark.parametrize("subset", [[], [0], [1]])
    def test_invariant_vector(self, a2, subset):
        lam = Weight((1, 0)) if 0 not in subset else Weight((0, 1))
        iv = invariant_vector(a2, lam, subset)
        for s in subset:
            assert np.linalg.norm(iv.host.E[s] @ iv.coords) < 1e-10
            assert np.linalg.norm(iv.host.F[s] @ iv.coords) < 1e-10
        V = build_irrep(a2, lam)
        h = lowest_extremal_vector(V, shortest_coset_rep(a2, frozenset(subset)))
        assert np.vdot(np.kron(np.conj(h), h), iv.coords) == pytest.approx(1.0)

    def test_invariant_vector_rejects_unknown_node(self, a2):
        with pytest.raises(RootDataError):
            invariant_vector(a2, Weight((1, 0)), [4])
