"""
Tests for root data, weights and Weyl groups.
"""
from fractions import Fraction

import numpy as np
import pytest

from algebra.rootdata import (
    RootDataError, Weight, bar_involution, bar_node, build_root_datum, compose,
    length_of, longest_element, longest_in_parabolic, positive_roots,
    shortest_coset_rep, weyl_dimension, weyl_from_word, weyl_group
)


@pytest.fixture
def a2():
    return build_root_datum("A", 2, 0.5)


@pytest.fixture
def b2():
    return build_root_datum("B", 2, 0.5)


class TestBuildRootDatum:
    """Tests for build_root_datum."""

    def test_a2_cartan_and_label(self, a2):
        assert a2.cartan == ((2, -1), (-1, 2))
        assert a2.label == "A2"
        assert a2.q_r == (0.5, 0.5)

    def test_lowercase_type_accepted(self):
        assert build_root_datum("a", 1, 0.3).lie_type == "A"

    def test_b2_root_lengths(self, b2):
        """Node 1 carries the long root."""
        assert b2.d == (Fraction(2), Fraction(1))
        assert b2.q_r == pytest.approx((0.25, 0.5))
        assert b2.pairing(b2.simple_root(0), b2.simple_root(0)) == 4
        assert b2.pairing(b2.simple_root(1), b2.simple_root(1)) == 2

    def test_pairing_is_exact(self, a2):
        w1, w2 = a2.fundamental(0), a2.fundamental(1)
        assert a2.pairing(w1, w1) == Fraction(2, 3)
        assert a2.pairing(w1, w2) == Fraction(1, 3)
        assert a2.pairing(a2.simple_root(0), w1) == 1

    def test_a1_half_pairing(self):
        a1 = build_root_datum("A", 1, 0.5)
        assert a1.pairing(a1.fundamental(0), a1.fundamental(0)) == Fraction(1, 2)

    @pytest.mark.parametrize("lie_type,rank", [("E", 6), ("A", 4), ("B", 3)])
    def test_unsupported(self, lie_type, rank):
        with pytest.raises(RootDataError):
            build_root_datum(lie_type, rank, 0.5)

    @pytest.mark.parametrize("q", [0.0, 1.0, 1.5, -0.2])
    def test_q_outside_unit_interval(self, q):
        with pytest.raises(RootDataError):
            build_root_datum("A", 1, q)

    def test_validate_nodes(self, a2):
        assert a2.validate_nodes([1, 0, 1]) == frozenset({0, 1})
        with pytest.raises(RootDataError):
            a2.validate_nodes([2])

    def test_root_coords_and_cone(self, a2):
        alpha_sum = a2.simple_root(0) + a2.simple_root(1)
        assert a2.root_coords(alpha_sum) == (1, 1)
        assert a2.in_root_cone(alpha_sum)
        assert not a2.in_root_cone(-a2.simple_root(0))
        assert not a2.in_root_cone(a2.fundamental(0))


class TestWeight:

    def test_arithmetic(self):
        a, b = Weight((1, 0)), Weight((0, 2))
        assert a + b == Weight((1, 2))
        assert a - b == Weight((1, -2))
        assert -a == Weight((-1, 0))
        assert a * -4 == Weight((-4, 0))
        assert 3 * b == Weight((0, 6))

    def test_predicates(self):
        assert Weight((0, 0)).is_zero()
        assert Weight((1, 0)).is_dominant()
        assert not Weight((1, -1)).is_dominant()
        assert Weight((0, 3)).supported_on([1])
        assert not Weight((1, 3)).supported_on([1])

    def test_str(self):
        assert str(Weight((1, -2))) == "(1,-2)"


class TestWeylGroup:
    """Tests for Weyl group enumeration and lengths."""

    @pytest.mark.parametrize("lie_type,rank,order,roots", [
        ("A", 1, 2, 1), ("A", 2, 6, 3), ("A", 3, 24, 6), ("B", 2, 8, 4), ("G", 2, 12, 6),
    ])
    def test_orders(self, lie_type, rank, order, roots):
        datum = build_root_datum(lie_type, rank, 0.5)
        assert len(weyl_group(datum)) == order
        assert len(positive_roots(datum)) == roots
        assert longest_element(datum).length == roots

    def test_group_starts_with_identity(self, a2):
        assert weyl_group(a2)[0].is_identity()

    def test_word_and_action_agree(self, a2):
        elt = weyl_from_word(a2, [0, 1])
        lam = Weight((1, 0))
        assert elt.apply(lam) == a2.reflect(a2.reflect(lam, 1), 0)
        assert length_of(a2, elt) == 2

    def test_non_reduced_word(self, a2):
        with pytest.raises(RootDataError):
            weyl_from_word(a2, [0, 0])

    def test_braid_relation(self, a2):
        assert weyl_from_word(a2, [0, 1, 0]).action == weyl_from_word(a2, [1, 0, 1]).action

    def test_inverse(self, b2):
        elt = weyl_from_word(b2, [0, 1, 0])
        product = compose(b2, elt, elt.inverse())
        assert product.is_identity()
        assert elt.inverse().word == (0, 1, 0)

    def test_longest_sends_rho_to_minus_rho(self, b2):
        assert longest_element(b2).apply(b2.rho) == -b2.rho


class TestCosetRepresentatives:
    """w = w_0 w_{S,0} for the flag manifold G/K_S."""

    def test_full_flag(self, a2):
        assert shortest_coset_rep(a2, frozenset()).length == 3

    def test_whole_group(self, a2):
        assert shortest_coset_rep(a2, frozenset({0, 1})).is_identity()

    def test_projective_plane(self, a2):
        w = shortest_coset_rep(a2, frozenset({0}))
        assert w.length == 2
        assert longest_in_parabolic(a2, frozenset({0})).length == 1

    def test_b2_single_nodes(self, b2):
        assert shortest_coset_rep(b2, frozenset({0})).length == 3
        assert shortest_coset_rep(b2, frozenset({1})).length == 3


class TestBarInvolution:

    def test_a2_swaps_nodes(self, a2):
        assert [bar_node(a2, r) for r in a2.nodes] == [1, 0]
        assert bar_involution(a2, Weight((1, 0))) == Weight((0, 1))

    def test_a3_reverses_diagram(self):
        a3 = build_root_datum("A", 3, 0.5)
        assert [bar_node(a3, r) for r in a3.nodes] == [2, 1, 0]

    @pytest.mark.parametrize("lie_type,rank", [("A", 1), ("B", 2), ("G", 2)])
    def test_trivial(self, lie_type, rank):
        datum = build_root_datum(lie_type, rank, 0.5)
        assert [bar_node(datum, r) for r in datum.nodes] == list(datum.nodes)


class TestWeylDimension:

    @pytest.mark.parametrize("lie_type,rank,coords,dim", [
        ("A", 1, (1,), 2),
        ("A", 1, (3,), 4),
        ("A", 2, (1, 0), 3),
        ("A", 2, (1, 1), 8),
        ("A", 2, (2, 0), 6),
        ("B", 2, (1, 0), 5),
        ("B", 2, (0, 1), 4),
        ("B", 2, (1, 1), 16),
        ("G", 2, (1, 0), 7),
        ("G", 2, (0, 1), 14),
        ("A", 3, (0, 1, 0), 6),
    ])
    def test_dimensions(self, lie_type, rank, coords, dim):
        datum = build_root_datum(lie_type, rank, 0.5)
        assert weyl_dimension(datum, Weight(coords)) == dim

    def test_non_dominant(self, a2):
        with pytest.raises(RootDataError):
            weyl_dimension(a2, Weight((1, -1)))


def test_reflection_matrices_are_involutions(b2):
    for r in b2.nodes:
        m = weyl_from_word(b2, [r]).matrix
        np.testing.assert_array_equal(m @ m, np.eye(2, dtype=np.int64))
