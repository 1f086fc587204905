"""
Tests for the verification context and the operators k_omega, x_r^{+-}.
"""
from unittest.mock import patch

import numpy as np
import pytest

from algebra.rootdata import Weight, build_root_datum
from algebra.uqalg import E, WordSum
from catalog.run_config import RunConfig
from flagverify import checks
from flagverify.context import FlagVerificationError, build_context, context_from_config
from flagverify.operators import (
    KOperator, epsilon_fit, fitted_block, highest_coefficient, k4_minus, k4_route_a, k_general,
    product_depth, psi, psi_products, x_operator
)
from polalg.polgq import PolElement
from polalg.soibelman import theta_w
from representations.repmod import build_irrep

Q = 0.5


@pytest.fixture
def a1():
    return build_root_datum("A", 1, Q)


@pytest.fixture
def a2():
    return build_root_datum("A", 2, Q)


class TestContext:
    """Tests for build_context and context_from_config."""

    def test_podles_sphere(self, a1):
        ctx = build_context(a1, [], 12, 6)
        assert ctx.legs == 1
        assert ctx.eps_target == (0,)
        assert ctx.case_id == "A1-S"

    def test_whole_group_has_no_legs(self, a1):
        ctx = build_context(a1, [0], 12, 6)
        assert ctx.legs == 0
        assert ctx.eps_target == (1,)

    def test_projective_plane_targets(self, a2):
        """bar(alpha_2) = alpha_1 lies in S = {1}, bar(alpha_1) does not."""
        ctx = build_context(a2, [0], 8, 3)
        assert ctx.legs == 2
        assert ctx.eps_target == (0, 1)

    def test_alternative_word(self, a2):
        ctx = build_context(a2, [], 8, 3, word=[1, 0, 1])
        assert ctx.word == (1, 0, 1)

    def test_wrong_word(self, a2):
        with pytest.raises(FlagVerificationError):
            build_context(a2, [], 8, 3, word=[0, 1])

    def test_from_config_is_one_based(self):
        config = RunConfig(lie_type="A", rank=2, q=0.3, subset=[2], N=10, M=4, word=[2, 1])
        ctx = context_from_config(config)
        assert ctx.subset == frozenset({1})
        assert ctx.word == (1, 0)
        assert ctx.case_id == "A2-S2-q0.3-w21"
        assert ctx.summary()["subset"] == [2]
        assert ctx.summary()["word"] == [2, 1]

    def test_rng_is_reproducible(self, a1):
        ctx = build_context(a1, [], 12, 6, seed=5)
        assert ctx.rng(3).integers(1000) == ctx.rng(3).integers(1000)


class TestKOperators:
    """k_{-4 lam} and its powers on the quantum Podles sphere."""

    @pytest.fixture
    def ctx(self, a1):
        return build_context(a1, [], 12, 6)

    def test_k4_is_q_power(self, ctx):
        """k_{-4 omega} e_n = q^{2n} e_n."""
        kop = k4_minus(ctx, Weight((1,)))
        np.testing.assert_allclose(kop.full_diagonal(), Q ** (2 * np.arange(12)), atol=1e-14)
        assert kop.omega == Weight((-4,))

    def test_route_a_matches(self, ctx):
        np.testing.assert_allclose(k4_route_a(ctx, Weight((1,))), Q ** (2 * np.arange(12)), atol=1e-14)

    def test_cached(self, ctx):
        assert k4_minus(ctx, Weight((1,))) is k4_minus(ctx, Weight((1,)))

    def test_needs_dominant_weight(self, ctx):
        with pytest.raises(FlagVerificationError):
            k4_minus(ctx, Weight((-1,)))

    def test_general_powers(self, ctx):
        """k_alpha = k_{-4 omega}^{-1/2} since alpha = 2 omega."""
        k_alpha = k_general(ctx, Weight((2,)))
        np.testing.assert_allclose(k_alpha.full_diagonal(), Q ** -np.arange(12.0), rtol=1e-12)

    def test_multiplicative(self, ctx):
        a = k_general(ctx, Weight((1,)))
        b = k_general(ctx, Weight((3,)))
        np.testing.assert_allclose((a * b).full_diagonal(), k_general(ctx, Weight((4,))).full_diagonal(), rtol=1e-12)

    def test_k_zero_is_identity(self, ctx):
        np.testing.assert_allclose(k_general(ctx, Weight((0,))).full_diagonal(), np.ones(12))

    def test_power_and_mismatch(self):
        kop = KOperator(Weight((1,)), 3, (np.array([1.0, 4.0, 9.0]),), 4.0)
        half = kop.power(0.5, Weight((0,)))
        np.testing.assert_allclose(half.full_diagonal(), [2.0, 4.0, 6.0])
        other = KOperator(Weight((1,)), 3, (), 1.0)
        with pytest.raises(FlagVerificationError):
            kop * other


class TestXOperators:

    def test_podles_epsilon_is_zero(self, a1):
        ctx = build_context(a1, [], 12, 6)
        eps, residual = epsilon_fit(ctx, 0)
        assert eps == pytest.approx(0.0, abs=1e-8)
        assert residual < 1e-8

    def test_whole_group_epsilon_is_one(self, a1):
        ctx = build_context(a1, [0], 12, 6)
        eps, residual = epsilon_fit(ctx, 0)
        assert eps == pytest.approx(1.0)
        assert residual < 1e-12

    def test_minus_is_adjoint(self, a1):
        ctx = build_context(a1, [], 12, 6)
        x = x_operator(ctx, 0)
        block = ctx.block
        np.testing.assert_allclose(block.dense(x.minus), block.dense(x.plus).conj().T, atol=1e-14)

    def test_x_plus_kills_vacuum(self, a1):
        ctx = build_context(a1, [], 12, 6)
        x = x_operator(ctx, 0)
        vac = np.zeros(12)
        vac[0] = 1.0
        assert np.linalg.norm(x.plus.apply(vac)) < 1e-12


class TestPsi:

    def test_unit(self, a1):
        ctx = build_context(a1, [], 10, 4)
        products = psi_products(ctx, WordSum.one())
        assert len(products) == 1
        np.testing.assert_allclose(ctx.block.dense(products[0][1][0]), np.eye(4))

    def test_word_length_drives_block(self, a1):
        ctx = build_context(a1, [], 10, 6)
        products = psi_products(ctx, E(0) * E(0) * E(0))
        assert product_depth(products) == 3
        block = fitted_block(ctx, products)
        assert block.M + 3 * max(op.max_shift(1e-12) for op in products[0][1]) <= 10

    def test_psi_matches_products(self, a1):
        ctx = build_context(a1, [], 10, 4)
        x = E(0) * WordSum.of(("F", 0)) + WordSum.of(("L", (2,)), scalar=0.5)
        products = psi_products(ctx, x)
        block = fitted_block(ctx, products)
        np.testing.assert_allclose(block.evaluate(products).toarray(), block.dense(psi(ctx, x)), atol=1e-12)


class TestProjectivePlane:
    """A2 with S = {1}: one node with epsilon 0, one with epsilon 1."""

    @pytest.fixture
    def ctx(self, a2):
        return build_context(a2, [0], 8, 3)

    def test_k_operators_positive(self, ctx):
        for s in ctx.datum.nodes:
            kop = k4_minus(ctx, ctx.datum.fundamental(s))
            assert np.min(kop.full_diagonal()) > 0
            assert kop.full_diagonal()[0] == pytest.approx(1.0)

    def test_epsilons(self, ctx):
        for r, target in zip(ctx.datum.nodes, ctx.eps_target):
            eps, residual = epsilon_fit(ctx, r)
            assert eps == pytest.approx(target, abs=1e-6)
            assert residual < 1e-7


class TestSoibelmanChecks:
    """Commutation with theta_w(U(h_lam, h_{w^{-1} lam})) and the theta_w homomorphism."""

    def test_commutation_scalars_both_signs(self, a2):
        ctx = build_context(a2, [0], 8, 3, samples=8)
        residual, detail = checks.check_commutation_scalars(ctx)
        assert residual < 1e-8
        assert detail == "50 instances, both signs"

    def test_adjoint_pair_takes_inverse_scalar(self, a1):
        """On the Podles sphere U(e_1, e_1) commutes with X up to q and its adjoint up to q^{-1}."""
        ctx = build_context(a1, [], 12, 6)
        lam = a1.fundamental(0)
        V = build_irrep(a1, lam)
        Y = theta_w(ctx.w, PolElement.matrix_coeff(V, V.basis_vector(1), V.basis_vector(1)), ctx.N)
        X = theta_w(ctx.w, highest_coefficient(ctx, lam), ctx.N)
        c = a1.qpow(-a1.pairing(lam, V.weights[1] - ctx.w.apply(V.weights[1])))
        assert c == pytest.approx(Q)

        def residual(products):
            return checks.relation_residual(fitted_block(ctx, products), products)

        Ys, Xs = Y.adjoint(), X.adjoint()
        assert residual([(1.0, [Y, X]), (-c, [X, Y])]) < 1e-10
        assert residual([(1.0, [Ys, Xs]), (-1.0 / c, [Xs, Ys])]) < 1e-10
        assert residual([(1.0, [Ys, Xs]), (-c, [Xs, Ys])]) > 1e-3

    def test_homomorphism_uses_sample_count(self, a1):
        ctx = build_context(a1, [], 12, 6, samples=5)
        with patch('flagverify.checks.theta_w', wraps=theta_w) as mock_theta:
            residual, detail = checks.check_theta_homomorphism(ctx)
        assert residual < 1e-8
        assert detail == "5 samples"
        assert mock_theta.call_count == 3 * 5
