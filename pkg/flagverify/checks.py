"""
Individual measurements. Each check takes a FlagContext and returns
(residual, detail); suites attach names and gates.

Relations sum_i c_i P_i = 0 between operator products are measured as
||sum_i c_i P_i|| / max(1, max_i ||c_i P_i||) on a safe block fitted to the
longest product.
"""
from __future__ import annotations

from itertools import product as iproduct
from typing import List, Tuple

import numpy as np
from scipy.sparse import linalg as spla

from algebra.rootdata import Weight, bar_node, longest_element, weyl_dimension, weyl_from_word
from algebra.uqalg import (
    E,
    F,
    L,
    WordSum,
    adjoint_action,
    adnil_relation,
    antipode,
    hopf_residuals,
    rescaled_commutator_defect,
    serre_relation,
    star,
)
from polalg.polgq import (
    PolElement,
    PolTerm,
    act_right,
    battery_words,
    coinvariance_test,
    pol_evaluate,
    pol_residual,
    switched_product,
)
from polalg.soibelman import theta_w
from polalg.tensorop import SafeBlock, TensorOp, relative_residual, vacuum
from representations.repmod import (
    build_irrep,
    conjugate_module,
    demazure_span,
    extremal_vector,
    invariant_projector,
    invariant_subspace,
    invariant_vector,
    lowest_extremal_vector,
    relation_residuals,
    tensor,
)
from representations.rmatrix import (
    highest_compression,
    intertwining_residual,
    r_action,
    r_flip_variants,
    triangularity_defect,
    yang_baxter_residual,
)

from .context import FlagContext, build_context
from .operators import (
    Products,
    epsilon_fit,
    explicit_element,
    fitted_block,
    highest_coefficient,
    k4_element,
    k4_minus,
    k4_route_a,
    k4_route_b,
    k_general,
    psi_products,
    x_operator,
    x_plus_definition,
    x_plus_explicit,
    x_scale,
    x_tail,
)

Measurement = Tuple[float, str]

DEGENERATION_SCALES = (1.0, 0.5, 0.1, 0.01)
COMMUTATION_MIN_SAMPLES = 50
UNIT_MODULUS_TOLERANCE = 1e-6


def relation_residual(block: SafeBlock, products: Products) -> float:
    total = None
    worst = 0.0
    for coeff, ops in products:
        part = block.evaluate([(coeff, ops)])
        worst = max(worst, float(spla.norm(part)))
        total = part if total is None else total + part
    if total is None:
        return 0.0
    return float(spla.norm(total)) / max(1.0, worst)


def _residual(ctx: FlagContext, products: Products) -> float:
    return relation_residual(fitted_block(ctx, products), products)


def _commutator(a: Products, b: Products) -> Products:
    """[A, B] for A, B given as product lists."""
    out: Products = []
    for ca, opsa in a:
        for cb, opsb in b:
            out.append((ca * cb, list(opsa) + list(opsb)))
            out.append((-ca * cb, list(opsb) + list(opsa)))
    return out


def _fundamentals(ctx: FlagContext) -> List[Weight]:
    return [ctx.datum.fundamental(r) for r in ctx.datum.nodes]


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _coinvariant_samples(ctx: FlagContext, count: int, salt: int) -> List[Tuple[PolElement, Weight]]:
    """U(e_j, v) with e_j a weight basis vector and v a random U_q(k_S)-invariant; returns (element, wt e_j)."""
    rng = ctx.rng(salt)
    hosts = []
    for lam in _fundamentals(ctx):
        host = invariant_vector(ctx.datum, lam, ctx.subset).host
        hosts.append((host, invariant_subspace(host, ctx.subset)))
    out = []
    for i in range(count):
        host, basis = hosts[i % len(hosts)]
        j = int(rng.integers(host.dim))
        ket = basis @ _random_unit(rng, basis.shape[1])
        out.append((PolElement.matrix_coeff(host, host.basis_vector(j), ket), host.weights[j]))
    return out


# Modules and Hopf structure

def _module_weights(ctx: FlagContext) -> List[Weight]:
    return _fundamentals(ctx) + [ctx.datum.rho]


def check_irrep_dimensions(ctx: FlagContext) -> Measurement:
    worst, details = 0, []
    for lam in _module_weights(ctx):
        V = build_irrep(ctx.datum, lam)
        expected = weyl_dimension(ctx.datum, lam)
        worst = max(worst, abs(V.dim - expected))
        details.append(f"{lam}:{V.dim}")
    return float(worst), " ".join(details)


def check_irrep_relations(ctx: FlagContext) -> Measurement:
    worst, where = 0.0, ""
    for lam in _module_weights(ctx):
        for name, value in relation_residuals(build_irrep(ctx.datum, lam)).items():
            if value > worst:
                worst, where = value, f"{name} at {lam}"
    return worst, where


def check_conjugate_modules(ctx: FlagContext) -> Measurement:
    worst = 0.0
    for lam in _fundamentals(ctx):
        V = conjugate_module(build_irrep(ctx.datum, lam))
        worst = max(worst, max(relation_residuals(V).values()))
    return worst, ""


def check_hopf_axioms(ctx: FlagContext) -> Measurement:
    residuals = hopf_residuals(ctx.datum, build_irrep(ctx.datum, ctx.datum.fundamental(0)))
    return max(residuals.values()), ", ".join(f"{k}={v:.2e}" for k, v in residuals.items())


def check_invariant_vectors(ctx: FlagContext) -> Measurement:
    worst = 0.0
    for lam in _fundamentals(ctx):
        iv = invariant_vector(ctx.datum, lam, ctx.subset)
        V = build_irrep(ctx.datum, lam)
        h = lowest_extremal_vector(V, ctx.w)
        worst = max(worst, abs(np.vdot(iv.coords, np.kron(np.conj(h), h)) - 1.0))
        for s in ctx.subset:
            worst = max(worst, np.linalg.norm(iv.host.E[s] @ iv.coords), np.linalg.norm(iv.host.F[s] @ iv.coords))
        P = invariant_projector(iv.host, ctx.subset)
        worst = max(worst, np.linalg.norm(P @ iv.coords - iv.coords))
    return float(worst), ""


def check_degeneration_slope(ctx: FlagContext) -> Measurement:
    """log-log slope of the effective epsilon of the rescaled relation; expected 4."""
    V = build_irrep(ctx.datum, ctx.datum.fundamental(0))
    worst, slopes = 0.0, []
    for r in ctx.datum.nodes:
        eps = [rescaled_commutator_defect(ctx.datum, b, V)[r].effective_epsilon for b in DEGENERATION_SCALES]
        slope = float(np.polyfit(np.log(DEGENERATION_SCALES), np.log(eps), 1)[0])
        slopes.append(round(slope, 6))
        worst = max(worst, abs(slope - 4.0))
    return worst, f"slopes {slopes}"


# R-matrices

def _rmatrix_pairs(ctx: FlagContext):
    lams = _fundamentals(ctx)
    return [(build_irrep(ctx.datum, a), build_irrep(ctx.datum, b)) for a in lams for b in lams]


def check_rmatrix_intertwining(ctx: FlagContext) -> Measurement:
    return max(intertwining_residual(r_action(V, W)) for V, W in _rmatrix_pairs(ctx)), ""


def check_rmatrix_triangularity(ctx: FlagContext) -> Measurement:
    return max(triangularity_defect(r_action(V, W)) for V, W in _rmatrix_pairs(ctx)), ""


def check_rmatrix_adjoint(ctx: FlagContext) -> Measurement:
    """R^* = R_21."""
    worst = 0.0
    for V, W in _rmatrix_pairs(ctx):
        action = r_action(V, W)
        worst = max(worst, float(np.linalg.norm(action.R.conj().T - r_flip_variants(action).R21)))
    return worst, ""


def check_yang_baxter(ctx: FlagContext) -> Measurement:
    V = build_irrep(ctx.datum, ctx.datum.fundamental(0))
    return yang_baxter_residual(V, V, V), ""


def check_highest_compression(ctx: FlagContext) -> Measurement:
    """(<h_lam| (x) id) R^{-1} (|h_lam> (x) id) = q^{-(lam, wt)} on every weight vector."""
    worst = 0.0
    for V, W in _rmatrix_pairs(ctx):
        block = highest_compression(r_action(V, W))
        expected = np.diag([ctx.datum.qpow(-ctx.datum.pairing(V.highest_weight, mu)) for mu in W.weights])
        worst = max(worst, float(np.linalg.norm(block - expected)))
    return worst, ""


# Pol(G_q)

def _switch_inputs(ctx: FlagContext, salt: int):
    rng = ctx.rng(salt)
    V1 = build_irrep(ctx.datum, ctx.datum.fundamental(0))
    V2 = build_irrep(ctx.datum, ctx.datum.fundamental(ctx.datum.rank - 1))
    return (V1, _random_unit(rng, V1.dim), _random_unit(rng, V1.dim),
            V2, _random_unit(rng, V2.dim), _random_unit(rng, V2.dim))


def _check_switch(ctx: FlagContext, form: int) -> Measurement:
    V1, xi1, eta1, V2, xi2, eta2 = _switch_inputs(ctx, salt=10 + form)
    direct = PolElement.matrix_coeff(V1, xi1, eta1) * PolElement.matrix_coeff(V2, xi2, eta2)
    switched = switched_product(V1, xi1, eta1, V2, xi2, eta2, form=form)
    return pol_residual(switched, direct, ctx.battery_depth), f"depth {ctx.battery_depth}"


def check_switch_form1(ctx: FlagContext) -> Measurement:
    return _check_switch(ctx, 1)


def check_switch_form2(ctx: FlagContext) -> Measurement:
    return _check_switch(ctx, 2)


def check_pol_star(ctx: FlagContext) -> Measurement:
    """<p^*, x> = conj <p, S(x)^*> on short words, and p^** = p."""
    V1, xi, eta, _, _, _ = _switch_inputs(ctx, salt=13)
    p = PolElement.matrix_coeff(V1, xi, eta)
    worst = pol_residual(p.star().star(), p, ctx.battery_depth)
    for syms in battery_words(ctx.datum, 2):
        x = WordSum.of(*syms)
        lhs = pol_evaluate(p.star(), x)
        rhs = np.conj(pol_evaluate(p, star(antipode(ctx.datum, x))))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return float(worst), ""


def check_coinvariance(ctx: FlagContext) -> Measurement:
    failures = [str(lam) for lam in _fundamentals(ctx) if not coinvariance_test(k4_element(ctx, lam), ctx.subset)]
    return float(len(failures)), f"not coinvariant: {failures}" if failures else ""


# Soibelman representations

def _random_pol(ctx: FlagContext, rng: np.random.Generator) -> PolElement:
    lam = ctx.datum.fundamental(int(rng.integers(ctx.datum.rank)))
    V = build_irrep(ctx.datum, lam)
    return PolElement.matrix_coeff(V, _random_unit(rng, V.dim), _random_unit(rng, V.dim))


def check_theta_homomorphism(ctx: FlagContext) -> Measurement:
    rng = ctx.rng(20)
    worst = 0.0
    for _ in range(ctx.samples):
        p, p2 = _random_pol(ctx, rng), _random_pol(ctx, rng)
        A, B = theta_w(ctx.w, p, ctx.N), theta_w(ctx.w, p2, ctx.N)
        AB = theta_w(ctx.w, p * p2, ctx.N)
        worst = max(worst, _residual(ctx, [(1.0, [AB]), (-1.0, [A, B])]))
    return worst, f"{ctx.samples} samples"


def check_theta_star(ctx: FlagContext) -> Measurement:
    rng = ctx.rng(21)
    worst = 0.0
    block = ctx.block
    for _ in range(ctx.samples):
        p = _random_pol(ctx, rng)
        a = block.dense(theta_w(ctx.w, p.star(), ctx.N))
        b = block.dense(theta_w(ctx.w, p, ctx.N).adjoint())
        worst = max(worst, relative_residual(a - b, b))
    return worst, f"{ctx.samples} samples"


def check_demazure_vanishing(ctx: FlagContext) -> Measurement:
    """theta_w(U(h_lam, eta)) = 0 for eta orthogonal to U_q(b^+) h_{w^{-1} lam}."""
    worst = 0.0
    block = ctx.block
    for lam in _module_weights(ctx):
        V = build_irrep(ctx.datum, lam)
        span = demazure_span(V, ctx.w)
        complement = np.eye(V.dim, dtype=complex) - span @ span.conj().T
        for j in range(V.dim):
            eta = complement[:, j]
            if np.linalg.norm(eta) < 1e-12:
                continue
            op = theta_w(ctx.w, PolElement.matrix_coeff(V, V.highest_vector(), eta), ctx.N)
            worst = max(worst, float(np.linalg.norm(block.dense(op))))
    return worst, ""


def check_highest_diagonal(ctx: FlagContext) -> Measurement:
    """theta_w(U(h_lam, h_{w^{-1} lam})) is diagonal with |vacuum entry| = 1."""
    worst = 0.0
    for lam in _module_weights(ctx):
        dense = ctx.block.dense(theta_w(ctx.w, highest_coefficient(ctx, lam), ctx.N))
        off = dense - np.diag(np.diag(dense))
        worst = max(worst, relative_residual(off, dense), abs(abs(dense[0, 0]) - 1.0))
    return worst, ""


def check_vacuum_uniqueness(ctx: FlagContext) -> Measurement:
    """For regular lam = rho the vacuum is the only eigenvector of modulus-1 eigenvalue."""
    diag = np.abs(np.diag(ctx.block.dense(theta_w(ctx.w, highest_coefficient(ctx, ctx.datum.rho), ctx.N))))
    count = int(np.sum(diag > 1.0 - UNIT_MODULUS_TOLERANCE))
    return float(abs(count - 1)), f"{count} eigenvalues of modulus 1"


def check_commutation_scalars(ctx: FlagContext) -> Measurement:
    """theta_w(U(xi, eta)) X = q^{-(lam, wt xi - w wt eta)} X theta_w(U(xi, eta)), X = theta_w(U(h_lam, h_{w^{-1} lam})).

    The adjoint pair satisfies the same relation with q^{+(lam, wt xi - w wt eta)}.
    """
    datum = ctx.datum
    rng = ctx.rng(22)
    worst = 0.0
    count = max(COMMUTATION_MIN_SAMPLES, ctx.samples)
    for _ in range(count):
        lam = datum.fundamental(int(rng.integers(datum.rank)))
        V = build_irrep(datum, datum.fundamental(int(rng.integers(datum.rank))))
        i, j = int(rng.integers(V.dim)), int(rng.integers(V.dim))
        Y = theta_w(ctx.w, PolElement.matrix_coeff(V, V.basis_vector(i), V.basis_vector(j)), ctx.N)
        X = theta_w(ctx.w, highest_coefficient(ctx, lam), ctx.N)
        c = datum.qpow(-datum.pairing(lam, V.weights[i] - ctx.w.apply(V.weights[j])))
        Ys, Xs = Y.adjoint(), X.adjoint()
        worst = max(
            worst,
            _residual(ctx, [(1.0, [Y, X]), (-c, [X, Y])]),
            _residual(ctx, [(1.0, [Ys, Xs]), (-1.0 / c, [Xs, Ys])]),
        )
    return worst, f"{count} instances, both signs"


def _alternative_words(ctx: FlagContext) -> List[Tuple[int, ...]]:
    out = []
    for word in iproduct(ctx.datum.nodes, repeat=ctx.legs):
        if word == ctx.word:
            continue
        try:
            alt = weyl_from_word(ctx.datum, word)
        except ValueError:
            continue
        if alt.action == ctx.w.action:
            out.append(word)
    return out


def _top_spectrum(ctx: FlagContext, word: Tuple[int, ...]) -> Tuple[np.ndarray, float]:
    """Moduli of the diagonal of theta_w(U(h_rho, h_{w^{-1} rho})) and the largest value off the block."""
    alt = build_context(ctx.datum, ctx.subset, ctx.N, ctx.M, word=word)
    diag = np.abs(theta_w(alt.w, highest_coefficient(alt, ctx.datum.rho), ctx.N).diagonal())
    inside = np.zeros(diag.size, dtype=bool)
    inside[alt.block.indices] = True
    outside = float(np.max(diag[~inside])) if np.any(~inside) else 0.0
    return diag, outside


def check_word_independence(ctx: FlagContext) -> Measurement:
    """Eigenvalues above the truncation horizon agree for every reduced word of w."""
    alternatives = _alternative_words(ctx)
    if not alternatives:
        return 0.0, "single reduced word"
    base, base_out = _top_spectrum(ctx, ctx.word)
    worst = 0.0
    for word in alternatives:
        other, other_out = _top_spectrum(ctx, word)
        horizon = max(base_out, other_out) * (1.0 + UNIT_MODULUS_TOLERANCE)
        a = np.sort(base[base > horizon])
        b = np.sort(other[other > horizon])
        if a.size != b.size:
            return 1.0, f"word {[i + 1 for i in word]}: {a.size} vs {b.size} eigenvalues"
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst, f"{len(alternatives)} alternative words"


# k operators

def check_k4_routes(ctx: FlagContext) -> Measurement:
    worst = 0.0
    block = ctx.block
    for lam in _fundamentals(ctx):
        a = np.diag(k4_route_a(ctx, lam)[block.indices]).astype(complex)
        b = block.dense(k4_route_b(ctx, lam))
        worst = max(worst, relative_residual(a - b, a))
    return worst, ""


def check_k4_vacuum(ctx: FlagContext) -> Measurement:
    """Diagonal entries of k_{-4 lam} lie in (0, 1] with value 1 on the vacuum."""
    worst = 0.0
    for lam in _fundamentals(ctx):
        d = k4_minus(ctx, lam).full_diagonal()
        worst = max(worst, abs(d[0] - 1.0), max(0.0, float(np.max(d)) - 1.0))
        if np.min(d) <= 0:
            return 1.0, f"nonpositive entry for {lam}"
    return worst, ""


def check_k_identity(ctx: FlagContext) -> Measurement:
    """k_0 = 1 and k_omega k_{-omega} = 1."""
    one = np.ones(1)
    worst = float(np.max(np.abs(k_general(ctx, ctx.datum.zero()).full_diagonal() - one)))
    for lam in _fundamentals(ctx):
        prod = k_general(ctx, lam) * k_general(ctx, -lam)
        worst = max(worst, float(np.max(np.abs(prod.full_diagonal() - 1.0))))
    return worst, ""


def check_k_multiplicative(ctx: FlagContext) -> Measurement:
    """k_{-4 lam} k_{-4 mu} = k_{-4(lam + mu)} with the right side built from V_{lam + mu}."""
    worst = 0.0
    lams = _fundamentals(ctx)
    for i, lam in enumerate(lams):
        for mu in lams[i:]:
            left = (k4_minus(ctx, lam) * k4_minus(ctx, mu)).full_diagonal()
            right = k4_minus(ctx, lam + mu).full_diagonal()
            worst = max(worst, relative_residual(left - right, right))
    return worst, ""


def check_k_commutation(ctx: FlagContext) -> Measurement:
    """k_{-4 lam} a = q^{2(lam, wt xi)} a k_{-4 lam} for coinvariant a = U(xi, eta)."""
    worst = 0.0
    for a, wt in _coinvariant_samples(ctx, ctx.samples, salt=30):
        A = theta_w(ctx.w, a, ctx.N)
        for lam in _fundamentals(ctx):
            K = k4_minus(ctx, lam).op
            c = ctx.datum.qpow(2 * ctx.datum.pairing(lam, wt))
            worst = max(worst, _residual(ctx, [(1.0, [K, A]), (-c, [A, K])]))
    return worst, f"{ctx.samples} samples"


def check_projector_form(ctx: FlagContext) -> Measurement:
    """theta_w(p_S |> (U(h, h_{w_0 lam})^* U(h, h_{w_0 lam}))) is proportional to k_{-4 lam}."""
    worst = 0.0
    block = ctx.block
    w0 = longest_element(ctx.datum)
    for lam in _fundamentals(ctx):
        V = build_irrep(ctx.datum, lam)
        u = PolElement.matrix_coeff(V, V.highest_vector(), extremal_vector(V, w0))
        p = u.star() * u
        projected = []
        for t in p.terms:
            P = invariant_projector(t.module, ctx.subset)
            projected.append(PolTerm(t.module, t.bra, P @ t.ket, t.coeff))
        A = block.dense(theta_w(ctx.w, PolElement(ctx.datum, projected), ctx.N))
        K = block.dense(k4_minus(ctx, lam).op)
        c = np.vdot(K, A) / np.vdot(K, K)
        if abs(c) < 1e-14:
            return 1.0, f"projected element vanishes for {lam}"
        worst = max(worst, relative_residual(A - c * K, A))
    return worst, ""


# x operators

def check_x_routes(ctx: FlagContext) -> Measurement:
    worst = 0.0
    block = ctx.block
    for r in ctx.datum.nodes:
        a = block.dense(x_plus_explicit(ctx, r))
        b = block.dense(x_plus_definition(ctx, r))
        worst = max(worst, relative_residual(a - b, a))
    return worst, ""


def check_x_weights(ctx: FlagContext) -> Measurement:
    """k_lam x_r^{+-} k_{-lam} = q^{+-(lam, alpha_r)/2} x_r^{+-}."""
    datum = ctx.datum
    worst = 0.0
    for r in datum.nodes:
        x = x_operator(ctx, r)
        for lam in _fundamentals(ctx):
            kp, km = k_general(ctx, lam).op, k_general(ctx, -lam).op
            c = datum.qpow(datum.pairing(lam, datum.simple_root(r)) / 2)
            worst = max(worst, _residual(ctx, [(1.0, [kp, x.plus, km]), (-c, [x.plus])]))
            worst = max(worst, _residual(ctx, [(1.0, [kp, x.minus, km]), (-1.0 / c, [x.minus])]))
    return worst, ""


def check_x_vacuum(ctx: FlagContext) -> Measurement:
    """x_r^+ kills the vacuum; x_r^- does exactly when epsilon_r = 1."""
    v = vacuum(ctx.legs, ctx.N)
    worst, details = 0.0, []
    for r in ctx.datum.nodes:
        x = x_operator(ctx, r)
        worst = max(worst, float(np.linalg.norm(x.plus.apply(v))))
        minus = float(np.linalg.norm(x.minus.apply(v)))
        if ctx.eps_target[r]:
            worst = max(worst, minus)
        elif minus < UNIT_MODULUS_TOLERANCE:
            worst = max(worst, 1.0)
        details.append(f"|x{r + 1}^- v|={minus:.3e}")
    return worst, " ".join(details)


def check_x_unitarity(ctx: FlagContext) -> Measurement:
    """x_r^- built from the starred element equals the adjoint of x_r^+; k operators are self-adjoint."""
    worst = 0.0
    block = ctx.block
    for r in ctx.datum.nodes:
        starred = theta_w(ctx.w, explicit_element(ctx, r).star(), ctx.N)
        scale = np.sqrt(ctx.datum.q_r[r]) * x_scale(ctx, r)
        minus = (x_tail(ctx, r) * starred).scaled(scale)
        a = block.dense(minus)
        b = block.dense(x_operator(ctx, r).minus)
        worst = max(worst, relative_residual(a - b, b))
        k = block.dense(k_general(ctx, ctx.datum.simple_root(r)).op)
        worst = max(worst, relative_residual(k - k.conj().T, k))
    return worst, ""


# U_q(g; S) relations

def check_epsilon_fit(ctx: FlagContext, r: int) -> Measurement:
    eps, residual = epsilon_fit(ctx, r)
    return residual, f"eps={eps:.12f}"


def check_epsilon_target(ctx: FlagContext, r: int) -> Measurement:
    eps, _ = epsilon_fit(ctx, r)
    return abs(eps - ctx.eps_target[r]), f"eps={eps:.12f} target={ctx.eps_target[r]}"


def check_cross_commutators(ctx: FlagContext) -> Measurement:
    """[x_r^+, x_s^-] = 0 for r != s."""
    worst = 0.0
    for r in ctx.datum.nodes:
        for s in ctx.datum.nodes:
            if r != s:
                comm = _commutator([(1.0, [x_operator(ctx, r).plus])], [(1.0, [x_operator(ctx, s).minus])])
                worst = max(worst, _residual(ctx, comm))
    return worst, ""


def _check_serre(ctx: FlagContext, kind: str) -> Measurement:
    worst = 0.0
    for r in ctx.datum.nodes:
        for s in ctx.datum.nodes:
            if r != s:
                worst = max(worst, _residual(ctx, psi_products(ctx, serre_relation(ctx.datum, r, s, kind))))
    return worst, ""


def check_serre_plus(ctx: FlagContext) -> Measurement:
    return _check_serre(ctx, "E")


def check_serre_minus(ctx: FlagContext) -> Measurement:
    return _check_serre(ctx, "F")


def check_adnil(ctx: FlagContext) -> Measurement:
    """psi(L_{-4 omega_s} <| E_s E_r^{1 - a_rs}) = 0."""
    worst = 0.0
    for r in ctx.datum.nodes:
        for s in ctx.datum.nodes:
            if r != s:
                worst = max(worst, _residual(ctx, psi_products(ctx, adnil_relation(ctx.datum, r, s))))
    return worst, ""


def check_eps_identity(ctx: FlagContext, r: int) -> Measurement:
    """q^{-(rho, omega_r - w^{-1} omega_r)} (q_r - q_r^{-1})^{-1}
    theta_w(U(conj F_r h (x) F_r h, (R~^{-1} - 1)(conj h' (x) h'))) = eps_r k_{-4 omega_r + 4 alpha_r}.
    """
    datum = ctx.datum
    lam = datum.fundamental(r)
    V = build_irrep(datum, lam)
    Vbar = conjugate_module(V)
    host = tensor(Vbar, V)
    fh = V.F[r] @ V.highest_vector()
    low = lowest_extremal_vector(V, ctx.w)
    action = r_action(Vbar, V)
    ket = (action.Rtilde_inv - np.eye(host.dim)) @ np.kron(np.conj(low), low)
    qr = datum.q_r[r]
    coeff = datum.qpow(-datum.pairing(datum.rho, lam - ctx.w.inverse().apply(lam))) / (qr - 1.0 / qr)
    lhs = theta_w(ctx.w, PolElement.matrix_coeff(host, np.kron(np.conj(fh), fh), ket, coeff), ctx.N)
    block = ctx.block
    a = block.dense(lhs)
    b = ctx.eps_target[r] * block.dense(k_general(ctx, lam * -4 + datum.simple_root(r) * 4).op)
    return relative_residual(a - b, a), ""


def _central_element(ctx: FlagContext, r: int) -> Products:
    """k_alpha^{-2} [x^+, x^-] + (q_r - q_r^{-1})^{-1} k_alpha^{-4}."""
    alpha = ctx.datum.simple_root(r)
    qr = ctx.datum.q_r[r]
    x = x_operator(ctx, r)
    km2 = k_general(ctx, alpha * -2).op
    km4 = k_general(ctx, alpha * -4).op
    return [(1.0, [km2, x.plus, x.minus]), (-1.0, [km2, x.minus, x.plus]), (1.0 / (qr - 1.0 / qr), [km4])]


def check_centrality(ctx: FlagContext, r: int) -> Measurement:
    worst = 0.0
    Z = _central_element(ctx, r)
    others: List[TensorOp] = []
    for s in ctx.datum.nodes:
        x = x_operator(ctx, s)
        others.extend([x.plus, x.minus, k_general(ctx, ctx.datum.fundamental(s)).op])
    for a, _ in _coinvariant_samples(ctx, min(ctx.samples, 6), salt=40 + r):
        others.append(theta_w(ctx.w, a, ctx.N))
    for op in others:
        worst = max(worst, _residual(ctx, _commutator(Z, [(1.0, [op])])))
    return worst, f"against {len(others)} operators"


# Equivariance

def _check_action(ctx: FlagContext, kind: str) -> Measurement:
    datum = ctx.datum
    worst = 0.0
    for idx, (a, _) in enumerate(_coinvariant_samples(ctx, ctx.samples, salt=50)):
        A = theta_w(ctx.w, a, ctx.N)
        r = idx % datum.rank
        qr = datum.q_r[r]
        if kind == "L":
            omega = datum.fundamental(r)
            lhs = theta_w(ctx.w, act_right(a, L(omega)), ctx.N)
            rhs: Products = [(1.0, [k_general(ctx, -omega).op, A, k_general(ctx, omega).op])]
        else:
            x = x_operator(ctx, r)
            xop, y, c = (x.plus, E(r), -qr) if kind == "E" else (x.minus, F(r), -1.0 / qr)
            k_alpha = k_general(ctx, datum.simple_root(r)).op
            lhs = theta_w(ctx.w, act_right(a, y), ctx.N)
            rhs = [(c, [xop, A, k_alpha]), (1.0, [k_alpha, A, xop])]
        products = [(1.0, [lhs])] + [(-coeff, ops) for coeff, ops in rhs]
        worst = max(worst, _residual(ctx, products))
    return worst, f"{ctx.samples} samples"


def check_action_E(ctx: FlagContext) -> Measurement:
    return _check_action(ctx, "E")


def check_action_F(ctx: FlagContext) -> Measurement:
    return _check_action(ctx, "F")


def check_action_L(ctx: FlagContext) -> Measurement:
    return _check_action(ctx, "L")


def _fin_part_words(ctx: FlagContext) -> List[WordSum]:
    words = battery_words(ctx.datum, 2)
    short = [w for w in words if len(w) <= 1]
    long = [w for w in words if len(w) == 2]
    rng = ctx.rng(60)
    picked = rng.choice(len(long), size=min(ctx.samples, len(long)), replace=False) if long else []
    return [WordSum.of(*w) for w in short] + [WordSum.of(*long[i]) for i in sorted(picked)]


def check_fin_part(ctx: FlagContext) -> Measurement:
    """psi(L_{-4 lam} <| y) = theta_w(k_{-4 lam} <| y) for lam with bar(lam) supported off S."""
    datum = ctx.datum
    lams = [datum.fundamental(r) for r in datum.nodes if bar_node(datum, r) not in ctx.subset]
    if not lams:
        return 0.0, "no admissible weights"
    worst = 0.0
    words = _fin_part_words(ctx)
    for lam in lams:
        element = k4_element(ctx, lam)
        for y in words:
            lhs = psi_products(ctx, adjoint_action(datum, L(lam * -4), y))
            rhs = theta_w(ctx.w, act_right(element, y), ctx.N)
            worst = max(worst, _residual(ctx, lhs + [(-1.0, [rhs])]))
    return worst, f"{len(lams)} weights x {len(words)} words"
