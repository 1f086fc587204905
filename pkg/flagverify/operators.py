"""
The operators k_omega and x_r^{+-} inside theta_w(Pol(G_q/K_{S,q})), and the
substitution psi: E_r -> x_r^+, F_r -> x_r^-, L_omega -> k_omega.

k_{-4 lam} is built twice: as |diag X|^2 with X = theta_w(U(h_lam, h_{w^{-1} lam}))
and as theta_w of the coinvariant q^{-(rho - w rho, lam)} U(conj h (x) h, v_lam).
Every other k_omega is an entrywise power of these diagonals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, Tuple, Union

import numpy as np

from algebra.rootdata import Weight
from algebra.uqalg import E, GenWord, WordSum
from instrumentation import instrumentation
from polalg.polgq import PolElement, act_right
from polalg.soibelman import theta_w
from polalg.tensorop import SafeBlock, TensorOp, relative_residual
from representations.repmod import build_irrep, invariant_vector, lowest_extremal_vector

from .context import FlagContext, FlagVerificationError

SHIFT_TOLERANCE = 1e-12
ROUTE_GATE = 1e-8

Products = List[Tuple[complex, List[TensorOp]]]


@dataclass(eq=False)
class KOperator:
    """Positive diagonal operator, stored as one diagonal per leg times a scale."""
    omega: Weight
    N: int
    diagonals: Tuple[np.ndarray, ...]
    scale: float = 1.0

    @property
    def legs(self) -> int:
        return len(self.diagonals)

    @cached_property
    def op(self) -> TensorOp:
        if not self.diagonals:
            return TensorOp.scalar(0, self.N, self.scale)
        return TensorOp.elementary([np.diag(d) for d in self.diagonals], self.scale)

    def full_diagonal(self) -> np.ndarray:
        out = np.full(1, self.scale)
        for d in self.diagonals:
            out = np.kron(out, d)
        return out

    def power(self, t: Union[float, Fraction], omega: Weight) -> KOperator:
        t = float(t)
        return KOperator(omega, self.N, tuple(d ** t for d in self.diagonals), self.scale ** t)

    def __mul__(self, other: KOperator) -> KOperator:
        if (self.legs, self.N) != (other.legs, other.N):
            raise FlagVerificationError("k operators on different tensor spaces")
        return KOperator(
            self.omega + other.omega,
            self.N,
            tuple(a * b for a, b in zip(self.diagonals, other.diagonals)),
            self.scale * other.scale,
        )


@dataclass(eq=False)
class XOperator:
    r: int
    plus: TensorOp
    minus: TensorOp


# Pol(G_q) elements behind the operators

def highest_coefficient(ctx: FlagContext, lam: Weight) -> PolElement:
    """U(h_lam, h_{w^{-1} lam})."""
    V = build_irrep(ctx.datum, lam)
    return PolElement.matrix_coeff(V, V.highest_vector(), lowest_extremal_vector(V, ctx.w))


def k4_element(ctx: FlagContext, lam: Weight) -> PolElement:
    """q^{-(rho - w rho, lam)} U(conj h_lam (x) h_lam, v_lam), a U_q(k_S)-coinvariant."""
    datum = ctx.datum
    V = build_irrep(datum, lam)
    iv = invariant_vector(datum, lam, ctx.subset)
    h = V.highest_vector()
    shift = datum.rho - ctx.w.apply(datum.rho)
    coeff = datum.qpow(-datum.pairing(shift, lam))
    return PolElement.matrix_coeff(iv.host, np.kron(np.conj(h), h), iv.coords, coeff)


# k operators

def _factor_diagonal(ctx: FlagContext, omega: Weight, diag: np.ndarray) -> KOperator:
    """Split a diagonal of product form into per-leg diagonals."""
    legs, N = ctx.legs, ctx.N
    if np.max(np.abs(diag.imag)) > ROUTE_GATE * max(1.0, np.max(np.abs(diag))):
        raise FlagVerificationError(f"k operator for {omega} has a non-real diagonal")
    diag = diag.real
    if legs == 0:
        if diag[0] <= 0:
            raise FlagVerificationError(f"k operator for {omega} is not positive")
        return KOperator(omega, N, (), float(diag[0]))
    tensor = diag.reshape((N,) * legs)
    corner = tensor[(0,) * legs]
    if corner <= 0:
        raise FlagVerificationError(f"k operator for {omega} vanishes on the vacuum")
    diagonals = []
    for k in range(legs):
        index = [0] * legs
        index[k] = slice(None)
        diagonals.append(tensor[tuple(index)] / corner)
    kop = KOperator(omega, N, tuple(diagonals), float(corner))
    if np.min(kop.full_diagonal()) <= 0:
        raise FlagVerificationError(f"k operator for {omega} has a nonpositive diagonal entry")
    if relative_residual(kop.full_diagonal() - diag, diag) > ROUTE_GATE:
        raise FlagVerificationError(f"k operator for {omega} is not of product form")
    return kop


def k4_route_a(ctx: FlagContext, lam: Weight) -> np.ndarray:
    """Full diagonal of X^* X, X = theta_w(U(h_lam, h_{w^{-1} lam})) being diagonal."""
    X = theta_w(ctx.w, highest_coefficient(ctx, lam), ctx.N)
    dense = ctx.block.dense(X)
    off = dense - np.diag(np.diag(dense))
    if relative_residual(off, dense) > ROUTE_GATE:
        raise FlagVerificationError(f"theta_w(U(h_lam, h_(w^-1 lam))) is not diagonal for lam={lam}")
    return np.abs(X.diagonal()) ** 2


def k4_route_b(ctx: FlagContext, lam: Weight) -> TensorOp:
    return theta_w(ctx.w, k4_element(ctx, lam), ctx.N)


def k4_minus(ctx: FlagContext, lam: Weight) -> KOperator:
    """k_{-4 lam} for dominant lam; the two routes must agree on the safe block."""
    if not lam.is_dominant():
        raise FlagVerificationError(f"k_(-4 lam) needs a dominant weight, got {lam}")
    key = ("k4", lam)
    if key in ctx._operators:
        return ctx._operators[key]
    with instrumentation.time_operation("k4_minus", case=ctx.case_id, weight=str(lam)):
        block = ctx.block
        diag = k4_route_a(ctx, lam)
        dense_a = np.diag(diag[block.indices]).astype(complex)
        dense_b = block.dense(k4_route_b(ctx, lam))
        if relative_residual(dense_a - dense_b, dense_a) > ROUTE_GATE:
            raise FlagVerificationError(f"the two constructions of k_(-4 lam) disagree for lam={lam}")
        kop = _factor_diagonal(ctx, lam * -4, diag.astype(complex))
    ctx._operators[key] = kop
    return kop


def k_general(ctx: FlagContext, omega: Weight) -> KOperator:
    """k_omega = prod_s k_{-4 omega_s}^{-c_s / 4} for omega = sum_s c_s omega_s."""
    key = ("k", omega)
    if key in ctx._operators:
        return ctx._operators[key]
    kop = KOperator(omega, ctx.N, tuple(np.ones(ctx.N) for _ in range(ctx.legs)), 1.0)
    for s in ctx.datum.nodes:
        c = omega[s]
        if c:
            base = k4_minus(ctx, ctx.datum.fundamental(s))
            kop = kop * base.power(Fraction(-c, 4), ctx.datum.fundamental(s) * c)
    kop.omega = omega
    ctx._operators[key] = kop
    return kop


# x operators

def x_scale(ctx: FlagContext, r: int) -> float:
    qr = ctx.datum.q_r[r]
    return 1.0 / (1.0 / qr - qr)


def x_tail(ctx: FlagContext, r: int) -> TensorOp:
    """k_{4 omega_r - alpha_r}."""
    datum = ctx.datum
    return k_general(ctx, datum.fundamental(r) * 4 - datum.simple_root(r)).op


def explicit_element(ctx: FlagContext, r: int) -> PolElement:
    """U(h_{omega_r}, h_{w^{-1} omega_r})^* U(F_r h_{omega_r}, h_{w^{-1} omega_r})."""
    V = build_irrep(ctx.datum, ctx.datum.fundamental(r))
    h = V.highest_vector()
    low = lowest_extremal_vector(V, ctx.w)
    left = PolElement.matrix_coeff(V, h, low)
    right = PolElement.matrix_coeff(V, V.F[r] @ h, low)
    return left.star() * right


def x_plus_explicit(ctx: FlagContext, r: int) -> TensorOp:
    """q_r^{1/2} (q_r^{-1} - q_r)^{-1} theta_w(explicit element) k_{4 omega_r - alpha_r}."""
    scale = np.sqrt(ctx.datum.q_r[r]) * x_scale(ctx, r)
    body = theta_w(ctx.w, explicit_element(ctx, r), ctx.N)
    return (body * x_tail(ctx, r)).scaled(scale).compress()


def x_plus_definition(ctx: FlagContext, r: int) -> TensorOp:
    """(q_r^{-1} - q_r)^{-1} theta_w(k_{-4 omega_r} <| E_r) k_{4 omega_r - alpha_r}."""
    acted = act_right(k4_element(ctx, ctx.datum.fundamental(r)), E(r))
    body = theta_w(ctx.w, acted, ctx.N)
    return (body * x_tail(ctx, r)).scaled(x_scale(ctx, r)).compress()


def x_operator(ctx: FlagContext, r: int) -> XOperator:
    """x_r^+ from the explicit formula, checked against the definition; x_r^- is its adjoint."""
    key = ("x", r)
    if key in ctx._operators:
        return ctx._operators[key]
    with instrumentation.time_operation("x_operator", case=ctx.case_id, node=r + 1):
        plus = x_plus_explicit(ctx, r)
        other = x_plus_definition(ctx, r)
        block = ctx.block
        a, b = block.dense(plus), block.dense(other)
        if relative_residual(a - b, a) > ROUTE_GATE:
            raise FlagVerificationError(f"the two constructions of x_{r + 1}^+ disagree")
        xop = XOperator(r, plus, plus.adjoint())
    ctx._operators[key] = xop
    return xop


# psi

def _symbol_operator(ctx: FlagContext, sym) -> TensorOp:
    kind, data = sym
    if kind == "E":
        return x_operator(ctx, data).plus
    if kind == "F":
        return x_operator(ctx, data).minus
    return k_general(ctx, Weight(tuple(data))).op


def psi_products(ctx: FlagContext, x: Union[WordSum, GenWord]) -> Products:
    """psi(x) as a list of (scalar, [operators]) to be multiplied on a safe block."""
    terms = x.terms if isinstance(x, WordSum) else [x]
    out: Products = []
    for word in terms:
        ops = [_symbol_operator(ctx, sym) for sym in word.factors]
        out.append((complex(word.scalar), ops or [TensorOp.identity(ctx.legs, ctx.N)]))
    return out


def psi(ctx: FlagContext, x: Union[WordSum, GenWord]) -> TensorOp:
    """psi(x) as a single tensor operator (short words only; see psi_products)."""
    total = TensorOp.zero(ctx.legs, ctx.N)
    for scalar, ops in psi_products(ctx, x):
        term = ops[0]
        for op in ops[1:]:
            term = (term * op).compress()
        total = total + term.scaled(scalar)
    return total.compress()


def product_depth(products: Products) -> int:
    return max((len(ops) for _, ops in products), default=1)


def fitted_block(ctx: FlagContext, products: Products) -> SafeBlock:
    """Safe block on which every product in ``products`` is exact."""
    shift = 0
    for _, ops in products:
        for op in ops:
            shift = max(shift, op.max_shift(SHIFT_TOLERANCE))
    return ctx.block.fit(product_depth(products), shift)


# epsilon

def epsilon_fit(ctx: FlagContext, r: int) -> Tuple[float, float]:
    """Least-squares epsilon in [x^+, x^-] = (eps k_alpha^2 - k_alpha^{-2}) / (q_r - q_r^{-1}).

    Returns the fitted value and the relative residual at that value.
    """
    key = ("eps", r)
    if key not in ctx._operators:
        ctx._operators[key] = _epsilon_fit(ctx, r)
    return ctx._operators[key]


def _epsilon_fit(ctx: FlagContext, r: int) -> Tuple[float, float]:
    datum = ctx.datum
    qr = datum.q_r[r]
    scale = 1.0 / (qr - 1.0 / qr)
    alpha = datum.simple_root(r)
    x = x_operator(ctx, r)
    k2 = k_general(ctx, alpha * 2).op
    km2 = k_general(ctx, alpha * -2).op
    comm = [(1.0, [x.plus, x.minus]), (-1.0, [x.minus, x.plus])]
    block = fitted_block(ctx, comm)
    commutator = block.evaluate(comm).toarray()
    A = scale * block.dense(k2)
    B = commutator + scale * block.dense(km2)
    denom = float(np.vdot(A, A).real)
    if denom == 0.0:
        return 0.0, relative_residual(B, commutator)
    eps = float(np.vdot(A, B).real / denom)
    return eps, relative_residual(B - eps * A, commutator)
