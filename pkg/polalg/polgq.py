"""
Pol(G_q) as finite sums of matrix coefficients U(xi, eta) over explicit modules.

Two elements are compared through the pairing oracle: their values on every
monomial in E_r, F_r, L_{+-omega_s} up to a fixed length.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from algebra.rootdata import RootDatum, Weight
from algebra.uqalg import GenWord, WordSum, evaluate
from representations.repmod import (
    Module,
    conjugate_module,
    invariant_subspace,
    tensor,
    trivial_module,
)
from representations.rmatrix import r_action, r_flip_variants

MAX_TENSOR_DIM = 4096
DEFAULT_BATTERY_DEPTH = 4


class PolSizeError(ValueError):
    """Raised when a product would live on a tensor module above the size cap."""
    pass


class PolWeightError(ValueError):
    """Raised when a vector cannot be split into weight components."""
    pass


@dataclass
class PolTerm:
    """coeff * U(bra, ket) on ``module``."""
    module: Module
    bra: np.ndarray
    ket: np.ndarray
    coeff: complex = 1.0


@dataclass
class PolElement:
    datum: RootDatum
    terms: List[PolTerm] = field(default_factory=list)

    @classmethod
    def one(cls, datum: RootDatum) -> PolElement:
        V = trivial_module(datum)
        e = np.ones(1, dtype=complex)
        return cls(datum, [PolTerm(V, e, e.copy(), 1.0)])

    @classmethod
    def zero(cls, datum: RootDatum) -> PolElement:
        return cls(datum, [])

    @classmethod
    def matrix_coeff(cls, module: Module, bra: np.ndarray, ket: np.ndarray, coeff: complex = 1.0) -> PolElement:
        bra = np.asarray(bra, dtype=complex)
        ket = np.asarray(ket, dtype=complex)
        if bra.shape != (module.dim,) or ket.shape != (module.dim,):
            raise PolSizeError(f"vectors of shape {bra.shape}, {ket.shape} do not fit {module.key}")
        return cls(module.datum, [PolTerm(module, bra, ket, complex(coeff))])

    def __add__(self, other: PolElement) -> PolElement:
        return PolElement(self.datum, self.terms + other.terms)

    def __sub__(self, other: PolElement) -> PolElement:
        return self + other.scaled(-1.0)

    def __neg__(self) -> PolElement:
        return self.scaled(-1.0)

    def scaled(self, c: complex) -> PolElement:
        return PolElement(self.datum, [PolTerm(t.module, t.bra, t.ket, t.coeff * c) for t in self.terms])

    def __mul__(self, other) -> PolElement:
        if isinstance(other, PolElement):
            return pol_product(self, other)
        return self.scaled(other)

    def __rmul__(self, c) -> PolElement:
        return self.scaled(c)

    def __len__(self) -> int:
        return len(self.terms)

    def star(self) -> PolElement:
        return pol_star(self)

    def evaluate(self, x: Union[WordSum, GenWord]) -> complex:
        return pol_evaluate(self, x)


def pol_product(p: PolElement, p2: PolElement) -> PolElement:
    """U(xi, eta) U(xi', eta') = U(xi (x) xi', eta (x) eta')."""
    terms = []
    for a in p.terms:
        for b in p2.terms:
            if a.module.dim * b.module.dim > MAX_TENSOR_DIM:
                raise PolSizeError(
                    f"product lives on a module of dimension {a.module.dim * b.module.dim} "
                    f"(cap {MAX_TENSOR_DIM}); use smaller inputs"
                )
            if a.module.dim == 1 and a.module.weights[0].is_zero():
                terms.append(PolTerm(b.module, b.bra * a.bra[0], b.ket * a.ket[0], a.coeff * b.coeff))
                continue
            if b.module.dim == 1 and b.module.weights[0].is_zero():
                terms.append(PolTerm(a.module, a.bra * b.bra[0], a.ket * b.ket[0], a.coeff * b.coeff))
                continue
            terms.append(PolTerm(
                tensor(a.module, b.module),
                np.kron(a.bra, b.bra),
                np.kron(a.ket, b.ket),
                a.coeff * b.coeff,
            ))
    return PolElement(p.datum, terms)


def split_by_weight(module: Module, vector: np.ndarray, tol: float = 0.0) -> Dict[Weight, np.ndarray]:
    """Weight components of ``vector``; zero components are dropped."""
    if vector.shape != (module.dim,):
        raise PolWeightError(f"vector of shape {vector.shape} does not fit {module.key}")
    out = {}
    for wt, idx in module.weight_spaces().items():
        part = np.zeros_like(vector)
        part[idx] = vector[idx]
        if np.linalg.norm(part) > tol:
            out[wt] = part
    return out


def pol_star(p: PolElement) -> PolElement:
    """U(xi, eta)^* = q^{-(rho, wt xi - wt eta)} U(conj xi, conj eta), split by weight first."""
    datum = p.datum
    rho = datum.rho
    terms = []
    for t in p.terms:
        conj_module = conjugate_module(t.module)
        for mu, bra in split_by_weight(t.module, t.bra).items():
            for nu, ket in split_by_weight(t.module, t.ket).items():
                factor = datum.qpow(-datum.pairing(rho, mu - nu))
                terms.append(PolTerm(conj_module, np.conj(bra), np.conj(ket), np.conj(t.coeff) * factor))
    return PolElement(datum, terms)


def act_left(x: Union[WordSum, GenWord], p: PolElement) -> PolElement:
    """x |> U(xi, eta) = U(xi, x eta)."""
    return PolElement(p.datum, [PolTerm(t.module, t.bra, evaluate(x, t.module) @ t.ket, t.coeff) for t in p.terms])


def act_right(p: PolElement, y: Union[WordSum, GenWord]) -> PolElement:
    """U(xi, eta) <| y = U(y^* xi, eta)."""
    return PolElement(
        p.datum,
        [PolTerm(t.module, evaluate(y, t.module).conj().T @ t.bra, t.ket, t.coeff) for t in p.terms],
    )


def pol_evaluate(p: PolElement, x: Union[WordSum, GenWord]) -> complex:
    """Pairing <p, x> = sum coeff <xi, x eta>."""
    total = 0j
    for t in p.terms:
        total += t.coeff * np.vdot(t.bra, evaluate(x, t.module) @ t.ket)
    return complex(total)


# Pairing oracle

@lru_cache(maxsize=None)
def battery_symbols(datum: RootDatum) -> Tuple[Tuple[str, object], ...]:
    symbols = []
    for r in datum.nodes:
        symbols.append(("E", r))
        symbols.append(("F", r))
    for s in datum.nodes:
        omega = datum.fundamental(s).coords
        symbols.append(("L", omega))
        symbols.append(("L", tuple(-c for c in omega)))
    return tuple(symbols)


@lru_cache(maxsize=None)
def battery_words(datum: RootDatum, depth: int = DEFAULT_BATTERY_DEPTH) -> Tuple[Tuple, ...]:
    """Every monomial in the battery symbols up to ``depth`` letters, shortest first."""
    symbols = battery_symbols(datum)
    words: List[Tuple] = []
    for n in range(depth + 1):
        words.extend(product(symbols, repeat=n))
    return tuple(words)


def _symbol_action(module: Module, sym) -> np.ndarray:
    kind, data = sym
    if kind == "E":
        return module.E[data]
    if kind == "F":
        return module.F[data]
    return module.L(Weight(data))


def _term_signature(t: PolTerm, datum: RootDatum, depth: int) -> np.ndarray:
    symbols = battery_symbols(datum)
    mats = [_symbol_action(t.module, s) for s in symbols]
    values = [np.vdot(t.bra, t.ket)]
    # layer holds w eta for the words of the current length, in battery order
    layer = [t.ket]
    for _ in range(depth):
        nxt = []
        for m in mats:
            for v in layer:
                nxt.append(m @ v)
        layer = nxt
        values.extend(np.vdot(t.bra, v) for v in layer)
    return t.coeff * np.array(values, dtype=complex)


def signature(p: PolElement, depth: int = DEFAULT_BATTERY_DEPTH) -> np.ndarray:
    """Values of p on ``battery_words(datum, depth)``."""
    size = len(battery_words(p.datum, depth))
    out = np.zeros(size, dtype=complex)
    for t in p.terms:
        out += _term_signature(t, p.datum, depth)
    return out


def pol_residual(p: PolElement, p2: PolElement, depth: int = DEFAULT_BATTERY_DEPTH) -> float:
    """Relative oracle distance ||sig(p) - sig(p2)|| / max(1, ||sig(p2)||)."""
    a, b = signature(p, depth), signature(p2, depth)
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


def coinvariance_test(p: PolElement, subset: Iterable[int], tol: float = 1e-9) -> bool:
    """True iff every ket is U_q(k_S)-invariant (weight zero and killed by E_s, F_s)."""
    subset = p.datum.validate_nodes(subset)
    for t in p.terms:
        if abs(t.coeff) == 0 or np.linalg.norm(t.bra) == 0:
            continue
        basis = invariant_subspace(t.module, subset)
        projected = basis @ (basis.conj().T @ t.ket)
        if np.linalg.norm(t.ket - projected) > tol * max(1.0, np.linalg.norm(t.ket)):
            return False
    return True


def switched_product(V1: Module, xi1: np.ndarray, eta1: np.ndarray,
                     V2: Module, xi2: np.ndarray, eta2: np.ndarray,
                     form: int = 1) -> PolElement:
    """U(xi1, eta1) U(xi2, eta2) rewritten on V2 (x) V1 with R-matrices.

    form 1: U(R_21 (xi2 (x) xi1), R^{-1} (eta2 (x) eta1))
    form 2: U(R^{-1} (xi2 (x) xi1), R_21 (eta2 (x) eta1))
    """
    action = r_action(V2, V1)
    variants = r_flip_variants(action)
    bra = np.kron(xi2, xi1)
    ket = np.kron(eta2, eta1)
    if form == 1:
        bra, ket = variants.R21 @ bra, variants.R_inv @ ket
    elif form == 2:
        bra, ket = variants.R_inv @ bra, variants.R21 @ ket
    else:
        raise ValueError(f"form must be 1 or 2, got {form}")
    return PolElement.matrix_coeff(tensor(V2, V1), bra, ket)


def theta_z(z: Sequence[complex], p: PolElement) -> complex:
    """One-dimensional representation: <xi, eta> prod_k z_k^{(alpha_k^vee, wt eta)}."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (p.datum.rank,):
        raise ValueError(f"z needs {p.datum.rank} entries")
    total = 0j
    for t in p.terms:
        for nu, ket in split_by_weight(t.module, t.ket).items():
            total += t.coeff * np.vdot(t.bra, ket) * np.prod(z ** np.array(nu.coords))
    return complex(total)
