"""
Word-level presentation of U_q(g).

Elements are finite sums of words in the generators E_r, F_r and L_omega.
Equality of word sums is never decided symbolically: words are evaluated in
concrete modules (see ``evaluate``), which is how every identity in this
package is checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .rootdata import RootDatum, Weight


class WordError(ValueError):
    """Raised for invalid word-level requests."""
    pass


# Symbols are ("E", r), ("F", r) or ("L", coords).
Symbol = Tuple[str, object]
Scalar = Union[int, float, complex]


def _normalize_factors(factors: Sequence[Symbol]) -> Tuple[Symbol, ...]:
    """Merge adjacent L symbols and drop L_0."""
    out: List[Symbol] = []
    for sym in factors:
        if sym[0] == "L":
            coords = tuple(sym[1])
            if out and out[-1][0] == "L":
                coords = tuple(a + b for a, b in zip(out[-1][1], coords))
                out.pop()
            if any(coords):
                out.append(("L", coords))
        elif sym[0] in ("E", "F"):
            out.append((sym[0], int(sym[1])))
        else:
            raise WordError(f"Unknown symbol: {sym!r}")
    return tuple(out)


@dataclass(frozen=True)
class GenWord:
    """scalar * (product of generator symbols)."""
    factors: Tuple[Symbol, ...] = ()
    scalar: complex = 1.0

    def normalized(self) -> GenWord:
        return GenWord(_normalize_factors(self.factors), complex(self.scalar))

    def __mul__(self, other: GenWord) -> GenWord:
        return GenWord(self.factors + other.factors, self.scalar * other.scalar).normalized()

    def scaled(self, c: Scalar) -> GenWord:
        return GenWord(self.factors, self.scalar * c)

    def __str__(self) -> str:
        if not self.factors:
            body = "1"
        else:
            body = " ".join(
                f"L{Weight(s[1])}" if s[0] == "L" else f"{s[0]}{s[1] + 1}" for s in self.factors
            )
        return f"({self.scalar:.6g}) {body}"


@dataclass
class WordSum:
    """Finite linear combination of words."""
    terms: List[GenWord] = field(default_factory=list)

    @classmethod
    def of(cls, *factors: Symbol, scalar: Scalar = 1.0) -> WordSum:
        return cls([GenWord(_normalize_factors(factors), complex(scalar))])

    @classmethod
    def one(cls) -> WordSum:
        return cls([GenWord()])

    @classmethod
    def zero(cls) -> WordSum:
        return cls([])

    def canonical(self) -> WordSum:
        """Group identical factor lists; drop exact zeros."""
        grouped = {}
        for term in self.terms:
            t = term.normalized()
            grouped[t.factors] = grouped.get(t.factors, 0j) + t.scalar
        return WordSum([GenWord(f, c) for f, c in grouped.items() if c != 0])

    def __add__(self, other: WordSum) -> WordSum:
        return WordSum(self.terms + other.terms).canonical()

    def __sub__(self, other: WordSum) -> WordSum:
        return self + other.scaled(-1)

    def __neg__(self) -> WordSum:
        return self.scaled(-1)

    def scaled(self, c: Scalar) -> WordSum:
        return WordSum([t.scaled(c) for t in self.terms])

    def __mul__(self, other) -> WordSum:
        if isinstance(other, WordSum):
            return WordSum([a * b for a in self.terms for b in other.terms]).canonical()
        return self.scaled(other)

    def __rmul__(self, c: Scalar) -> WordSum:
        return self.scaled(c)

    def __pow__(self, n: int) -> WordSum:
        out = WordSum.one()
        for _ in range(n):
            out = out * self
        return out

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"


def E(r: int) -> WordSum:
    return WordSum.of(("E", r))


def F(r: int) -> WordSum:
    return WordSum.of(("F", r))


def L(weight: Union[Weight, Sequence[int]]) -> WordSum:
    coords = weight.coords if isinstance(weight, Weight) else tuple(weight)
    return WordSum.of(("L", coords))


def _as_sum(x: Union[WordSum, GenWord]) -> WordSum:
    return x if isinstance(x, WordSum) else WordSum([x])


def qbinom(datum: RootDatum, m: int, n: int, r: int) -> float:
    """q_r^{n(n-m)} prod_{k=1}^n (1 - q_r^{2m-2k+2}) / (1 - q_r^{2k})."""
    if n < 0 or m < n:
        raise WordError(f"qbinom needs m >= n >= 0, got m={m}, n={n}")
    qr = datum.q_r[r]
    value = qr ** (n * (n - m))
    for k in range(1, n + 1):
        value *= (1 - qr ** (2 * m - 2 * k + 2)) / (1 - qr ** (2 * k))
    return value


def serre_relation(datum: RootDatum, r: int, s: int, kind: str = "E") -> WordSum:
    """sum_k (-1)^k [1-a_rs choose k]_r X_r^k X_s X_r^{1-a_rs-k} for X = E or F."""
    if r == s:
        raise WordError("Serre relation needs r != s")
    if kind not in ("E", "F"):
        raise WordError(f"kind must be 'E' or 'F', got {kind!r}")
    m = 1 - datum.cartan[r][s]
    xr = WordSum.of((kind, r))
    xs = WordSum.of((kind, s))
    out = WordSum.zero()
    for k in range(m + 1):
        out = out + ((xr ** k) * xs * (xr ** (m - k))).scaled((-1) ** k * qbinom(datum, m, k, r))
    return out


# Hopf structure

def _gen_coproduct(datum: RootDatum, sym: Symbol) -> List[Tuple[GenWord, GenWord]]:
    kind, data = sym
    if kind == "L":
        return [(GenWord((sym,)), GenWord((sym,)))]
    alpha = datum.simple_root(data).coords
    minus_alpha = tuple(-a for a in alpha)
    return [
        (GenWord((sym,)), GenWord((("L", alpha),))),
        (GenWord((("L", minus_alpha),)), GenWord((sym,))),
    ]


def coproduct(datum: RootDatum, x: Union[WordSum, GenWord]) -> List[Tuple[GenWord, GenWord]]:
    """Delta extended multiplicatively; scalars are carried on the left factor."""
    out: List[Tuple[GenWord, GenWord]] = []
    for word in _as_sum(x).terms:
        partial = [(GenWord((), word.scalar), GenWord())]
        for sym in word.factors:
            pieces = _gen_coproduct(datum, sym)
            partial = [(a * c, b * d) for a, b in partial for c, d in pieces]
        out.extend(partial)
    return out


def iterated_coproduct(datum: RootDatum, x: Union[WordSum, GenWord], n: int) -> List[Tuple[GenWord, ...]]:
    """Delta^{(n)} into n tensor factors, expanding the leftmost factor each step."""
    if n < 1:
        raise WordError("iterated coproduct needs n >= 1")
    legs: List[Tuple[GenWord, ...]] = [(w,) for w in _as_sum(x).terms]
    for _ in range(n - 1):
        legs = [(a, b) + rest[1:] for rest in legs for a, b in coproduct(datum, rest[0])]
    return legs


def counit(x: Union[WordSum, GenWord]) -> complex:
    total = 0j
    for word in _as_sum(x).terms:
        if all(sym[0] == "L" for sym in word.factors):
            total += word.scalar
    return total


def _anti_map(x: Union[WordSum, GenWord], image, conjugate: bool = False) -> WordSum:
    out = WordSum.zero()
    for word in _as_sum(x).terms:
        scalar = np.conj(word.scalar) if conjugate else word.scalar
        acc = WordSum.of(scalar=scalar)
        for sym in reversed(word.factors):
            acc = acc * image(sym)
        out = out + acc
    return out


def antipode(datum: RootDatum, x: Union[WordSum, GenWord]) -> WordSum:
    def image(sym):
        kind, data = sym
        if kind == "E":
            return E(data).scaled(-datum.q_r[data])
        if kind == "F":
            return F(data).scaled(-1.0 / datum.q_r[data])
        return L(tuple(-a for a in data))
    return _anti_map(x, image)


def unitary_antipode(datum: RootDatum, x: Union[WordSum, GenWord]) -> WordSum:
    def image(sym):
        kind, data = sym
        if kind in ("E", "F"):
            return WordSum.of(sym, scalar=-1.0)
        return L(tuple(-a for a in data))
    return _anti_map(x, image)


def star(x: Union[WordSum, GenWord]) -> WordSum:
    """Antilinear anti-automorphism with E_r^* = F_r and L_omega^* = L_omega."""
    swap = {"E": "F", "F": "E"}

    def image(sym):
        kind, data = sym
        return WordSum.of((swap.get(kind, kind), data))
    return _anti_map(x, image, conjugate=True)


def adjoint_action(datum: RootDatum, x: Union[WordSum, GenWord], y: Union[WordSum, GenWord]) -> WordSum:
    """x <| y = S(y_(1)) x y_(2)."""
    x = _as_sum(x)
    out = WordSum.zero()
    for left, right in coproduct(datum, y):
        out = out + antipode(datum, left) * x * WordSum([right])
    return out


def adnil_relation(datum: RootDatum, r: int, s: int) -> WordSum:
    """L_{-4 omega_s} <| (E_s E_r^{1-a_rs}); zero in U_q(b)."""
    if r == s:
        raise WordError("adnil relation needs r != s")
    m = 1 - datum.cartan[r][s]
    y = E(s) * (E(r) ** m)
    return adjoint_action(datum, L(datum.fundamental(s) * -4), y)


# Evaluation in modules. A module exposes ``E``, ``F`` (lists of matrices),
# ``dim`` and ``L(weight)``.

def _symbol_matrix(module, sym: Symbol) -> np.ndarray:
    kind, data = sym
    if kind == "E":
        return module.E[data]
    if kind == "F":
        return module.F[data]
    return module.L(Weight(data))


def evaluate_word(word: GenWord, module) -> np.ndarray:
    out = np.eye(module.dim, dtype=complex) * word.scalar
    for sym in word.factors:
        out = out @ _symbol_matrix(module, sym)
    return out


def evaluate(x: Union[WordSum, GenWord], module) -> np.ndarray:
    """Matrix of a word sum acting on ``module``."""
    out = np.zeros((module.dim, module.dim), dtype=complex)
    for word in _as_sum(x).terms:
        out += evaluate_word(word, module)
    return out


def evaluate_tensor(pairs: Iterable[Tuple[GenWord, ...]], modules: Sequence) -> np.ndarray:
    """Sum of Kronecker products of word matrices over a tuple of modules."""
    dim = int(np.prod([m.dim for m in modules]))
    out = np.zeros((dim, dim), dtype=complex)
    for legs in pairs:
        term = np.ones((1, 1), dtype=complex)
        for word, module in zip(legs, modules):
            term = np.kron(term, evaluate_word(word, module))
        out += term
    return out


def hopf_residuals(datum: RootDatum, module) -> dict:
    """Coassociativity, antipode and S^2 residuals on every generator."""
    gens = [E(r) for r in datum.nodes] + [F(r) for r in datum.nodes]
    gens += [L(datum.fundamental(r)) for r in datum.nodes]
    coassoc = antipode_res = square_res = 0.0
    l4rho = evaluate(L(datum.rho * -4), module)
    l4rho_inv = evaluate(L(datum.rho * 4), module)
    for x in gens:
        left = [(a, b, c) for ab, c in coproduct(datum, x) for a, b in coproduct(datum, ab)]
        right = [(a, b, c) for a, bc in coproduct(datum, x) for b, c in coproduct(datum, bc)]
        diff = evaluate_tensor(left, [module] * 3) - evaluate_tensor(right, [module] * 3)
        coassoc = max(coassoc, float(np.linalg.norm(diff)))

        contracted = np.zeros((module.dim, module.dim), dtype=complex)
        for a, b in coproduct(datum, x):
            contracted += evaluate(antipode(datum, a), module) @ evaluate_word(b, module)
        expected = counit(x) * np.eye(module.dim)
        antipode_res = max(antipode_res, float(np.linalg.norm(contracted - expected)))

        s2 = evaluate(antipode(datum, antipode(datum, x)), module)
        conj = l4rho_inv @ evaluate(x, module) @ l4rho
        square_res = max(square_res, float(np.linalg.norm(s2 - conj)))
    return {"coassociativity": coassoc, "antipode": antipode_res, "square_antipode": square_res}


@dataclass
class DegenerationDefect:
    """Rescaled commutator data for one node."""
    node: int
    b: float
    relation_residual: float
    defect: float
    effective_epsilon: float
    bound: float


def rescaled_commutator_defect(datum: RootDatum, b, module) -> List[DegenerationDefect]:
    """Evaluate [E'_r, F'_r] against (b_r^4 L'^2 - L'^{-2})/(q_r - q_r^{-1}) in ``module``.

    E'_r = b_r E_r, F'_r = b_r F_r and L'_{alpha_r} = L_{alpha_r} / b_r. The
    ``effective_epsilon`` is the least-squares coefficient of L'^2 once the
    L'^{-2} part is removed; it equals b_r^4.
    """
    bs = [float(b)] * datum.rank if np.isscalar(b) else [float(v) for v in b]
    if len(bs) != datum.rank or any(v <= 0 for v in bs):
        raise WordError("b must be positive, one value per node")
    out = []
    for r in datum.nodes:
        br, qr = bs[r], datum.q_r[r]
        scale = 1.0 / (qr - 1.0 / qr)
        e = br * module.E[r]
        f = br * module.F[r]
        l_alpha = module.L(datum.simple_root(r)) / br
        l2 = l_alpha @ l_alpha
        lm2 = np.linalg.inv(l2)
        comm = e @ f - f @ e
        relation = comm - (br ** 4 * l2 - lm2) * scale
        shifted = comm + lm2 * scale
        target = l2 * scale
        denom = float(np.vdot(target, target).real)
        eps = float(np.vdot(target, shifted).real / denom) if denom > 0 else 0.0
        out.append(DegenerationDefect(
            node=r,
            b=br,
            relation_residual=float(np.linalg.norm(relation)),
            defect=float(np.linalg.norm(shifted)),
            effective_epsilon=eps,
            bound=br ** 4 * float(np.linalg.norm(l2)) * abs(scale),
        ))
    return out
