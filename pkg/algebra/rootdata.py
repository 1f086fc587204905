"""
Root data, weights and Weyl groups for the small semisimple types.

Weights are integer tuples in fundamental-weight coordinates. Pairings are
exact Fractions; only powers of q are floating point.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
import sympy


class RootDataError(ValueError):
    """Raised when a root datum, weight or Weyl group request is invalid."""
    pass


SUPPORTED_RANKS: Dict[str, Tuple[int, ...]] = {
    "A": (1, 2, 3),
    "B": (2,),
    "C": (2,),
    "D": (4,),
    "G": (2,),
}

# (cartan, d) with a_rs = (alpha_r^vee, alpha_s) and short roots of squared length 2
_NON_SIMPLY_LACED = {
    ("B", 2): (((2, -1), (-2, 2)), (2, 1)),
    ("C", 2): (((2, -2), (-1, 2)), (1, 2)),
    ("G", 2): (((2, -3), (-1, 2)), (1, 3)),
}


@dataclass(frozen=True, order=True)
class Weight:
    """Integral weight in the basis of fundamental weights."""
    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @classmethod
    def zero(cls, rank: int) -> Weight:
        return cls((0,) * rank)

    @classmethod
    def fundamental(cls, rank: int, r: int) -> Weight:
        return cls(tuple(1 if s == r else 0 for s in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: Weight) -> Weight:
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: Weight) -> Weight:
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> Weight:
        return Weight(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> Weight:
        return Weight(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __getitem__(self, r: int) -> int:
        return self.coords[r]

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_dominant(self) -> bool:
        """Membership in P^+."""
        return all(c >= 0 for c in self.coords)

    def supported_on(self, nodes: Iterable[int]) -> bool:
        """True if every nonzero coordinate sits on one of ``nodes``."""
        allowed = set(nodes)
        return all(c == 0 for r, c in enumerate(self.coords) if r not in allowed)

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class WeylElt:
    """Weyl group element: integer action on weight coordinates plus a reduced word."""
    action: Tuple[Tuple[int, ...], ...]
    word: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.action, dtype=np.int64)

    def apply(self, weight: Weight) -> Weight:
        return Weight(tuple(int(v) for v in self.matrix @ np.array(weight.coords, dtype=np.int64)))

    def inverse(self) -> WeylElt:
        inv = np.rint(np.linalg.inv(self.matrix.astype(float))).astype(np.int64)
        return WeylElt(_freeze(inv), tuple(reversed(self.word)))

    def is_identity(self) -> bool:
        return not self.word


@dataclass(frozen=True)
class RootDatum:
    """Cartan data of a semisimple Lie algebra together with the deformation parameter q."""
    lie_type: str
    rank: int
    cartan: Tuple[Tuple[int, ...], ...]
    cartan_inverse: Tuple[Tuple[Fraction, ...], ...]
    d: Tuple[Fraction, ...]
    gram_weights: Tuple[Tuple[Fraction, ...], ...]
    q: float

    @property
    def label(self) -> str:
        return f"{self.lie_type}{self.rank}"

    @property
    def nodes(self) -> range:
        return range(self.rank)

    @property
    def q_r(self) -> Tuple[float, ...]:
        return tuple(self.q ** float(dr) for dr in self.d)

    @property
    def rho(self) -> Weight:
        return Weight((1,) * self.rank)

    def fundamental(self, r: int) -> Weight:
        return Weight.fundamental(self.rank, r)

    def zero(self) -> Weight:
        return Weight.zero(self.rank)

    def simple_root(self, r: int) -> Weight:
        return Weight(tuple(self.cartan[t][r] for t in self.nodes))

    def pairing(self, lam: Weight, mu: Weight) -> Fraction:
        """Exact invariant form (lam, mu)."""
        total = Fraction(0)
        for r, a in enumerate(lam.coords):
            if not a:
                continue
            row = self.gram_weights[r]
            for s, b in enumerate(mu.coords):
                if b:
                    total += a * b * row[s]
        return total

    def qpow(self, exponent: Fraction) -> float:
        return self.q ** float(exponent)

    def root_coords(self, lam: Weight) -> Tuple[Fraction, ...]:
        """Coordinates of lam in the basis of simple roots."""
        return tuple(
            sum((self.cartan_inverse[s][t] * lam[t] for t in self.nodes), Fraction(0))
            for s in self.nodes
        )

    def in_root_cone(self, lam: Weight) -> bool:
        """Membership in Q^+ (nonnegative integer combination of simple roots)."""
        coords = self.root_coords(lam)
        return all(c.denominator == 1 and c >= 0 for c in coords)

    def reflect(self, lam: Weight, r: int) -> Weight:
        return lam - self.simple_root(r) * lam[r]

    def validate_nodes(self, nodes: Iterable[int]) -> FrozenSet[int]:
        nodes = frozenset(int(s) for s in nodes)
        bad = [s for s in nodes if s < 0 or s >= self.rank]
        if bad:
            raise RootDataError(f"nodes {sorted(bad)} outside 0..{self.rank - 1} for {self.label}")
        return nodes


def _freeze(matrix) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in np.asarray(matrix))


def _cartan_for(lie_type: str, rank: int) -> Tuple[List[List[int]], List[int]]:
    if (lie_type, rank) in _NON_SIMPLY_LACED:
        cartan, d = _NON_SIMPLY_LACED[(lie_type, rank)]
        return [list(row) for row in cartan], list(d)
    cartan = [[2 if r == s else 0 for s in range(rank)] for r in range(rank)]
    if lie_type == "A":
        edges = [(r, r + 1) for r in range(rank - 1)]
    else:
        # D4: node 1 is the branch point
        edges = [(0, 1), (1, 2), (1, 3)]
    for r, s in edges:
        cartan[r][s] = cartan[s][r] = -1
    return cartan, [1] * rank


def build_root_datum(lie_type: str, rank: int, q: float) -> RootDatum:
    """Build the root datum of type ``lie_type`` and rank ``rank`` at parameter q."""
    lie_type = str(lie_type).upper()
    if lie_type not in SUPPORTED_RANKS:
        raise RootDataError(f"Unsupported Lie type: {lie_type}")
    if rank not in SUPPORTED_RANKS[lie_type]:
        raise RootDataError(f"Unsupported rank {rank} for type {lie_type}")
    q = float(q)
    if not 0.0 < q < 1.0:
        raise RootDataError(f"q must lie in (0, 1), got {q}")

    cartan, d = _cartan_for(lie_type, rank)
    inverse = sympy.Matrix(cartan).inv()
    cartan_inverse = tuple(
        tuple(Fraction(int(inverse[r, s].p), int(inverse[r, s].q)) for s in range(rank))
        for r in range(rank)
    )
    d_frac = tuple(Fraction(v) for v in d)
    gram = tuple(
        tuple(d_frac[r] * cartan_inverse[r][s] for s in range(rank))
        for r in range(rank)
    )

    for r in range(rank):
        for s in range(rank):
            if d[r] * cartan[r][s] != d[s] * cartan[s][r]:
                raise RootDataError(f"Cartan matrix of {lie_type}{rank} is not symmetrizable")
            if gram[r][s] != gram[s][r]:
                raise RootDataError(f"Weight Gram matrix of {lie_type}{rank} is not symmetric")

    return RootDatum(
        lie_type=lie_type,
        rank=rank,
        cartan=tuple(tuple(row) for row in cartan),
        cartan_inverse=cartan_inverse,
        d=d_frac,
        gram_weights=gram,
        q=q,
    )


def pairing(datum: RootDatum, lam: Weight, mu: Weight) -> Fraction:
    return datum.pairing(lam, mu)


@lru_cache(maxsize=None)
def reflection_matrices(datum: RootDatum) -> Tuple[np.ndarray, ...]:
    """Matrices of the simple reflections acting on weight coordinates."""
    mats = []
    for i in datum.nodes:
        m = np.eye(datum.rank, dtype=np.int64)
        alpha = np.array(datum.simple_root(i).coords, dtype=np.int64)
        m[:, i] -= alpha
        mats.append(m)
    return tuple(mats)


def _sends_negative(datum: RootDatum, matrix: np.ndarray, root: Weight) -> bool:
    image = Weight(tuple(int(v) for v in matrix @ np.array(root.coords, dtype=np.int64)))
    return not datum.in_root_cone(image)


def element_from_matrix(datum: RootDatum, matrix: np.ndarray) -> WeylElt:
    """Attach the greedy reduced word (smallest descent first) to an action matrix."""
    reflections = reflection_matrices(datum)
    current = np.array(matrix, dtype=np.int64)
    identity = np.eye(datum.rank, dtype=np.int64)
    reversed_word: List[int] = []
    while not np.array_equal(current, identity):
        for i in datum.nodes:
            if _sends_negative(datum, current, datum.simple_root(i)):
                reversed_word.append(i)
                current = current @ reflections[i]
                break
        else:
            raise RootDataError("matrix is not a Weyl group element")
    return WeylElt(_freeze(matrix), tuple(reversed(reversed_word)))


def weyl_from_word(datum: RootDatum, word: Sequence[int]) -> WeylElt:
    """Weyl element of a given word; the word must be reduced."""
    word = tuple(int(i) for i in word)
    datum.validate_nodes(word)
    reflections = reflection_matrices(datum)
    matrix = np.eye(datum.rank, dtype=np.int64)
    for i in word:
        matrix = matrix @ reflections[i]
    elt = WeylElt(_freeze(matrix), word)
    if length_of(datum, elt) != len(word):
        raise RootDataError(f"word {list(word)} is not reduced")
    return elt


def compose(datum: RootDatum, a: WeylElt, b: WeylElt) -> WeylElt:
    return element_from_matrix(datum, a.matrix @ b.matrix)


@lru_cache(maxsize=None)
def weyl_group(datum: RootDatum) -> Tuple[WeylElt, ...]:
    """All Weyl group elements, enumerated breadth-first from the identity."""
    return _generated_subgroup(datum, tuple(datum.nodes))


def _generated_subgroup(datum: RootDatum, generators: Tuple[int, ...]) -> Tuple[WeylElt, ...]:
    reflections = reflection_matrices(datum)
    identity = np.eye(datum.rank, dtype=np.int64)
    seen = {_freeze(identity)}
    order = [identity]
    queue = deque([identity])
    while queue:
        current = queue.popleft()
        for i in generators:
            nxt = current @ reflections[i]
            key = _freeze(nxt)
            if key not in seen:
                seen.add(key)
                order.append(nxt)
                queue.append(nxt)
    return tuple(element_from_matrix(datum, m) for m in order)


@lru_cache(maxsize=None)
def positive_roots(datum: RootDatum) -> Tuple[Weight, ...]:
    """Positive roots as W-images of simple roots lying in Q^+."""
    roots = set()
    for elt in weyl_group(datum):
        for i in datum.nodes:
            image = elt.apply(datum.simple_root(i))
            if datum.in_root_cone(image):
                roots.add(image)
    return tuple(sorted(roots, key=lambda b: (sum(datum.root_coords(b)), b.coords)))


def length_of(datum: RootDatum, elt: WeylElt) -> int:
    """Number of positive roots sent to negative roots."""
    return sum(1 for beta in positive_roots(datum) if not datum.in_root_cone(elt.apply(beta)))


@lru_cache(maxsize=None)
def longest_element(datum: RootDatum) -> WeylElt:
    return max(weyl_group(datum), key=lambda e: e.length)


@lru_cache(maxsize=None)
def longest_in_parabolic(datum: RootDatum, subset: FrozenSet[int]) -> WeylElt:
    """Longest element w_{S,0} of the parabolic subgroup generated by ``subset``."""
    subset = datum.validate_nodes(subset)
    return max(_generated_subgroup(datum, tuple(sorted(subset))), key=lambda e: e.length)


@lru_cache(maxsize=None)
def shortest_coset_rep(datum: RootDatum, subset: FrozenSet[int]) -> WeylElt:
    """Shortest element w = w_0 w_{S,0} of the coset w_0 W_S."""
    subset = datum.validate_nodes(subset)
    w0 = longest_element(datum)
    ws0 = longest_in_parabolic(datum, subset)
    elt = element_from_matrix(datum, w0.matrix @ ws0.matrix)
    if elt.length != w0.length - ws0.length:
        raise RootDataError(f"coset representative for S={sorted(subset)} has unexpected length")
    return elt


def bar_involution(datum: RootDatum, lam: Weight) -> Weight:
    """lam -> -w_0 lam."""
    return -longest_element(datum).apply(lam)


def bar_node(datum: RootDatum, r: int) -> int:
    """Node r' with bar(alpha_r) = alpha_r'."""
    image = bar_involution(datum, datum.simple_root(r))
    for s in datum.nodes:
        if datum.simple_root(s) == image:
            return s
    raise RootDataError(f"bar involution does not permute simple roots at node {r}")


def weyl_dimension(datum: RootDatum, lam: Weight) -> int:
    """Weyl dimension formula in exact arithmetic."""
    if not lam.is_dominant():
        raise RootDataError(f"weight {lam} is not dominant")
    rho = datum.rho
    value = Fraction(1)
    for beta in positive_roots(datum):
        value *= datum.pairing(lam + rho, beta) / datum.pairing(rho, beta)
    if value.denominator != 1:
        raise RootDataError(f"Weyl dimension of {lam} is not an integer: {value}")
    return int(value)
