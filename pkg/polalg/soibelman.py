"""
Soibelman representations of Pol(G_q) on truncated Fock spaces.

theta is the Fock representation of Pol(SU_q(2)); theta_r pulls it back along
the node-r copy of U_{q_r}(sl2); theta_w tensors the theta_{i_k} along a reduced
word of w through the iterated coproduct.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg as sla

from algebra.rootdata import WeylElt, build_root_datum, Weight
from cache_manager import su2_cache, theta_cache
from instrumentation import instrumentation
from representations.repmod import Module, ModuleConstructionError, build_irrep, tensor

from .polgq import PolElement, PolTerm, split_by_weight
from .tensorop import MAX_TERMS, TensorOp, TruncationError

COEFF_TOLERANCE = 1e-14
ORTHONORMAL_TOLERANCE = 1e-9

Table = Dict[int, Dict[int, np.ndarray]]


@dataclass
class FockOp:
    """Truncated operator on l^2(Z_+) spanned by e_0, ..., e_{N-1}."""
    q_node: float
    N: int
    mat: np.ndarray


def fock_generators(q_node: float, N: int) -> Dict[str, FockOp]:
    """theta on the generators a, b, c = -q b^*, d = a^* of Pol(SU_q(2))."""
    if N < 2:
        raise TruncationError(f"Fock truncation needs N >= 2, got {N}")
    n = np.arange(N)
    a = np.zeros((N, N), dtype=complex)
    a[n[:-1], n[1:]] = np.sqrt(1.0 - q_node ** (2 * n[1:]))
    b = np.diag(q_node ** n).astype(complex)
    mats = {"a": a, "b": b, "c": -q_node * b.conj().T, "d": a.conj().T}
    return {name: FockOp(q_node, N, m) for name, m in mats.items()}


def _half_table(q_node: float, N: int) -> Dict[Tuple[int, int], np.ndarray]:
    """theta(U(e_i, e_j)) on V_{1/2}, basis (h_{1/2}, h_{-1/2})."""
    g = fock_generators(q_node, N)
    return {(0, 0): g["d"].mat, (0, 1): g["b"].mat, (1, 0): g["c"].mat, (1, 1): g["a"].mat}


def _two(value: Union[int, float, Fraction]) -> int:
    doubled = 2 * Fraction(value).limit_denominator(2)
    if doubled.denominator != 1:
        raise TruncationError(f"{value} is not a half-integer")
    return int(doubled)


def _tensor_power_vectors(q_node: float, two_j: int) -> List[np.ndarray]:
    """Images of e_j, e_{j-1}, ..., e_{-j} in V_{1/2}^{(x) 2j}."""
    datum = build_root_datum("A", 1, q_node)
    half = build_irrep(datum, Weight((1,)))
    power = half
    for _ in range(two_j - 1):
        power = tensor(power, half)
    v = np.zeros(power.dim, dtype=complex)
    v[0] = 1.0
    out = [v]
    for _ in range(two_j):
        v = power.F[0] @ v
        v = v / np.linalg.norm(v)
        out.append(v)
    return out


def su2_matrix_coeff(q_node: float, j, m, mp, N: int) -> FockOp:
    """theta(t^j_{m, m'}) through the embedding of V_j in V_{1/2}^{(x) 2j}.

    The products are formed on N + 2j levels and cut to N, so the result is
    the exact truncation of the infinite operator.
    """
    two_j, two_m, two_mp = _two(j), _two(m), _two(mp)
    if two_j < 0 or abs(two_m) > two_j or abs(two_mp) > two_j:
        raise TruncationError(f"spin parameters out of range: j={j}, m={m}, m'={mp}")
    if (two_j - two_m) % 2 or (two_j - two_mp) % 2:
        raise TruncationError(f"j - m and j - m' must be integers: j={j}, m={m}, m'={mp}")
    if N < 2:
        raise TruncationError(f"Fock truncation needs N >= 2, got {N}")

    def factory() -> FockOp:
        if two_j == 0:
            return FockOp(q_node, N, np.eye(N, dtype=complex))
        ext = N + two_j
        half = _half_table(q_node, ext)
        vectors = _tensor_power_vectors(q_node, two_j)
        left = vectors[(two_j - two_m) // 2]
        right = vectors[(two_j - two_mp) // 2]
        bits = [tuple((idx >> (two_j - 1 - t)) & 1 for t in range(two_j)) for idx in range(2 ** two_j)]
        support_l = [i for i in np.flatnonzero(np.abs(left) > COEFF_TOLERANCE)]
        support_r = [k for k in np.flatnonzero(np.abs(right) > COEFF_TOLERANCE)]
        total = np.zeros((ext, ext), dtype=complex)
        for i in support_l:
            for k in support_r:
                term = np.conj(left[i]) * right[k] * np.eye(ext, dtype=complex)
                for a, b in zip(bits[i], bits[k]):
                    term = term @ half[(a, b)]
                total += term
        return FockOp(q_node, N, total[:N, :N])

    return su2_cache.get_or_create((round(q_node, 15), two_j, two_m, two_mp, N), factory)


# Node tables

@dataclass
class NodeCopy:
    """One spin-j copy of U_{q_r}(sl2) in a module: columns for m = j, j-1, ..., -j."""
    two_j: int
    columns: np.ndarray


def node_decomposition(V: Module, r: int) -> List[NodeCopy]:
    """Orthogonal decomposition of V into irreducible copies for the node-r subalgebra."""
    copies: List[NodeCopy] = []
    for wt, idx in V.weight_spaces().items():
        null = sla.null_space(V.E[r][:, idx], rcond=1e-10)
        for k in range(null.shape[1]):
            two_j = wt[r]
            if two_j < 0:
                raise ModuleConstructionError(f"node {r} highest vector of negative weight {wt}")
            u = np.zeros(V.dim, dtype=complex)
            u[idx] = null[:, k]
            chain = [u]
            for _ in range(two_j):
                u = V.F[r] @ u
                norm = np.linalg.norm(u)
                if norm < ORTHONORMAL_TOLERANCE:
                    raise ModuleConstructionError(f"node {r} string collapsed in {V.key}")
                u = u / norm
                chain.append(u)
            copies.append(NodeCopy(two_j, np.array(chain).T))
    B = np.hstack([c.columns for c in copies]) if copies else np.zeros((V.dim, 0))
    if B.shape[1] != V.dim or not np.allclose(B.conj().T @ B, np.eye(V.dim), atol=ORTHONORMAL_TOLERANCE):
        raise ModuleConstructionError(f"node {r} decomposition of {V.key} is not an orthonormal basis")
    return copies


def theta_node_table(V: Module, r: int, N: int) -> Table:
    """T[i][j] = theta_r(U(e_i, e_j)); missing entries are zero."""
    q_node = V.datum.q_r[r]

    def factory() -> Table:
        with instrumentation.time_operation("theta_node_table", module=V.key, node=r, N=N):
            table: Table = {}
            for copy in node_decomposition(V, r):
                cols = copy.columns
                rows = np.flatnonzero(np.any(np.abs(cols) > COEFF_TOLERANCE, axis=1))
                for i in rows:
                    for j in rows:
                        acc = None
                        for k, kp in iproduct(range(copy.two_j + 1), repeat=2):
                            c = cols[i, k] * np.conj(cols[j, kp])
                            if abs(c) <= COEFF_TOLERANCE:
                                continue
                            op = su2_matrix_coeff(q_node, Fraction(copy.two_j, 2),
                                                  Fraction(copy.two_j - 2 * k, 2),
                                                  Fraction(copy.two_j - 2 * kp, 2), N).mat
                            acc = c * op if acc is None else acc + c * op
                        if acc is None:
                            continue
                        row = table.setdefault(int(i), {})
                        row[int(j)] = row[int(j)] + acc if int(j) in row else acc
            return table

    return theta_cache.get_or_create((V.key, r, N), factory)


def theta_node(r: int, V: Module, xi: np.ndarray, eta: np.ndarray, N: int) -> FockOp:
    """theta_r(U(xi, eta))."""
    table = theta_node_table(V, r, N)
    out = np.zeros((N, N), dtype=complex)
    for i, row in table.items():
        if xi[i] == 0:
            continue
        for j, op in row.items():
            if eta[j] != 0:
                out += np.conj(xi[i]) * eta[j] * op
    return FockOp(V.datum.q_r[r], N, out)


# theta_w

def _contract_bra(table: Table, xi: np.ndarray, dim: int) -> List[Optional[np.ndarray]]:
    out: List[Optional[np.ndarray]] = [None] * dim
    for i, row in table.items():
        if xi[i] == 0:
            continue
        for k, op in row.items():
            contrib = np.conj(xi[i]) * op
            out[k] = contrib if out[k] is None else out[k] + contrib
    return out


def _contract_ket(table: Table, eta: np.ndarray, dim: int) -> List[Optional[np.ndarray]]:
    out: List[Optional[np.ndarray]] = [None] * dim
    for k, row in table.items():
        for j, op in row.items():
            if eta[j] == 0:
                continue
            contrib = eta[j] * op
            out[k] = contrib if out[k] is None else out[k] + contrib
    return out


def _theta_w_term(word: Sequence[int], t: PolTerm, N: int) -> List[Tuple[complex, Tuple[np.ndarray, ...]]]:
    V = t.module
    legs = len(word)
    if legs == 0:
        return [(t.coeff * np.vdot(t.bra, t.ket), ())]
    tables = [theta_node_table(V, r, N) for r in word]
    if legs == 1:
        return [(t.coeff, (theta_node(word[0], V, t.bra, t.ket, N).mat,))]
    first = _contract_bra(tables[0], t.bra, V.dim)
    last = _contract_ket(tables[-1], t.ket, V.dim)
    terms: List[Tuple[complex, Tuple[np.ndarray, ...]]] = []

    def walk(leg: int, k: int, factors: Tuple[np.ndarray, ...]) -> None:
        if leg == legs - 1:
            if last[k] is not None:
                if len(terms) >= MAX_TERMS:
                    raise TruncationError(f"theta_w expansion exceeds {MAX_TERMS} terms")
                terms.append((t.coeff, factors + (last[k],)))
            return
        for k2, op in tables[leg].get(k, {}).items():
            walk(leg + 1, k2, factors + (op,))

    for k, op in enumerate(first):
        if op is not None:
            walk(1, k, (op,))
    return terms


def theta_w(w: Union[WeylElt, Sequence[int]], p: PolElement, N: int) -> TensorOp:
    """(theta_{i_1} (x) ... (x) theta_{i_l}) Delta^{(l)} along the reduced word of w."""
    word = tuple(w.word) if isinstance(w, WeylElt) else tuple(w)
    terms = []
    for t in p.terms:
        terms.extend(_theta_w_term(word, t, N))
    return TensorOp(len(word), N, terms).compress()


def theta_wz(w: Union[WeylElt, Sequence[int]], z: Sequence[complex], p: PolElement, N: int) -> TensorOp:
    """(theta_w (x) theta_z) Delta: ket components of weight nu pick up prod_k z_k^{nu_k}."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (p.datum.rank,):
        raise ValueError(f"z needs {p.datum.rank} entries")
    twisted = []
    for t in p.terms:
        ket = np.zeros_like(t.ket)
        for nu, part in split_by_weight(t.module, t.ket).items():
            ket += part * np.prod(z ** np.array(nu.coords))
        twisted.append(PolTerm(t.module, t.bra, ket, t.coeff))
    return theta_w(w, PolElement(p.datum, twisted), N)
