"""
Type I modules of U_q(g): irreducibles, conjugates, tensor products,
extremal vectors, Demazure spans and U_q(k_S)-invariant vectors.

Every module is realized on an orthonormal weight basis. Generator matrices
are stored as complex arrays; for irreducibles they are real and F_r = E_r^T.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla

from algebra.rootdata import (
    RootDatum,
    Weight,
    WeylElt,
    longest_element,
    shortest_coset_rep,
    weyl_dimension,
)
from algebra.uqalg import evaluate, serre_relation
from cache_manager import array_store_from_env, module_cache
from instrumentation import instrumentation

RADICAL_THRESHOLD = 1e-8
SPAN_TOLERANCE = 1e-10


class ModuleConstructionError(ValueError):
    """Raised when a module or vector in a module cannot be constructed."""
    pass


@dataclass(eq=False)
class Module:
    """Finite-dimensional type I module on an orthonormal weight basis."""
    datum: RootDatum
    weights: Tuple[Weight, ...]
    E: Tuple[np.ndarray, ...]
    F: Tuple[np.ndarray, ...]
    key: str
    highest: Optional[int] = None
    highest_weight: Optional[Weight] = None
    form_min_eigenvalue: float = 0.0
    _cache: Dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def basis(self) -> List[Tuple[Weight, int]]:
        return [(wt, i) for i, wt in enumerate(self.weights)]

    def L_diag(self, omega: Weight) -> np.ndarray:
        """Diagonal of L_omega: q^{(omega, wt)/2} per basis vector."""
        key = ("L", omega)
        if key not in self._cache:
            values = {}
            for wt in set(self.weights):
                values[wt] = self.datum.qpow(self.datum.pairing(omega, wt) / 2)
            self._cache[key] = np.array([values[wt] for wt in self.weights], dtype=complex)
        return self._cache[key]

    def L(self, omega: Weight) -> np.ndarray:
        return np.diag(self.L_diag(omega))

    def weight_spaces(self) -> Dict[Weight, List[int]]:
        if "spaces" not in self._cache:
            spaces: Dict[Weight, List[int]] = {}
            for i, wt in enumerate(self.weights):
                spaces.setdefault(wt, []).append(i)
            self._cache["spaces"] = spaces
        return self._cache["spaces"]

    def indices_of(self, weight: Weight) -> List[int]:
        return self.weight_spaces().get(weight, [])

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return v

    def highest_vector(self) -> np.ndarray:
        if self.highest is None:
            raise ModuleConstructionError(f"module {self.key} has no distinguished highest vector")
        return self.basis_vector(self.highest)

    def weight_of(self, vector: np.ndarray, tol: float = 1e-12) -> Optional[Weight]:
        """Weight of a homogeneous vector, or None if it is not homogeneous."""
        support = np.flatnonzero(np.abs(vector) > tol)
        if support.size == 0:
            return None
        found = {self.weights[i] for i in support}
        return found.pop() if len(found) == 1 else None


def _irrep_key(datum: RootDatum, lam: Weight) -> str:
    return f"V[{datum.label},q={datum.q!r},{lam}]"


def _contravariant_coefficient(datum: RootDatum, r: int, nu: Weight) -> float:
    """Eigenvalue of [E_r, F_r] on weight nu."""
    exponent = datum.pairing(datum.simple_root(r), nu)
    qr = datum.q_r[r]
    return (datum.qpow(exponent) - datum.qpow(-exponent)) / (qr - 1.0 / qr)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def _construct_irrep(datum: RootDatum, lam: Weight) -> Module:
    alphas = [datum.simple_root(r) for r in datum.nodes]
    dims: Dict[Weight, int] = {lam: 1}
    depth: Dict[Weight, int] = {lam: 0}
    # fblocks[(r, mu)]: matrix of F_r from V(mu + alpha_r) to V(mu)
    fblocks: Dict[Tuple[int, Weight], np.ndarray] = {}
    min_eig = 0.0
    level = [lam]
    k = 0
    while level:
        k += 1
        candidates = sorted({nu - alphas[r] for nu in level for r in datum.nodes}, reverse=True)
        next_level = []
        for mu in candidates:
            cols = []  # (r, dim of V(mu + alpha_r))
            for r in datum.nodes:
                nu = mu + alphas[r]
                if dims.get(nu, 0) > 0 and depth.get(nu) == k - 1:
                    cols.append((r, dims[nu]))
            if not cols:
                continue
            sizes = [n for _, n in cols]
            offsets = np.concatenate([[0], np.cumsum(sizes)])
            gram = np.zeros((offsets[-1], offsets[-1]))
            for a, (r, nr) in enumerate(cols):
                for b, (s, ns) in enumerate(cols):
                    block = np.zeros((nr, ns))
                    left = fblocks.get((s, mu + alphas[r]))
                    right = fblocks.get((r, mu + alphas[s]))
                    if left is not None and right is not None:
                        block += left @ right.T
                    if r == s:
                        block += _contravariant_coefficient(datum, r, mu + alphas[r]) * np.eye(nr)
                    gram[offsets[a]:offsets[a + 1], offsets[b]:offsets[b + 1]] = block
            gram = (gram + gram.T) / 2
            sigma, vecs = np.linalg.eigh(gram)
            min_eig = min(min_eig, float(sigma[0]))
            # absolute scale: a block of pure rounding noise must not survive
            scale = max(1.0, float(np.max(np.abs(np.diag(gram)))))
            keep = sigma > RADICAL_THRESHOLD * scale
            if not np.any(keep):
                continue
            sigma = sigma[keep][::-1]
            vecs = _fix_signs(vecs[:, keep][:, ::-1])
            coeffs = np.sqrt(sigma)[:, None] * vecs.T
            for a, (r, _) in enumerate(cols):
                fblocks[(r, mu)] = coeffs[:, offsets[a]:offsets[a + 1]]
            dims[mu] = len(sigma)
            depth[mu] = k
            next_level.append(mu)
        level = next_level

    ordered = sorted(dims, key=lambda mu: (depth[mu], tuple(-c for c in mu.coords)))
    offset: Dict[Weight, int] = {}
    weights: List[Weight] = []
    for mu in ordered:
        offset[mu] = len(weights)
        weights.extend([mu] * dims[mu])
    n = len(weights)
    E_mats, F_mats = [], []
    for r in datum.nodes:
        Fr = np.zeros((n, n), dtype=complex)
        for (s, mu), block in fblocks.items():
            if s != r:
                continue
            src = mu + alphas[r]
            Fr[offset[mu]:offset[mu] + dims[mu], offset[src]:offset[src] + dims[src]] = block
        F_mats.append(Fr)
        E_mats.append(Fr.T.copy())
    return Module(
        datum=datum,
        weights=tuple(weights),
        E=tuple(E_mats),
        F=tuple(F_mats),
        key=_irrep_key(datum, lam),
        highest=0,
        highest_weight=lam,
        form_min_eigenvalue=min_eig,
    )


def _load_irrep(datum: RootDatum, lam: Weight, arrays: Dict[str, np.ndarray]) -> Module:
    weights = tuple(Weight(tuple(row)) for row in arrays["weights"])
    return Module(
        datum=datum,
        weights=weights,
        E=tuple(arrays["E"]),
        F=tuple(arrays["F"]),
        key=_irrep_key(datum, lam),
        highest=0,
        highest_weight=lam,
        form_min_eigenvalue=float(arrays["form_min_eigenvalue"]),
    )


def build_irrep(datum: RootDatum, lam: Weight) -> Module:
    """Irreducible module V_lam with highest weight vector at index 0."""
    if len(lam) != datum.rank:
        raise ModuleConstructionError(f"weight {lam} has wrong rank for {datum.label}")
    if not lam.is_dominant():
        raise ModuleConstructionError(f"weight {lam} is not dominant")

    def factory() -> Module:
        key = _irrep_key(datum, lam)
        store = array_store_from_env()
        if store is not None:
            arrays = store.load(key)
            if arrays is not None:
                return _load_irrep(datum, lam, arrays)
        with instrumentation.time_operation("build_irrep", datum=datum.label, weight=str(lam)):
            module = _construct_irrep(datum, lam)
            expected = weyl_dimension(datum, lam)
            if module.dim != expected:
                raise ModuleConstructionError(
                    f"V{lam} has dimension {module.dim}, Weyl dimension formula gives {expected}"
                )
        if store is not None:
            store.save(key, {
                "weights": np.array([w.coords for w in module.weights], dtype=np.int64).reshape(module.dim, datum.rank),
                "E": np.array(module.E),
                "F": np.array(module.F),
                "form_min_eigenvalue": np.array(module.form_min_eigenvalue),
            })
        return module

    return module_cache.get_or_create(("irrep", datum, lam), factory)


def conjugate_module(V: Module) -> Module:
    """Conjugate module: x bar(xi) = bar(R(x^*) xi), so E -> -conj(F) and F -> -conj(E)."""
    def factory() -> Module:
        highest = highest_weight = None
        if V.highest_weight is not None and V.highest is not None:
            w0 = longest_element(V.datum)
            lowest = w0.apply(V.highest_weight)
            idx = V.indices_of(lowest)
            if len(idx) == 1:
                highest, highest_weight = idx[0], -lowest
        return Module(
            datum=V.datum,
            weights=tuple(-w for w in V.weights),
            E=tuple(-np.conj(f) for f in V.F),
            F=tuple(-np.conj(e) for e in V.E),
            key=f"conj({V.key})",
            highest=highest,
            highest_weight=highest_weight,
        )
    return module_cache.get_or_create(("conj", V.key), factory)


def tensor(V: Module, W: Module) -> Module:
    """Tensor product with generators given by the coproduct; basis index i*dim(W)+j."""
    if V.datum != W.datum:
        raise ModuleConstructionError("tensor factors built over different root data")

    def factory() -> Module:
        datum = V.datum
        E_mats, F_mats = [], []
        for r in datum.nodes:
            alpha = datum.simple_root(r)
            lv_inv = np.diag(V.L_diag(-alpha))
            lw = np.diag(W.L_diag(alpha))
            E_mats.append(np.kron(V.E[r], lw) + np.kron(lv_inv, W.E[r]))
            F_mats.append(np.kron(V.F[r], lw) + np.kron(lv_inv, W.F[r]))
        weights = tuple(a + b for a in V.weights for b in W.weights)
        return Module(
            datum=datum,
            weights=weights,
            E=tuple(E_mats),
            F=tuple(F_mats),
            key=f"({V.key}x{W.key})",
        )
    return module_cache.get_or_create(("tensor", V.key, W.key), factory)


def trivial_module(datum: RootDatum) -> Module:
    return build_irrep(datum, datum.zero())


# Vectors and subspaces

def extremal_vector(V: Module, w: WeylElt) -> np.ndarray:
    """Unit vector h_{w lam} obtained by normalized F-strings along the word of w."""
    if V.highest_weight is None:
        raise ModuleConstructionError(f"module {V.key} is not a highest weight module")
    datum = V.datum
    v = V.highest_vector()
    mu = V.highest_weight
    for i in reversed(w.word):
        m = mu[i]
        if m < 0:
            raise ModuleConstructionError(f"word {list(w.word)} is not reduced for {mu}")
        for _ in range(m):
            v = V.F[i] @ v
        norm = np.linalg.norm(v)
        if norm < SPAN_TOLERANCE:
            raise ModuleConstructionError(f"extremal string vanished at node {i}")
        v = v / norm
        mu = mu - datum.simple_root(i) * m
    if len(V.indices_of(mu)) != 1:
        raise ModuleConstructionError(f"weight space {mu} of {V.key} is not one-dimensional")
    return v


def lowest_extremal_vector(V: Module, w: WeylElt) -> np.ndarray:
    """h_{w^{-1} lam}."""
    return extremal_vector(V, w.inverse())


def _closure(V: Module, start: np.ndarray, operators: Sequence[np.ndarray]) -> np.ndarray:
    """Orthonormal basis (columns) of the span of start under the given weight-shifting operators."""
    per_weight: Dict[Weight, List[np.ndarray]] = {}
    order: List[np.ndarray] = []

    def add(vec: np.ndarray) -> Optional[np.ndarray]:
        wt = V.weight_of(vec)
        if wt is None:
            raise ModuleConstructionError("closure produced a non-homogeneous vector")
        basis = per_weight.setdefault(wt, [])
        resid = vec.copy()
        for b in basis:
            resid -= np.vdot(b, resid) * b
        for b in basis:
            resid -= np.vdot(b, resid) * b
        norm = np.linalg.norm(resid)
        if norm <= SPAN_TOLERANCE * max(1.0, np.linalg.norm(vec)):
            return None
        resid = resid / norm
        basis.append(resid)
        order.append(resid)
        return resid

    queue = [add(start / np.linalg.norm(start))]
    while queue:
        v = queue.pop(0)
        for op in operators:
            u = op @ v
            if np.linalg.norm(u) > SPAN_TOLERANCE:
                new = add(u)
                if new is not None:
                    queue.append(new)
    return np.array(order).T.reshape(V.dim, len(order))


def demazure_span(V: Module, w: WeylElt) -> np.ndarray:
    """Orthonormal basis of U_q(b^+) h_{w^{-1} lam}."""
    return _closure(V, lowest_extremal_vector(V, w), list(V.E))


def levi_span(V: Module, start: np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """Orthonormal basis of the U_q(k_S)-submodule generated by start."""
    ops = []
    for s in sorted(subset):
        ops.extend([V.E[s], V.F[s]])
    return _closure(V, start, ops)


def invariant_subspace(V: Module, subset: Iterable[int]) -> np.ndarray:
    """Orthonormal basis of weight-zero vectors killed by E_s, F_s for s in subset."""
    idx = V.indices_of(V.datum.zero())
    if not idx:
        return np.zeros((V.dim, 0), dtype=complex)
    blocks = []
    for s in sorted(subset):
        blocks.append(V.E[s][:, idx])
        blocks.append(V.F[s][:, idx])
    if blocks:
        null = sla.null_space(np.vstack(blocks), rcond=1e-10)
    else:
        null = np.eye(len(idx), dtype=complex)
    out = np.zeros((V.dim, null.shape[1]), dtype=complex)
    out[idx, :] = null
    return out


def invariant_projector(V: Module, subset: Iterable[int]) -> np.ndarray:
    """Orthogonal projection onto the U_q(k_S)-invariant vectors of V."""
    basis = invariant_subspace(V, subset)
    return basis @ basis.conj().T


@dataclass
class InvariantVector:
    """The invariant v_lam in conj(V_lam) (x) V_lam."""
    host: Module
    coords: np.ndarray
    normalization: complex
    lam: Weight
    subset: FrozenSet[int]


def invariant_vector(datum: RootDatum, lam: Weight, subset: Iterable[int]) -> InvariantVector:
    """U_q(k_S)-invariant vector of conj(V) (x) V, V = U_q(k_S) h_{w_0 lam}, normalized against h_{w^{-1} lam}."""
    subset = datum.validate_nodes(subset)
    V = build_irrep(datum, lam)
    host = tensor(conjugate_module(V), V)
    low = extremal_vector(V, longest_element(datum))
    sub = levi_span(V, low, subset)

    weights = [V.weight_of(sub[:, i]) for i in range(sub.shape[1])]
    pairs = [(i, j) for i in range(len(weights)) for j in range(len(weights)) if weights[i] == weights[j]]
    phi = np.array([np.kron(np.conj(sub[:, i]), sub[:, j]) for i, j in pairs]).T
    blocks = []
    for s in sorted(subset):
        blocks.append(host.E[s] @ phi)
        blocks.append(host.F[s] @ phi)
    if blocks:
        null = sla.null_space(np.vstack(blocks), rcond=1e-10)
    else:
        null = np.eye(phi.shape[1], dtype=complex)
    if null.shape[1] != 1:
        raise ModuleConstructionError(
            f"invariant space for lam={lam}, S={sorted(subset)} has dimension {null.shape[1]}, expected 1"
        )
    v = phi @ null[:, 0]

    w = shortest_coset_rep(datum, subset)
    h = lowest_extremal_vector(V, w)
    lead = np.vdot(v, np.kron(np.conj(h), h))
    if abs(lead) < SPAN_TOLERANCE:
        raise ModuleConstructionError("invariant vector is orthogonal to its leading term")
    v = v / np.conj(lead)
    return InvariantVector(host=host, coords=v, normalization=lead, lam=lam, subset=subset)


# Diagnostics

def highest_weight_vectors(V: Module) -> Dict[Weight, np.ndarray]:
    """Per weight, an orthonormal basis of vectors killed by every E_r."""
    out = {}
    for wt, idx in V.weight_spaces().items():
        stacked = np.vstack([e[:, idx] for e in V.E])
        null = sla.null_space(stacked, rcond=1e-10)
        if null.shape[1]:
            basis = np.zeros((V.dim, null.shape[1]), dtype=complex)
            basis[idx, :] = null
            out[wt] = basis
    return out


def commutant_dimension(V: Module) -> int:
    """Dimension of the space of self-intertwiners, by brute-force null space."""
    n = V.dim
    columns = []
    for idx in V.weight_spaces().values():
        for a in idx:
            for b in idx:
                unit = np.zeros((n, n))
                unit[a, b] = 1.0
                columns.append(unit.reshape(-1))
    param = np.array(columns).T
    ident = np.eye(n)
    rows = []
    for op in list(V.E) + list(V.F):
        rows.append((np.kron(ident, op.T) - np.kron(op, ident)) @ param)
    if not rows:
        return param.shape[1]
    stacked = np.vstack(rows)
    return param.shape[1] - int(np.linalg.matrix_rank(stacked, tol=1e-9))


def relation_residuals(V: Module) -> Dict[str, float]:
    """Residuals of the defining relations of U_q(g) in V."""
    datum = V.datum
    comm = 0.0
    for r in datum.nodes:
        alpha = datum.simple_root(r)
        qr = datum.q_r[r]
        l2 = np.diag(V.L_diag(alpha) ** 2)
        lm2 = np.diag(V.L_diag(alpha) ** -2)
        for s in datum.nodes:
            lhs = V.E[r] @ V.F[s] - V.F[s] @ V.E[r]
            rhs = (l2 - lm2) / (qr - 1.0 / qr) if r == s else 0.0
            comm = max(comm, float(np.linalg.norm(lhs - rhs)))
    serre = 0.0
    for r in datum.nodes:
        for s in datum.nodes:
            if r != s:
                for kind in ("E", "F"):
                    serre = max(serre, float(np.linalg.norm(evaluate(serre_relation(datum, r, s, kind), V))))
    shift = 0.0
    for s in datum.nodes:
        omega = datum.fundamental(s)
        lw, lw_inv = V.L(omega), V.L(-omega)
        for r in datum.nodes:
            factor = datum.qpow(datum.pairing(omega, datum.simple_root(r)) / 2)
            shift = max(shift, float(np.linalg.norm(lw @ V.E[r] @ lw_inv - factor * V.E[r])))
    star = max((float(np.linalg.norm(V.F[r] - V.E[r].conj().T)) for r in datum.nodes), default=0.0)
    return {"commutator": comm, "serre": serre, "weight_shift": shift, "star": star}


def generator_matrices(V: Module) -> Dict[str, np.ndarray]:
    """Named generator matrices for export (1-based node labels)."""
    out = {}
    for r in V.datum.nodes:
        out[f"E{r + 1}"] = V.E[r]
        out[f"F{r + 1}"] = V.F[r]
        out[f"L_omega{r + 1}"] = V.L(V.datum.fundamental(r))
    return out
