"""
Action of the universal R-matrix on concrete tensor products V (x) W.

R is found by fixing its diagonal part Q from the weights and solving the
intertwining equations R Delta(x) = Delta^op(x) R over the strictly
triangular unknowns of R~ = Q^{-1} R.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy import linalg as sla
from scipy import sparse

from cache_manager import rmatrix_cache
from instrumentation import instrumentation

from .repmod import Module

SOLVE_GATE = 1e-8
RANK_THRESHOLD = 1e-13


class RMatrixError(RuntimeError):
    """Raised when the triangular R-matrix system is singular or inconsistent."""
    pass


@dataclass(eq=False)
class RAction:
    """R acting on V (x) W, with R = Q R~."""
    V: Module
    W: Module
    R: np.ndarray
    Q: np.ndarray
    Rtilde: np.ndarray
    residual: float = 0.0
    _cache: Dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    @property
    def R_inv(self) -> np.ndarray:
        if "inv" not in self._cache:
            qinv = np.diag(1.0 / self.Q)
            if _is_upper(self.Rtilde):
                inv = sla.solve_triangular(self.Rtilde, qinv, lower=False, unit_diagonal=True)
            elif _is_upper(self.Rtilde.T):
                inv = sla.solve_triangular(self.Rtilde, qinv, lower=True, unit_diagonal=True)
            else:
                inv = np.linalg.solve(self.R, np.eye(self.dim))
            self._cache["inv"] = inv
        return self._cache["inv"]

    @property
    def Rtilde_inv(self) -> np.ndarray:
        """(R~)^{-1} = R^{-1} Q."""
        if "tinv" not in self._cache:
            self._cache["tinv"] = self.R_inv @ np.diag(self.Q)
        return self._cache["tinv"]


def _is_upper(matrix: np.ndarray) -> bool:
    return not np.any(np.tril(matrix, -1))


def flip_matrix(dv: int, dw: int) -> np.ndarray:
    """Permutation P: V (x) W -> W (x) V, v_i (x) w_j -> w_j (x) v_i."""
    P = np.zeros((dv * dw, dv * dw))
    for i in range(dv):
        for j in range(dw):
            P[j * dv + i, i * dw + j] = 1.0
    return P


def coproduct_matrices(V: Module, W: Module, r: int, kind: str, opposite: bool = False) -> np.ndarray:
    """Matrix of Delta(X_r) (or Delta^op) on V (x) W for X = E or F."""
    alpha = V.datum.simple_root(r)
    XV = V.E[r] if kind == "E" else V.F[r]
    XW = W.E[r] if kind == "E" else W.F[r]
    if opposite:
        return np.kron(np.diag(V.L_diag(alpha)), XW) + np.kron(XV, np.diag(W.L_diag(-alpha)))
    return np.kron(XV, np.diag(W.L_diag(alpha))) + np.kron(np.diag(V.L_diag(-alpha)), XW)


def _diagonal_part(V: Module, W: Module) -> np.ndarray:
    datum = V.datum
    values: Dict[Tuple, float] = {}
    out = np.empty(V.dim * W.dim)
    for i, a in enumerate(V.weights):
        for j, b in enumerate(W.weights):
            if (a, b) not in values:
                values[(a, b)] = datum.qpow(datum.pairing(a, b))
            out[i * W.dim + j] = values[(a, b)]
    return out


def _triangular_positions(V: Module, W: Module) -> np.ndarray:
    """(row, col) pairs where the first-factor weight rises by a nonzero element of Q^+."""
    datum = V.datum
    inv = np.array([[float(x) for x in row] for row in datum.cartan_inverse])
    fv = np.array([V.weights[t // W.dim].coords for t in range(V.dim * W.dim)], dtype=float)
    fv = fv.reshape(V.dim * W.dim, datum.rank)
    total = np.array([(V.weights[t // W.dim] + W.weights[t % W.dim]).coords
                      for t in range(V.dim * W.dim)], dtype=float).reshape(V.dim * W.dim, datum.rank)
    same_total = np.all(total[:, None, :] == total[None, :, :], axis=2)
    rise = (fv[:, None, :] - fv[None, :, :]) @ inv.T
    integral = np.all(np.abs(rise - np.rint(rise)) < 1e-9, axis=2)
    nonneg = np.all(rise > -1e-9, axis=2)
    nonzero = np.any(np.abs(rise) > 1e-9, axis=2)
    return np.argwhere(same_total & integral & nonneg & nonzero)


def _solve(V: Module, W: Module) -> RAction:
    datum = V.datum
    n = V.dim * W.dim
    Qd = _diagonal_part(V, W)
    positions = _triangular_positions(V, W)
    if positions.size == 0:
        R = np.diag(Qd).astype(complex)
        return RAction(V=V, W=W, R=R, Q=Qd, Rtilde=np.eye(n, dtype=complex))

    # Unknown N[a, b] enters Q N D - Dop Q N at row a (times D[b, :]) and column b (times Dop[:, a]).
    rows, cols, vals = [], [], []
    rhs_blocks = []
    offset = 0
    for r in datum.nodes:
        for kind in ("E", "F"):
            D = coproduct_matrices(V, W, r, kind)
            Dop = coproduct_matrices(V, W, r, kind, opposite=True)
            for u, (a, b) in enumerate(positions):
                js = np.flatnonzero(D[b, :])
                rows.extend(offset + a * n + js)
                cols.extend([u] * len(js))
                vals.extend(Qd[a] * D[b, js])
                is_ = np.flatnonzero(Dop[:, a])
                rows.extend(offset + is_ * n + b)
                cols.extend([u] * len(is_))
                vals.extend(-Qd[a] * Dop[is_, a])
            rhs_blocks.append((Dop * Qd[None, :] - Qd[:, None] * D).reshape(-1))
            offset += n * n
    A = sparse.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(offset, len(positions)))
    b = np.concatenate(rhs_blocks)

    gram = (A.conj().T @ A).toarray()
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= RANK_THRESHOLD * max(eigs[-1], 1.0):
        raise RMatrixError(f"triangular R-matrix system for {V.key} x {W.key} is rank deficient")
    x = sla.solve(gram, A.conj().T @ b, assume_a="her")
    residual = float(np.linalg.norm(A @ x - b)) / max(1.0, float(np.linalg.norm(b)))
    if residual > SOLVE_GATE:
        raise RMatrixError(f"R-matrix system for {V.key} x {W.key} is inconsistent (residual {residual:.3e})")

    Rtilde = np.eye(n, dtype=complex)
    Rtilde[positions[:, 0], positions[:, 1]] = x
    R = Qd[:, None] * Rtilde
    return RAction(V=V, W=W, R=R, Q=Qd, Rtilde=Rtilde, residual=residual)


def r_action(V: Module, W: Module) -> RAction:
    """R-matrix action on V (x) W, cached per module pair."""
    if V.datum != W.datum:
        raise RMatrixError("R-matrix requested for modules over different root data")

    def factory() -> RAction:
        with instrumentation.time_operation("r_action", pair=f"{V.key}x{W.key}"):
            return _solve(V, W)
    return rmatrix_cache.get_or_create((V.key, W.key), factory)


@dataclass
class FlipVariants:
    """R_21, R^{-1} and R_21^{-1} acting on the same space V (x) W."""
    R21: np.ndarray
    R_inv: np.ndarray
    R21_inv: np.ndarray


def r_flip_variants(action: RAction) -> FlipVariants:
    P = flip_matrix(action.V.dim, action.W.dim)
    swapped = r_action(action.W, action.V)
    R21 = P.T @ swapped.R @ P
    R21_inv = P.T @ swapped.R_inv @ P
    return FlipVariants(R21=R21, R_inv=action.R_inv, R21_inv=R21_inv)


def intertwining_residual(action: RAction) -> float:
    """max over generators of ||R Delta(x) - Delta^op(x) R||."""
    worst = 0.0
    for r in action.V.datum.nodes:
        for kind in ("E", "F"):
            D = coproduct_matrices(action.V, action.W, r, kind)
            Dop = coproduct_matrices(action.V, action.W, r, kind, opposite=True)
            worst = max(worst, float(np.linalg.norm(action.R @ D - Dop @ action.R)))
    return worst


def triangularity_defect(action: RAction) -> float:
    """Norm of R~ - 1 outside the allowed strictly triangular positions."""
    mask = np.ones(action.R.shape, dtype=bool)
    positions = _triangular_positions(action.V, action.W)
    if positions.size:
        mask[positions[:, 0], positions[:, 1]] = False
    return float(np.linalg.norm((action.Rtilde - np.eye(action.dim))[mask]))


def _swap_last_two(d1: int, d2: int, d3: int) -> np.ndarray:
    """Permutation V1 (x) V3 (x) V2 -> V1 (x) V2 (x) V3."""
    return np.kron(np.eye(d1), flip_matrix(d3, d2))


def yang_baxter_residual(V1: Module, V2: Module, V3: Module) -> float:
    """||R12 R13 R23 - R23 R13 R12|| on V1 (x) V2 (x) V3."""
    d1, d2, d3 = V1.dim, V2.dim, V3.dim
    R12 = np.kron(r_action(V1, V2).R, np.eye(d3))
    R23 = np.kron(np.eye(d1), r_action(V2, V3).R)
    P = _swap_last_two(d1, d2, d3)
    R13 = P @ np.kron(r_action(V1, V3).R, np.eye(d2)) @ P.T
    return float(np.linalg.norm(R12 @ R13 @ R23 - R23 @ R13 @ R12))


def highest_compression(action: RAction) -> np.ndarray:
    """(<h_lam| (x) id) R^{-1} (|h_lam> (x) id) on W."""
    if action.V.highest is None:
        raise RMatrixError(f"{action.V.key} has no highest vector")
    h = action.V.highest
    d = action.W.dim
    return action.R_inv[h * d:(h + 1) * d, h * d:(h + 1) * d]
