"""
Operators on truncated Fock tensor products l^2(Z_+)^{(x) legs}, kept as sums
of elementary Kronecker products of per-leg N x N matrices.

Identities are only ever checked on a safe block: indices < M on every leg,
with M + depth * shift <= N so that truncation never reaches the block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

MAX_TERMS = 20000


class TruncationError(ValueError):
    """Raised for leg/size mismatches and safe blocks that cannot be made exact."""
    pass


Term = Tuple[complex, Tuple[np.ndarray, ...]]


@dataclass(eq=False)
class TensorOp:
    legs: int
    N: int
    terms: List[Term] = field(default_factory=list)
    _sparse: Dict[int, sparse.csr_matrix] = field(default_factory=dict, repr=False)
    _shifts: Dict[float, int] = field(default_factory=dict, repr=False)

    @classmethod
    def zero(cls, legs: int, N: int) -> TensorOp:
        return cls(legs, N, [])

    @classmethod
    def identity(cls, legs: int, N: int) -> TensorOp:
        eye = np.eye(N, dtype=complex)
        return cls(legs, N, [(1.0 + 0j, (eye,) * legs)])

    @classmethod
    def elementary(cls, factors: Sequence[np.ndarray], coeff: complex = 1.0) -> TensorOp:
        factors = tuple(np.asarray(f, dtype=complex) for f in factors)
        if not factors:
            raise TruncationError("elementary operator needs at least one factor; use scalar() for zero legs")
        N = factors[0].shape[0]
        for f in factors:
            if f.shape != (N, N):
                raise TruncationError(f"factor of shape {f.shape} in a tensor of {N} x {N} legs")
        return cls(len(factors), N, [(complex(coeff), factors)])

    @classmethod
    def scalar(cls, legs: int, N: int, value: complex) -> TensorOp:
        return cls.identity(legs, N).scaled(value)

    @property
    def dim(self) -> int:
        return self.N ** self.legs

    def _check(self, other: TensorOp) -> None:
        if (self.legs, self.N) != (other.legs, other.N):
            raise TruncationError(
                f"tensor operators on {self.legs} legs of size {self.N} and "
                f"{other.legs} legs of size {other.N} cannot be combined"
            )

    def __add__(self, other: TensorOp) -> TensorOp:
        self._check(other)
        return TensorOp(self.legs, self.N, self.terms + other.terms)

    def __sub__(self, other: TensorOp) -> TensorOp:
        return self + other.scaled(-1.0)

    def __neg__(self) -> TensorOp:
        return self.scaled(-1.0)

    def scaled(self, c: complex) -> TensorOp:
        return TensorOp(self.legs, self.N, [(coeff * c, f) for coeff, f in self.terms])

    def __mul__(self, other) -> TensorOp:
        if not isinstance(other, TensorOp):
            return self.scaled(other)
        self._check(other)
        if len(self.terms) * len(other.terms) > MAX_TERMS:
            raise TruncationError(
                f"product of {len(self.terms)} and {len(other.terms)} terms exceeds the cap of {MAX_TERMS}"
            )
        terms = []
        for ca, fa in self.terms:
            for cb, fb in other.terms:
                terms.append((ca * cb, tuple(x @ y for x, y in zip(fa, fb))))
        return TensorOp(self.legs, self.N, terms)

    def __rmul__(self, c) -> TensorOp:
        return self.scaled(c)

    def adjoint(self) -> TensorOp:
        return TensorOp(self.legs, self.N, [(np.conj(c), tuple(f.conj().T for f in fs)) for c, fs in self.terms])

    def compress(self, tol: float = 0.0) -> TensorOp:
        """Merge terms with identical factor lists and drop negligible ones."""
        merged: Dict[Tuple[bytes, ...], List] = {}
        for c, fs in self.terms:
            key = tuple(f.tobytes() for f in fs)
            if key in merged:
                merged[key][0] += c
            else:
                merged[key] = [c, fs]
        terms = [(c, fs) for c, fs in merged.values() if abs(c) > tol]
        return TensorOp(self.legs, self.N, terms)

    def max_shift(self, tol: float = 0.0) -> int:
        """Largest upward index move i - j of any nonzero factor entry, over all legs."""
        if tol in self._shifts:
            return self._shifts[tol]
        worst = 0
        for _, fs in self.terms:
            for f in fs:
                rows, cols = np.nonzero(np.abs(f) > tol)
                if rows.size:
                    worst = max(worst, int(np.max(rows - cols)))
        self._shifts[tol] = worst
        return worst

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """Apply to a vector of length N^legs, one tensordot per leg."""
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (self.dim,):
            raise TruncationError(f"vector of length {vector.shape} for an operator of size {self.dim}")
        if self.legs == 0:
            return vector * sum(c for c, _ in self.terms)
        tensor = vector.reshape((self.N,) * self.legs)
        out = np.zeros_like(tensor)
        for c, fs in self.terms:
            part = tensor
            for k in reversed(range(self.legs)):
                part = np.tensordot(fs[k], part, axes=([1], [self.legs - 1]))
            out += c * part
        return out.reshape(-1)

    def to_sparse(self, span: Optional[int] = None) -> sparse.csr_matrix:
        """Sparse matrix on the first ``span`` levels of every leg (default N).

        Tails shared between terms are built once.
        """
        span = self.N if span is None else span
        if not 1 <= span <= self.N:
            raise TruncationError(f"span {span} outside 1..{self.N}")
        if span in self._sparse:
            return self._sparse[span]
        if self.legs == 0:
            value = sum(c for c, _ in self.terms)
            self._sparse[span] = sparse.csr_matrix(np.array([[value]], dtype=complex))
            return self._sparse[span]
        n = span ** self.legs
        total = sparse.csr_matrix((n, n), dtype=complex)
        tails: Dict[Tuple[int, ...], sparse.csr_matrix] = {}

        def tail(fs: Tuple[np.ndarray, ...], start: int) -> sparse.csr_matrix:
            key = tuple(id(f) for f in fs[start:])
            if key not in tails:
                head = sparse.csr_matrix(fs[start][:span, :span])
                if start == len(fs) - 1:
                    tails[key] = head
                else:
                    tails[key] = sparse.kron(head, tail(fs, start + 1), format="csr")
            return tails[key]

        for c, fs in self.terms:
            total = total + c * tail(fs, 0)
        total.eliminate_zeros()
        self._sparse[span] = total.tocsr()
        return self._sparse[span]

    def safe_block(self, M: int) -> np.ndarray:
        """Dense M^legs principal block."""
        idx = safe_indices(self.legs, self.N, M)
        return self.to_sparse()[idx][:, idx].toarray()

    def is_diagonal(self, tol: float = 0.0) -> bool:
        return all(np.all(np.abs(f - np.diag(np.diag(f))) <= tol) for _, fs in self.terms for f in fs)

    def diagonal(self) -> np.ndarray:
        """Full diagonal (length N^legs)."""
        out = np.zeros(self.dim, dtype=complex)
        for c, fs in self.terms:
            d = np.ones(1, dtype=complex)
            for f in fs:
                d = np.kron(d, np.diag(f))
            out += c * d
        return out


def safe_indices(legs: int, N: int, M: int) -> np.ndarray:
    """Flat indices of the tensor basis vectors with every leg index < M."""
    if M > N or M < 1:
        raise TruncationError(f"safe block size {M} outside 1..{N}")
    if legs == 0:
        return np.zeros(1, dtype=np.int64)
    grid = np.indices((M,) * legs).reshape(legs, -1)
    return np.ravel_multi_index(tuple(grid), (N,) * legs)


def vacuum(legs: int, N: int) -> np.ndarray:
    """e_0^{(x) legs}."""
    v = np.zeros(N ** legs, dtype=complex)
    v[0] = 1.0
    return v


def relative_residual(diff, ref) -> float:
    """||diff||_F / max(1, ||ref||_F) for dense or sparse operands."""
    def norm(x) -> float:
        if sparse.issparse(x):
            return float(spla.norm(x))
        return float(np.linalg.norm(x))
    return norm(diff) / max(1.0, norm(ref))


@dataclass
class SafeBlock:
    """Principal block of M indices per leg on which products of operators are exact.

    Products are formed on the first ``span`` levels of every leg; a block
    fitted for ``depth`` factors of upward shift ``shift`` has
    M + depth * shift <= span <= N.
    """
    legs: int
    N: int
    M: int
    span: Optional[int] = None

    def __post_init__(self):
        if self.span is None:
            self.span = self.N
        if not 1 <= self.M <= self.span <= self.N:
            raise TruncationError(f"safe block M={self.M}, span={self.span} does not fit N={self.N}")

    def fit(self, depth: int, shift: int) -> SafeBlock:
        """Shrink M so that M + depth * shift <= N, and the span to M + depth * shift."""
        limit = self.N - depth * shift
        if limit < 1:
            raise TruncationError(
                f"no exact safe block: depth {depth} with shift {shift} exceeds truncation N={self.N}"
            )
        M = min(self.M, limit)
        return SafeBlock(self.legs, self.N, M, min(self.N, M + depth * shift))

    @property
    def indices(self) -> np.ndarray:
        """Flat indices of the block inside the span."""
        return safe_indices(self.legs, self.span, self.M)

    def evaluate(self, products: Sequence[Tuple[complex, Sequence[TensorOp]]]) -> sparse.csr_matrix:
        """Sparse M^legs x M^legs block of sum_c c * X_1 X_2 ... X_k, multiplied right to left."""
        idx = self.indices
        total_dim = self.span ** self.legs
        cols = sparse.csr_matrix(
            (np.ones(len(idx), dtype=complex), (idx, np.arange(len(idx)))), shape=(total_dim, len(idx))
        )
        total = sparse.csr_matrix((len(idx), len(idx)), dtype=complex)
        for coeff, ops in products:
            current = cols
            for op in reversed(list(ops)):
                if (op.legs, op.N) != (self.legs, self.N):
                    raise TruncationError("operator does not live on this safe block's tensor space")
                current = op.to_sparse(self.span) @ current
            total = total + coeff * current[idx]
        return total.tocsr()

    def dense(self, op: TensorOp) -> np.ndarray:
        return self.evaluate([(1.0, [op])]).toarray()

