"""
Dense Kronecker-algebra oracle.

Explicit elimination/duplication matrices and the coefficient matrices of the
vectorized factorization and inverse systems. Everything here is dense and
meant for checking structure on small problems; the production path in
:mod:`selinv.solver` never builds these matrices.

``vec`` stacks columns. Secondary orders list lower-triangle pairs ``(i, j)``
with ``j <= i``, 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, SingularMatrixError
from .pattern import Pair, SparsityPattern

MAX_ORACLE_N = 12


@dataclass(frozen=True)
class SecondaryOrder:
    n: int
    sequence: tuple[Pair, ...]

    def __post_init__(self):
        seq = tuple((int(i), int(j)) for i, j in self.sequence)
        expected = {(i, j) for i in range(1, self.n + 1) for j in range(1, i + 1)}
        if len(seq) != len(expected) or set(seq) != expected:
            raise InvalidInputError(
                "secondary order must list every lower-triangle pair exactly once")
        object.__setattr__(self, "sequence", seq)

    @property
    def m(self) -> int:
        return len(self.sequence)

    def index(self) -> dict[Pair, int]:
        """0-based position of every pair."""
        return {p: k for k, p in enumerate(self.sequence)}

    def positions(self, pairs) -> list[int]:
        idx = self.index()
        return sorted(idx[p] for p in pairs)

    def labels(self) -> list[str]:
        return [f"{i}{j}" if self.n < 10 else f"{i},{j}" for i, j in self.sequence]


def _guard(n):
    if n > MAX_ORACLE_N:
        raise InvalidInputError(
            f"dense oracle limited to n <= {MAX_ORACLE_N}, got n = {n}")


def basic_triangular_order(n: int) -> SecondaryOrder:
    """11, 21, 22, 31, 32, 33, ..., nn."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    return SecondaryOrder(n, tuple((i, j) for i in range(1, n + 1) for j in range(1, i + 1)))


def ultimate_triangular_order(n: int, l_pattern: SparsityPattern) -> SecondaryOrder:
    """Basic order stably partitioned into pairs outside the pattern, then inside.

    This is the fixed point of :func:`swap_to_fixed_point` started from the
    basic order.
    """
    if l_pattern.n != n:
        raise InvalidInputError(f"pattern is {l_pattern.n}x{l_pattern.n}, expected n = {n}")
    if not l_pattern.is_closed():
        raise InvalidInputError("pattern is not closed under the four-corners rule")
    basic = basic_triangular_order(n).sequence
    outside = [p for p in basic if p not in l_pattern.entries]
    inside = [p for p in basic if p in l_pattern.entries]
    return SecondaryOrder(n, tuple(outside + inside))


def swap_to_fixed_point(order: SecondaryOrder, l_pattern: SparsityPattern) -> SecondaryOrder:
    """Swap adjacent ``(m, m+1)`` while ``m`` is in the pattern and ``m+1`` is not.

    Brute-force reference for :func:`ultimate_triangular_order`.
    """
    seq = list(order.sequence)
    inside = l_pattern.entries
    changed = True
    while changed:
        changed = False
        for m in range(len(seq) - 1):
            if seq[m] in inside and seq[m + 1] not in inside:
                seq[m], seq[m + 1] = seq[m + 1], seq[m]
                changed = True
    return SecondaryOrder(order.n, tuple(seq))


def vec(a) -> np.ndarray:
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def unvec(v, rows, cols=None) -> np.ndarray:
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=float).reshape((rows, cols), order="F")


def unit_matrix(n: int, a: int, b: int) -> np.ndarray:
    """``n x n`` zeros with a one at 1-based ``(a, b)``."""
    u = np.zeros((n, n))
    u[a - 1, b - 1] = 1.0
    return u


def elimination_matrix(order: SecondaryOrder) -> np.ndarray:
    """Rows ``vec(1_ji)^T`` over the order's pairs ``(i, j)``; shape ``M x n^2``."""
    n = order.n
    _guard(n)
    e = np.zeros((order.m, n * n))
    for r, (i, j) in enumerate(order.sequence):
        e[r] = vec(unit_matrix(n, j, i))
    return e


def duplication_matrix(order: SecondaryOrder) -> np.ndarray:
    """Columns ``vec((1 - delta_ij) 1_ij + 1_ji)``; shape ``n^2 x M``."""
    n = order.n
    _guard(n)
    d = np.zeros((n * n, order.m))
    for c, (i, j) in enumerate(order.sequence):
        col = unit_matrix(n, j, i)
        if i != j:
            col += unit_matrix(n, i, j)
        d[:, c] = vec(col)
    return d


def _dense_l(factors) -> np.ndarray:
    if hasattr(factors, "l_dense"):
        return factors.l_dense()
    return np.asarray(factors, dtype=float)


def _dense_s(s) -> np.ndarray:
    if hasattr(s, "s"):
        s = s.s
    s = np.asarray(s, dtype=float)
    return s if s.ndim == 1 else np.diag(s)


def _check_indices(n, i, j, k, l):
    if not (1 <= j <= i <= n and 1 <= l <= k <= n):
        raise InvalidInputError(f"indices ({i}{j}, {k}{l}) out of range for n = {n}")


def entry_C(i: int, j: int, k: int, l: int, factors) -> float:
    """Closed-form ``(ij, kl)`` entry of ``E (1 kron L^T) D``."""
    lmat = _dense_l(factors)
    _check_indices(lmat.shape[0], i, j, k, l)
    if i == k:
        return float(lmat[l - 1, j - 1])
    if i == l:
        return float(lmat[k - 1, j - 1])
    return 0.0


def entry_G(i: int, j: int, k: int, l: int, factors) -> float:
    """Closed-form ``(ij, kl)`` entry of ``E (1 kron L) D``."""
    lmat = _dense_l(factors)
    _check_indices(lmat.shape[0], i, j, k, l)
    if i == k:
        return float(lmat[j - 1, l - 1])
    return 0.0


def entry_d(i: int, j: int, s) -> float:
    """``1 / S_jj`` on the diagonal, zero elsewhere."""
    s = _dense_s(s)
    if not 1 <= j <= i <= len(s):
        raise InvalidInputError(f"index {i}{j} out of range")
    if s[j - 1] <= 0:
        raise SingularMatrixError(f"S_{j}{j} = {s[j - 1]} is not positive")
    return 1.0 / s[j - 1] if i == j else 0.0


def build_C(factors, order: SecondaryOrder) -> np.ndarray:
    lmat = _dense_l(factors)
    _check_dim(lmat, order)
    e, d = elimination_matrix(order), duplication_matrix(order)
    return e @ np.kron(np.eye(order.n), lmat.T) @ d


def build_G(factors, order: SecondaryOrder) -> np.ndarray:
    lmat = _dense_l(factors)
    _check_dim(lmat, order)
    e, d = elimination_matrix(order), duplication_matrix(order)
    return e @ np.kron(np.eye(order.n), lmat) @ d


def build_d(s, order: SecondaryOrder) -> np.ndarray:
    s = _dense_s(s)
    if len(s) != order.n:
        raise InvalidInputError("dimension mismatch between S and order")
    if np.any(s <= 0):
        raise SingularMatrixError("S has a nonpositive entry")
    return elimination_matrix(order) @ vec(np.diag(1.0 / s))


def build_h(a, order: SecondaryOrder) -> np.ndarray:
    a = a.to_dense() if hasattr(a, "to_dense") else np.asarray(a, dtype=float)
    _check_dim(a, order)
    return elimination_matrix(order) @ vec(a)


def build_v(factors, order: SecondaryOrder) -> np.ndarray:
    """``E vec(S L^T)``: entry ``ij`` equals ``L_ij S_jj``."""
    lmat = _dense_l(factors)
    s = _dense_s(factors)
    _check_dim(lmat, order)
    return elimination_matrix(order) @ vec(np.diag(s) @ lmat.T)


def _check_dim(mat, order):
    if mat.shape != (order.n, order.n):
        raise InvalidInputError(
            f"matrix shape {mat.shape} does not match order dimension {order.n}")


def split_blocks(mat: np.ndarray, order: SecondaryOrder, l_pattern: SparsityPattern):
    """Return ``(11, 12, 21, 22)`` blocks for an ultimate-ordered matrix."""
    k = len(l_pattern.complement)
    if order.sequence[k:] and set(order.sequence[k:]) != set(l_pattern.entries):
        raise InvalidInputError("order is not partitioned as (outside, inside) pattern")
    return mat[:k, :k], mat[:k, k:], mat[k:, :k], mat[k:, k:]


def write_csv(mat: np.ndarray, path, labels: Sequence[str] | None = None) -> None:
    """Dump a dense matrix as CSV, optionally with a header of column labels."""
    with open(path, "w") as fh:
        if labels is not None:
            fh.write("," + ",".join(labels) + "\n")
        for r, row in enumerate(np.atleast_2d(mat)):
            prefix = f"{labels[r]}," if labels is not None else ""
            fh.write(prefix + ",".join(repr(float(v)) for v in row) + "\n")
