"""
Global sparse solver: LDL^T factorization, primary solve and selected inversion.

The summations below visit only stored entries of the closed pattern of L.
Terms outside that pattern vanish because the pattern is closed under the
four-corners rule, which is why :func:`ldl_factorize` always closes the
pattern of ``A`` before factorizing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InvalidInputError, NotPositiveDefiniteError, SingularMatrixError
from .pattern import Pair, SparsityPattern, SymmetricSparseMatrix, symbolic_fill_in

RECONSTRUCTION_RTOL = 1e-10
INVERSE_RTOL = 1e-9
PIVOT_RTOL = 1e-12
DENSE_ORACLE_MAX_N = 500


class _Structure:
    """Row/column adjacency lists of a closed pattern, 1-based."""

    def __init__(self, pattern: SparsityPattern):
        n = pattern.n
        self.n = n
        self.rows = [[] for _ in range(n + 1)]   # rows[i]: j < i in row i
        self.cols = [[] for _ in range(n + 1)]   # cols[j]: i > j in column j
        for i, j in sorted(pattern.entries):
            if i != j:
                self.rows[i].append(j)
                self.cols[j].append(i)
        self.row_sets = [set(r) for r in self.rows]


@dataclass(frozen=True)
class LdlFactors:
    """``A = L S L^T`` with unit lower-triangular ``L`` on a closed pattern.

    ``l_values`` holds strictly-lower entries keyed by 1-based ``(i, j)``;
    ``s`` holds the diagonal, ``s[i - 1] = S_ii``.
    """

    pattern: SparsityPattern
    l_values: Mapping[Pair, float] = field(repr=False)
    s: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.pattern.n

    def L(self, i: int, j: int) -> float:
        if i == j:
            return 1.0
        return self.l_values.get((i, j), 0.0)

    def S(self, i: int) -> float:
        return float(self.s[i - 1])

    def l_dense(self) -> np.ndarray:
        lmat = np.eye(self.n)
        for (i, j), v in self.l_values.items():
            lmat[i - 1, j - 1] = v
        return lmat

    def reconstruct(self) -> np.ndarray:
        lmat = self.l_dense()
        return lmat @ np.diag(self.s) @ lmat.T


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class SelectedInverse:
    """Entries of ``A^{-1}`` on the closed pattern of ``L``."""

    pattern: SparsityPattern
    values: Mapping[Pair, float] = field(repr=False)

    def __getitem__(self, pair: Pair) -> float:
        i, j = pair
        if j > i:
            i, j = j, i
        return self.values[(i, j)]

    def diagonal(self) -> np.ndarray:
        return np.array([self.values[(i, i)] for i in range(1, self.pattern.n + 1)])

    def to_text(self) -> str:
        lines = [f"N {self.pattern.n}"]
        lines.extend(f"{i} {j} {float(self.values[(i, j)])!r}" for i, j in self.pattern.sorted())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SelectedInverse":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or rows[0][0] != "N":
            raise InvalidInputError("selected inverse file must start with 'N <n>'")
        n = int(rows[0][1])
        vals = {(int(i), int(j)): float(v) for i, j, v in rows[1:]}
        return cls(SparsityPattern(n, vals), vals)


def ldl_factorize(a: SymmetricSparseMatrix, pivot_rtol: float = PIVOT_RTOL) -> LdlFactors:
    """Sparse ``L S L^T`` factorization, column by column.

    ``S_jj = A_jj - sum_{l<j} L_jl^2 S_ll`` followed by
    ``L_ij = (A_ij - sum_{l<j} L_jl L_il S_ll) / S_jj`` for each ``i > j`` in
    column ``j``. Entries created by fill-in start from ``A_ij = 0``.

    Raises :class:`NotPositiveDefiniteError` when a pivot drops to
    ``pivot_rtol * max(diag(A))`` or below.
    """
    pattern = symbolic_fill_in(a.pattern)
    st = _Structure(pattern)
    n = pattern.n
    diag = np.array([a[(i, i)] for i in range(1, n + 1)])
    eps = pivot_rtol * max(float(diag.max()), 0.0)
    s = np.zeros(n)
    lv: dict[Pair, float] = {}

    for j in range(1, n + 1):
        acc = a[(j, j)]
        for l in st.rows[j]:
            ljl = lv[(j, l)]
            acc -= ljl * ljl * s[l - 1]
        if not acc > eps:
            raise NotPositiveDefiniteError(j, acc, eps)
        s[j - 1] = acc
        for i in st.cols[j]:
            acc = a[(i, j)]
            ri = st.row_sets[i]
            for l in st.rows[j]:
                if l in ri:
                    acc -= lv[(j, l)] * lv[(i, l)] * s[l - 1]
            lv[(i, j)] = acc / s[j - 1]
    return LdlFactors(pattern, lv, s)


def solve_primary(factors: LdlFactors, b) -> Solution:
    """Solve ``L S w = b`` forward, then ``L^T x = w`` backward."""
    b = np.asarray(b, dtype=float).ravel()
    n = factors.n
    if b.shape != (n,):
        raise InvalidInputError(f"right-hand side has length {b.size}, expected {n}")
    st = _Structure(factors.pattern)
    lv, s = factors.l_values, factors.s
    w = np.zeros(n)
    for i in range(1, n + 1):
        acc = b[i - 1]
        for j in st.rows[i]:
            acc -= lv[(i, j)] * s[j - 1] * w[j - 1]
        w[i - 1] = acc / s[i - 1]
    x = np.zeros(n)
    for i in range(n, 0, -1):
        acc = w[i - 1]
        for j in st.cols[i]:
            acc -= lv[(j, i)] * x[j - 1]
        x[i - 1] = acc
    return Solution(x=x, w=w)


def selected_inverse(factors: LdlFactors) -> SelectedInverse:
    """Entries of ``A^{-1}`` on the pattern of ``L`` by backward recursion.

    ``y_ij = delta_ij / S_jj - sum_{i >= l > j} L_lj y_il - sum_{k > i} L_kj y_ki``,
    evaluated for rows ``i = n .. 1`` and, within a row, ``j = i .. 1``.
    """
    st = _Structure(factors.pattern)
    n = factors.n
    lv, s = factors.l_values, factors.s
    y: dict[Pair, float] = {}
    for i in range(n, 0, -1):
        ri = st.row_sets[i]
        for j in [i] + st.rows[i][::-1]:
            acc = 1.0 / s[j - 1] if i == j else 0.0
            for l in st.cols[j]:
                if l > i:
                    break
                if l == i or l in ri:
                    acc -= lv[(l, j)] * y[(i, l)]
            for k in st.cols[j]:
                if k > i and i in st.row_sets[k]:
                    acc -= lv[(k, j)] * y[(k, i)]
            y[(i, j)] = acc
    return SelectedInverse(factors.pattern, y)


def dense_oracle_inverse(a: SymmetricSparseMatrix) -> np.ndarray:
    """Full dense inverse, for reference only."""
    if a.n > DENSE_ORACLE_MAX_N:
        raise InvalidInputError(f"dense oracle limited to n <= {DENSE_ORACLE_MAX_N}")
    try:
        return np.linalg.inv(a.to_dense())
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc


@dataclass(frozen=True)
class GlobalResult:
    factors: LdlFactors
    solution: Solution
    inverse: SelectedInverse
    residual: float

    @property
    def x(self) -> np.ndarray:
        return self.solution.x


def solve(a: SymmetricSparseMatrix, b) -> GlobalResult:
    """Factorize, solve for ``x`` and recover the selected inverse."""
    factors = ldl_factorize(a)
    sol = solve_primary(factors, b)
    inv = selected_inverse(factors)
    return GlobalResult(factors, sol, inv, relative_residual(a, sol.x, b))


def relative_residual(a: SymmetricSparseMatrix, x, b) -> float:
    b = np.asarray(b, dtype=float)
    r = matvec(a, x) - b
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))


def matvec(a: SymmetricSparseMatrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(a.n)
    for (i, j), v in a.values.items():
        out[i - 1] += v * x[j - 1]
        if i != j:
            out[j - 1] += v * x[i - 1]
    return out
