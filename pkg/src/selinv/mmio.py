"""Matrix Market reading and writing for symmetric matrices and vectors."""
from __future__ import annotations

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import InvalidInputError
from .pattern import SparsityPattern, SymmetricSparseMatrix


def read_matrix(path) -> SymmetricSparseMatrix:
    """Read a symmetric coordinate matrix; explicit zeros stay in the pattern."""
    try:
        info = scipy.io.mminfo(path)
        m = scipy.io.mmread(path)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read Matrix Market file {path}: {exc}") from exc
    rows, cols, *_ = info
    if rows != cols:
        raise InvalidInputError(f"{path}: matrix is {rows}x{cols}, not square")
    if sp.issparse(m):
        coo = sp.coo_matrix(m)
        n = coo.shape[0]
        vals = {}
        for i, j, v in zip(coo.row, coo.col, coo.data):
            i, j = int(i) + 1, int(j) + 1
            key = (max(i, j), min(i, j))
            if key in vals and not np.isclose(vals[key], v, rtol=1e-12, atol=0):
                raise InvalidInputError(f"{path}: matrix is not symmetric at {key}")
            vals[key] = float(v)
        for i in range(1, n + 1):
            vals.setdefault((i, i), 0.0)
        return SymmetricSparseMatrix(SparsityPattern(n, vals), vals)
    return SymmetricSparseMatrix.from_dense(np.asarray(m))


def write_matrix(path, a: SymmetricSparseMatrix, comment: str = "") -> None:
    """Write the lower triangle with ``symmetric`` storage."""
    rows, cols, data = [], [], []
    for (i, j), v in sorted(a.values.items()):
        rows.append(i - 1)
        cols.append(j - 1)
        data.append(v)
    m = sp.coo_matrix((data, (rows, cols)), shape=(a.n, a.n))
    scipy.io.mmwrite(path, m, comment=comment, symmetry="symmetric")


def read_vector(path) -> np.ndarray:
    try:
        v = scipy.io.mmread(path)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read Matrix Market file {path}: {exc}") from exc
    if sp.issparse(v):
        v = v.toarray()
    v = np.asarray(v, dtype=float)
    if v.ndim == 2 and 1 not in v.shape:
        raise InvalidInputError(f"{path}: expected a vector, got shape {v.shape}")
    return v.ravel()


def write_vector(path, v, comment: str = "") -> None:
    scipy.io.mmwrite(path, np.asarray(v, dtype=float).reshape(-1, 1), comment=comment)
