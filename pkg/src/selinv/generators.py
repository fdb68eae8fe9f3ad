"""Seeded random patterns, graphs and SPD matrices for tests and experiments."""
from __future__ import annotations

import numpy as np

from .pattern import (FactorGraphTopology, PrimaryOrder, SparsityPattern,
                      SymmetricSparseMatrix, pattern_from_graph, random_order,
                      symbolic_fill_in)


def random_pattern(n: int, rng: np.random.Generator, density: float | None = None) -> SparsityPattern:
    """Each strictly-lower pair kept independently with probability ``density``."""
    if density is None:
        density = rng.uniform(0.1, 0.6)
    pairs = [(i, j) for i in range(2, n + 1) for j in range(1, i) if rng.random() < density]
    return SparsityPattern(n, pairs)


def random_closed_pattern(n: int, rng: np.random.Generator, density=None) -> SparsityPattern:
    return symbolic_fill_in(random_pattern(n, rng, density))


def random_unit_lower(pattern: SparsityPattern, rng: np.random.Generator) -> np.ndarray:
    """Dense unit lower-triangular matrix with random values on ``pattern``."""
    lmat = np.eye(pattern.n)
    for i, j in pattern.off_diagonal:
        lmat[i - 1, j - 1] = rng.uniform(-1.5, 1.5)
    return lmat


def random_spd(pattern: SparsityPattern, rng: np.random.Generator,
               kind: str = "factor") -> SymmetricSparseMatrix:
    """Random SPD matrix whose pattern is exactly ``pattern``.

    ``factor`` sums a rank-one 2x2 block per off-diagonal pair and a positive
    unary per variable (not diagonally dominant in general); ``dominant``
    draws off-diagonals in [-1, 1] and makes the diagonal dominate its row.
    """
    n = pattern.n
    a = np.zeros((n, n))
    if kind == "factor":
        a[np.diag_indices(n)] = rng.uniform(0.2, 1.0, n)
        for i, j in pattern.off_diagonal:
            u = rng.normal(size=2)
            a[i - 1, i - 1] += u[0] ** 2
            a[j - 1, j - 1] += u[1] ** 2
            a[i - 1, j - 1] = a[j - 1, i - 1] = u[0] * u[1]
    elif kind == "dominant":
        for i, j in pattern.off_diagonal:
            a[i - 1, j - 1] = a[j - 1, i - 1] = rng.uniform(-1, 1)
        a[np.diag_indices(n)] = np.abs(a).sum(axis=1) + rng.uniform(0.5, 1.5, n)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return SymmetricSparseMatrix.from_dense(a, pattern)


def random_tree_graph(n: int, rng: np.random.Generator) -> FactorGraphTopology:
    edges = [(int(rng.integers(1, k)), k) for k in range(2, n + 1)]
    return FactorGraphTopology(n, edges + [(v,) for v in range(1, n + 1)])


def random_loopy_graph(n: int, rng: np.random.Generator, extra: int | None = None) -> FactorGraphTopology:
    tree = random_tree_graph(n, rng)
    edges = tree.edges()
    if extra is None:
        extra = int(rng.integers(1, max(2, n // 2)))
    target = min(len(edges) + extra, n * (n - 1) // 2)
    while len(edges) < target:
        a, b = sorted(int(v) for v in rng.choice(n, 2, replace=False) + 1)
        edges.add((b, a))
    return FactorGraphTopology(n, sorted(edges) + [(v,) for v in range(1, n + 1)])


def random_problem(n: int, rng: np.random.Generator, topology: str = "loopy",
                   kind: str = "factor", shuffle: bool = True):
    """``(A, b)`` on a random tree or loopy graph, optionally in a random order."""
    graph = random_tree_graph(n, rng) if topology == "tree" else random_loopy_graph(n, rng)
    order = random_order(n, int(rng.integers(2**31))) if shuffle else PrimaryOrder.identity(n)
    pattern = pattern_from_graph(graph, order)
    return random_spd(pattern, rng, kind), rng.normal(size=n)
