"""
Linear-Gaussian factor graphs: assembling ``(A, b)`` and reading marginals.

Each factor is given in information form over scalar variables,
``phi_k(x_k) = 0.5 x_k^T Lambda_k x_k - eta_k^T x_k``. At a linearization
point ``mu`` the system is ``A = sum_k Lambda_k`` and
``b = sum_k (eta_k - Lambda_k mu_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, NotPositiveDefiniteError
from .pattern import (FactorGraphTopology, PrimaryOrder, SymmetricSparseMatrix,
                      pattern_from_graph)
from .solver import GlobalResult, SelectedInverse, Solution, solve


@dataclass(frozen=True)
class GaussianFactor:
    scope: tuple[int, ...]
    information: np.ndarray = field(repr=False)
    information_vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        scope = tuple(int(v) for v in self.scope)
        info = np.atleast_2d(np.asarray(self.information, dtype=float))
        vec = np.atleast_1d(np.asarray(self.information_vector, dtype=float)).ravel()
        d = len(scope)
        if not scope:
            raise InvalidInputError("factor scope is empty")
        if len(set(scope)) != d:
            raise InvalidInputError(f"factor scope {scope} repeats a variable")
        if info.shape != (d, d) or vec.shape != (d,):
            raise InvalidInputError(
                f"factor over {d} variables has information {info.shape}, vector {vec.shape}")
        if not np.allclose(info, info.T, rtol=0, atol=1e-12 * max(1.0, np.abs(info).max())):
            raise InvalidInputError(f"information block of factor {scope} is not symmetric")
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "information", info)
        object.__setattr__(self, "information_vector", vec)


@dataclass(frozen=True)
class Marginals:
    """Per-label means and variances, plus covariances of linked label pairs."""

    mean: dict[int, float]
    variance: dict[int, float]
    covariance: dict[tuple[int, int], float]


def topology_of(n_variables: int, factors: Sequence[GaussianFactor]) -> FactorGraphTopology:
    return FactorGraphTopology(n_variables, [f.scope for f in factors])


def _check_scopes(graph, factors):
    if len(factors) != len(graph.factors):
        raise InvalidInputError(
            f"graph lists {len(graph.factors)} factors but {len(factors)} were given")
    for k, (scope, f) in enumerate(zip(graph.factors, factors)):
        if tuple(scope) != f.scope:
            raise InvalidInputError(f"factor {k} scope {f.scope} does not match graph {scope}")


def assemble_system(graph: FactorGraphTopology, factors: Sequence[GaussianFactor],
                    order: PrimaryOrder, mean=None):
    """Scatter factor blocks into ``(A, b)`` in ``order``'s positions.

    ``mean`` (indexed by label, default zero) is the linearization point.
    """
    _check_scopes(graph, factors)
    n = graph.n_variables
    pattern = pattern_from_graph(graph, order)
    vals = {p: 0.0 for p in pattern.entries}
    b = np.zeros(n)
    mu = np.zeros(n) if mean is None else np.asarray(mean, dtype=float)
    pos = order.positions
    for f in factors:
        idx = [pos[v - 1] for v in f.scope]
        labels = np.array(f.scope) - 1
        grad_at_mu = f.information @ mu[labels] - f.information_vector
        for r, pr in enumerate(idx):
            b[pr - 1] -= grad_at_mu[r]
            for c, pc in enumerate(idx):
                if pc <= pr:
                    vals[(pr, pc)] += f.information[r, c]
    return SymmetricSparseMatrix(pattern, vals), b


def uncovered_variables(a: SymmetricSparseMatrix, order: PrimaryOrder) -> list[int]:
    """Labels whose assembled diagonal is not positive."""
    return sorted(order.label(p) for p in range(1, a.n + 1) if not a[(p, p)] > 0)


def solve_factor_graph(graph: FactorGraphTopology, factors: Sequence[GaussianFactor],
                       order: PrimaryOrder, mean=None) -> GlobalResult:
    a, b = assemble_system(graph, factors, order, mean)
    try:
        return solve(a, b)
    except NotPositiveDefiniteError as exc:
        missing = uncovered_variables(a, order)
        label = order.label(exc.index)
        hint = (f"; variables with no information: {missing}" if missing
                else "; the factors do not constrain every direction")
        raise NotPositiveDefiniteError(
            exc.index, exc.pivot, exc.threshold,
            f"assembled system is not positive definite at variable {label} "
            f"(position {exc.index}){hint}") from exc


def extract_marginals(solution: Solution, inverse: SelectedInverse,
                      order: PrimaryOrder) -> Marginals:
    n = order.n
    if inverse.pattern.n != n or solution.x.shape != (n,):
        raise InvalidInputError("solution, inverse and order disagree on dimension")
    seq = order.sequence()
    mean = {seq[p - 1]: float(solution.x[p - 1]) for p in range(1, n + 1)}
    var = {seq[p - 1]: float(inverse[(p, p)]) for p in range(1, n + 1)}
    cov = {}
    for i, j in inverse.pattern.off_diagonal:
        li, lj = seq[i - 1], seq[j - 1]
        cov[(max(li, lj), min(li, lj))] = float(inverse[(i, j)])
    return Marginals(mean, var, cov)


def gvi_iterations(graph, factors, order, iterations: int = 2, mean=None):
    """Repeated build/solve passes; returns the list of mean increments (by label)."""
    n = graph.n_variables
    mu = np.zeros(n) if mean is None else np.array(mean, dtype=float)
    steps = []
    seq = order.sequence()
    for _ in range(iterations):
        res = solve_factor_graph(graph, factors, order, mu)
        delta = np.zeros(n)
        for p in range(1, n + 1):
            delta[seq[p - 1] - 1] = res.x[p - 1]
        mu = mu + delta
        steps.append(delta)
    return mu, steps


# --- text format -------------------------------------------------------------

def write_factor_graph(path, n_variables: int, factors: Sequence[GaussianFactor]) -> None:
    with open(path, "w") as fh:
        fh.write(format_factor_graph(n_variables, factors))


def format_factor_graph(n_variables: int, factors: Sequence[GaussianFactor]) -> str:
    lines = [f"VARS {n_variables}"]
    for k, f in enumerate(factors, start=1):
        lines.append(f"FACTOR {k} SCOPE " + " ".join(map(str, f.scope)))
        for row in f.information:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(" ".join(repr(float(v)) for v in f.information_vector))
    return "\n".join(lines) + "\n"


def parse_factor_graph(text: str) -> tuple[int, list[GaussianFactor]]:
    """Parse the ``VARS``/``FACTOR`` text format.

    Everything between one ``FACTOR <k> SCOPE`` header and the next is the
    scope labels, the row-major information block and the vector; a scope of
    ``d`` labels is followed by ``d*d + d`` numbers.
    """
    tokens = text.split()
    if len(tokens) < 2 or tokens[0] != "VARS":
        raise InvalidInputError("factor-graph file must start with 'VARS <n>'")
    try:
        n = int(tokens[1])
    except ValueError as exc:
        raise InvalidInputError(f"bad variable count {tokens[1]!r}") from exc
    starts = [k for k, t in enumerate(tokens) if t == "FACTOR"]
    if starts and starts[0] != 2 or (not starts and len(tokens) > 2):
        raise InvalidInputError("expected 'FACTOR' after the VARS header")
    factors = []
    for num, (s0, s1) in enumerate(zip(starts, starts[1:] + [len(tokens)]), start=1):
        if s0 + 2 >= len(tokens) or tokens[s0 + 2] != "SCOPE":
            raise InvalidInputError(f"factor {num}: expected 'FACTOR <k> SCOPE ...'")
        body = tokens[s0 + 3:s1]
        d = int(round(np.sqrt(len(body) + 1) - 1))
        if d < 1 or d * d + 2 * d != len(body):
            raise InvalidInputError(f"factor {num}: {len(body)} tokens do not form a block")
        try:
            scope = tuple(int(t) for t in body[:d])
            vals = [float(t) for t in body[d:]]
        except ValueError as exc:
            raise InvalidInputError(f"factor {num}: {exc}") from exc
        factors.append(GaussianFactor(scope, np.reshape(vals[:d * d], (d, d)),
                                      np.array(vals[d * d:])))
    topology_of(n, factors)  # validates labels
    return n, factors


def read_factor_graph(path) -> tuple[int, list[GaussianFactor]]:
    try:
        with open(path) as fh:
            return parse_factor_graph(fh.read())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


# --- generators --------------------------------------------------------------

def random_factors(graph_edges: Iterable[tuple[int, int]], n: int, seed: int,
                   unary_range=(0.5, 1.5), coupling: float = 1.0) -> list[GaussianFactor]:
    """Seeded SPD factors: a unary on every variable, a binary per edge.

    Binary blocks are rank-one ``u u^T`` so their sum with positive unaries is
    positive definite.
    """
    rng = np.random.default_rng(seed)
    factors = []
    for v in range(1, n + 1):
        factors.append(GaussianFactor((v,), [[rng.uniform(*unary_range)]], [rng.normal()]))
    for a, b in sorted(graph_edges):
        u = rng.normal(size=2) * coupling
        factors.append(GaussianFactor((a, b), np.outer(u, u), rng.normal(size=2) * 0.1))
    return factors


def chain_edges(n: int) -> list[tuple[int, int]]:
    return [(k, k + 1) for k in range(1, n)]


def random_tree_edges(n: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.default_rng(seed)
    return [(int(rng.integers(1, k)), k) for k in range(2, n + 1)]


def loopy_edges(n: int, seed: int, extra: int | None = None) -> list[tuple[int, int]]:
    """Random spanning tree plus ``extra`` random chords."""
    rng = np.random.default_rng(seed)
    edges = {tuple(sorted(e)) for e in random_tree_edges(n, int(rng.integers(2**31)))}
    extra = max(1, n // 4) if extra is None else extra
    tries = 0
    target = min(len(edges) + extra, n * (n - 1) // 2)
    while len(edges) < target and tries < 100 * (extra + 1):
        a, b = sorted(int(v) for v in rng.choice(n, 2, replace=False) + 1)
        edges.add((a, b))
        tries += 1
    return sorted(edges)


LOOP6_EDGES = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 6)]

# 20-variable chain with chords, in the spirit of the loopy example graph
LOOPY20_EDGES = chain_edges(20) + [(1, 6), (4, 11), (8, 15), (12, 19), (3, 17)]


TOPOLOGIES = ("chain", "tree", "loopy", "loopy20", "loop6", "twobytwo", "identity")


def generate(topology: str, n: int | None = None, seed: int = 0):
    """``(n, factors)`` for a named topology with seeded random factors."""
    if topology == "chain":
        n = 20 if n is None else n
        edges = chain_edges(n)
    elif topology == "tree":
        n = 20 if n is None else n
        edges = random_tree_edges(n, seed)
    elif topology == "loopy":
        n = 20 if n is None else n
        edges = loopy_edges(n, seed)
    elif topology == "loopy20":
        n, edges = 20, LOOPY20_EDGES
    elif topology == "loop6":
        n, edges = 6, LOOP6_EDGES
    elif topology == "identity":
        n = 4 if n is None else n
        return n, [GaussianFactor((v,), [[1.0]], [1.0]) for v in range(1, n + 1)]
    elif topology == "twobytwo":
        # A = [[4, 2], [2, 3]], b = (1, 0)
        return 2, [GaussianFactor((1,), [[2.0]], [1.0]),
                   GaussianFactor((2,), [[1.0]], [0.0]),
                   GaussianFactor((1, 2), [[2.0, 2.0], [2.0, 2.0]], [0.0, 0.0])]
    else:
        raise InvalidInputError(f"unknown topology {topology!r}")
    return n, random_factors(edges, n, seed)
