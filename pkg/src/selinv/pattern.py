"""
Sparsity patterns, primary variable orders and symbolic fill-in.

All index pairs exposed by this module are 1-based and stored with the row
index first, ``(i, j)`` with ``j <= i``; the symmetric upper entry is implied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidInputError

Pair = tuple[int, int]


@dataclass(frozen=True)
class SparsityPattern:
    """Lower-triangle index set of a symmetric ``n x n`` matrix."""

    n: int
    entries: frozenset[Pair]

    def __init__(self, n: int, entries: Iterable[Pair] = ()):
        if n < 1:
            raise InvalidInputError(f"pattern dimension must be positive, got {n}")
        pairs = set()
        for i, j in entries:
            i, j = int(i), int(j)
            if j > i:
                i, j = j, i
            if j < 1 or i > n:
                raise InvalidInputError(f"pair ({i}, {j}) outside 1..{n}")
            pairs.add((i, j))
        pairs.update((i, i) for i in range(1, n + 1))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "entries", frozenset(pairs))

    def __contains__(self, pair) -> bool:
        i, j = pair
        if j > i:
            i, j = j, i
        return (i, j) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.sorted())

    def sorted(self) -> list[Pair]:
        """Entries in basic triangular order (row by row, left to right)."""
        return sorted(self.entries)

    @property
    def off_diagonal(self) -> frozenset[Pair]:
        return frozenset(p for p in self.entries if p[0] != p[1])

    @property
    def complement(self) -> frozenset[Pair]:
        """Lower-triangle pairs *not* in the pattern."""
        return frozenset(
            (i, j)
            for i in range(1, self.n + 1)
            for j in range(1, i)
            if (i, j) not in self.entries
        )

    def row(self, i: int) -> list[int]:
        """Columns ``j < i`` present in row ``i``, increasing."""
        return sorted(j for (r, j) in self.entries if r == i and j < i)

    def column(self, j: int) -> list[int]:
        """Rows ``i > j`` present in column ``j``, increasing."""
        return sorted(i for (i, c) in self.entries if c == j and i > j)

    def is_closed(self) -> bool:
        return not _box_violations(self.n, self.entries, first_only=True)

    def permuted(self, perm: Mapping[int, int] | "PrimaryOrder") -> "SparsityPattern":
        """Relabel positions: ``perm[p]`` is the new position of old position ``p``."""
        if isinstance(perm, PrimaryOrder):
            perm = perm.as_dict()
        return SparsityPattern(self.n, ((perm[i], perm[j]) for i, j in self.entries))

    def dense_mask(self) -> np.ndarray:
        mask = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.entries:
            mask[i - 1, j - 1] = mask[j - 1, i - 1] = True
        return mask

    def to_text(self) -> str:
        lines = [f"N {self.n}"]
        lines.extend(f"{i} {j}" for i, j in self.sorted())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SparsityPattern":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0][0] != "N" or len(lines[0]) != 2:
            raise InvalidInputError("pattern file must start with 'N <n>'")
        try:
            n = int(lines[0][1])
            pairs = [(int(a), int(b)) for a, b in lines[1:]]
        except ValueError as exc:
            raise InvalidInputError(f"bad pattern line: {exc}") from exc
        return cls(n, pairs)


@dataclass(frozen=True)
class SymmetricSparseMatrix:
    """Symmetric matrix stored as lower-triangle values on a pattern."""

    pattern: SparsityPattern
    values: Mapping[Pair, float] = field(repr=False)

    def __post_init__(self):
        vals = {}
        for (i, j), v in self.values.items():
            if j > i:
                i, j = j, i
            vals[(i, j)] = float(v)
        if set(vals) != set(self.pattern.entries):
            missing = set(self.pattern.entries) - set(vals)
            extra = set(vals) - set(self.pattern.entries)
            raise InvalidInputError(
                f"values do not match pattern (missing {sorted(missing)[:5]}, "
                f"extra {sorted(extra)[:5]})")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.pattern.n

    def __getitem__(self, pair: Pair) -> float:
        i, j = pair
        if j > i:
            i, j = j, i
        return self.values.get((i, j), 0.0)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for (i, j), v in self.values.items():
            a[i - 1, j - 1] = a[j - 1, i - 1] = v
        return a

    @classmethod
    def from_dense(cls, a, pattern: SparsityPattern | None = None,
                   atol: float = 0.0) -> "SymmetricSparseMatrix":
        """Build from a dense symmetric array.

        Without an explicit pattern, every lower-triangle entry with
        ``|a_ij| > atol`` is kept (plus the diagonal).
        """
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max())):
            raise InvalidInputError("matrix is not symmetric")
        n = a.shape[0]
        if pattern is None:
            rows, cols = np.nonzero(np.abs(np.tril(a)) > atol)
            pattern = SparsityPattern(n, zip(rows + 1, cols + 1))
        return cls(pattern, {(i, j): a[i - 1, j - 1] for i, j in pattern.entries})

    def permuted(self, order: "PrimaryOrder") -> "SymmetricSparseMatrix":
        """Matrix expressed in ``order``'s positions (labels map to positions)."""
        pos = order.as_dict()
        vals = {}
        for (i, j), v in self.values.items():
            a, b = pos[i], pos[j]
            vals[(max(a, b), min(a, b))] = v
        return SymmetricSparseMatrix(self.pattern.permuted(pos), vals)


@dataclass(frozen=True)
class PrimaryOrder:
    """Bijection from variable labels ``1..n`` to positions ``1..n``.

    ``positions[label - 1]`` is the position of ``label``.
    """

    positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        if sorted(pos) != list(range(1, len(pos) + 1)):
            raise InvalidInputError("order is not a permutation of 1..n")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def identity(cls, n: int) -> "PrimaryOrder":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_sequence(cls, labels: Iterable[int]) -> "PrimaryOrder":
        """Order from the labels listed in position order."""
        labels = [int(v) for v in labels]
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise InvalidInputError("sequence is not a permutation of 1..n")
        positions = [0] * len(labels)
        for p, label in enumerate(labels, start=1):
            positions[label - 1] = p
        return cls(tuple(positions))

    @property
    def n(self) -> int:
        return len(self.positions)

    def position(self, label: int) -> int:
        return self.positions[label - 1]

    def sequence(self) -> list[int]:
        """Labels listed in position order."""
        seq = [0] * self.n
        for label, p in enumerate(self.positions, start=1):
            seq[p - 1] = label
        return seq

    def label(self, position: int) -> int:
        return self.sequence()[position - 1]

    def as_dict(self) -> dict[int, int]:
        return {label: p for label, p in enumerate(self.positions, start=1)}

    def inverse(self) -> "PrimaryOrder":
        return PrimaryOrder.from_sequence(self.positions)


@dataclass(frozen=True)
class FactorGraphTopology:
    """Variables ``1..n_variables`` and the scope of each factor."""

    n_variables: int
    factors: tuple[tuple[int, ...], ...]

    def __init__(self, n_variables: int, factors: Iterable[Iterable[int]] = ()):
        if n_variables < 1:
            raise InvalidInputError("a factor graph needs at least one variable")
        scopes = []
        for k, scope in enumerate(factors):
            scope = tuple(int(v) for v in scope)
            if not scope:
                raise InvalidInputError(f"factor {k} has an empty scope")
            for v in scope:
                if not 1 <= v <= n_variables:
                    raise InvalidInputError(
                        f"factor {k} references unknown variable {v}")
            scopes.append(scope)
        object.__setattr__(self, "n_variables", int(n_variables))
        object.__setattr__(self, "factors", tuple(scopes))

    def adjacency(self) -> list[set[int]]:
        """``adj[v - 1]`` is the set of labels sharing a factor with ``v``."""
        adj = [set() for _ in range(self.n_variables)]
        for scope in self.factors:
            for a in scope:
                for b in scope:
                    if a != b:
                        adj[a - 1].add(b)
        return adj

    def edges(self) -> set[Pair]:
        out = set()
        for scope in self.factors:
            for a in scope:
                for b in scope:
                    if a > b:
                        out.add((a, b))
        return out

    def is_tree(self) -> bool:
        """True if the variable adjacency graph is a forest."""
        edges = self.edges()
        comps = len(_components(self.adjacency()))
        return len(edges) == self.n_variables - comps


def pattern_from_graph(graph: FactorGraphTopology, order: PrimaryOrder) -> SparsityPattern:
    """Lower-triangle pattern of the information matrix of ``graph`` in ``order``."""
    if order.n != graph.n_variables:
        raise InvalidInputError(
            f"order covers {order.n} labels but graph has {graph.n_variables}")
    pos = order.positions
    pairs = []
    for a, b in graph.edges():
        pa, pb = pos[a - 1], pos[b - 1]
        pairs.append((max(pa, pb), min(pa, pb)))
    return SparsityPattern(graph.n_variables, pairs)


def _box_violations(n, entries, first_only=False):
    cols = [[] for _ in range(n + 1)]
    for i, j in entries:
        if i != j:
            cols[j].append(i)
    missing = set()
    for j in range(1, n + 1):
        rows = sorted(cols[j])
        for a, i in enumerate(rows):
            for k in rows[a + 1:]:
                if (k, i) not in entries:
                    missing.add((k, i))
                    if first_only:
                        return missing
    return missing


def symbolic_fill_in(pattern: SparsityPattern) -> SparsityPattern:
    """Close ``pattern`` under the four-corners rule.

    If ``(i, j)`` and ``(k, j)`` are present with ``i < k`` then ``(k, i)``
    is added; repeated until nothing changes.
    """
    entries = set(pattern.entries)
    while True:
        missing = _box_violations(pattern.n, entries)
        if not missing:
            break
        entries |= missing
    return SparsityPattern(pattern.n, entries)


def fill_in_count(pattern: SparsityPattern) -> int:
    """Number of entries the closure adds to ``pattern``."""
    return len(symbolic_fill_in(pattern)) - len(pattern)


def _components(adj: list[set[int]]) -> list[list[int]]:
    seen = set()
    comps = []
    for start in range(1, len(adj) + 1):
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v - 1]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def spanning_tree_order(graph: FactorGraphTopology) -> PrimaryOrder:
    """Order variables along a depth-first spanning tree of the graph.

    Each component is searched from its smallest label, visiting neighbours in
    increasing label order. The preorder is reversed so that every variable
    precedes its tree parent; on a tree this leaves each variable with at most
    one later neighbour, hence no fill-in. Components are concatenated in
    label order.
    """
    adj = [sorted(a) for a in graph.adjacency()]
    seen: set[int] = set()
    sequence: list[int] = []
    for comp in _components(graph.adjacency()):
        root = comp[0]
        preorder = []
        stack = [root]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            preorder.append(v)
            stack.extend(u for u in reversed(adj[v - 1]) if u not in seen)
        sequence.extend(reversed(preorder))
    return PrimaryOrder.from_sequence(sequence)


def random_order(n: int, seed: int) -> PrimaryOrder:
    """Uniform random order, reproducible for a fixed ``seed``."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    rng = np.random.default_rng(seed)
    return PrimaryOrder.from_sequence(rng.permutation(n) + 1)
