"""
Communication-graph discovery, responsibilities and message handshaking.

Agents are identified by their established order position ``1..n``. A link
``{i, j}`` is stored as the pair ``(max, min)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ..errors import InvalidInputError
from ..pattern import FactorGraphTopology, Pair, PrimaryOrder, SparsityPattern


class Var(NamedTuple):
    """A scalar: ``S``, ``w``, ``x``, ``b`` use ``j == i``; ``L``, ``y``, ``A`` use ``i >= j``."""

    kind: str
    i: int
    j: int

    @property
    def owner(self) -> int:
        return self.i

    def __str__(self) -> str:
        if self.kind in ("w", "x", "b"):
            return f"{self.kind}_{self.i}"
        sep = "," if max(self.i, self.j) >= 10 else ""
        return f"{self.kind}_{self.i}{sep}{self.j}"


def S(i): return Var("S", i, i)
def W(i): return Var("w", i, i)
def X(i): return Var("x", i, i)
def B(i): return Var("b", i, i)
def L(i, j): return Var("L", i, j)
def Y(i, j): return Var("y", i, j)
def A(i, j): return Var("A", i, j)


@dataclass(frozen=True)
class CommGraph:
    n: int
    links: frozenset[Pair]

    def __init__(self, n: int, links: Iterable[Pair] = ()):
        clean = set()
        for a, b in links:
            a, b = int(a), int(b)
            if a == b or not (1 <= a <= n and 1 <= b <= n):
                raise InvalidInputError(f"bad link ({a}, {b}) for {n} agents")
            clean.add((max(a, b), min(a, b)))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "links", frozenset(clean))

    def linked(self, a: int, b: int) -> bool:
        return (max(a, b), min(a, b)) in self.links

    def lower(self, i: int) -> list[int]:
        """Neighbours ``j < i``, increasing."""
        return sorted(j for (hi, j) in self.links if hi == i)

    def higher(self, i: int) -> list[int]:
        """Neighbours ``k > i``, increasing."""
        return sorted(k for (k, lo) in self.links if lo == i)

    def as_pattern(self) -> SparsityPattern:
        return SparsityPattern(self.n, self.links)

    def is_closed(self) -> bool:
        for i in range(1, self.n + 1):
            up = self.higher(i)
            for a, j in enumerate(up):
                for k in up[a + 1:]:
                    if not self.linked(j, k):
                        return False
        return True


def discover_comm_graph(graph: FactorGraphTopology, order: PrimaryOrder) -> CommGraph:
    """Apply the two link rules until no agent learns anything new.

    Rule 1 links agents sharing a factor. Rule 2: an agent linked to two
    higher agents introduces them to each other. Introductions are processed
    from a work queue, so new links trigger further introductions.
    """
    if order.n != graph.n_variables:
        raise InvalidInputError("order does not cover the graph's variables")
    pos = order.positions
    n = graph.n_variables
    higher: list[set[int]] = [set() for _ in range(n + 1)]
    links: set[Pair] = set()
    queue: list[Pair] = []

    def connect(a, b):
        key = (max(a, b), min(a, b))
        if key not in links:
            links.add(key)
            queue.append(key)

    for u, v in graph.edges():
        connect(pos[u - 1], pos[v - 1])
    while queue:
        hi, lo = queue.pop()
        # ``lo`` now knows ``hi``; introduce ``hi`` to lo's other higher links
        for other in list(higher[lo]):
            connect(hi, other)
        higher[lo].add(hi)
    return CommGraph(n, links)


def comm_graph_from_pattern(pattern: SparsityPattern) -> CommGraph:
    """Discover the links of a matrix pattern, one factor per nonzero pair."""
    graph = FactorGraphTopology(pattern.n, [p for p in pattern.off_diagonal])
    return discover_comm_graph(graph, PrimaryOrder.identity(pattern.n))


def assign_responsibilities(comm: CommGraph) -> dict[int, frozenset[Var]]:
    """Variables each agent stores and computes."""
    out = {}
    for i in range(1, comm.n + 1):
        owned = {S(i), W(i), X(i), Y(i, i)}
        for j in comm.lower(i):
            owned.add(L(i, j))
            owned.add(Y(i, j))
        out[i] = frozenset(owned)
    return out


def build_message_plan(comm: CommGraph) -> dict[tuple[int, int], tuple[Var, ...]]:
    """Slots pushed along each directed link ``(sender, receiver)``."""
    plan: dict[tuple[int, int], list[Var]] = {}
    for i, j in sorted(comm.links):
        # i > j
        plan.setdefault((j, i), []).extend([S(j), W(j)])
        plan.setdefault((i, j), []).extend([L(i, j), Y(i, j), X(i)])
        for k in comm.lower(j):
            if comm.linked(i, k):
                plan[(i, j)].append(L(i, k))
                plan[(j, i)].append(L(j, k))
    return {key: tuple(v) for key, v in sorted(plan.items())}


def inbound_slots(plan, agent: int) -> set[Var]:
    return {v for (src, dst), slots in plan.items() if dst == agent for v in slots}


def establish_agent_order(
    n: int,
    mode: str = "oracle",
    *,
    order: PrimaryOrder | Sequence[int] | None = None,
    join_times: Sequence[float] | None = None,
    seed: int | None = None,
    max_attempts: int = 100,
) -> PrimaryOrder:
    """Give every agent a unique rank.

    ``oracle`` takes an explicit order, ``join-time`` ranks by join timestamp
    (ties broken by label), ``random`` lets each agent draw a large integer and
    redraws on collision.
    """
    if mode == "oracle":
        if order is None:
            return PrimaryOrder.identity(n)
        return order if isinstance(order, PrimaryOrder) else PrimaryOrder(tuple(order))
    if mode == "join-time":
        if join_times is None or len(join_times) != n:
            raise InvalidInputError("join-time mode needs one timestamp per agent")
        seq = sorted(range(1, n + 1), key=lambda v: (join_times[v - 1], v))
        return PrimaryOrder.from_sequence(seq)
    if mode == "random":
        rng = np.random.default_rng(seed)
        for _ in range(max_attempts):
            draws = rng.integers(0, 2**62, size=n)
            if len(set(draws.tolist())) == n:
                seq = [int(v) + 1 for v in np.argsort(draws, kind="stable")]
                return PrimaryOrder.from_sequence(seq)
        raise InvalidInputError("could not draw distinct agent integers")
    raise InvalidInputError(f"unknown ordering mode {mode!r}")
