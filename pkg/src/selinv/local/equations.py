"""Symbolic per-agent update equations for the local scheme."""
from __future__ import annotations

from dataclasses import dataclass

from ..pattern import SparsityPattern
from .comm import A, B, CommGraph, L, S, Var, W, X, Y


@dataclass(frozen=True)
class UpdateEquation:
    """``target <- (base - sum(prod(term) for term in terms)) / divisor``.

    ``base`` is read as ``1 / base`` when ``reciprocal`` is set and as zero
    when absent; ``divisor`` may be absent.
    """

    target: Var
    base: Var | None
    terms: tuple[tuple[Var, ...], ...]
    divisor: Var | None = None
    reciprocal: bool = False

    def reads(self) -> set[Var]:
        out = {v for t in self.terms for v in t}
        if self.base is not None:
            out.add(self.base)
        if self.divisor is not None:
            out.add(self.divisor)
        return out

    def signature(self):
        """Order-free form used for symbolic comparison."""
        terms = frozenset(tuple(sorted(map(str, t))) for t in self.terms)
        base = None if self.base is None else ("1/" if self.reciprocal else "") + str(self.base)
        div = None if self.divisor is None else str(self.divisor)
        return str(self.target), base, terms, div

    def __str__(self) -> str:
        parts = []
        if self.base is not None:
            parts.append(f"1/{self.base}" if self.reciprocal else str(self.base))
        for t in self.terms:
            parts.append(("- " if parts else "-") + " ".join(map(str, t)))
        rhs = " ".join(parts) if parts else "0"
        if self.divisor is not None:
            rhs = f"({rhs}) / {self.divisor}" if len(parts) > 1 else f"{rhs} / {self.divisor}"
        return f"{self.target} <- {rhs}"


def agent_equations(agent: int, comm: CommGraph,
                    a_pattern: SparsityPattern | None = None) -> list[UpdateEquation]:
    """Update equations agent ``agent`` evaluates, in its evaluation order.

    ``a_pattern`` marks which ``A_ij`` are structurally nonzero; fill-in
    entries get no ``A`` term. Sums run in increasing index order.
    """
    i = agent
    lower = comm.lower(i)
    higher = comm.higher(i)
    lower_set = set(lower)

    def has_a(r, c):
        return a_pattern is None or (r, c) in a_pattern

    eqs = [UpdateEquation(S(i), A(i, i), tuple((L(i, l), L(i, l), S(l)) for l in lower))]
    for j in reversed(lower):
        terms = tuple((L(j, l), L(i, l), S(l)) for l in comm.lower(j) if l in lower_set)
        eqs.append(UpdateEquation(L(i, j), A(i, j) if has_a(i, j) else None, terms, S(j)))
    eqs.append(UpdateEquation(W(i), B(i), tuple((L(i, j), S(j), W(j)) for j in lower), S(i)))
    eqs.append(UpdateEquation(X(i), W(i), tuple((L(k, i), X(k)) for k in higher)))
    for j in [i] + list(reversed(lower)):
        up_j = comm.higher(j)
        terms = []
        for l in up_j:
            if l > i:
                break
            if l == i or l in lower_set:
                terms.append((L(l, j), Y(i, l)))
        for k in up_j:
            if k > i and comm.linked(k, i):
                terms.append((L(k, j), Y(k, i)))
        eqs.append(UpdateEquation(Y(i, j), S(j) if i == j else None, tuple(terms),
                                  reciprocal=i == j))
    return eqs


def all_equations(comm: CommGraph, a_pattern: SparsityPattern | None = None):
    return {i: agent_equations(i, comm, a_pattern) for i in range(1, comm.n + 1)}


def input_vars(agent: int, a_pattern: SparsityPattern | None, comm: CommGraph) -> set[Var]:
    """Problem data provisioned to an agent: its row of ``A`` and ``b_i``."""
    out = {A(agent, agent), B(agent)}
    for j in comm.lower(agent):
        if a_pattern is None or (agent, j) in a_pattern:
            out.add(A(agent, j))
    return out
