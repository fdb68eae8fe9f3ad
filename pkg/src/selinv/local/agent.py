"""Agent state, messages and the single-agent update."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from ..errors import NumericalFailure
from .comm import Var
from .equations import UpdateEquation


@dataclass(frozen=True)
class Message:
    sender: int
    receiver: int
    slot: Var
    value: float
    round: int


@dataclass(frozen=True)
class AgentState:
    """Everything one agent knows.

    ``owned`` holds the variables the agent is responsible for, ``inputs`` its
    row of ``A`` and ``b_i``, ``mailbox`` the latest value per
    ``(slot, sender)``.
    """

    id: int
    owned: Mapping[Var, float]
    inputs: Mapping[Var, float] = field(repr=False)
    mailbox: Mapping[tuple[Var, int], float] = field(repr=False)
    equations: tuple[UpdateEquation, ...] = field(repr=False)
    outbound: Mapping[int, tuple[Var, ...]] = field(repr=False)

    def read(self, var: Var) -> float:
        if var in self.owned:
            return self.owned[var]
        if var in self.inputs:
            return self.inputs[var]
        try:
            return self.mailbox[(var, var.owner)]
        except KeyError:
            raise KeyError(f"agent {self.id} has no value for {var}") from None

    def receive(self, messages) -> "AgentState":
        box = dict(self.mailbox)
        for m in messages:
            box[(m.slot, m.sender)] = m.value
        return AgentState(self.id, self.owned, self.inputs, MappingProxyType(box),
                          self.equations, self.outbound)

    def emit(self, round: int) -> list[Message]:
        return [Message(self.id, dst, slot, self.owned[slot], round)
                for dst, slots in self.outbound.items() for slot in slots]


def evaluate(eq: UpdateEquation, read, eps: float = 0.0) -> float:
    if eq.base is None:
        acc = 0.0
    elif eq.reciprocal:
        d = read(eq.base)
        if abs(d) <= eps:
            raise NumericalFailure(f"{eq.target}: |{eq.base}| = {abs(d):.3g} <= {eps:.3g}")
        acc = 1.0 / d
    else:
        acc = read(eq.base)
    for term in eq.terms:
        prod = read(term[0])
        for v in term[1:]:
            prod *= read(v)
        acc -= prod
    if eq.divisor is not None:
        d = read(eq.divisor)
        if abs(d) <= eps:
            raise NumericalFailure(f"{eq.target}: |{eq.divisor}| = {abs(d):.3g} <= {eps:.3g}")
        acc /= d
    return acc


def agent_update(state: AgentState, round: int = 0,
                 eps: float = 0.0) -> tuple[AgentState, list[Message]]:
    """Recompute every owned variable from the current state, then publish.

    All equations read the state as it was on entry.
    """
    new = {eq.target: evaluate(eq, state.read, eps) for eq in state.equations}
    nxt = AgentState(state.id, MappingProxyType(new), state.inputs, state.mailbox,
                     state.equations, state.outbound)
    return nxt, nxt.emit(round)
