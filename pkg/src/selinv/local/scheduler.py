"""
Synchronous and asynchronous schedulers for the local scheme.

Both are in-process and deterministic. A synchronous round lets every agent
update from the previous round's mailbox, then delivers all messages at once.
The asynchronous scheduler updates one agent at a time, in random fair
windows, delivering its messages immediately.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..errors import InvalidInputError, NonConvergenceError, NumericalFailure
from ..pattern import SymmetricSparseMatrix, symbolic_fill_in
from ..solver import PIVOT_RTOL, GlobalResult, solve
from .agent import AgentState, Message, agent_update
from .comm import (CommGraph, L, S, Var, W, X, Y, assign_responsibilities,
                   build_message_plan, comm_graph_from_pattern)
from .equations import agent_equations, input_vars

CONVERGENCE_ATOL = 1e-14
QUANTITIES = ("S", "L", "w", "x", "y")


@dataclass(frozen=True)
class LocalProblem:
    a: SymmetricSparseMatrix
    b: np.ndarray
    comm: CommGraph

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        if b.shape != (self.a.n,):
            raise InvalidInputError("b length does not match A")
        if self.comm.n != self.a.n:
            raise InvalidInputError("communication graph size does not match A")
        closed = symbolic_fill_in(self.a.pattern)
        if closed.off_diagonal != self.comm.links:
            raise InvalidInputError("communication graph does not match the closed pattern of A")
        object.__setattr__(self, "b", b)

    @classmethod
    def from_matrix(cls, a: SymmetricSparseMatrix, b) -> "LocalProblem":
        return cls(a, b, comm_graph_from_pattern(a.pattern))

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def l_size(self) -> int:
        """Number of lower-triangle entries of ``L``, diagonal included."""
        return len(self.comm.links) + self.n

    @property
    def round_bound(self) -> int:
        return 2 * (self.l_size + self.n)


def initial_values(problem: LocalProblem) -> dict[Var, float]:
    """``L = 0``, ``S = diag(A)``, ``w = x = b``, ``y`` diagonal ``1/A_ii``."""
    a, b = problem.a, problem.b
    vals = {}
    for i in range(1, problem.n + 1):
        vals[S(i)] = a[(i, i)]
        vals[W(i)] = b[i - 1]
        vals[X(i)] = b[i - 1]
        vals[Y(i, i)] = 1.0 / a[(i, i)]
        for j in problem.comm.lower(i):
            vals[L(i, j)] = 0.0
            vals[Y(i, j)] = 0.0
    return vals


def build_agents(problem: LocalProblem) -> dict[int, AgentState]:
    """Agents with initial values and a mailbox primed by one round of pushes."""
    comm = problem.comm
    owned = assign_responsibilities(comm)
    plan = build_message_plan(comm)
    init = initial_values(problem)
    agents = {}
    for i in range(1, problem.n + 1):
        inputs = {}
        for v in input_vars(i, problem.a.pattern, comm):
            inputs[v] = problem.b[i - 1] if v.kind == "b" else problem.a[(v.i, v.j)]
        outbound = {dst: slots for (src, dst), slots in plan.items() if src == i}
        agents[i] = AgentState(
            id=i,
            owned=MappingProxyType({v: init[v] for v in owned[i]}),
            inputs=MappingProxyType(inputs),
            mailbox=MappingProxyType({}),
            equations=tuple(agent_equations(i, comm, problem.a.pattern)),
            outbound=MappingProxyType(outbound),
        )
    primer = [m for ag in agents.values() for m in ag.emit(0)]
    return _deliver(agents, primer)


def _deliver(agents, messages):
    by_dst: dict[int, list[Message]] = {}
    for m in messages:
        by_dst.setdefault(m.receiver, []).append(m)
    return {i: (ag.receive(by_dst[i]) if i in by_dst else ag) for i, ag in agents.items()}


def snapshot(agents) -> dict[Var, float]:
    out = {}
    for ag in agents.values():
        out.update(ag.owned)
    return out


def reference_values(ref: GlobalResult) -> dict[Var, float]:
    f = ref.factors
    vals = {}
    for i in range(1, f.n + 1):
        vals[S(i)] = f.S(i)
        vals[W(i)] = float(ref.solution.w[i - 1])
        vals[X(i)] = float(ref.solution.x[i - 1])
    for (i, j), v in f.l_values.items():
        vals[L(i, j)] = v
    for (i, j), v in ref.inverse.values.items():
        vals[Y(i, j)] = v
    return vals


def convergence_error(values: dict[Var, float], reference) -> dict[str, float]:
    """Euclidean error norm of each quantity against the global solution."""
    ref = reference_values(reference) if isinstance(reference, GlobalResult) else reference
    if set(values) != set(ref):
        raise InvalidInputError("snapshot and reference cover different variables")
    sq = dict.fromkeys(QUANTITIES, 0.0)
    for v, r in ref.items():
        d = values[v] - r
        sq[v.kind] += d * d
    return {k: float(np.sqrt(s)) for k, s in sq.items()}


@dataclass
class ConvergenceTrace:
    """Per-round error norms and message counts.

    Row ``k`` of the lists describes the state after round ``k + 1``;
    ``initial`` holds the errors before any update.
    """

    errors: dict[str, list[float]] = field(default_factory=lambda: {q: [] for q in QUANTITIES})
    messages_sent: list[int] = field(default_factory=list)
    initial: dict[str, float] | None = None
    initial_messages: int = 0
    converged: bool = False
    last_change_round: int = 0
    bound: int | None = None
    final: dict[Var, float] | None = None
    history: list[dict[Var, float]] | None = None
    message_log: list[Message] | None = None

    @property
    def rounds(self) -> int:
        return len(self.messages_sent)

    @property
    def within_bound(self) -> bool | None:
        if self.bound is None:
            return None
        return self.converged and self.last_change_round <= self.bound

    def append(self, errs, n_messages):
        for q in QUANTITIES:
            self.errors[q].append(errs.get(q, float("nan")) if errs else float("nan"))
        self.messages_sent.append(n_messages)

    def rows(self):
        if self.initial is not None:
            yield [0] + [self.initial[q] for q in QUANTITIES] + [self.initial_messages]
        for k in range(self.rounds):
            yield [k + 1] + [self.errors[q][k] for q in QUANTITIES] + [self.messages_sent[k]]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["round"] + [f"err_{q}" for q in QUANTITIES] + ["messages_sent"])
            for row in self.rows():
                wr.writerow([row[0]] + [repr(float(v)) for v in row[1:-1]] + [row[-1]])

    def write_message_log(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["round", "from", "to", "slot", "value"])
            for m in self.message_log or []:
                wr.writerow([m.round, m.sender, m.receiver, str(m.slot), repr(float(m.value))])

    def final_arrays(self, n: int):
        """``(x, S, w)`` vectors of the final state."""
        f = self.final
        x = np.array([f[X(i)] for i in range(1, n + 1)])
        s = np.array([f[S(i)] for i in range(1, n + 1)])
        w = np.array([f[W(i)] for i in range(1, n + 1)])
        return x, s, w

    def final_inverse(self) -> dict[tuple[int, int], float]:
        return {(v.i, v.j): val for v, val in self.final.items() if v.kind == "y"}


def _pivot_eps(problem):
    return PIVOT_RTOL * max(problem.a[(i, i)] for i in range(1, problem.n + 1))


def _max_change(old: dict[Var, float], new: dict[Var, float]) -> float:
    return max((abs(new[v] - old[v]) for v in old), default=0.0)


def run_synchronous(problem: LocalProblem, max_rounds: int | None = None,
                    reference: GlobalResult | None = None, *,
                    tol: float = CONVERGENCE_ATOL, record_history: bool = False,
                    log_messages: bool = False) -> ConvergenceTrace:
    """Jacobi-style rounds until one full round changes nothing.

    A round with exactly zero change ends the run. If the budget runs out, a
    last change no larger than ``tol`` is accepted as converged.

    ``max_rounds`` defaults to the guaranteed bound ``2(|L| + n)`` plus one
    quiescent round to confirm convergence.
    """
    bound = problem.round_bound
    if max_rounds is None:
        max_rounds = bound + 1
    if reference is None:
        reference = solve(problem.a, problem.b)
    eps = _pivot_eps(problem)
    agents = build_agents(problem)
    trace = ConvergenceTrace(bound=bound)
    state = snapshot(agents)
    trace.initial = convergence_error(state, reference)
    trace.initial_messages = sum(len(s) for s in build_message_plan(problem.comm).values())
    if record_history:
        trace.history = [dict(state)]
    if log_messages:
        trace.message_log = []

    last_change = float("inf")
    for rnd in range(1, max_rounds + 1):
        updated, outbox = {}, []
        for i, ag in agents.items():
            try:
                updated[i], msgs = agent_update(ag, rnd, eps)
            except NumericalFailure as exc:
                exc.agent, exc.round = i, rnd
                trace.final = state
                raise
            outbox.extend(msgs)
        agents = _deliver(updated, outbox)
        new_state = snapshot(agents)
        change = _max_change(state, new_state)
        state = new_state
        trace.append(convergence_error(state, reference), len(outbox))
        if record_history:
            trace.history.append(dict(state))
        if log_messages:
            trace.message_log.extend(outbox)
        if change == 0.0:
            trace.converged = True
            break
        trace.last_change_round = rnd
        last_change = change

    trace.final = state
    if not trace.converged and last_change <= tol:
        # jitter fallback: the last round moved nothing by more than ``tol``
        trace.converged = True
    if not trace.converged:
        raise NonConvergenceError(
            f"no fixed point after {max_rounds} synchronous rounds", trace)
    return trace


def run_asynchronous(problem: LocalProblem, schedule_seed: int = 0,
                     fairness_window: int | None = None,
                     max_updates: int | None = None,
                     reference: GlobalResult | None = None, *,
                     tol: float = CONVERGENCE_ATOL,
                     log_messages: bool = False) -> ConvergenceTrace:
    """Single-agent updates in seeded random fair windows.

    Each window is a random permutation of all agents, padded with
    ``fairness_window - n`` extra random picks and shuffled. The run stops
    after a whole window in which no variable changed; trace rows are windows.
    """
    n = problem.n
    window = n if fairness_window is None else int(fairness_window)
    if window < n:
        raise InvalidInputError(f"fairness window {window} is smaller than n = {n}")
    if max_updates is None:
        max_updates = window * (problem.round_bound * n + 2)
    if reference is None:
        reference = solve(problem.a, problem.b)
    eps = _pivot_eps(problem)
    rng = np.random.default_rng(schedule_seed)
    agents = build_agents(problem)
    trace = ConvergenceTrace(bound=None)
    state = snapshot(agents)
    trace.initial = convergence_error(state, reference)
    if log_messages:
        trace.message_log = []

    updates = 0
    rnd = 0
    last_change = float("inf")
    while updates < max_updates:
        rnd += 1
        picks = list(rng.permutation(n) + 1) + list(rng.integers(1, n + 1, size=window - n))
        picks = [int(p) for p in rng.permutation(picks)]
        window_change = 0.0
        sent = 0
        processed = 0
        for i in picks:
            if updates >= max_updates:
                break
            processed += 1
            old = agents[i].owned
            try:
                agents[i], msgs = agent_update(agents[i], rnd, eps)
            except NumericalFailure as exc:
                exc.agent, exc.round = i, rnd
                trace.final = snapshot(agents)
                raise
            updates += 1
            delta = _max_change(old, agents[i].owned)
            window_change = max(window_change, delta)
            agents = _deliver(agents, msgs)
            sent += len(msgs)
            if log_messages:
                trace.message_log.extend(msgs)
        state = snapshot(agents)
        trace.append(convergence_error(state, reference), sent)
        if window_change == 0.0 and processed == len(picks):
            trace.converged = True
            break
        if window_change > 0.0:
            trace.last_change_round = rnd
            last_change = window_change

    trace.final = state
    if not trace.converged and last_change <= tol:
        trace.converged = True
    if not trace.converged:
        raise NonConvergenceError(f"no fixed point after {max_updates} updates", trace)
    return trace
