"""Local message-passing solution with guaranteed convergence."""
from .agent import AgentState, Message, agent_update
from .comm import (CommGraph, Var, assign_responsibilities, build_message_plan,
                   comm_graph_from_pattern, discover_comm_graph, establish_agent_order)
from .equations import UpdateEquation, agent_equations, all_equations
from .scheduler import (CONVERGENCE_ATOL, ConvergenceTrace, LocalProblem, build_agents, convergence_error,
                        reference_values, run_asynchronous, run_synchronous)

__all__ = [
    "CONVERGENCE_ATOL", "AgentState", "CommGraph", "ConvergenceTrace", "LocalProblem", "Message",
    "UpdateEquation", "Var", "agent_equations", "agent_update", "all_equations",
    "assign_responsibilities", "build_agents", "build_message_plan",
    "comm_graph_from_pattern", "convergence_error", "discover_comm_graph",
    "establish_agent_order", "reference_values", "run_asynchronous", "run_synchronous",
]
