"""Sparse solve and selected inversion for Gaussian inference."""
from .errors import (InvalidInputError, NonConvergenceError, NotPositiveDefiniteError,
                     NumericalFailure, SingularMatrixError)
from .pattern import (FactorGraphTopology, PrimaryOrder, SparsityPattern,
                      SymmetricSparseMatrix, fill_in_count, pattern_from_graph,
                      random_order, spanning_tree_order, symbolic_fill_in)
from .solver import (GlobalResult, LdlFactors, SelectedInverse, Solution,
                     dense_oracle_inverse, ldl_factorize, selected_inverse, solve,
                     solve_primary)

__version__ = "0.1.0"
