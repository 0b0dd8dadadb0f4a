"""Exact-arithmetic toolkit for PDE systems on jet spaces.

Represents systems of differential polynomials over the rationals, prolongs
and projects them between jet orders, tests involutivity with the finite
symbol criterion, completes systems to involutive form, and constructs
truncated power-series solutions order by order.
"""

from .completion import (CompletionResult, CompletionStep, CompletionTrace,
                         InvolutionReport, complete, formally_integrable_up_to,
                         is_involutive)
from .diffpoly import DiffPolynomial, Monomial, canonical_equation
from .errors import (DeltaSingularUnresolvedError, EmptyProjectionError,
                     EvaluationError, InconsistentAtPointError,
                     InconsistentOrderError, InconsistentSeedError, JetsError,
                     MaxIterationsExceededError, NonLinearSystemError,
                     ParseError, SignatureMismatchError)
from .jetspace import (BundleSignature, JetVariable, MultiIndex,
                       enumerate_indices, enumerate_indices_up_to, jet_dim,
                       jet_variables)
from .series import (OrderPartition, PolynomialFunction, SeriesSolution,
                     check_solution, partition_derivatives, residual_order,
                     series_eval, solve_series)
from .symbol import (ClassSignature, DeltaRetryResult, SymbolMatrix,
                     SymbolTest, class_signature, delta_retry,
                     multiplicative_positions, symbol_involutive, symbol_of)
from .systems import (AffineRow, DiffSystem, JacobiBlocks, autoreduce_linear,
                      change_coordinates, dim_of, echelon_of, equals_generic,
                      integrability_conditions, invert_matrix, jacobi_matrix,
                      project_linear, prolong, rank_of, syntactic_project,
                      to_affine_rows)
from .textio import (SystemDocument, format_equation, format_polynomial,
                     format_system, parse_document, parse_jet_name,
                     parse_polynomial, parse_system, print_system,
                     system_to_tree)

__version__ = "0.1.0"

__all__ = [
    "BundleSignature", "MultiIndex", "JetVariable", "Monomial",
    "DiffPolynomial", "DiffSystem", "AffineRow", "JacobiBlocks",
    "SymbolMatrix", "ClassSignature", "SymbolTest", "DeltaRetryResult",
    "InvolutionReport", "CompletionStep", "CompletionTrace",
    "CompletionResult", "PolynomialFunction", "SeriesSolution",
    "OrderPartition", "SystemDocument",
    "enumerate_indices", "enumerate_indices_up_to", "jet_dim",
    "jet_variables", "canonical_equation",
    "prolong", "syntactic_project", "project_linear",
    "integrability_conditions", "jacobi_matrix", "rank_of", "dim_of",
    "equals_generic", "change_coordinates", "autoreduce_linear",
    "echelon_of", "to_affine_rows", "invert_matrix",
    "symbol_of", "class_signature", "symbol_involutive",
    "multiplicative_positions", "delta_retry",
    "is_involutive", "complete", "formally_integrable_up_to",
    "check_solution", "partition_derivatives", "solve_series", "series_eval",
    "residual_order",
    "parse_system", "parse_document", "parse_jet_name", "parse_polynomial",
    "print_system",
    "format_polynomial", "format_equation", "format_system", "system_to_tree",
    "JetsError", "SignatureMismatchError", "EvaluationError",
    "NonLinearSystemError", "EmptyProjectionError",
    "InconsistentAtPointError", "InconsistentSeedError",
    "InconsistentOrderError", "MaxIterationsExceededError",
    "DeltaSingularUnresolvedError", "ParseError",
]
