"""Finite involution test and completion to an involutive system.

A linear system is involutive when its symbol is involutive and one
prolongation followed by one projection returns the same row space. The
completion loop alternates two phases until both hold: prolong while the
symbol test fails, project while new lower-order conditions appear. Before
any failed symbol verdict is acted on, a coordinate retry rules out
delta-singular frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .diffpoly import DiffPolynomial
from .errors import (DeltaSingularUnresolvedError, MaxIterationsExceededError,
                     NonLinearSystemError)
from .linalg import in_row_space
from .symbol import SymbolTest, delta_retry, symbol_involutive
from .systems import (DiffSystem, autoreduce_linear, change_coordinates,
                      echelon_of, equals_generic, project_linear, prolong,
                      rank_of, syntactic_project, to_affine_rows)

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class InvolutionReport:
    involutive: bool
    symbol: SymbolTest
    projection_stable: bool
    new_conditions: tuple[DiffPolynomial, ...]


def is_involutive(system: DiffSystem) -> InvolutionReport:
    """Two-part test: involutive symbol and stable prolongation/projection.

    The verdict is taken in the system's own coordinates; a failed symbol
    count may still be a coordinate artifact (see ``delta_retry``).
    """
    if not system.is_linear:
        raise NonLinearSystemError(
            "the involution test needs a linear system; for nonlinear input "
            "use the symbol diagnostics (class_signature, symbol_involutive)")
    sym = symbol_involutive(system)
    projected = project_linear(prolong(system, 1), 1)
    ech = echelon_of(system)
    new = tuple(eq for eq, row in zip(projected.equations,
                                      (r.as_row() for r in to_affine_rows(projected)))
                if not in_row_space(row, ech))
    stable = equals_generic(projected, system)
    return InvolutionReport(sym.involutive and stable, sym, stable, new)


@dataclass(frozen=True)
class CompletionStep:
    action: str  # "prolonged" | "projected" | "coordinate-changed"
    order_before: int
    order_after: int
    rank_before: int
    rank_after: int
    new_conditions: tuple[DiffPolynomial, ...] = ()
    transform: Matrix | None = None


@dataclass
class CompletionTrace:
    steps: list[CompletionStep] = field(default_factory=list)
    transform: Matrix | None = None
    max_order_seen: int = 0
    certificate_ok: bool | None = None

    @property
    def iterations(self) -> int:
        return sum(1 for s in self.steps if s.action in ("prolonged", "projected"))


@dataclass(frozen=True)
class CompletionResult:
    system: DiffSystem
    trace: CompletionTrace


def _compose(A: Sequence[Sequence[Fraction]] | None,
             B: Sequence[Sequence[Fraction]]) -> Matrix:
    """Total transform after applying B on top of A (x'' = B x' = B A x)."""
    if A is None:
        return tuple(tuple(Fraction(v) for v in row) for row in B)
    p = len(B)
    return tuple(
        tuple(sum(Fraction(B[r][k]) * Fraction(A[k][c]) for k in range(p))
              for c in range(p))
        for r in range(p))


def complete(system: DiffSystem, max_iterations: int = 10,
             delta_strategy: str = "permutation", seed: int = 0,
             minimize_order: bool = False,
             fixed_transform: Sequence[Sequence[Fraction | int]] | None = None
             ) -> CompletionResult:
    """Prolong and project until the system is involutive.

    Returns an involutive system with the same solution space, plus a trace
    of every action taken. Every output equation is certified to lie in the
    row space generated by prolonging the (possibly coordinate-changed)
    input to the maximal order the run visited.

    ``fixed_transform`` applies one explicit coordinate change up front and
    disables the automatic retry, putting the frame under caller control.
    """
    if not system.is_linear:
        raise NonLinearSystemError("completion is provided for linear systems")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")

    trace = CompletionTrace()
    reference = system
    current = system

    if fixed_transform is not None:
        current = change_coordinates(current, fixed_transform)
        reference = change_coordinates(reference, fixed_transform)
        trace.transform = _compose(None, fixed_transform)
        trace.steps.append(CompletionStep(
            "coordinate-changed", system.order, current.order,
            rank_of(system), rank_of(current),
            transform=trace.transform))

    trace.max_order_seen = current.order
    last_test: SymbolTest | None = None
    last_retry_changed = True

    def guard() -> None:
        if trace.iterations >= max_iterations:
            if (last_test is not None and last_test.delta_suspect
                    and not last_retry_changed):
                raise DeltaSingularUnresolvedError(
                    "class count stayed below the prolonged symbol rank and "
                    "coordinate retries found no better frame; try "
                    "delta_strategy='random-linear' (or another seed)",
                    trace=trace)
            raise MaxIterationsExceededError(
                f"completion did not stabilize within {max_iterations} "
                "prolongation/projection rounds", trace=trace)

    def symbol_phase(cur: DiffSystem) -> tuple[DiffSystem, SymbolTest]:
        nonlocal reference, last_test, last_retry_changed
        test = symbol_involutive(cur)
        last_test = test
        if test.involutive or fixed_transform is not None:
            last_retry_changed = fixed_transform is not None
            return cur, test
        retry = delta_retry(cur, strategy=delta_strategy, seed=seed)
        last_retry_changed = retry.changed
        if not retry.changed:
            return cur, test
        before_rank = rank_of(cur)
        cur = retry.system
        reference = change_coordinates(reference, retry.transform)
        trace.transform = _compose(trace.transform, retry.transform)
        trace.steps.append(CompletionStep(
            "coordinate-changed", cur.order, cur.order,
            before_rank, rank_of(cur), transform=retry.transform))
        test = symbol_involutive(cur)
        last_test = test
        return cur, test

    while True:
        current, test = symbol_phase(current)
        while not test.involutive:
            guard()
            bumped = prolong(current, 1)
            trace.steps.append(CompletionStep(
                "prolonged", current.order, bumped.order,
                rank_of(current), rank_of(bumped)))
            current = bumped
            trace.max_order_seen = max(trace.max_order_seen, current.order)
            current, test = symbol_phase(current)

        while True:
            lifted = prolong(current, 1)
            trace.max_order_seen = max(trace.max_order_seen, lifted.order)
            projected = project_linear(lifted, 1)
            if equals_generic(projected, current):
                break
            guard()
            ech = echelon_of(current)
            new = tuple(eq for eq, row in zip(
                projected.equations,
                (r.as_row() for r in to_affine_rows(projected)))
                if not in_row_space(row, ech))
            reduced = autoreduce_linear(projected)
            trace.steps.append(CompletionStep(
                "projected", current.order, reduced.order,
                rank_of(current), rank_of(reduced), new_conditions=new))
            current = reduced

        current, test = symbol_phase(current)
        if test.involutive and equals_generic(
                project_linear(prolong(current, 1), 1), current):
            break

    if minimize_order:
        current = _minimize(current)

    depth = trace.max_order_seen - reference.order
    ech = echelon_of(prolong(reference, depth)) if depth else echelon_of(reference)
    trace.certificate_ok = all(
        in_row_space(r.as_row(), ech) for r in to_affine_rows(current))
    return CompletionResult(current, trace)


def _minimize(current: DiffSystem) -> DiffSystem:
    """Drop to lower order while the presentation stays involutive and
    row-space-equivalent to the original under prolongation."""
    from .errors import EmptyProjectionError
    while current.order > 1:
        try:
            candidate = syntactic_project(current, 1)
        except EmptyProjectionError:
            break
        if not is_involutive(candidate).involutive:
            break
        if not equals_generic(prolong(candidate, 1), current):
            break
        current = candidate
    return current


def formally_integrable_up_to(system: DiffSystem, depth: int) -> bool:
    """Check I^(k+1) projected once equals I^(k) for all k up to ``depth``."""
    if not system.is_linear:
        raise NonLinearSystemError("formal-integrability check needs a linear system")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    for k in range(depth + 1):
        lifted = prolong(system, k)
        if not equals_generic(project_linear(prolong(system, k + 1), 1), lifted):
            return False
    return True
