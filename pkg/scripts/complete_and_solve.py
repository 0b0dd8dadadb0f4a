#!/usr/bin/env python3
"""End-to-end walkthrough: diagnose, complete, and solve a PDE system.

Runs on the transport-like system with a hidden integrability condition:

    u_z + y*u_x = 0,  u_y = 0

whose completion reveals u_x = 0 and whose solutions are the constants.
"""

from fractions import Fraction
from pathlib import Path

from jets import (complete, format_equation, format_system, is_involutive,
                  parse_jet_name, parse_system, partition_derivatives,
                  residual_order, series_eval, solve_series)

HERE = Path(__file__).parent


def main() -> None:
    source = (HERE / "pde" / "transport3d.pde").read_text()
    system = parse_system(source)
    print("input system:")
    print(format_system(system))

    verdict = is_involutive(system)
    print(f"\ninvolutive: {verdict.involutive}")
    print(f"symbol count {verdict.symbol.sum_k_beta} vs prolonged symbol "
          f"rank {verdict.symbol.rank_prolonged_symbol}")
    for eq in verdict.new_conditions:
        print(f"hidden condition: {format_equation(eq)}")

    result = complete(system)
    print(f"\ncompleted in {result.trace.iterations} iteration(s):")
    print(format_system(result.system))
    print(f"membership certificate: {result.trace.certificate_ok}")

    origin = (Fraction(0), Fraction(0), Fraction(0))
    partition = partition_derivatives(result.system, origin, 3)
    names = [v.name(system.signature)
             for m in partition for v in partition[m].parametric]
    print(f"\nparametric coefficients up to order 3: {names}")

    u0 = parse_jet_name(system.signature, "u")
    solution = solve_series(result.system, origin, 3,
                            parametric_values={u0: Fraction(7)})
    print(f"series at the origin with u = 7: value at (1, 2, 3) is "
          f"{series_eval(solution, (1, 2, 3))[1]}")
    print(f"residual orders: {residual_order(result.system, solution)}")


if __name__ == "__main__":
    main()
