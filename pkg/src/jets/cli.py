"""Command-line interface.

One subcommand per invocation; human-readable report on stdout, or a
versioned JSON document with ``--json``. Exit status: 0 success, 1 domain
error (with a machine-readable category), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from .completion import complete, is_involutive
from .errors import JetsError
from .jetspace import JetVariable, jet_dim
from .series import partition_derivatives, residual_order, solve_series
from .symbol import class_signature, symbol_of
from .systems import (DiffSystem, dim_of, integrability_conditions,
                      project_linear, prolong, rank_of, syntactic_project)
from .textio import (FORMAT_VERSION, format_equation, format_polynomial,
                     parse_jet_name, parse_system, print_system,
                     system_to_tree)

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        err = JetsError(f"cannot read {path}: {exc.strerror or exc}")
        err.category = "io"
        raise err from None


def _load(args) -> DiffSystem:
    return parse_system(_read_source(args.file))


def _rational(text: str) -> Fraction:
    text = text.strip()
    if not _RATIONAL.match(text):
        raise JetsError(f"not an exact rational: {text!r} (use p/q or an integer)")
    return Fraction(text)


def _assignments(chunks: list[str]) -> list[tuple[str, Fraction]]:
    out = []
    for chunk in chunks:
        for part in chunk.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise JetsError(f"assignment {part!r} must look like name=value")
            name, _, value = part.partition("=")
            out.append((name.strip(), _rational(value)))
    return out


def _point(system: DiffSystem, spec: str) -> list[Fraction]:
    sig = system.signature
    values: dict[str, Fraction] = {}
    for name, val in _assignments([spec]):
        if name not in sig.independent:
            raise JetsError(f"{name!r} is not an independent variable")
        values[name] = val
    missing = [n for n in sig.independent if n not in values]
    if missing:
        raise JetsError(f"--point must assign every coordinate; missing {missing}")
    return [values[n] for n in sig.independent]


def _jet_assignments(system: DiffSystem, chunks: list[str]) -> dict:
    out = {}
    for name, val in _assignments(chunks):
        out[parse_jet_name(system.signature, name)] = val
    return out


def _permutation_matrix(system: DiffSystem, spec: str) -> list[list[int]]:
    sig = system.signature
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if len(parts) != sig.p:
        raise JetsError(f"--coords needs {sig.p} entries")
    if all(p.isdigit() for p in parts):
        positions = [int(p) for p in parts]
    else:
        positions = [sig.position_of(p) if p in sig.independent else 0 for p in parts]
    if sorted(positions) != list(range(1, sig.p + 1)):
        raise JetsError(f"--coords must be a permutation of the {sig.p} coordinates")
    return [[1 if c == positions[r] - 1 else 0 for c in range(sig.p)]
            for r in range(sig.p)]


def _system_summary(system: DiffSystem) -> dict:
    sig = system.signature
    return {
        "independent": list(sig.independent),
        "dependent": list(sig.dependent),
        "order": system.order,
        "equations": len(system.equations),
        "equation_orders": [eq.order for eq in system.equations],
        "linear": system.is_linear,
        "jet_dim": jet_dim(sig.p, sig.q, system.order),
    }


# -- subcommand handlers ------------------------------------------------------


def cmd_check(args):
    system = _load(args)
    data = _system_summary(system)
    lines = [
        f"independent: {' '.join(data['independent'])}",
        f"dependent: {' '.join(data['dependent'])}",
        f"order: {data['order']}",
        f"equations: {data['equations']}",
        f"equation orders: {', '.join(str(o) for o in data['equation_orders'])}",
        f"linear: {str(data['linear']).lower()}",
        f"jet space dimension: {data['jet_dim']}",
    ]
    return data, lines


def cmd_info(args):
    system = _load(args)
    data = _system_summary(system)
    data["rank"] = rank_of(system)
    data["dim"] = dim_of(system)
    _, lines = cmd_check(args)
    lines.append(f"rank: {data['rank']}")
    lines.append(f"dim: {data['dim']}")
    if system.order >= 1:
        sig = class_signature(system)
        data["beta"] = list(sig.beta)
        data["sum_k_beta"] = sig.sum_k_beta
        lines.append(f"symbol classes beta: {list(sig.beta)}")
        lines.append(f"sum_k_beta: {sig.sum_k_beta}")
    lines.extend(format_equation(eq) for eq in system.equations)
    return data, lines


def cmd_prolong(args):
    system = prolong(_load(args), args.k)
    return system_to_tree(system), [print_system(system).rstrip("\n")]


def cmd_project(args):
    system = _load(args)
    if args.linear:
        projected = project_linear(system, args.j)
    else:
        projected = syntactic_project(system, args.j)
    return system_to_tree(projected), [print_system(projected).rstrip("\n")]


def cmd_symbol(args):
    system = _load(args)
    sym = symbol_of(system)
    sig = class_signature(system) if system.order >= 1 else None
    data = {
        "columns": [v.name(system.signature) for v in sym.columns],
        "rows": [
            {v.name(system.signature): format_polynomial(c) for v, c in row}
            for row in sym.rows
        ],
        "rank": sym.rank,
        "generic": sym.generic,
    }
    lines = ["columns: " + "  ".join(data["columns"])]
    for row in data["rows"]:
        lines.append("row: " + "  ".join(f"{k}: {v}" for k, v in row.items())
                     if row else "row: 0")
    lines.append(f"rank: {sym.rank}")
    if sig is not None:
        data["beta"] = list(sig.beta)
        data["sum_k_beta"] = sig.sum_k_beta
        lines.append(f"beta: {list(sig.beta)}")
        lines.append(f"sum_k_beta: {sig.sum_k_beta}")
    return data, lines


def cmd_involutive(args):
    system = _load(args)
    report = is_involutive(system)
    data = {
        "involutive": report.involutive,
        "symbol_involutive": report.symbol.involutive,
        "sum_k_beta": report.symbol.sum_k_beta,
        "rank_prolonged_symbol": report.symbol.rank_prolonged_symbol,
        "delta_suspect": report.symbol.delta_suspect,
        "projection_stable": report.projection_stable,
        "new_conditions": [format_equation(eq) for eq in report.new_conditions],
    }
    lines = [
        f"involutive: {str(report.involutive).lower()}",
        f"symbol involutive: {str(report.symbol.involutive).lower()}",
        f"sum_k_beta: {report.symbol.sum_k_beta}",
        f"rank_prolonged_symbol: {report.symbol.rank_prolonged_symbol}",
        f"projection stable: {str(report.projection_stable).lower()}",
    ]
    if report.new_conditions:
        lines.append("integrability conditions:")
        lines.extend(f"  {format_equation(eq)}" for eq in report.new_conditions)
    else:
        lines.append("integrability conditions: none")
    return data, lines


def cmd_integrability(args):
    system = _load(args)
    conditions = integrability_conditions(system)
    data = {"conditions": [format_equation(eq) for eq in conditions]}
    lines = (["integrability conditions:"]
             + [f"  {format_equation(eq)}" for eq in conditions]
             if conditions else ["integrability conditions: none"])
    return data, lines


def _default_seed() -> int:
    return int(os.environ.get("JETS_SEED", "0"))


def cmd_complete(args):
    system = _load(args)
    fixed = None
    strategy = "permutation"
    seed = _default_seed()
    if args.coords:
        fixed = _permutation_matrix(system, args.coords)
    if args.random_coords is not None:
        strategy = "random-linear"
        seed = args.random_coords if args.random_coords >= 0 else _default_seed()
    result = complete(system, max_iterations=args.max_iter,
                      delta_strategy=strategy, seed=seed,
                      minimize_order=args.minimize_order,
                      fixed_transform=fixed)
    trace = result.trace
    steps = [
        {
            "action": s.action,
            "order_before": s.order_before,
            "order_after": s.order_after,
            "rank_before": s.rank_before,
            "rank_after": s.rank_after,
            "new_conditions": [format_equation(eq) for eq in s.new_conditions],
            "transform": [[str(v) for v in row] for row in s.transform]
            if s.transform else None,
        }
        for s in trace.steps
    ]
    data = {
        "steps": steps,
        "iterations": trace.iterations,
        "max_order_seen": trace.max_order_seen,
        "certificate_ok": trace.certificate_ok,
        "result": system_to_tree(result.system),
    }
    lines = [f"iterations: {trace.iterations}"]
    for s in trace.steps:
        extra = ""
        if s.new_conditions:
            extra = " new: " + "; ".join(format_polynomial(eq)
                                         for eq in s.new_conditions)
        lines.append(f"step: {s.action} order {s.order_before} -> "
                     f"{s.order_after} rank {s.rank_before} -> {s.rank_after}{extra}")
    lines.append(f"certificate: {str(trace.certificate_ok).lower()}")
    lines.append(print_system(result.system).rstrip("\n"))
    return data, lines


def cmd_solve(args):
    system = _load(args)
    point = _point(system, args.point)
    if args.list_parametric:
        partition = partition_derivatives(system, point, args.order)
        data = {"partition": {
            str(m): {
                "principal": [v.name(system.signature) for v in part.principal],
                "parametric": [v.name(system.signature) for v in part.parametric],
            } for m, part in sorted(partition.items())
        }}
        lines = []
        for m, part in sorted(partition.items()):
            principal = ", ".join(v.name(system.signature) for v in part.principal) or "-"
            parametric = ", ".join(v.name(system.signature) for v in part.parametric) or "-"
            lines.append(f"order {m}: principal: {principal}")
            lines.append(f"order {m}: parametric: {parametric}")
        return data, lines

    parametric = _jet_assignments(system, args.set or [])
    seed = _jet_assignments(system, args.seed_jet) if args.seed_jet else None
    solution = solve_series(system, point, args.order,
                            parametric_values=parametric, seed=seed)
    residuals = residual_order(system, solution)
    coeff_rows = []
    for alpha in range(1, system.signature.q + 1):
        for index in sorted(solution.coefficients[alpha], key=lambda j: j.sort_key):
            value = solution.coefficients[alpha][index]
            coeff_rows.append({
                "dependent": system.signature.dependent[alpha - 1],
                "index": list(index.exponents),
                "name": JetVariable(alpha, index).name(system.signature),
                "value": str(value),
            })
    data = {
        "point": {n: str(v) for n, v in zip(system.signature.independent, point)},
        "truncation": args.order,
        "coefficients": coeff_rows,
        "residual_order": ["exact" if r is None else r for r in residuals],
    }
    lines = [f"coefficients about ({', '.join(str(v) for v in point)}), "
             f"truncated at order {args.order}:"]
    lines.extend(f"  {row['name']} = {row['value']}" for row in coeff_rows
                 if row["value"] != "0")
    if all(row["value"] == "0" for row in coeff_rows):
        lines.append("  (all coefficients vanish)")
    lines.append("residual orders: "
                 + ", ".join("exact" if r is None else str(r) for r in residuals))
    return data, lines


# -- driver -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jets",
        description="Represent PDE systems on jet spaces, complete them to "
                    "involutive form, and build exact power-series solutions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="input .pde file ('-' for stdin)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")
        p.set_defaults(func=handler)
        return p

    add("check", cmd_check, "parse a system and report orders and dimensions")
    add("info", cmd_info, "check plus ranks and symbol classes")

    p = add("prolong", cmd_prolong, "adjoin formal derivatives up to depth K")
    p.add_argument("-k", type=int, required=True, help="prolongation depth")

    p = add("project", cmd_project, "project to a lower-order jet space")
    p.add_argument("-j", type=int, required=True, help="projection depth")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--linear", action="store_true",
                       help="eliminate first (finds integrability conditions)")
    group.add_argument("--syntactic", action="store_true",
                       help="keep only equations already at the lower order (default)")

    add("symbol", cmd_symbol, "print the symbol matrix and class counts")
    add("involutive", cmd_involutive, "run the two-part involution test")
    add("integrability", cmd_integrability,
        "conditions revealed by one prolongation and projection")

    p = add("complete", cmd_complete, "complete to an involutive system")
    p.add_argument("--max-iter", type=int, default=10)
    p.add_argument("--coords", metavar="PERM",
                   help="explicit coordinate permutation, e.g. 'z,x,y' or '3,1,2'")
    p.add_argument("--random-coords", metavar="SEED", type=int, nargs="?",
                   const=-1, default=None,
                   help="seeded unimodular coordinate changes for delta retries "
                        "(default seed from JETS_SEED)")
    p.add_argument("--minimize-order", action="store_true",
                   help="try to present the result at a lower order")

    p = add("solve", cmd_solve, "construct a truncated power-series solution")
    p.add_argument("--point", required=True, metavar="ASSIGN",
                   help="expansion point, e.g. 'x=0,t=0'")
    p.add_argument("--order", required=True, type=int, help="truncation order N")
    p.add_argument("--set", action="append", metavar="ASSIGN",
                   help="parametric coefficients, e.g. 'u_xx=2' (repeatable)")
    p.add_argument("--seed-jet", action="append", metavar="ASSIGN",
                   help="full low-order seed for nonlinear systems (repeatable)")
    p.add_argument("--list-parametric", action="store_true",
                   help="print the principal/parametric partition and exit")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        data, lines = args.func(args)
    except (JetsError, ValueError) as exc:
        category = getattr(exc, "category", "invalid-input")
        if getattr(args, "json", False):
            print(json.dumps({"format_version": FORMAT_VERSION,
                              "error": {"category": category,
                                        "message": str(exc)}}))
        else:
            print(f"error [{category}]: {exc}", file=sys.stderr)
        return 1
    if args.json:
        payload = {"format_version": FORMAT_VERSION, "command": args.command}
        payload.update(data)
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
