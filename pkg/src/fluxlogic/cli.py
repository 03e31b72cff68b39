"""Command-line front end (``fluxlogic``).

Exit status: 0 on success (including SAT and UNSAT answers), 1 when a
verification fails or a SAT answer is UNKNOWN, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import operator
import sys
from functools import reduce
from pathlib import Path

from . import __version__
from .errors import FluxLogicError, SolverLimitError
from .model import DEFAULT_TOL, MODELS, to_ising
from .netlist import parse_netlist_document
from .sat import SAT, UNKNOWN, decide_sat, parse_dimacs
from .solver import DEFAULT_MAX_EXACT, AnnealSchedule, anneal, solve_exact
from .verify import AMBIGUOUS, compare, truth_table

FORMAT_VERSION = 1

FUNCTIONS = {
    "BUF": lambda *x: x[0],
    "NOT": lambda *x: 1 - x[0],
    "AND": lambda *x: int(all(x)),
    "OR": lambda *x: int(any(x)),
    "NAND": lambda *x: 1 - int(all(x)),
    "NOR": lambda *x: 1 - int(any(x)),
    "XOR": lambda *x: reduce(operator.xor, x),
    "XNOR": lambda *x: 1 - reduce(operator.xor, x),
}


class UsageError(Exception):
    pass


def _expected(functions: str, n_outputs: int):
    names = [s.strip().upper() for s in functions.split(",") if s.strip()]
    for name in names:
        if name not in FUNCTIONS:
            raise UsageError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    if len(names) == 1:
        names = names * n_outputs
    if len(names) != n_outputs:
        raise UsageError(f"--expect lists {len(names)} functions for {n_outputs} outputs")
    funcs = [FUNCTIONS[n] for n in names]
    return lambda *bits: tuple(f(*bits) for f in funcs)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(args):
    doc = parse_netlist_document(_read(args.netlist), args.model)
    return doc, doc.model


def _schedule(args, model) -> AnnealSchedule:
    overrides = {k: v for k, v in {
        "seed": args.seed, "sweeps": args.sweeps, "restarts": args.restarts,
        "t_initial": args.t_initial, "t_final": args.t_final,
    }.items() if v is not None}
    return AnnealSchedule.for_model(model, **overrides)


def _result_payload(res) -> dict:
    return {
        "method": res.method,
        "certified": res.certified,
        "min_energy": res.min_energy,
        "degeneracy": res.degeneracy,
        "gap": res.gap,
        "truncated": res.truncated,
        "ground_states": [dict(sorted(g.items())) for g in res.ground_states],
    }


def _text_result(res) -> str:
    lines = [f"method: {res.method} (certified: {'yes' if res.certified else 'no'})",
             f"min energy: {res.min_energy:.12g}"]
    if res.degeneracy is not None:
        lines.append(f"degeneracy: {res.degeneracy}" + (" (list truncated)" if res.truncated else ""))
        lines.append(f"gap: {res.gap:.12g}")
    for g in res.ground_states:
        lines.append("  " + " ".join(f"{k}={v}" for k, v in sorted(g.items())))
    return "\n".join(lines)


def cmd_solve(args):
    doc, model = _load(args)
    if args.anneal:
        res = anneal(doc.network, model, _schedule(args, model), tol=args.tol, workers=args.workers)
    else:
        try:
            res = solve_exact(doc.network, model, args.max_exact, tol=args.tol)
        except SolverLimitError as exc:
            raise UsageError(f"{exc}; rerun with --anneal or a larger --max-exact") from None
    return 0, {"command": "solve", "model": model, **_result_payload(res)}, _text_result(res)


def cmd_anneal(args):
    doc, model = _load(args)
    res = anneal(doc.network, model, _schedule(args, model), tol=args.tol, workers=args.workers)
    return 0, {"command": "anneal", "model": model, "seed": _schedule(args, model).seed,
               **_result_payload(res)}, _text_result(res)


def _table(args, doc, model):
    inputs = args.inputs or doc.inputs
    outputs = args.outputs or doc.outputs
    if not inputs or not outputs:
        raise UsageError("declare inputs/outputs in the netlist or pass --inputs/--outputs")
    try:
        return truth_table(doc.network, inputs, outputs, model, max_free_cells=args.max_exact, tol=args.tol)
    except SolverLimitError as exc:
        raise UsageError(str(exc)) from None


def _table_text(report) -> str:
    head = " ".join(report.inputs) + " | " + " ".join(report.outputs)
    lines = [head]
    failing = {r.inputs for r in report.failures}
    for r in report.rows:
        mark = "  FAIL" if r.inputs in failing else ""
        lines.append(" ".join(map(str, r.inputs)) + " | " + " ".join(map(str, r.outputs))
                     + f"   E={r.min_energy:.9g} g={r.degeneracy}{mark}")
    if report.passed is not None:
        lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines)


def cmd_truth_table(args):
    doc, model = _load(args)
    report = _table(args, doc, model)
    if args.expect:
        compare(report, _expected(args.expect, len(report.outputs)))
    code = 1 if report.passed is False else 0
    return code, {"command": "truth-table", "ambiguous": AMBIGUOUS, **report.as_dict()}, _table_text(report)


def cmd_check_gate(args):
    doc, model = _load(args)
    if args.gate is not None:
        gates = doc.network.gates
        if not 0 <= args.gate < len(gates):
            raise UsageError(f"--gate {args.gate} out of range; netlist has {len(gates)} gates")
        args.inputs, args.outputs = list(gates[args.gate].inputs), list(gates[args.gate].outputs)
    report = _table(args, doc, model)
    compare(report, _expected(args.expect, len(report.outputs)))
    return (0 if report.passed else 1), {"command": "check-gate", "ambiguous": AMBIGUOUS,
                                         **report.as_dict()}, _table_text(report)


def cmd_sat(args):
    cnf = parse_dimacs(_read(args.dimacs))
    model = args.model or "mismatch"
    if args.anneal:
        out = decide_sat(cnf, method="anneal", model=model, schedule=_schedule(args, model), tol=args.tol)
    else:
        try:
            out = decide_sat(cnf, model=model, max_exact=args.max_exact, tol=args.tol)
        except SolverLimitError as exc:
            raise UsageError(f"{exc}; rerun with --anneal") from None
    payload = {
        "command": "sat",
        "model": model,
        "status": out.status,
        "certified": out.certified,
        "min_energy": out.min_energy,
        "violated": out.violated,
        "assignment": None if out.assignment is None
        else {str(k): v for k, v in sorted(out.assignment.items())},
    }
    text = [f"s {out.status}"]
    if out.status == SAT:
        text.append("v " + " ".join(str(k if v else -k) for k, v in sorted(out.assignment.items())) + " 0")
    text.append(f"c min energy {out.min_energy:.12g} certified={out.certified}")
    return (1 if out.status == UNKNOWN else 0), payload, "\n".join(text)


def cmd_export_ising(args):
    doc, _ = _load(args)
    m = to_ising(doc.network)
    payload = {
        "command": "export-ising",
        "cells": list(m.cells),
        "h": dict(sorted(m.h.items())),
        "J": [[i, j, v] for (i, j), v in sorted(m.J.items())],
        "constant": m.constant,
    }
    lines = [f"constant {m.constant!r}"]
    lines += [f"h {c} {v!r}" for c, v in sorted(m.h.items())]
    lines += [f"J {i} {j} {v!r}" for (i, j), v in sorted(m.J.items())]
    return 0, payload, "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=MODELS, default=None,
                        help="energy model (default: netlist param, else mismatch)")
    common.add_argument("--max-exact", type=int, default=DEFAULT_MAX_EXACT,
                        help="largest exactly-enumerated block (default %(default)s)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="degeneracy tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    sched = argparse.ArgumentParser(add_help=False)
    sched.add_argument("--seed", type=int)
    sched.add_argument("--sweeps", type=int)
    sched.add_argument("--restarts", type=int)
    sched.add_argument("--t-initial", type=float)
    sched.add_argument("--t-final", type=float)
    sched.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="fluxlogic", description="Static flux-logic simulator.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, sched], help="ground states of a netlist")
    p.add_argument("netlist")
    p.add_argument("--anneal", action="store_true", help="use simulated annealing")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("anneal", parents=[common, sched], help="simulated annealing on a netlist")
    p.add_argument("netlist")
    p.set_defaults(func=cmd_anneal)

    for name, func in (("truth-table", cmd_truth_table), ("check-gate", cmd_check_gate)):
        p = sub.add_parser(name, parents=[common], help=f"{name.replace('-', ' ')} of a netlist")
        p.add_argument("netlist")
        p.add_argument("--inputs", nargs="+")
        p.add_argument("--outputs", nargs="+")
        p.add_argument("--expect", required=name == "check-gate",
                       help="comma-separated functions, one per output: " + ",".join(FUNCTIONS))
        if name == "check-gate":
            p.add_argument("--gate", type=int, help="index of a netlist gate to check")
        p.set_defaults(func=func)

    p = sub.add_parser("sat", parents=[common, sched], help="decide a DIMACS 3-CNF formula")
    p.add_argument("dimacs")
    p.add_argument("--anneal", action="store_true")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("export-ising", parents=[common], help="Ising reduction of a netlist")
    p.add_argument("netlist")
    p.set_defaults(func=cmd_export_ising)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, payload, text = args.func(args)
    except (UsageError, FluxLogicError, ValueError) as exc:
        print(f"fluxlogic: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({"format_version": FORMAT_VERSION, **payload}, indent=2, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
