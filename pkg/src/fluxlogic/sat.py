"""DIMACS parsing, 3SAT-to-network compilation and satisfiability decisions.

The compiled machine has one free cell per variable and one clause
evaluator per clause.  Under the mismatch model its minimum energy is
``dedlu_strength`` times the least number of violated clauses, so the
formula is satisfiable exactly when the ground energy is zero.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .errors import ParseError
from .gates import DEFAULT_PARAMS, GateParams, three_ce
from .model import DEFAULT_TOL, MISMATCH, Network, check_model
from .solver import DEFAULT_MAX_EXACT, AnnealSchedule, SolveResult, anneal, solve_exact

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError(f"clause {clause} does not have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")


def pad_clause(lits: Sequence[int]) -> tuple[int, int, int]:
    """Repeat literals of a 1- or 2-literal clause until it has three."""
    if not 1 <= len(lits) <= 3:
        raise ValueError(f"3SAT clauses need 1-3 literals, got {len(lits)}")
    return tuple(lits[i % len(lits)] for i in range(3))


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    header_line = 0
    clauses: list[tuple[int, int, int]] = []
    pending: list[int] = []
    pending_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise ParseError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}; expected 'p cnf <vars> <clauses>'", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise ParseError("negative counts in header", lineno)
            header_line = lineno
            continue
        if num_vars is None:
            raise ParseError("clause before the 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not pending:
                    raise ParseError("empty clause", lineno)
                if len(pending) > 3:
                    raise ParseError(f"clause has {len(pending)} literals; only 3SAT is supported", lineno)
                clauses.append(pad_clause(pending))
                pending = []
                continue
            if abs(lit) > num_vars:
                raise ParseError(f"literal {lit} out of range (1..{num_vars})", lineno)
            if not pending:
                pending_line = lineno
            pending.append(lit)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header", 1)
    if pending:
        raise ParseError("unterminated clause (missing trailing 0)", pending_line)
    if len(clauses) != num_clauses:
        raise ParseError(f"header declares {num_clauses} clauses, found {len(clauses)}", header_line)
    return CnfFormula(num_vars, tuple(clauses))


def to_dimacs(cnf: CnfFormula) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def evaluate_cnf(cnf: CnfFormula, values: Mapping[int, int]) -> int:
    """Number of clauses violated by a variable assignment (1-based keys)."""
    violated = 0
    for clause in cnf.clauses:
        if not any(bool(values[abs(l)]) == (l > 0) for l in clause):
            violated += 1
    return violated


@dataclass
class SatMachine:
    network: Network
    variables: dict[int, str]
    clause_cells: list[str]
    params: GateParams
    model: str


def compile_cnf(cnf: CnfFormula, p: GateParams | None = None, model: str = MISMATCH) -> SatMachine:
    check_model(model)
    p = p or DEFAULT_PARAMS
    net = Network()
    variables = {v: net.add_cell(f"x{v}", role="input") for v in range(1, cnf.num_vars + 1)}
    clause_cells = []
    for k, clause in enumerate(cnf.clauses):
        lits = [(variables[abs(l)], l > 0) for l in clause]
        clause_cells.append(three_ce(net, *lits, p=p, model=model, name=f"clause{k}"))
    return SatMachine(net, variables, clause_cells, p, model)


def extract_assignment(state: Mapping[str, int], variables: Mapping[int, str]) -> dict[int, int]:
    out = {}
    for v, cid in variables.items():
        if cid not in state:
            raise KeyError(f"ground state has no value for variable cell {cid!r}")
        out[v] = int(state[cid])
    return out


@dataclass(frozen=True)
class SatOutcome:
    status: str
    assignment: dict[int, int] | None
    min_energy: float
    certified: bool
    violated: int | None = None  # least violated-clause count, when certified


def decide_sat(
    cnf: CnfFormula,
    p: GateParams | None = None,
    *,
    method: str = "exact",
    model: str = MISMATCH,
    max_exact: int = DEFAULT_MAX_EXACT,
    schedule: AnnealSchedule | None = None,
    tol: float = DEFAULT_TOL,
) -> SatOutcome:
    """Relax the compiled machine to its ground state and read off the answer.

    Any SAT answer carries an assignment re-checked clause by clause.  UNSAT
    is only returned for a certified mismatch-model solve; quadratic-model
    and annealing runs that find no satisfying projection report UNKNOWN.
    """
    machine = compile_cnf(cnf, p, model)
    p = machine.params
    if method == "exact":
        res: SolveResult = solve_exact(
            machine.network, model, max_exact, tol=tol, condition_on=list(machine.variables.values())
        )
    elif method == "anneal":
        res = anneal(machine.network, model, schedule, tol=tol)
    else:
        raise ValueError(f"unknown method {method!r}")

    for state in res.ground_states:
        values = extract_assignment(state, machine.variables)
        if evaluate_cnf(cnf, values) == 0:
            return SatOutcome(SAT, values, res.min_energy, res.certified, 0 if res.certified else None)

    if res.certified and model == MISMATCH:
        if res.min_energy < p.dedlu_strength - tol and not res.truncated:
            raise RuntimeError("zero-energy ground state does not satisfy the formula")
        violated = round(res.min_energy / p.dedlu_strength)
        return SatOutcome(UNSAT, None, res.min_energy, True, violated)
    return SatOutcome(UNKNOWN, None, res.min_energy, False)

