import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxlogic import (
    CnfFormula,
    GateParams,
    ParseError,
    compile_cnf,
    decide_sat,
    evaluate_cnf,
    extract_assignment,
    parse_dimacs,
    solve_exact,
)
from fluxlogic.sat import SAT, UNKNOWN, UNSAT, pad_clause, to_dimacs
from fluxlogic.solver import AnnealSchedule
from oracles import brute_min_violated, dpll, random_cnf_clauses, violated


def cnf(n, clauses):
    return CnfFormula(n, tuple(pad_clause(c) for c in clauses))


# -- DIMACS ---------------------------------------------------------------------------


def test_parse_basic():
    f = parse_dimacs("c comment\np cnf 3 2\n1 -2 3 0\n-1 2 0\n")
    assert f.num_vars == 3
    assert f.clauses == ((1, -2, 3), (-1, 2, -1))


def test_parse_multiline_clause_and_percent_terminator():
    f = parse_dimacs("p cnf 2 1\n1\n-2 0\n%\n0\n")
    assert f.clauses == ((1, -2, 1),)


def test_round_trip():
    f = cnf(4, [(1, -2, 3), (-4, 4, 2)])
    assert parse_dimacs(to_dimacs(f)) == f


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("p cnf 2 1\n1 2 x 0\n", 2, "bad literal"),
        ("p cnf 2 1\n1 3 0\n", 2, "out of range"),
        ("1 2 0\n", 1, "before"),
        ("p cnf 4 1\n\n1 2 3 4 0\n", 3, "only 3SAT"),
        ("p cnf 2 2\n1 2 0\n", 1, "declares 2"),
        ("p cnf 2\n", 1, "malformed"),
        ("p cnf 2 1\n1 2 0\np cnf 2 1\n", 3, "duplicate"),
        ("p cnf 2 1\nc\n1 2\n", 3, "unterminated"),
        ("p cnf 2 1\n0\n", 2, "empty clause"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        parse_dimacs(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_formula_validation():
    with pytest.raises(ValueError):
        CnfFormula(2, ((1, 2),))
    with pytest.raises(ValueError):
        CnfFormula(2, ((1, 2, 3),))
    with pytest.raises(ValueError):
        pad_clause([])


def test_evaluate_cnf():
    f = cnf(2, [(1, 2), (-1,)])
    assert evaluate_cnf(f, {1: 0, 2: 1}) == 0
    assert evaluate_cnf(f, {1: 1, 2: 0}) == 1
    assert evaluate_cnf(f, {1: 0, 2: 0}) == 1


# -- compilation ---------------------------------------------------------------------------


def test_compile_layout():
    m = compile_cnf(cnf(3, [(1, -2, 3), (2,)]))
    assert m.variables == {1: "x1", 2: "x2", 3: "x3"}
    assert m.clause_cells == ["clause0", "clause1"]
    assert {m.network.cell(c).role for c in m.variables.values()} == {"input"}


def test_compile_single_clause_min_energy_zero():
    m = compile_cnf(cnf(3, [(1, 2, 3)]))
    res = solve_exact(m.network, condition_on=list(m.variables.values()))
    assert res.min_energy == 0
    assert res.degeneracy == 7


def test_compile_contradiction():
    m = compile_cnf(cnf(1, [(1,), (-1,)]))
    res = solve_exact(m.network)
    assert res.min_energy == pytest.approx(0.5)


def test_compile_empty_formula():
    m = compile_cnf(CnfFormula(2, ()))
    res = solve_exact(m.network)
    assert res.min_energy == 0 and res.degeneracy == 4


def test_extract_assignment():
    assert extract_assignment({"x1": 1, "x2": 0, "v": 1}, {1: "x1", 2: "x2"}) == {1: 1, 2: 0}
    with pytest.raises(KeyError):
        extract_assignment({"x1": 1}, {1: "x1", 2: "x2"})


# -- decide_sat ------------------------------------------------------------------------------


def test_decide_examples():
    out = decide_sat(cnf(3, [(1, 2, 3), (-1, -2, -3)]))
    assert out.status == SAT and out.certified and out.violated == 0
    assert evaluate_cnf(cnf(3, [(1, 2, 3), (-1, -2, -3)]), out.assignment) == 0
    out = decide_sat(cnf(1, [(1,), (-1,)]))
    assert out.status == UNSAT and out.violated == 1 and out.min_energy == pytest.approx(0.5)


def test_decide_all_eight_sign_patterns_on_three_vars_is_unsat():
    clauses = [(a, 2 * b, 3 * c) for a, b, c in itertools.product((1, -1), repeat=3)]
    out = decide_sat(cnf(3, clauses))
    assert out.status == UNSAT and out.violated == 1


def test_unknown_method():
    with pytest.raises(ValueError):
        decide_sat(cnf(1, [(1,)]), method="magic")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decide_matches_oracles(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    clauses = random_cnf_clauses(rng, n, rng.randint(1, 10))
    out = decide_sat(CnfFormula(n, tuple(clauses)))
    assert (out.status == SAT) == dpll(clauses)
    assert out.certified and out.status != UNKNOWN
    if out.status == SAT:
        assert violated(clauses, {v: bool(x) for v, x in out.assignment.items()}) == 0
    # MAX-SAT law
    assert out.violated == brute_min_violated(n, clauses)
    assert out.min_energy == pytest.approx(0.5 * out.violated, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_anneal_never_claims_false_sat(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    clauses = random_cnf_clauses(rng, n, rng.randint(1, 6))
    out = decide_sat(CnfFormula(n, tuple(clauses)), method="anneal",
                     schedule=AnnealSchedule(sweeps=60, restarts=2, seed=seed))
    assert out.status in (SAT, UNKNOWN) and not out.certified
    if out.status == SAT:
        assert violated(clauses, {v: bool(x) for v, x in out.assignment.items()}) == 0


def test_quadratic_cross_check_at_balanced_params():
    rng = random.Random(2024)
    p = GateParams.balanced()
    for _ in range(40):
        n = rng.randint(1, 5)
        clauses = random_cnf_clauses(rng, n, rng.randint(1, 6))
        out = decide_sat(CnfFormula(n, tuple(clauses)), p, model="quadratic")
        assert out.status != UNSAT
        assert (out.status == SAT) == dpll(clauses)


def test_quadratic_cascades_fail_at_default_params():
    # a NAND/NOR pair pulls its inputs toward agreement by 0.11 at the
    # defaults, enough to corrupt a clause evaluator's ground state
    f = cnf(2, [(-2,), (2, 1, 2)])  # satisfied only by x1=1, x2=0
    assert decide_sat(f, model="quadratic").status == UNKNOWN
    out = decide_sat(f, GateParams.balanced(), model="quadratic")
    assert out.status == SAT and out.assignment == {1: 1, 2: 0}
