"""Truth-table extraction and logic/degeneracy/reduction checks."""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import NetworkError, SolverLimitError
from .model import (
    DEFAULT_TOL,
    MISMATCH,
    GateHandle,
    Network,
    all_assignments,
    compile_network,
    ising_arrays,
    ising_energy,
    network_energy,
    to_ising,
)
from .solver import DEFAULT_MAX_EXACT, solve_exact

AMBIGUOUS = "x"

BoolFunc = Callable[..., "int | bool | Sequence[int]"]


@dataclass(frozen=True)
class TruthRow:
    inputs: tuple[int, ...]
    outputs: tuple[int | str, ...]
    min_energy: float
    degeneracy: int

    @property
    def ambiguous(self) -> bool:
        return AMBIGUOUS in self.outputs


@dataclass
class TruthTableReport:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    model: str
    rows: list[TruthRow]
    failures: list[TruthRow] = field(default_factory=list)
    passed: bool | None = None  # None until compared against an expected function

    def as_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "model": self.model,
            "rows": [
                {
                    "inputs": list(r.inputs),
                    "outputs": list(r.outputs),
                    "min_energy": r.min_energy,
                    "degeneracy": r.degeneracy,
                }
                for r in self.rows
            ],
            "passed": self.passed,
            "failing_rows": [list(r.inputs) for r in self.failures],
        }


def truth_table(
    net: Network,
    inputs: Sequence[str],
    outputs: Sequence[str],
    model: str = MISMATCH,
    *,
    max_free_cells: int = DEFAULT_MAX_EXACT,
    tol: float = DEFAULT_TOL,
) -> TruthTableReport:
    """Clamp every input row, solve exactly and project ground states onto ``outputs``.

    An output is reported as :data:`AMBIGUOUS` when ground states disagree on it.
    """
    for cid in (*inputs, *outputs):
        if cid not in net:
            raise NetworkError(f"unknown cell {cid!r}")
    rows = []
    for bits in itertools.product((0, 1), repeat=len(inputs)):
        clamped = net.with_clamps(dict(zip(inputs, bits)))
        res = solve_exact(clamped, model, max_free_cells, tol=tol)
        if res.truncated:
            raise SolverLimitError(f"row {bits}: {res.degeneracy} ground states, too many to project")
        values = []
        for o in outputs:
            seen = {g[o] for g in res.ground_states}
            values.append(seen.pop() if len(seen) == 1 else AMBIGUOUS)
        rows.append(TruthRow(bits, tuple(values), res.min_energy, res.degeneracy))
    return TruthTableReport(tuple(inputs), tuple(outputs), model, rows)


def _expected_row(expected: BoolFunc, bits, n_out):
    value = expected(*bits)
    if isinstance(value, (bool, int, np.integer)):
        value = (value,)
    value = tuple(int(bool(v)) for v in value)
    if len(value) != n_out:
        raise ValueError(f"expected function returned {len(value)} outputs, gate has {n_out}")
    return value


def compare(report: TruthTableReport, expected: BoolFunc) -> TruthTableReport:
    """Mark rows that are ambiguous or differ from ``expected``; sets ``passed``."""
    report.failures = [
        r
        for r in report.rows
        if r.ambiguous or r.outputs != _expected_row(expected, r.inputs, len(report.outputs))
    ]
    report.passed = not report.failures
    return report


def check_gate(
    net: Network,
    handle: GateHandle,
    expected: BoolFunc,
    model: str = MISMATCH,
    **kwargs,
) -> TruthTableReport:
    """Truth table of a gate's declared inputs/outputs compared with ``expected``."""
    report = truth_table(net, handle.inputs, handle.outputs, model, **kwargs)
    return compare(report, expected)


@dataclass(frozen=True)
class EdcReport:
    passed: bool
    degeneracy: int
    expected: int
    gap: float


def check_edc(net: Network, k: int, model: str = MISMATCH, **kwargs) -> EdcReport:
    """Degeneracy must equal 2**k with a strictly positive gap above it."""
    res = solve_exact(net, model, **kwargs)
    ok = res.degeneracy == 2**k and res.gap > 0
    return EdcReport(ok, res.degeneracy, 2**k, res.gap)


@dataclass(frozen=True)
class IsingEquivalenceReport:
    max_discrepancy: float
    argmin_equal: bool
    states_checked: int
    trials: int

    @property
    def passed(self) -> bool:
        return self.argmin_equal and self.max_discrepancy <= 1e-9


def check_ising_equivalence(
    net: Network,
    trials: int = 100,
    seed: int = 0,
    *,
    max_free_cells: int = DEFAULT_MAX_EXACT,
    tol: float = DEFAULT_TOL,
) -> IsingEquivalenceReport:
    """Compare the quadratic flux energy with its Ising reduction.

    Random assignments go through the scalar reference functions; the full
    state space goes through the vectorized flux and Ising evaluators and
    their argmin sets are compared.
    """
    m = to_ising(net)
    free = net.free_cells
    if len(free) > max_free_cells:
        raise SolverLimitError(f"{len(free)} free cells exceed the exact limit {max_free_cells}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    clamps = net.clamps
    for _ in range(trials):
        a = dict(clamps)
        a.update(zip(free, rng.integers(0, 2, len(free)).tolist()))
        worst = max(worst, abs(ising_energy(m, a) - network_energy(net, a, "quadratic")))

    cn = compile_network(net)
    states = np.array([[a[c] for c in cn.ids] for a in all_assignments(net)], dtype=np.int8)
    if states.size == 0:
        states = np.zeros((1, 0), dtype=np.int8)
    flux_e = cn.energies(states, "quadratic")
    h, J = ising_arrays(m)
    sigma = 1.0 - 2.0 * states
    ising_e = m.constant + sigma @ h + np.einsum("ki,ij,kj->k", sigma, J, sigma)
    worst = max(worst, float(np.max(np.abs(flux_e - ising_e))))
    ground_flux = set(np.flatnonzero(flux_e <= flux_e.min() + tol).tolist())
    ground_ising = set(np.flatnonzero(ising_e <= ising_e.min() + tol).tolist())
    return IsingEquivalenceReport(worst, ground_flux == ground_ising, len(states), trials)
