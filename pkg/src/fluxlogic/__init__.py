"""Simulator, gate compiler and verifier for static flux logic.

Networks of flux-biased superconducting ring cells are built so that their
ground states, and only their ground states, satisfy Boolean relations.
"""

__version__ = "0.1.0"

from .errors import (
    AssignmentError,
    FluxLogicError,
    NetworkError,
    ParameterError,
    ParseError,
    SolverLimitError,
)
from .gates import (
    DEFAULT_PARAMS,
    GateParams,
    add_input_cell,
    dedlu,
    edl,
    inverter,
    nand_nor,
    or_gate,
    sand,
    three_ce,
    window_violations,
    wire,
)
from .model import (
    MISMATCH,
    QUADRATIC,
    Cell,
    Coupling,
    FluxConstants,
    GateHandle,
    IsingModel,
    Network,
    cell_applied_flux,
    cell_energy_mismatch,
    cell_energy_quadratic,
    ising_energy,
    logic_to_spin,
    network_energy,
    spin_to_logic,
    to_ising,
)
from .netlist import parse_netlist, parse_netlist_document, serialize
from .sat import CnfFormula, SatOutcome, compile_cnf, decide_sat, evaluate_cnf, extract_assignment, parse_dimacs
from .solver import AnnealSchedule, SolveResult, anneal, single_flip_delta, solve, solve_exact
from .verify import AMBIGUOUS, check_edc, check_gate, check_ising_equivalence, truth_table
