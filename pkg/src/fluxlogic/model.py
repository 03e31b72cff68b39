"""Cells, couplings, networks and their two energy functionals.

A cell is a flux-biased superconducting double ring holding one bit.  Its
logic value ``s`` is the number of trapped flux quanta (0 or 1); the spin
view is ``sigma = 1 - 2*s`` so that logic 0 <-> +1 and logic 1 <-> -1.

The applied flux threading cell ``c`` is::

    phi_c = phi0/2 + bias_c + sum_{j -> c} strength_jc * sigma_j

and the quadratic (inductive) energy is ``(phi_c - s_c*phi0)**2 / (2*L_c)``.
The mismatch energy is 1 when ``s_c`` is not the locally preferred branch of
the quadratic energy, plus any explicit degeneracy-lifting penalty.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import AssignmentError, NetworkError

QUADRATIC = "quadratic"
MISMATCH = "mismatch"
MODELS = (QUADRATIC, MISMATCH)

ROLES = ("input", "output", "internal")

DEFAULT_TOL = 1e-9


def logic_to_spin(s: int) -> int:
    if s not in (0, 1):
        raise ValueError(f"logic value must be 0 or 1, got {s!r}")
    return 1 - 2 * s


def spin_to_logic(sigma: int) -> int:
    if sigma not in (1, -1):
        raise ValueError(f"spin must be +1 or -1, got {sigma!r}")
    return (1 - sigma) // 2


def check_model(model: str) -> str:
    if model not in MODELS:
        raise ValueError(f"unknown energy model {model!r}; expected one of {MODELS}")
    return model


@dataclass(frozen=True)
class FluxConstants:
    phi0: float = 1.0
    default_inductance: float = 1.0

    def __post_init__(self):
        if not self.phi0 > 0:
            raise NetworkError(f"phi0 must be positive, got {self.phi0}")
        if not self.default_inductance > 0:
            raise NetworkError(f"inductance must be positive, got {self.default_inductance}")


@dataclass(frozen=True)
class Cell:
    """One double-ring flux cell.

    ``bias`` is the offset of the external flux from phi0/2.  ``penalty``
    holds the mismatch-model energy added when the cell holds logic 0 or 1
    respectively; it is how a mismatch-model EDL lifts degeneracy and is
    ignored by the quadratic model.
    """

    id: str
    bias: float = 0.0
    inductance: float = 1.0
    clamp: int | None = None
    role: str = "internal"
    penalty: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.id or any(ch.isspace() for ch in self.id):
            raise NetworkError(f"invalid cell id {self.id!r}")
        if not self.inductance > 0:
            raise NetworkError(f"cell {self.id}: inductance must be positive")
        if self.clamp not in (None, 0, 1):
            raise NetworkError(f"cell {self.id}: clamp must be 0, 1 or None")
        if self.role not in ROLES:
            raise NetworkError(f"cell {self.id}: unknown role {self.role!r}")
        if min(self.penalty) < 0:
            raise NetworkError(f"cell {self.id}: penalties must be non-negative")


@dataclass(frozen=True)
class Coupling:
    source: str
    target: str
    strength: float


@dataclass(frozen=True)
class GateHandle:
    """Reporting record for a gate built into a network."""

    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    internals: tuple[str, ...] = ()


class Network:
    """Mutable builder for a cell network.

    Builders mutate a network in place; solvers and verifiers treat it as
    read-only and take snapshots via :func:`compile_network`.
    """

    def __init__(self, constants: FluxConstants | None = None):
        self.constants = constants or FluxConstants()
        self._cells: dict[str, Cell] = {}
        self._couplings: dict[tuple[str, str], float] = {}
        self.gates: list[GateHandle] = []
        self._counter = itertools.count()

    # -- construction -------------------------------------------------

    def fresh_id(self, prefix: str = "c") -> str:
        while True:
            cid = f"{prefix}{next(self._counter)}"
            if cid not in self._cells:
                return cid

    def add_cell(
        self,
        id: str | None = None,
        *,
        bias: float = 0.0,
        inductance: float | None = None,
        clamp: int | None = None,
        role: str = "internal",
        penalty: tuple[float, float] = (0.0, 0.0),
        prefix: str = "c",
    ) -> str:
        cid = id if id is not None else self.fresh_id(prefix)
        if cid in self._cells:
            raise NetworkError(f"duplicate cell id {cid!r}")
        if inductance is None:
            inductance = self.constants.default_inductance
        cell = Cell(cid, float(bias), float(inductance), clamp, role, tuple(map(float, penalty)))
        self._check_bias(cell)
        self._cells[cid] = cell
        return cid

    def _check_bias(self, cell: Cell) -> None:
        if not abs(cell.bias) < self.constants.phi0 / 2:
            raise NetworkError(
                f"cell {cell.id}: |bias| = {abs(cell.bias):g} must stay below phi0/2 = "
                f"{self.constants.phi0 / 2:g}"
            )

    def _replace(self, cid: str, **changes) -> None:
        cell = dataclasses.replace(self.cell(cid), **changes)
        self._check_bias(cell)
        self._cells[cid] = cell

    def set_bias(self, cid: str, bias: float) -> None:
        self._replace(cid, bias=float(bias))

    def set_role(self, cid: str, role: str) -> None:
        self._replace(cid, role=role)

    def add_penalty(self, cid: str, value: int, amount: float) -> None:
        pen = list(self.cell(cid).penalty)
        pen[value] += float(amount)
        self._replace(cid, penalty=tuple(pen))

    def clamp(self, cid: str, value: int | None) -> None:
        self._replace(cid, clamp=value)

    def add_coupling(self, source: str, target: str, strength: float) -> None:
        """Add a directed coupling; parallel couplings are summed."""
        for cid in (source, target):
            if cid not in self._cells:
                raise NetworkError(f"coupling references unknown cell {cid!r}")
        if source == target:
            raise NetworkError(f"self-coupling on cell {source!r}")
        key = (source, target)
        self._couplings[key] = self._couplings.get(key, 0.0) + float(strength)

    def copy(self) -> Network:
        other = Network(self.constants)
        other._cells = dict(self._cells)
        other._couplings = dict(self._couplings)
        other.gates = list(self.gates)
        # keep generated ids unique across the copy
        other._counter = itertools.count(len(self._cells) + len(self.gates))
        return other

    def with_clamps(self, clamps: Mapping[str, int]) -> Network:
        other = self.copy()
        for cid, value in clamps.items():
            other.clamp(cid, value)
        return other

    # -- queries ------------------------------------------------------

    def __contains__(self, cid: str) -> bool:
        return cid in self._cells

    def __len__(self) -> int:
        return len(self._cells)

    def cell(self, cid: str) -> Cell:
        try:
            return self._cells[cid]
        except KeyError:
            raise NetworkError(f"unknown cell {cid!r}") from None

    @property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(self._cells.values())

    @property
    def cell_ids(self) -> tuple[str, ...]:
        return tuple(self._cells)

    @property
    def couplings(self) -> tuple[Coupling, ...]:
        return tuple(Coupling(s, t, w) for (s, t), w in self._couplings.items())

    @property
    def free_cells(self) -> tuple[str, ...]:
        return tuple(c.id for c in self._cells.values() if c.clamp is None)

    @property
    def clamps(self) -> dict[str, int]:
        return {c.id: c.clamp for c in self._cells.values() if c.clamp is not None}

    def cells_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(c.id for c in self._cells.values() if c.role == role)

    def incoming(self, cid: str) -> list[tuple[str, float]]:
        self.cell(cid)
        return [(s, w) for (s, t), w in self._couplings.items() if t == cid]

    def outgoing(self, cid: str) -> list[tuple[str, float]]:
        self.cell(cid)
        return [(t, w) for (s, t), w in self._couplings.items() if s == cid]

    def structure(self) -> tuple:
        """Canonical, order-independent description used for equality."""
        cells = tuple(sorted(dataclasses.astuple(c) for c in self._cells.values()))
        couplings = tuple(sorted(self._couplings.items()))
        return self.constants, cells, couplings

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self.structure() == other.structure()

    __hash__ = None

    def __repr__(self) -> str:
        return f"Network({len(self._cells)} cells, {len(self._couplings)} couplings)"


# -- assignments ---------------------------------------------------------


def resolve(net: Network, a: Mapping[str, int]) -> dict[str, int]:
    """Complete an assignment over every cell; clamped cells read their clamp."""
    out: dict[str, int] = {}
    for cell in net.cells:
        if cell.clamp is not None:
            given = a.get(cell.id, cell.clamp)
            if given != cell.clamp:
                raise AssignmentError(f"cell {cell.id!r} is clamped to {cell.clamp}, got {given}")
            out[cell.id] = cell.clamp
        else:
            try:
                value = a[cell.id]
            except KeyError:
                raise AssignmentError(f"assignment is missing free cell {cell.id!r}") from None
            if value not in (0, 1):
                raise AssignmentError(f"cell {cell.id!r}: logic value must be 0 or 1, got {value!r}")
            out[cell.id] = int(value)
    unknown = set(a) - set(out)
    if unknown:
        raise AssignmentError(f"assignment names unknown cells {sorted(unknown)}")
    return out


# -- scalar energies (reference path) -------------------------------------


def cell_applied_flux(net: Network, a: Mapping[str, int], c: str) -> float:
    cell = net.cell(c)
    full = resolve(net, a)
    flux = net.constants.phi0 / 2 + cell.bias
    for src, w in net.incoming(c):
        flux += w * logic_to_spin(full[src])
    return flux


def _quadratic(flux: float, s: int, phi0: float, inductance: float) -> float:
    return (flux - s * phi0) ** 2 / (2 * inductance)


def cell_energy_quadratic(net: Network, a: Mapping[str, int], c: str) -> float:
    flux = cell_applied_flux(net, a, c)
    s = resolve(net, a)[c]
    return _quadratic(flux, s, net.constants.phi0, net.cell(c).inductance)


def preferred_value(flux: float, phi0: float, tol: float = DEFAULT_TOL) -> int | None:
    """Locally preferred logic value for an applied flux; None on a tie."""
    if abs(flux - phi0 / 2) <= tol:
        return None
    return 1 if flux > phi0 / 2 else 0


def cell_energy_mismatch(net: Network, a: Mapping[str, int], c: str, tol: float = DEFAULT_TOL) -> float:
    flux = cell_applied_flux(net, a, c)
    pref = preferred_value(flux, net.constants.phi0, tol)
    s = resolve(net, a)[c]
    return 0.0 if pref is None or pref == s else 1.0


def cell_penalty(net: Network, a: Mapping[str, int], c: str) -> float:
    return net.cell(c).penalty[resolve(net, a)[c]]


def network_energy(net: Network, a: Mapping[str, int], model: str = MISMATCH, tol: float = DEFAULT_TOL) -> float:
    """Total energy: sum of per-cell energies (plus EDL penalties for mismatch)."""
    check_model(model)
    full = resolve(net, a)
    phi0 = net.constants.phi0
    flux = {cell.id: phi0 / 2 + cell.bias for cell in net.cells}
    for cp in net.couplings:
        flux[cp.target] += cp.strength * logic_to_spin(full[cp.source])
    total = 0.0
    for cell in net.cells:
        s = full[cell.id]
        if model == QUADRATIC:
            total += _quadratic(flux[cell.id], s, phi0, cell.inductance)
        else:
            pref = preferred_value(flux[cell.id], phi0, tol)
            total += (0.0 if pref is None or pref == s else 1.0) + cell.penalty[s]
    return total


# -- Ising reduction --------------------------------------------------------


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class IsingModel:
    """E = constant + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j over spins."""

    cells: tuple[str, ...]
    h: dict[str, float] = field(default_factory=dict)
    J: dict[tuple[str, str], float] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        for i, j in self.J:
            if i == j:
                raise NetworkError(f"Ising self-pair on {i!r}")
            if not i < j:
                raise NetworkError(f"Ising pair {(i, j)} is not in canonical order")


def to_ising(net: Network) -> IsingModel:
    """Exact expansion of the quadratic flux energy in spin variables.

    Each cell contributes ``(sigma_c*phi0/2 + delta_c)**2 / (2L)`` with
    ``delta_c = bias_c + sum_j w_jc sigma_j``.  Squares of spins are 1.
    """
    phi0 = net.constants.phi0
    h = {cid: 0.0 for cid in net.cell_ids}
    J: dict[tuple[str, str], float] = {}
    constant = 0.0

    def add_j(i, j, v):
        key = _pair(i, j)
        J[key] = J.get(key, 0.0) + v

    for cell in net.cells:
        c, b, L = cell.id, cell.bias, cell.inductance
        incoming = net.incoming(c)
        constant += (phi0**2 / 4 + b**2 + sum(w * w for _, w in incoming)) / (2 * L)
        h[c] += phi0 * b / (2 * L)
        for j, w in incoming:
            h[j] += b * w / L
            add_j(c, j, phi0 * w / (2 * L))
        for (j, wj), (k, wk) in itertools.combinations(incoming, 2):
            add_j(j, k, wj * wk / L)
    J = {k: v for k, v in J.items() if v != 0.0}
    return IsingModel(net.cell_ids, h, J, constant)


def ising_energy(m: IsingModel, a: Mapping[str, int]) -> float:
    """Energy of a logic assignment (total over ``m.cells``) under an Ising model."""
    missing = [c for c in m.cells if c not in a]
    if missing:
        raise AssignmentError(f"assignment is missing cells {missing}")
    spin = {c: logic_to_spin(a[c]) for c in m.cells}
    e = m.constant
    for c, v in m.h.items():
        e += v * spin[c]
    for (i, j), v in m.J.items():
        e += v * spin[i] * spin[j]
    return e


def ising_arrays(m: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    """Dense (h, J) with J upper-triangular, indexed like ``m.cells``."""
    index = {c: i for i, c in enumerate(m.cells)}
    n = len(m.cells)
    h = np.zeros(n)
    J = np.zeros((n, n))
    for c, v in m.h.items():
        h[index[c]] = v
    for (i, j), v in m.J.items():
        J[index[i], index[j]] = v
    return h, J


# -- compiled snapshot used by the solvers ---------------------------------


@dataclass(frozen=True, eq=False)
class CompiledNetwork:
    """Array snapshot of a network.  Index order is ``ids``."""

    ids: tuple[str, ...]
    phi0: float
    bias: np.ndarray
    inductance: np.ndarray
    penalty: np.ndarray  # shape (n, 2)
    clamp: np.ndarray  # -1 for free cells
    weights: np.ndarray  # weights[target, source]
    incoming: tuple[tuple[int, ...], ...]
    outgoing: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.ids)

    def flux(self, states: np.ndarray) -> np.ndarray:
        """Applied flux for a batch of logic states of shape (m, n)."""
        sigma = 1.0 - 2.0 * np.asarray(states, dtype=float)
        return self.phi0 / 2 + self.bias + sigma @ self.weights.T

    def energies(self, states: np.ndarray, model: str, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Total energy for a batch of full logic states of shape (m, n)."""
        states = np.atleast_2d(np.asarray(states))
        flux = self.flux(states)
        return cell_energy_array(flux, states, self, np.arange(self.n), model, tol).sum(axis=1)


def cell_energy_array(flux, states, cn: CompiledNetwork, idx, model: str, tol: float) -> np.ndarray:
    """Per-cell energies given matching flux and state arrays for cells ``idx``."""
    s = np.asarray(states, dtype=float)
    if model == QUADRATIC:
        return (flux - s * cn.phi0) ** 2 / (2 * cn.inductance[idx])
    half = cn.phi0 / 2
    tie = np.abs(flux - half) <= tol
    pref = (flux > half).astype(float)
    mism = np.where(tie | (pref == s), 0.0, 1.0)
    pen = cn.penalty[idx]
    return mism + np.where(s > 0.5, pen[..., 1], pen[..., 0])


def compile_network(net: Network) -> CompiledNetwork:
    ids = net.cell_ids
    index = {c: i for i, c in enumerate(ids)}
    n = len(ids)
    weights = np.zeros((n, n))
    incoming: list[list[int]] = [[] for _ in range(n)]
    outgoing: list[list[int]] = [[] for _ in range(n)]
    for cp in net.couplings:
        s, t = index[cp.source], index[cp.target]
        weights[t, s] = cp.strength
        incoming[t].append(s)
        outgoing[s].append(t)
    cells = net.cells
    return CompiledNetwork(
        ids=ids,
        phi0=net.constants.phi0,
        bias=np.array([c.bias for c in cells], dtype=float),
        inductance=np.array([c.inductance for c in cells], dtype=float),
        penalty=np.array([c.penalty for c in cells], dtype=float).reshape(n, 2),
        clamp=np.array([-1 if c.clamp is None else c.clamp for c in cells], dtype=np.int8),
        weights=weights,
        incoming=tuple(tuple(x) for x in incoming),
        outgoing=tuple(tuple(x) for x in outgoing),
    )


def all_assignments(net: Network) -> Iterable[dict[str, int]]:
    """Every total assignment of the free cells, clamps resolved (small nets only)."""
    free = net.free_cells
    clamps = net.clamps
    for bits in itertools.product((0, 1), repeat=len(free)):
        a = dict(clamps)
        a.update(zip(free, bits))
        yield a
