"""Ground-state search: exact enumeration and seeded simulated annealing.

The exact solver enumerates every assignment of the free cells, but does so
block by block.  Each cell's energy term depends only on the cell and its
coupling sources, so once a small conditioning set ``K`` of free cells is
fixed the remaining free cells fall apart into independent components.  Each
component is enumerated exhaustively for every configuration of the ``K``
cells on its boundary and the per-boundary minima are cached; the ``K`` cells
themselves are then enumerated exhaustively.  Nothing is pruned, so the
result is certified.  ``max_free_cells`` bounds the largest single block
(``|K|`` or a component together with its boundary).
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NetworkError, SolverLimitError
from .model import (
    DEFAULT_TOL,
    MISMATCH,
    QUADRATIC,
    CompiledNetwork,
    Network,
    cell_energy_array,
    check_model,
    compile_network,
    resolve,
)

DEFAULT_MAX_EXACT = 24
DEFAULT_MAX_STATES = 1 << 16
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a ground-state search.

    ``ground_states`` hold full assignments (clamped cells included) sorted
    lexicographically by sorted cell id.  ``gap`` is the distance to the next
    distinct energy level, or 0.0 when every state is degenerate.  Exact
    results list every ground state unless ``truncated`` is set.
    """

    min_energy: float
    ground_states: tuple[dict[str, int], ...]
    degeneracy: int | None
    gap: float | None
    method: str
    certified: bool
    truncated: bool = False


@dataclass(frozen=True)
class AnnealSchedule:
    t_initial: float = 2.0
    t_final: float = 0.02
    sweeps: int = 400
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if not (self.t_initial > 0 and self.t_final > 0):
            raise ValueError("temperatures must be positive")
        if self.t_final > self.t_initial:
            raise ValueError("schedule must be non-increasing: t_final > t_initial")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @classmethod
    def for_model(cls, model: str, **overrides) -> AnnealSchedule:
        # quadratic energy differences are ~1e-2 in normalized units, mismatch ones ~1
        base = {"t_initial": 0.2, "t_final": 2e-4} if model == QUADRATIC else {}
        base.update(overrides)
        return cls(**base)

    def temperatures(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.t_final])
        return np.geomspace(self.t_initial, self.t_final, self.sweeps)


# -- exact enumeration ------------------------------------------------------


@dataclass
class _Component:
    cells: list[int]
    boundary: list[int]  # conditioning cells this component's terms read
    terms: list[int]
    mins: np.ndarray = field(default=None)
    seconds: np.ndarray = field(default=None)
    argmins: list[np.ndarray] = field(default_factory=list)


def _interaction_graph(cn: CompiledNetwork, free: set[int]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {i: set() for i in free}
    for c in range(cn.n):
        members = [i for i in (c, *cn.incoming[c]) if i in free]
        for i in members:
            adj[i].update(m for m in members if m != i)
    return adj


def _components(nodes: set[int], adj: dict[int, set[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v in nodes and v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _boundary(comp: list[int], adj: dict[int, set[int]], K: set[int]) -> list[int]:
    return sorted({k for u in comp for k in adj[u] if k in K})


def _best_split(comp: list[int], adj: dict[int, set[int]], K: set[int]) -> int:
    """Cell of ``comp`` whose removal leaves the smallest largest piece."""
    members = set(comp)
    best_key, best = None, comp[0]
    for cand in comp:
        rest = members - {cand}
        largest = max((len(c) for c in _components(rest, adj)), default=0)
        key = (largest, -len(adj[cand] - K), cand)
        if best_key is None or key < best_key:
            best_key, best = key, cand
    return best


def _plan(cn, free: list[int], hint: list[int], limit: int):
    free_set = set(free)
    adj = _interaction_graph(cn, free_set)
    K = set(hint)
    while True:
        if len(K) > limit:
            raise SolverLimitError(
                f"exact enumeration needs more than {limit} conditioning cells; "
                "raise the exact limit or use annealing"
            )
        comps = _components(free_set - K, adj)
        blocks = [(len(c) + len(_boundary(c, adj, K)), c) for c in comps]
        worst = max(blocks, default=(0, None), key=lambda b: b[0])
        if worst[0] <= limit:
            return sorted(K), comps, adj
        K.add(_best_split(worst[1], adj, K))


def _term_energies(cn, c, columns, model, tol, rows):
    """Energy of term ``c`` given ``columns``: cell index -> value array or scalar."""
    flux = np.full(rows, cn.phi0 / 2 + cn.bias[c])
    for j in cn.incoming[c]:
        flux += cn.weights[c, j] * (1.0 - 2.0 * columns[j])
    s = np.broadcast_to(np.asarray(columns[c], dtype=float), (rows,))
    return cell_energy_array(flux, s, cn, c, model, tol)


def _bits(idx: np.ndarray, width: int) -> np.ndarray:
    return ((idx[:, None] >> np.arange(width)) & 1).astype(np.int8)


def _solve_component(cn, comp: _Component, kpos, model, tol):
    nb, nc = len(comp.boundary), len(comp.cells)
    nconf = 1 << nc
    mins = np.empty(1 << nb)
    seconds = np.empty(1 << nb)
    argmins = []
    clamps = {i: int(cn.clamp[i]) for i in range(cn.n) if cn.clamp[i] >= 0}
    for b in range(1 << nb):
        base = dict(clamps)
        for q, k in enumerate(comp.boundary):
            base[k] = (b >> q) & 1
        energies = np.empty(nconf)
        for start in range(0, nconf, _CHUNK):
            idx = np.arange(start, min(nconf, start + _CHUNK), dtype=np.int64)
            bits = _bits(idx, nc)
            columns = dict(base)
            for p, cell in enumerate(comp.cells):
                columns[cell] = bits[:, p]
            total = np.zeros(len(idx))
            for t in comp.terms:
                total += _term_energies(cn, t, columns, model, tol, len(idx))
            energies[start : start + len(idx)] = total
        lo = energies.min()
        ground = energies <= lo + tol
        above = energies[~ground]
        mins[b] = lo
        seconds[b] = above.min() if above.size else math.inf
        argmins.append(np.flatnonzero(ground))
    comp.mins, comp.seconds, comp.argmins = mins, seconds, argmins


def _lex_key(ids_sorted):
    return lambda a: tuple(a[c] for c in ids_sorted)


def solve_exact(
    net: Network,
    model: str = MISMATCH,
    max_free_cells: int = DEFAULT_MAX_EXACT,
    *,
    tol: float = DEFAULT_TOL,
    condition_on: Sequence[str] | None = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> SolveResult:
    """Certified minimum-energy states by exhaustive (block-wise) enumeration.

    ``condition_on`` suggests free cells to enumerate first, e.g. the
    variable cells of a compiled formula.  Raises :class:`SolverLimitError`
    if some block would exceed ``max_free_cells``.
    """
    check_model(model)
    cn = compile_network(net)
    index = {c: i for i, c in enumerate(cn.ids)}
    free = [i for i in range(cn.n) if cn.clamp[i] < 0]
    hint = []
    for cid in condition_on or ():
        if cid not in index:
            raise NetworkError(f"unknown cell {cid!r}")
        if cn.clamp[index[cid]] < 0:
            hint.append(index[cid])
    K, comp_cells, adj = _plan(cn, free, hint, max_free_cells)
    Kset = set(K)
    kpos = {k: q for q, k in enumerate(K)}
    owner = {}
    comps = []
    for cells in comp_cells:
        comp = _Component(cells, _boundary(cells, adj, Kset), [])
        for u in cells:
            owner[u] = len(comps)
        comps.append(comp)
    cut_terms = []
    for c in range(cn.n):
        loose = [i for i in (c, *cn.incoming[c]) if i in owner]
        if loose:
            comps[owner[loose[0]]].terms.append(c)
        else:
            cut_terms.append(c)
    for comp in comps:
        _solve_component(cn, comp, kpos, model, tol)

    clamps = {i: int(cn.clamp[i]) for i in range(cn.n) if cn.clamp[i] >= 0}
    nk = 1 << len(K)
    totals = np.empty(nk)
    bidx_all = [np.empty(nk, dtype=np.int64) for _ in comps]
    for start in range(0, nk, _CHUNK):
        idx = np.arange(start, min(nk, start + _CHUNK), dtype=np.int64)
        bits = _bits(idx, len(K)) if K else np.zeros((len(idx), 0), dtype=np.int8)
        columns: dict[int, object] = dict(clamps)
        for q, k in enumerate(K):
            columns[k] = bits[:, q]
        total = np.zeros(len(idx))
        for t in cut_terms:
            total += _term_energies(cn, t, columns, model, tol, len(idx))
        for ci, comp in enumerate(comps):
            b = np.zeros(len(idx), dtype=np.int64)
            for q, k in enumerate(comp.boundary):
                b |= bits[:, kpos[k]].astype(np.int64) << q
            bidx_all[ci][start : start + len(idx)] = b
            total += comp.mins[b]
        totals[start : start + len(idx)] = total

    gmin = float(totals.min())
    ground_k = np.flatnonzero(totals <= gmin + tol)
    excited = totals[totals > gmin + tol]
    first_excited = float(excited.min()) if excited.size else math.inf
    degeneracy = 0
    for k in ground_k:
        bump = math.inf
        count = 1
        for ci, comp in enumerate(comps):
            b = bidx_all[ci][k]
            bump = min(bump, comp.seconds[b] - comp.mins[b])
            count *= len(comp.argmins[b])
        first_excited = min(first_excited, totals[k] + bump)
        degeneracy += count
    gap = float(first_excited - gmin) if math.isfinite(first_excited) else 0.0

    states = []
    for k in ground_k:
        if len(states) >= max_states:
            break
        base = dict(clamps)
        for q, kk in enumerate(K):
            base[kk] = (int(k) >> q) & 1
        partial = [base]
        for ci, comp in enumerate(comps):
            choices = comp.argmins[bidx_all[ci][k]]
            grown = []
            for a in partial:
                for conf in choices:
                    b = dict(a)
                    for p, cell in enumerate(comp.cells):
                        b[cell] = (int(conf) >> p) & 1
                    grown.append(b)
                    if len(grown) >= max_states:
                        break
                if len(grown) >= max_states:
                    break
            partial = grown
        states.extend(partial[: max_states - len(states)])
    ground_states = [{cid: s[i] for i, cid in enumerate(cn.ids)} for s in states]
    ground_states.sort(key=_lex_key(sorted(cn.ids)))
    return SolveResult(
        min_energy=gmin,
        ground_states=tuple(ground_states),
        degeneracy=degeneracy,
        gap=gap,
        method="exact",
        certified=True,
        truncated=degeneracy > len(ground_states),
    )


# -- incremental evaluation --------------------------------------------------


class _Local:
    """Plain-Python view of a compiled network for single-flip updates."""

    def __init__(self, cn: CompiledNetwork, model: str, tol: float):
        self.model = model
        self.tol = tol
        self.phi0 = cn.phi0
        self.half = cn.phi0 / 2
        self.two_l = [2.0 * x for x in cn.inductance.tolist()]
        self.pen = cn.penalty.tolist()
        self.out = [[(t, float(cn.weights[t, i])) for t in cn.outgoing[i]] for i in range(cn.n)]

    def term(self, t: int, s: int, flux: float) -> float:
        if self.model == QUADRATIC:
            return (flux - s * self.phi0) ** 2 / self.two_l[t]
        if abs(flux - self.half) <= self.tol:
            mism = 0.0
        else:
            mism = 0.0 if (flux > self.half) == (s == 1) else 1.0
        return mism + self.pen[t][s]

    def delta(self, state: list[int], flux: list[float], i: int) -> float:
        s = state[i]
        d = self.term(i, 1 - s, flux[i]) - self.term(i, s, flux[i])
        shift = -2.0 * (1 - 2 * s)  # change of sigma_i
        for t, w in self.out[i]:
            f = flux[t]
            d += self.term(t, state[t], f + w * shift) - self.term(t, state[t], f)
        return d

    def flip(self, state: list[int], flux: list[float], i: int) -> None:
        shift = -2.0 * (1 - 2 * state[i])
        for t, w in self.out[i]:
            flux[t] += w * shift
        state[i] = 1 - state[i]


def single_flip_delta(
    net: Network, model: str, a: Mapping[str, int], c: str, tol: float = DEFAULT_TOL
) -> float:
    """Energy change from flipping free cell ``c``, touching only affected terms."""
    check_model(model)
    cn = compile_network(net)
    if c not in net:
        raise NetworkError(f"unknown cell {c!r}")
    if net.cell(c).clamp is not None:
        raise NetworkError(f"cell {c!r} is clamped")
    full = resolve(net, a)
    state = [full[cid] for cid in cn.ids]
    flux = cn.flux(np.array([state]))[0].tolist()
    return _Local(cn, model, tol).delta(state, flux, cn.ids.index(c))


# -- simulated annealing -------------------------------------------------------


def _anneal_run(cn: CompiledNetwork, model, tol, temps, seed_seq, from_zero: bool):
    rng = np.random.default_rng(seed_seq)
    local = _Local(cn, model, tol)
    free = np.flatnonzero(cn.clamp < 0)
    state = np.where(cn.clamp >= 0, cn.clamp, 0).astype(np.int64)
    if not from_zero and free.size:
        state[free] = rng.integers(0, 2, free.size)
    state_l = state.tolist()
    flux = cn.flux(state[None, :])[0].tolist()
    energy = float(cn.energies(state[None, :], model, tol)[0])
    best_e, best = energy, list(state_l)
    for T in temps:
        order = rng.permutation(free).tolist()
        draws = rng.random(len(order)).tolist()
        for i, u in zip(order, draws):
            d = local.delta(state_l, flux, i)
            if d <= 0 or u < math.exp(-d / T):
                local.flip(state_l, flux, i)
                energy += d
                if energy < best_e - tol:
                    best_e, best = energy, list(state_l)
    final = np.array([best])
    return float(cn.energies(final, model, tol)[0]), best


def anneal(
    net: Network,
    model: str = MISMATCH,
    schedule: AnnealSchedule | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> SolveResult:
    """Single-flip Metropolis annealing with independent seeded restarts.

    Restart ``r`` draws from the ``r``-th child of the master seed; restart
    0 starts from the all-zeros assignment.  The best restart wins, ties to
    the lowest index, so the result does not depend on ``workers``.
    """
    check_model(model)
    schedule = schedule or AnnealSchedule.for_model(model)
    cn = compile_network(net)
    temps = schedule.temperatures()
    children = np.random.SeedSequence(schedule.seed).spawn(schedule.restarts)
    jobs = [(cn, model, tol, temps, child, r == 0) for r, child in enumerate(children)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda job: _anneal_run(*job), jobs))
    else:
        runs = [_anneal_run(*job) for job in jobs]
    best_e, best = runs[0]
    for e, s in runs[1:]:
        if e < best_e - tol:
            best_e, best = e, s
    state = {cid: int(v) for cid, v in zip(cn.ids, best)}
    return SolveResult(
        min_energy=best_e,
        ground_states=(state,),
        degeneracy=None,
        gap=None,
        method="anneal",
        certified=False,
    )


def solve(
    net: Network,
    model: str = MISMATCH,
    max_free_cells: int = DEFAULT_MAX_EXACT,
    schedule: AnnealSchedule | None = None,
    **kwargs,
) -> SolveResult:
    """Exact when feasible, otherwise annealing."""
    try:
        return solve_exact(net, model, max_free_cells, **kwargs)
    except SolverLimitError:
        return anneal(net, model, schedule, tol=kwargs.get("tol", DEFAULT_TOL))
