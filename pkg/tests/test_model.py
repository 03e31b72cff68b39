import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluxlogic import (
    AssignmentError,
    Cell,
    FluxConstants,
    IsingModel,
    Network,
    NetworkError,
    cell_applied_flux,
    cell_energy_mismatch,
    cell_energy_quadratic,
    ising_energy,
    logic_to_spin,
    network_energy,
    spin_to_logic,
    to_ising,
)
from fluxlogic.model import all_assignments, compile_network, resolve
from oracles import random_network


def nand_net(delta=0.1, d=0.05):
    net = Network()
    for name in ("i1", "i2"):
        net.add_cell(name, role="input")
    net.add_cell("o1", bias=d)
    net.add_cell("o2", bias=-d)
    for i in ("i1", "i2"):
        for o in ("o1", "o2"):
            net.add_coupling(i, o, delta)
    return net


def inverter_net(delta=0.1):
    net = Network()
    net.add_cell("a")
    net.add_cell("b")
    net.add_coupling("a", "b", delta)
    return net


# -- types ---------------------------------------------------------------


def test_spin_mapping_round_trips():
    assert logic_to_spin(0) == 1 and logic_to_spin(1) == -1
    for s in (0, 1):
        assert spin_to_logic(logic_to_spin(s)) == s
    with pytest.raises(ValueError):
        logic_to_spin(2)


@pytest.mark.parametrize("phi0, L", [(0.0, 1.0), (1.0, -1.0)])
def test_flux_constants_reject_non_positive(phi0, L):
    with pytest.raises(NetworkError):
        FluxConstants(phi0, L)


def test_cell_invariants():
    with pytest.raises(NetworkError):
        Cell("a", inductance=0.0)
    with pytest.raises(NetworkError):
        Cell("a", clamp=2)
    net = Network()
    with pytest.raises(NetworkError, match="phi0/2"):
        net.add_cell("a", bias=0.5)
    net.add_cell("a", bias=0.49)


def test_coupling_invariants():
    net = inverter_net()
    with pytest.raises(NetworkError, match="self-coupling"):
        net.add_coupling("a", "a", 0.1)
    with pytest.raises(NetworkError, match="unknown"):
        net.add_coupling("a", "zz", 0.1)
    net.add_coupling("a", "b", 0.05)
    (cp,) = net.couplings
    assert cp.strength == pytest.approx(0.15)


def test_assignment_must_be_total():
    net = inverter_net()
    with pytest.raises(AssignmentError):
        resolve(net, {"a": 0})
    net.clamp("a", 1)
    assert resolve(net, {"b": 0}) == {"a": 1, "b": 0}
    with pytest.raises(AssignmentError):
        resolve(net, {"a": 0, "b": 0})


def test_free_cell_count():
    net = nand_net()
    net.clamp("i1", 0)
    assert len(net.free_cells) == len(net) - len(net.clamps) == 3


# -- cell_applied_flux / energies -------------------------------------------


def test_applied_flux_isolated_cell():
    net = Network()
    net.add_cell("a")
    assert cell_applied_flux(net, {"a": 0}, "a") == 0.5


def test_applied_flux_nand_rows():
    net = nand_net()
    assert cell_applied_flux(net, {"i1": 0, "i2": 0, "o1": 0, "o2": 0}, "o1") == pytest.approx(0.75)
    assert cell_applied_flux(net, {"i1": 1, "i2": 1, "o1": 0, "o2": 0}, "o1") == pytest.approx(0.35)


def test_applied_flux_unknown_cell():
    with pytest.raises(NetworkError):
        cell_applied_flux(inverter_net(), {"a": 0, "b": 0}, "q")


def test_quadratic_energy_values():
    net = Network()
    net.add_cell("a")
    assert cell_energy_quadratic(net, {"a": 0}, "a") == 0.125
    assert cell_energy_quadratic(net, {"a": 1}, "a") == 0.125
    # applied flux 0.75 via a bias of 0.25
    net = Network()
    net.add_cell("a", bias=0.25)
    assert cell_energy_quadratic(net, {"a": 1}, "a") == pytest.approx(0.03125)
    assert cell_energy_quadratic(net, {"a": 0}, "a") == pytest.approx(0.28125)


def test_mismatch_energy_values():
    net = Network()
    net.add_cell("a", bias=0.25)
    assert cell_energy_mismatch(net, {"a": 1}, "a") == 0
    assert cell_energy_mismatch(net, {"a": 0}, "a") == 1
    net = Network()
    net.add_cell("a")
    assert cell_energy_mismatch(net, {"a": 0}, "a") == cell_energy_mismatch(net, {"a": 1}, "a") == 0
    inv = inverter_net()
    for v in (0, 1):
        assert cell_energy_mismatch(inv, {"a": v, "b": 1 - v}, "b") == 0


def test_network_energy_examples():
    assert network_energy(Network(), {}, "quadratic") == 0
    assert network_energy(Network(), {}, "mismatch") == 0
    single = Network()
    single.add_cell("a")
    assert network_energy(single, {"a": 0}, "quadratic") == network_energy(single, {"a": 1}, "quadratic") == 0.125
    inv = inverter_net()
    assert network_energy(inv, {"a": 0, "b": 1}, "quadratic") == pytest.approx(0.205)
    assert network_energy(inv, {"a": 0, "b": 0}, "quadratic") == pytest.approx(0.305)


def test_network_energy_includes_penalties():
    net = Network()
    net.add_cell("a", penalty=(0.5, 0.0))
    assert network_energy(net, {"a": 0}, "mismatch") == 0.5
    assert network_energy(net, {"a": 1}, "mismatch") == 0.0
    assert network_energy(net, {"a": 0}, "quadratic") == 0.125


def test_compiled_energies_match_scalar():
    rng = random.Random(5)
    for _ in range(20):
        net = random_network(rng, max_cells=7)
        cn = compile_network(net)
        for model in ("quadratic", "mismatch"):
            for a in all_assignments(net):
                vec = cn.energies([[a[c] for c in cn.ids]], model)[0]
                assert vec == pytest.approx(network_energy(net, a, model), abs=1e-12)


# -- Ising reduction ----------------------------------------------------------


def test_to_ising_single_biased_cell():
    net = Network()
    net.add_cell("a", bias=0.2)
    m = to_ising(net)
    assert m.h["a"] == pytest.approx(0.1)
    assert m.constant == pytest.approx(0.145)
    assert m.J == {}
    assert ising_energy(m, {"a": 0}) == pytest.approx(0.245)
    assert ising_energy(m, {"a": 1}) == pytest.approx(0.045)


def test_to_ising_unbiased_cell_is_free():
    net = Network()
    net.add_cell("a")
    assert to_ising(net).h["a"] == 0


def test_ising_energy_trivial_models():
    m = IsingModel(("x",), {}, {}, 1.5)
    assert ising_energy(m, {"x": 0}) == 1.5
    m = IsingModel(("x",), {"x": 1.0}, {}, 0.0)
    assert ising_energy(m, {"x": 0}) == 1.0
    with pytest.raises(AssignmentError):
        ising_energy(m, {})


def test_ising_pairs_canonical():
    with pytest.raises(NetworkError):
        IsingModel(("a", "b"), {}, {("b", "a"): 1.0})
    with pytest.raises(NetworkError):
        IsingModel(("a",), {}, {("a", "a"): 1.0})


def test_nand_nor_reduction_agrees_on_all_assignments():
    net = nand_net()
    m = to_ising(net)
    for bits in itertools.product((0, 1), repeat=4):
        a = dict(zip(("i1", "i2", "o1", "o2"), bits))
        assert ising_energy(m, a) == pytest.approx(network_energy(net, a, "quadratic"), abs=1e-12)


# -- properties -----------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_energy_non_negative(seed):
    net = random_network(random.Random(seed), max_cells=6)
    for a in all_assignments(net):
        assert network_energy(net, a, "quadratic") >= 0
        assert network_energy(net, a, "mismatch") >= 0


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_half_quantum_degeneracy(seed):
    rng = random.Random(seed)
    net = Network()
    net.add_cell("s")
    net.add_cell("t")
    w = rng.uniform(0.01, 0.2)
    # couplings from s and t into c cancel when s != t, leaving flux exactly phi0/2
    net.add_cell("c")
    net.add_coupling("s", "c", w)
    net.add_coupling("t", "c", w)
    for v in (0, 1):
        a0 = {"s": 0, "t": 1, "c": v}
        here = cell_energy_quadratic(net, a0, "c")
        assert here == pytest.approx(cell_energy_quadratic(net, {**a0, "c": 1 - v}, "c"), abs=1e-12)
        assert cell_energy_mismatch(net, a0, "c") == 0


def _bias_flipped(net):
    other = Network(net.constants)
    for c in net.cells:
        other.add_cell(c.id, bias=-c.bias, inductance=c.inductance)
    for cp in net.couplings:
        other.add_coupling(cp.source, cp.target, cp.strength)
    return other


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_spin_flip_covariance(seed):
    # negating biases and flipping every logic value maps delta_c -> -delta_c
    net = random_network(random.Random(seed), max_cells=6)
    flipped = _bias_flipped(net)
    for a in all_assignments(net):
        b = {k: 1 - v for k, v in a.items()}
        assert network_energy(flipped, b, "quadratic") == pytest.approx(network_energy(net, a, "quadratic"))


def test_spin_flip_with_negated_couplings_is_not_a_symmetry():
    net = inverter_net()
    other = Network()
    other.add_cell("a")
    other.add_cell("b")
    other.add_coupling("a", "b", -0.1)
    e = network_energy(net, {"a": 0, "b": 1}, "quadratic")
    assert network_energy(other, {"a": 1, "b": 0}, "quadratic") != pytest.approx(e)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_exact_reduction_random(seed):
    net = random_network(random.Random(seed), max_cells=8)
    m = to_ising(net)
    table = [(network_energy(net, a, "quadratic"), ising_energy(m, a)) for a in all_assignments(net)]
    for e_flux, e_ising in table:
        assert abs(e_flux - e_ising) <= 1e-9
    lo_f = min(t[0] for t in table)
    lo_i = min(t[1] for t in table)
    assert [e <= lo_f + 1e-9 for e, _ in table] == [e <= lo_i + 1e-9 for _, e in table]


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_local_preference_consistency(seed):
    net = random_network(random.Random(seed), max_cells=5)
    for a in all_assignments(net):
        for c in net.cell_ids:
            here = cell_energy_quadratic(net, a, c)
            there = cell_energy_quadratic(net, {**a, c: 1 - a[c]}, c)
            assert (cell_energy_mismatch(net, a, c) == 0) == (here <= there + 1e-9)
