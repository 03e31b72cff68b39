"""Gate constructors: inverter/fan-out, NAND/NOR, SAND, OR, wire, EDL, DEDLU, 3CE.

Every constructor mutates ``net`` in place, returns the ids of the cells it
created for the caller to wire onward, and appends a :class:`GateHandle` to
``net.gates``.  Couplings are directed from gate inputs to gate outputs only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NetworkError, ParameterError
from .model import MISMATCH, QUADRATIC, GateHandle, Network, check_model

GATE_KINDS = ("INV", "FANOUT", "NANDNOR", "SAND", "OR", "WIRE", "EDL", "DEDLU", "CE3")


def window_violations(delta: float, d_bias: float, phi0: float = 1.0) -> list[str]:
    """Inequalities of the NAND/NOR operating window D < 2*delta < phi0/2 - D that fail."""
    failed = []
    if not d_bias < 2 * delta:
        failed.append(f"D < 2*delta fails: D={d_bias:g}, 2*delta={2 * delta:g}")
    if not 2 * delta < phi0 / 2 - d_bias:
        failed.append(f"2*delta < phi0/2 - D fails: 2*delta={2 * delta:g}, phi0/2-D={phi0 / 2 - d_bias:g}")
    return failed


@dataclass(frozen=True)
class GateParams:
    """Gate parameters in normalized flux units.

    ``dedlu_strength`` is the mismatch-model decision penalty; ``dedlu_flux``
    is the detuning used for a quadratic-model DEDLU.  Set
    ``enforce_window=False`` only to study deliberately broken gates.
    """

    delta: float = 0.1
    d_bias: float = 0.05
    edl_strength: float = 0.05
    dedlu_strength: float = 0.5
    dedlu_flux: float = 0.05
    phi0: float = 1.0
    enforce_window: bool = True

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if not self.d_bias > 0:
            raise ParameterError(f"D must be positive, got {self.d_bias}")
        if not self.d_bias < self.phi0 / 2:
            raise ParameterError(f"D must stay below phi0/2, got {self.d_bias}")
        if self.enforce_window:
            failed = window_violations(self.delta, self.d_bias, self.phi0)
            if failed:
                raise ParameterError("operating window violated: " + "; ".join(failed))
        if not self.edl_strength > 0:
            raise ParameterError("edl_strength must be positive")
        if not 0 < self.dedlu_strength < 1:
            raise ParameterError(
                f"dedlu_strength must lie in (0, 1) mismatch units, got {self.dedlu_strength}"
            )
        # a larger detuning would override the gate driving the decision cell
        if not 0 < self.dedlu_flux < self.delta:
            raise ParameterError(f"dedlu_flux must lie in (0, delta), got {self.dedlu_flux}")

    @classmethod
    def balanced(cls, delta: float = 0.1, phi0: float = 1.0, **kwargs) -> GateParams:
        """Parameters under which gates cascade correctly in the quadratic model.

        A NAND/NOR pair's quadratic residual energy is lower when its inputs
        agree than when they differ, by ``(phi0*(2*delta - D) - 4*delta**2)/L``.
        That pull acts back on the cells driving the pair and can flip them.
        ``D = 2*delta - 4*delta**2/phi0`` makes it vanish, so every row of
        the pair costs the same.  The NAND energy margin on row (1, 1) is
        then ``4*delta**2/L`` and the DEDLU flux is set to half the largest
        value that keeps the decision penalty below it.
        """
        d_bias = 2 * delta - 4 * delta**2 / phi0
        kwargs.setdefault("dedlu_flux", delta**2 / (phi0 / 2 - delta))
        return cls(delta=delta, d_bias=d_bias, phi0=phi0, **kwargs)


DEFAULT_PARAMS = GateParams()


def _params(net: Network, p: GateParams | None) -> GateParams:
    p = p or DEFAULT_PARAMS
    if p.phi0 != net.constants.phi0:
        raise ParameterError(f"params phi0={p.phi0} does not match network phi0={net.constants.phi0}")
    return p


def _require(net: Network, *cids: str) -> None:
    for cid in cids:
        if cid not in net:
            raise NetworkError(f"unknown cell {cid!r}")


def _sub(name: str | None, suffix: str) -> str | None:
    return None if name is None else f"{name}~{suffix}"


def _inv(net, src, p, name=None, role="output", prefix="inv"):
    out = net.add_cell(name, role=role, prefix=prefix)
    net.add_coupling(src, out, p.delta)
    return out


def _nandnor(net, i1, i2, p, names=(None, None), role="output"):
    o_nand = net.add_cell(names[0], bias=p.d_bias, role=role, prefix="nand")
    o_nor = net.add_cell(names[1], bias=-p.d_bias, role=role, prefix="nor")
    for src in (i1, i2):
        net.add_coupling(src, o_nand, p.delta)
        net.add_coupling(src, o_nor, p.delta)
    return o_nand, o_nor


def add_input_cell(net: Network, name: str | None = None) -> str:
    return net.add_cell(name, role="input", prefix="in")


def inverter(
    net: Network,
    input: str,
    fanout: int = 1,
    p: GateParams | None = None,
    names: list[str] | None = None,
) -> list[str]:
    """Inverter with ``fanout`` output cells, each driven by one coupling."""
    p = _params(net, p)
    _require(net, input)
    if names is not None:
        fanout = len(names)
    if fanout < 1:
        raise ParameterError(f"fanout must be at least 1, got {fanout}")
    names = names or [None] * fanout
    outs = [_inv(net, input, p, name) for name in names]
    net.gates.append(GateHandle("INV" if fanout == 1 else "FANOUT", (input,), tuple(outs)))
    return outs


def wire(net: Network, input: str, p: GateParams | None = None, name: str | None = None) -> str:
    """Two chained inverters: the output copies the input."""
    p = _params(net, p)
    _require(net, input)
    mid = _inv(net, input, p, _sub(name, "mid"), role="internal", prefix="w")
    out = _inv(net, mid, p, name, prefix="w")
    net.gates.append(GateHandle("WIRE", (input,), (out,), (mid,)))
    return out


def nand_nor(
    net: Network,
    i1: str,
    i2: str,
    p: GateParams | None = None,
    names: tuple[str | None, str | None] = (None, None),
) -> tuple[str, str]:
    """Dual gate: the +D output computes NAND, the -D output computes NOR."""
    p = _params(net, p)
    _require(net, i1, i2)
    o_nand, o_nor = _nandnor(net, i1, i2, p, names)
    net.gates.append(GateHandle("NANDNOR", (i1, i2), (o_nand, o_nor)))
    return o_nand, o_nor


def sand(net: Network, i1: str, i2: str, p: GateParams | None = None, name: str | None = None) -> str:
    """AND gate built as NAND followed by an inverter."""
    p = _params(net, p)
    _require(net, i1, i2)
    o_nand, o_nor = _nandnor(net, i1, i2, p, (_sub(name, "nand"), _sub(name, "nor")), role="internal")
    out = _inv(net, o_nand, p, name, prefix="and")
    net.gates.append(GateHandle("SAND", (i1, i2), (out,), (o_nand, o_nor)))
    return out


def or_gate(net: Network, i1: str, i2: str, p: GateParams | None = None, name: str | None = None) -> str:
    """OR gate built as NOR followed by an inverter."""
    p = _params(net, p)
    _require(net, i1, i2)
    o_nand, o_nor = _nandnor(net, i1, i2, p, (_sub(name, "nand"), _sub(name, "nor")), role="internal")
    out = _inv(net, o_nor, p, name, prefix="or")
    net.gates.append(GateHandle("OR", (i1, i2), (out,), (o_nand, o_nor)))
    return out


def _lift(net, cell, favored, strength, model):
    if favored not in (0, 1):
        raise ParameterError(f"favored value must be 0 or 1, got {favored!r}")
    if model == QUADRATIC:
        bias = net.cell(cell).bias
        room = net.constants.phi0 / 2 - abs(bias)
        if not 0 < strength < room:
            raise ParameterError(f"EDL strength must lie in (0, {room:g}) on cell {cell!r}, got {strength}")
        net.set_bias(cell, bias + (strength if favored == 1 else -strength))
    else:
        if not strength > 0:
            raise ParameterError(f"EDL strength must be positive, got {strength}")
        net.add_penalty(cell, 1 - favored, strength)


def edl(
    net: Network,
    cell: str,
    favored: int,
    strength: float | None = None,
    model: str = MISMATCH,
    p: GateParams | None = None,
) -> None:
    """Lift the degeneracy of ``cell`` in favour of ``favored``.

    Quadratic model: detune the bias by +/-strength.  Mismatch model: charge
    ``strength`` whenever the cell holds the other value.
    """
    check_model(model)
    p = _params(net, p)
    _require(net, cell)
    strength = p.edl_strength if strength is None else strength
    _lift(net, cell, favored, strength, model)
    net.gates.append(GateHandle("EDL", (cell,), (cell,)))


def dedlu(
    net: Network,
    decision_cell: str,
    strength: float | None = None,
    model: str = MISMATCH,
    p: GateParams | None = None,
) -> None:
    """Decision EDL: penalize the decision cell holding logic 1 ("violated")."""
    check_model(model)
    p = _params(net, p)
    _require(net, decision_cell)
    if strength is None:
        strength = p.dedlu_strength if model == MISMATCH else p.dedlu_flux
    if model == MISMATCH and not 0 < strength < 1:
        raise ParameterError(f"mismatch DEDLU strength must lie in (0, 1), got {strength}")
    _lift(net, decision_cell, 0, strength, model)
    net.gates.append(GateHandle("DEDLU", (decision_cell,), (decision_cell,)))


Literal = tuple[str, bool]


def three_ce(
    net: Network,
    lit1: Literal,
    lit2: Literal,
    lit3: Literal,
    p: GateParams | None = None,
    model: str = MISMATCH,
    name: str | None = None,
) -> str:
    """Clause evaluator for (l1 or l2 or l3); returns the violation cell.

    Each literal is ``(variable cell id, positive)``.  Its negation comes from
    an inverter (positive literal) or a two-inverter wire (negative literal);
    the violation cell is AND(AND(~l1, ~l2), ~l3) with a DEDLU favouring 0.
    """
    check_model(model)
    p = _params(net, p)
    negated = []
    internals: list[str] = []
    for k, (var, positive) in enumerate((lit1, lit2, lit3), start=1):
        _require(net, var)
        if positive:
            n = _inv(net, var, p, _sub(name, f"n{k}"), role="internal", prefix="lit")
            internals.append(n)
        else:
            mid = _inv(net, var, p, _sub(name, f"m{k}"), role="internal", prefix="lit")
            n = _inv(net, mid, p, _sub(name, f"n{k}"), role="internal", prefix="lit")
            internals += [mid, n]
        negated.append(n)
    nand1, nor1 = _nandnor(net, negated[0], negated[1], p, (_sub(name, "nand1"), _sub(name, "nor1")), "internal")
    a1 = _inv(net, nand1, p, _sub(name, "and1"), role="internal", prefix="and")
    nand2, nor2 = _nandnor(net, a1, negated[2], p, (_sub(name, "nand2"), _sub(name, "nor2")), "internal")
    v = _inv(net, nand2, p, name, prefix="viol")
    internals += [nand1, nor1, a1, nand2, nor2]
    dedlu(net, v, model=model, p=p)
    variables = tuple(dict.fromkeys(var for var, _ in (lit1, lit2, lit3)))
    net.gates.append(GateHandle("CE3", variables, (v,), tuple(internals)))
    return v
