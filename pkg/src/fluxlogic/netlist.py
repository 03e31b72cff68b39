"""Line-oriented netlist format.

::

    # comment
    param delta=0.1 d=0.05 model=mismatch
    cell a
    cell b bias=0.05
    couple a b 0.1
    clamp a 1
    gate nandnor a b o1 o2 delta=0.1 d=0.05
    gate 3ce x -y z v
    input a
    output o1 o2

``param`` keys: phi0, L (before the first cell only), delta, d, edl,
dedlu, dedlu_flux, model.  ``cell`` options: bias, L, pen0, pen1.  Gate
kinds: inv, fanout, nandnor, sand, or, wire, edl, dedlu, 3ce; each accepts
``delta=``/``d=`` overrides and edl/dedlu accept ``strength=``.  A leading
``-`` on a 3ce literal negates it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import FluxLogicError, ParseError
from .gates import (
    GateParams,
    dedlu,
    edl,
    inverter,
    nand_nor,
    or_gate,
    sand,
    three_ce,
    wire,
)
from .model import MISMATCH, FluxConstants, Network, check_model

_PARAM_KEYS = {"delta": "delta", "d": "d_bias", "edl": "edl_strength", "dedlu": "dedlu_strength",
               "dedlu_flux": "dedlu_flux"}


@dataclass
class NetlistDocument:
    network: Network
    params: GateParams
    model: str
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)


def _float(value: str, lineno: int, what: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{what}: expected a number, got {value!r}", lineno) from None


def _split_options(tokens: list[str]) -> tuple[list[str], dict[str, str]]:
    args, opts = [], {}
    for tok in tokens:
        if "=" in tok:
            k, _, v = tok.partition("=")
            opts[k] = v
        else:
            args.append(tok)
    return args, opts


def _expect_args(kind: str, args: list[str], n: int | None, lineno: int, at_least: int | None = None):
    if n is not None and len(args) != n:
        raise ParseError(f"'{kind}' takes {n} names, got {len(args)}", lineno)
    if at_least is not None and len(args) < at_least:
        raise ParseError(f"'{kind}' needs at least {at_least} names, got {len(args)}", lineno)


def parse_netlist_document(text: str, model: str | None = None) -> NetlistDocument:
    """Parse netlist text.  ``model`` overrides any ``param model=`` line."""
    constants = {"phi0": 1.0, "default_inductance": 1.0}
    param_kwargs: dict[str, float] = {}
    file_model = MISMATCH
    net: Network | None = None
    inputs: list[str] = []
    outputs: list[str] = []

    def network() -> Network:
        nonlocal net
        if net is None:
            net = Network(FluxConstants(**constants))
        return net

    def declared(name: str, lineno: int) -> str:
        if name not in network():
            raise ParseError(f"unknown name {name!r}", lineno)
        return name

    def fresh(name: str, lineno: int) -> str:
        if name in network():
            raise ParseError(f"name {name!r} already declared", lineno)
        return name

    def gate_params(opts: dict[str, str], lineno: int) -> GateParams:
        kw = dict(param_kwargs)
        for key in ("delta", "d"):
            if key in opts:
                kw[_PARAM_KEYS[key]] = _float(opts.pop(key), lineno, key)
        return GateParams(phi0=constants["phi0"], **kw)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "param":
                args, opts = _split_options(rest)
                if args:
                    raise ParseError(f"unexpected token {args[0]!r} in param line", lineno)
                for k, v in opts.items():
                    if k == "model":
                        file_model = check_model(v)
                    elif k in ("phi0", "L"):
                        if net is not None:
                            raise ParseError(f"'{k}' must be set before the first cell", lineno)
                        constants["phi0" if k == "phi0" else "default_inductance"] = _float(v, lineno, k)
                    elif k in _PARAM_KEYS:
                        param_kwargs[_PARAM_KEYS[k]] = _float(v, lineno, k)
                    else:
                        raise ParseError(f"unknown parameter {k!r}", lineno)
                GateParams(phi0=constants["phi0"], **param_kwargs)
            elif head == "cell":
                args, opts = _split_options(rest)
                _expect_args("cell", args, 1, lineno)
                unknown = set(opts) - {"bias", "L", "pen0", "pen1"}
                if unknown:
                    raise ParseError(f"unknown cell option {sorted(unknown)[0]!r}", lineno)
                network().add_cell(
                    fresh(args[0], lineno),
                    bias=_float(opts.get("bias", "0"), lineno, "bias"),
                    inductance=_float(opts["L"], lineno, "L") if "L" in opts else None,
                    penalty=(_float(opts.get("pen0", "0"), lineno, "pen0"),
                             _float(opts.get("pen1", "0"), lineno, "pen1")),
                )
            elif head == "clamp":
                _expect_args("clamp", rest, 2, lineno)
                if rest[1] not in ("0", "1"):
                    raise ParseError(f"clamp value must be 0 or 1, got {rest[1]!r}", lineno)
                network().clamp(declared(rest[0], lineno), int(rest[1]))
            elif head == "couple":
                _expect_args("couple", rest, 3, lineno)
                src, dst = declared(rest[0], lineno), declared(rest[1], lineno)
                if src == dst:
                    raise ParseError(f"self-coupling on {src!r}", lineno)
                network().add_coupling(src, dst, _float(rest[2], lineno, "strength"))
            elif head in ("input", "output"):
                _expect_args(head, rest, None, lineno, at_least=1)
                for name in rest:
                    network().set_role(declared(name, lineno), head)
                    (inputs if head == "input" else outputs).append(name)
            elif head == "gate":
                if not rest:
                    raise ParseError("'gate' needs a kind", lineno)
                _gate(network(), rest[0], rest[1:], lineno, gate_params, declared, fresh,
                      model or file_model)
            else:
                raise ParseError(f"unknown statement {head!r}", lineno)
        except ParseError:
            raise
        except FluxLogicError as exc:
            raise ParseError(str(exc), lineno) from exc
    final_model = model or file_model
    return NetlistDocument(
        network(),
        GateParams(phi0=constants["phi0"], **param_kwargs),
        final_model,
        inputs,
        outputs,
    )


def _gate(net, kind, tokens, lineno, gate_params, declared, fresh, model):
    args, opts = _split_options(tokens)
    p = gate_params(opts, lineno)
    strength = _float(opts.pop("strength"), lineno, "strength") if "strength" in opts else None
    if opts:
        raise ParseError(f"unknown gate option {sorted(opts)[0]!r}", lineno)
    if kind in ("inv", "fanout"):
        _expect_args(kind, args, None, lineno, at_least=2)
        inverter(net, declared(args[0], lineno), p=p, names=[fresh(a, lineno) for a in args[1:]])
    elif kind == "nandnor":
        _expect_args(kind, args, 4, lineno)
        nand_nor(net, declared(args[0], lineno), declared(args[1], lineno), p,
                 (fresh(args[2], lineno), fresh(args[3], lineno)))
    elif kind in ("sand", "or"):
        _expect_args(kind, args, 3, lineno)
        build = sand if kind == "sand" else or_gate
        build(net, declared(args[0], lineno), declared(args[1], lineno), p, fresh(args[2], lineno))
    elif kind == "wire":
        _expect_args(kind, args, 2, lineno)
        wire(net, declared(args[0], lineno), p, fresh(args[1], lineno))
    elif kind == "edl":
        _expect_args(kind, args, 2, lineno)
        if args[1] not in ("0", "1"):
            raise ParseError(f"edl favored value must be 0 or 1, got {args[1]!r}", lineno)
        edl(net, declared(args[0], lineno), int(args[1]), strength, model, p)
    elif kind == "dedlu":
        _expect_args(kind, args, 1, lineno)
        dedlu(net, declared(args[0], lineno), strength, model, p)
    elif kind == "3ce":
        _expect_args(kind, args, 4, lineno)
        lits = [(declared(a.lstrip("-"), lineno), not a.startswith("-")) for a in args[:3]]
        three_ce(net, *lits, p=p, model=model, name=fresh(args[3], lineno))
    else:
        raise ParseError(f"unknown gate kind {kind!r}", lineno)


def parse_netlist(text: str, model: str | None = None) -> Network:
    return parse_netlist_document(text, model).network


def serialize(net: Network) -> str:
    """Flat netlist (cells, couplings, clamps, roles) that parses back to ``net``."""
    lines = [f"param phi0={net.constants.phi0!r} L={net.constants.default_inductance!r}"]
    default_l = net.constants.default_inductance
    for cell in net.cells:
        parts = ["cell", cell.id]
        if cell.bias != 0.0:
            parts.append(f"bias={cell.bias!r}")
        if cell.inductance != default_l:
            parts.append(f"L={cell.inductance!r}")
        for v in (0, 1):
            if cell.penalty[v] != 0.0:
                parts.append(f"pen{v}={cell.penalty[v]!r}")
        lines.append(" ".join(parts))
    for cp in net.couplings:
        lines.append(f"couple {cp.source} {cp.target} {cp.strength!r}")
    for cid, value in net.clamps.items():
        lines.append(f"clamp {cid} {value}")
    for role in ("input", "output"):
        ids = net.cells_with_role(role)
        if ids:
            lines.append(f"{role} " + " ".join(ids))
    return "\n".join(lines) + "\n"


def params_dict(p: GateParams) -> dict:
    return {k: v for k, v in dataclasses.asdict(p).items() if k != "enforce_window"}
