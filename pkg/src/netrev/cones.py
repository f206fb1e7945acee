"""Boolean functions of gates and combinational fan-in cones.

Variables are net names; an unconnected input pin falls back to
``"<gate_id>.<pin>"``.  Cones stop at FF outputs, global inputs and caller
stop nets, so the result is a function of exactly those boundary signals.
"""

from __future__ import annotations

from .boolfunc import DEFAULT_VAR_LIMIT, BooleanFunction, ite
from .errors import AnalysisError, NetlistError, SupportLimitError
from .initcodec import decode_init
from .library import GateCategory
from .netlist import Gate, Net, Netlist


def pin_variable(netlist: Netlist, gate: Gate, pin: str) -> str:
    net = netlist.net_of(gate.id, pin)
    return net.name if net is not None else f"{gate.id}.{pin}"


def _lut_bits(gate: Gate) -> list[int]:
    spec = gate.type.lut_spec
    literal = gate.data.get(spec.config_key)
    if literal is None:
        raise AnalysisError(f"LUT gate {gate.name!r} has no {spec.config_key!r} config")
    return decode_init(literal, len(gate.type.input_pins))


def _lut_function(bits: list[int], inputs: list[BooleanFunction]) -> BooleanFunction:
    """Shannon-expand the config vector over the given input functions."""
    if len(bits) == 1:
        return BooleanFunction.constant(bits[0])
    half = len(bits) // 2
    low = _lut_function(bits[:half], inputs[:-1])
    high = _lut_function(bits[half:], inputs[:-1])
    if low == high:
        return low
    return ite(inputs[-1], high, low)


def from_lut(netlist: Netlist, gate: Gate | int) -> BooleanFunction:
    """Function computed by a LUT gate, over its input net names."""
    if isinstance(gate, int):
        gate = netlist.gate(gate)
    if gate.type.category is not GateCategory.LUT:
        raise AnalysisError(f"gate {gate.name!r} ({gate.type.name}) is not a LUT")
    bits = _lut_bits(gate)
    inputs = [BooleanFunction.variable(pin_variable(netlist, gate, pin))
              for pin in gate.type.lut_spec.pin_order]
    return _lut_function(bits, inputs)


def from_combinational(netlist: Netlist, gate: Gate | int) -> dict[str, BooleanFunction]:
    """Per-output-pin functions of a template-driven gate, over net names."""
    if isinstance(gate, int):
        gate = netlist.gate(gate)
    category = gate.type.category
    if category is GateCategory.CONST_ZERO:
        return {gate.type.output_pins[0]: BooleanFunction.constant(0)}
    if category is GateCategory.CONST_ONE:
        return {gate.type.output_pins[0]: BooleanFunction.constant(1)}
    if category not in (GateCategory.COMBINATIONAL, GateCategory.BUFFER):
        raise AnalysisError(
            f"gate {gate.name!r} ({gate.type.name}) is not combinational")
    return {
        pin: fn.compose({p: BooleanFunction.variable(pin_variable(netlist, gate, p))
                         for p in fn.support})
        for pin, fn in gate.type.functions.items()
    }


def gate_output_function(netlist: Netlist, gate: Gate, pin: str) -> BooleanFunction:
    if gate.type.category is GateCategory.LUT:
        return from_lut(netlist, gate)
    return from_combinational(netlist, gate)[pin]


def cone_function(netlist: Netlist, root_net: Net | int | str,
                  stop_nets: frozenset[int] | set[int] = frozenset(),
                  var_limit: int = DEFAULT_VAR_LIMIT) -> BooleanFunction:
    """Function of the combinational fan-in cone of ``root_net``.

    The recursion stops at explicit ``stop_nets`` (net ids), FF output nets
    and global input nets; those become the variables of the result.  Raises
    AnalysisError on combinational loops, latches in the cone, or when the
    boundary exceeds ``var_limit`` variables.
    """
    root = _resolve_net(netlist, root_net)
    cache: dict[int, BooleanFunction] = {}
    in_progress: set[int] = set()
    boundary_names: dict[str, int] = {}

    def boundary_variable(net: Net) -> BooleanFunction:
        prior = boundary_names.get(net.name)
        if prior is not None and prior != net.id:
            raise AnalysisError(
                f"two boundary nets share the name {net.name!r} (ids {prior}, {net.id})")
        boundary_names[net.name] = net.id
        if len(boundary_names) > var_limit:
            raise SupportLimitError(
                f"cone of net {root.name!r} exceeds {var_limit} boundary variables")
        return BooleanFunction.variable(net.name)

    def pin_function(gate: Gate, pin: str) -> BooleanFunction:
        net = netlist.net_of(gate.id, pin)
        if net is None:
            # dangling input: a free variable named by the fallback rule
            return BooleanFunction.variable(f"{gate.id}.{pin}")
        return cache[net.id]

    def is_boundary(net: Net) -> bool:
        if net.id in stop_nets or net.is_global_input or net.source is None:
            return True
        return netlist.gates[net.source.gate_id].type.category is GateCategory.FF

    def driving_gate(net: Net) -> Gate:
        gate = netlist.gate(net.source.gate_id)
        if gate.type.category is GateCategory.LATCH:
            raise AnalysisError(
                f"unsupported gate category LATCH in cone (gate {gate.name!r})")
        return gate

    VISIT, EVAL = 0, 1
    work: list[tuple[int, Net]] = [(VISIT, root)]
    while work:
        op, net = work.pop()
        if op == VISIT:
            if net.id in cache:
                continue
            if net.id in in_progress:
                raise AnalysisError(
                    f"combinational loop through net {net.name!r} (id {net.id})")
            if is_boundary(net):
                cache[net.id] = boundary_variable(net)
                continue
            gate = driving_gate(net)
            in_progress.add(net.id)
            work.append((EVAL, net))
            for pin in gate.type.input_pins:
                sub = netlist.net_of(gate.id, pin)
                if sub is not None:
                    work.append((VISIT, sub))
        else:
            gate = netlist.gate(net.source.gate_id)
            category = gate.type.category
            if category is GateCategory.LUT:
                bits = _lut_bits(gate)
                inputs = [pin_function(gate, pin) for pin in gate.type.lut_spec.pin_order]
                fn = _lut_function(bits, inputs)
            elif category is GateCategory.CONST_ZERO:
                fn = BooleanFunction.constant(0)
            elif category is GateCategory.CONST_ONE:
                fn = BooleanFunction.constant(1)
            else:
                template = gate.type.functions[net.source.pin]
                fn = template.compose({p: pin_function(gate, p) for p in template.support})
            in_progress.discard(net.id)
            cache[net.id] = fn
    return cache[root.id]


def _resolve_net(netlist: Netlist, ref: Net | int | str) -> Net:
    if isinstance(ref, Net):
        return ref
    if isinstance(ref, int):
        return netlist.net(ref)
    matches = [n for n in netlist.nets.values() if n.name == ref]
    if not matches:
        raise NetlistError(f"no net named {ref!r}")
    if len(matches) > 1:
        raise NetlistError(f"net name {ref!r} is ambiguous")
    return matches[0]
