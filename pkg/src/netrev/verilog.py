"""Structural Verilog subset: parse into a netlist, write a netlist back out.

Supported input: one flat module, scalar ports/wires, named port connections,
``#(.INIT(...))`` parameters, ``assign w = 1'b0/1'b1;`` constant ties, inline
1-bit literal connections, ``//`` and ``/* */`` comments, plain or
backslash-escaped identifiers.  Constants materialize shared CONST gates so
tie detection sees a uniform structure.

Output is deterministic (sorted by id) and re-parses to a netlist whose
output cones compute identical functions.
"""

from __future__ import annotations

import bisect
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import InitFormatError, LibraryError, NetlistError, VerilogSyntaxError
from .initcodec import parse_sized_literal
from .library import GateCategory, GateLibrary, GateType
from .netlist import Netlist

log = logging.getLogger("netrev.hdl")

KEYWORDS = {"module", "endmodule", "input", "output", "wire", "assign"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>//[^\n]*|/\*.*?\*/)
      | (?P<literal>\d+\s*'\s*[bBhH]\s*[0-9a-fA-F_]+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
      | (?P<escident>\\[^\s]+)
      | (?P<punct>[()=;,.\#])
    """,
    re.VERBOSE | re.DOTALL,
)

_SIMPLE_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")


@dataclass(frozen=True)
class SourceLocation:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "literal", "punct", "eof"
    value: str
    offset: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self._newlines = [m.start() for m in re.finditer("\n", text)]
        self._iter = _TOKEN_RE.finditer(text)
        self._pos = 0
        self._pending: _Token | None = None

    def location(self, offset: int) -> SourceLocation:
        line = bisect.bisect_right(self._newlines, offset - 1)
        start = self._newlines[line - 1] + 1 if line else 0
        return SourceLocation(line + 1, offset - start + 1)

    def error(self, message: str, offset: int):
        raise VerilogSyntaxError(message, self.location(offset))

    def _next_raw(self) -> _Token:
        for m in self._iter:
            if m.start() != self._pos:
                self.error(f"unexpected character {self.text[self._pos]!r}", self._pos)
            self._pos = m.end()
            kind = m.lastgroup
            if kind in ("ws", "comment"):
                continue
            value = m.group()
            if kind == "escident":
                return _Token("ident", value[1:], m.start())
            if kind == "literal":
                return _Token("literal", value, m.start())
            return _Token(kind, value, m.start())
        if self._pos != len(self.text):
            self.error(f"unexpected character {self.text[self._pos]!r}", self._pos)
        return _Token("eof", "", len(self.text))

    def peek(self) -> _Token:
        if self._pending is None:
            self._pending = self._next_raw()
        return self._pending

    def next(self) -> _Token:
        token = self.peek()
        self._pending = None
        return token

    def expect_punct(self, symbol: str) -> _Token:
        token = self.next()
        if token.kind != "punct" or token.value != symbol:
            self.error(f"expected {symbol!r}, found {token.value or 'end of file'!r}",
                       token.offset)
        return token

    def expect_ident(self, what: str = "identifier") -> _Token:
        token = self.next()
        if token.kind != "ident":
            self.error(f"expected {what}, found {token.value or 'end of file'!r}",
                       token.offset)
        return token

    def at_punct(self, symbol: str) -> bool:
        token = self.peek()
        return token.kind == "punct" and token.value == symbol


class _Parser:
    def __init__(self, text: str, library: GateLibrary):
        self.lx = _Lexer(text)
        self.library = library
        self.netlist: Netlist | None = None
        self.net_ids: dict[str, int] = {}
        self.ports: list[str] = []
        self.directions: dict[str, str] = {}
        self.const_nets: dict[int, int] = {}  # literal bit -> net id

    # name helpers ---------------------------------------------------------

    def _fresh_gate_name(self, base: str) -> str:
        name = base
        counter = 1
        while self.netlist.gate_by_name(name) is not None:
            counter += 1
            name = f"{base}_{counter}"
        return name

    def _fresh_net_name(self, base: str) -> str:
        name = base
        counter = 1
        while name in self.net_ids:
            counter += 1
            name = f"{base}_{counter}"
        return name

    def _const_type(self, bit: int) -> GateType:
        category = GateCategory.CONST_ONE if bit else GateCategory.CONST_ZERO
        types = self.library.types_of(category)
        return types[0]

    def _make_const_gate(self, bit: int, name_base: str) -> int:
        gate_type = self._const_type(bit)
        gid = self.netlist.create_gate(gate_type.name, self._fresh_gate_name(name_base))
        return gid

    def _const_net(self, bit: int, offset: int) -> int:
        """Shared net driven by a constant, for inline literal connections."""
        net_id = self.const_nets.get(bit)
        if net_id is not None:
            return net_id
        base = "_vcc_" if bit else "_gnd_"
        name = self._fresh_net_name(base)
        net_id = self.netlist.create_net(name)
        self.net_ids[name] = net_id
        gid = self._make_const_gate(bit, base + "gate")
        gate = self.netlist.gate(gid)
        self._connect(net_id, gid, gate.type.output_pins[0], offset)
        self.const_nets[bit] = net_id
        return net_id

    def _connect(self, net_id: int, gate_id: int, pin: str, offset: int):
        try:
            self.netlist.connect(net_id, gate_id, pin)
        except NetlistError as exc:
            if "already has a source" in str(exc):
                net = self.netlist.net(net_id)
                self.lx.error(f"net {net.name!r} driven twice", offset)
            self.lx.error(str(exc), offset)

    # grammar --------------------------------------------------------------

    def parse(self) -> Netlist:
        lx = self.lx
        token = lx.expect_ident("'module'")
        if token.value != "module":
            lx.error("expected 'module'", token.offset)
        name_tok = lx.expect_ident("module name")
        self.netlist = Netlist(name_tok.value, self.library)
        if lx.at_punct("("):
            lx.next()
            if not lx.at_punct(")"):
                while True:
                    port = lx.expect_ident("port name")
                    self.ports.append(port.value)
                    if lx.at_punct(","):
                        lx.next()
                        continue
                    break
            lx.expect_punct(")")
        lx.expect_punct(";")

        while True:
            token = lx.peek()
            if token.kind == "eof":
                lx.error("missing 'endmodule'", token.offset)
            if token.kind != "ident":
                lx.error(f"expected declaration or instantiation, found {token.value!r}",
                         token.offset)
            if token.value == "endmodule":
                lx.next()
                break
            if token.value in ("input", "output", "wire"):
                self._parse_decl()
            elif token.value == "assign":
                self._parse_assign()
            else:
                self._parse_instance()

        tail = lx.next()
        if tail.kind != "eof":
            lx.error("only one module per file is supported", tail.offset)
        self._check_port_directions(name_tok.offset)
        return self.netlist

    def _parse_decl(self):
        lx = self.lx
        kind_tok = lx.next()
        kind = kind_tok.value
        while True:
            name_tok = lx.expect_ident("net name")
            name = name_tok.value
            if kind in ("input", "output"):
                if name not in self.ports:
                    lx.error(f"{kind} declaration for non-port {name!r}", name_tok.offset)
                prior = self.directions.get(name)
                if prior is not None and prior != kind:
                    lx.error(f"port {name!r} declared both {prior} and {kind}",
                             name_tok.offset)
                self.directions[name] = kind
            elif name in self.ports:
                lx.error(f"port {name!r} redeclared as wire", name_tok.offset)
            if name in self.net_ids:
                lx.error(f"net {name!r} declared twice", name_tok.offset)
            self.net_ids[name] = self.netlist.create_net(
                name,
                global_input=(kind == "input"),
                global_output=(kind == "output"),
            )
            if lx.at_punct(","):
                lx.next()
                continue
            lx.expect_punct(";")
            break

    def _check_port_directions(self, offset: int):
        for port in self.ports:
            if port not in self.directions:
                self.lx.error(f"port {port!r} lacks an input/output declaration", offset)

    def _parse_assign(self):
        lx = self.lx
        lx.next()  # 'assign'
        target = lx.expect_ident("assign target")
        if target.value not in self.net_ids:
            lx.error(f"assign to undeclared net {target.value!r}", target.offset)
        lx.expect_punct("=")
        lit = lx.next()
        if lit.kind != "literal":
            lx.error("assign supports only constant literals", lit.offset)
        bit = self._parse_bit_literal(lit)
        lx.expect_punct(";")
        net_id = self.net_ids[target.value]
        gid = self._make_const_gate(bit, f"_const_{target.value}")
        gate = self.netlist.gate(gid)
        self._connect(net_id, gid, gate.type.output_pins[0], lit.offset)

    def _parse_bit_literal(self, token: _Token) -> int:
        try:
            width, value = parse_sized_literal(token.value)
        except InitFormatError as exc:
            self.lx.error(str(exc), token.offset)
        if width != 1:
            self.lx.error("only 1-bit constants may connect here", token.offset)
        return value & 1

    def _parse_instance(self):
        lx = self.lx
        type_tok = lx.next()
        try:
            gate_type = self.library.get(type_tok.value)
        except LibraryError:
            lx.error(f"unknown cell type {type_tok.value!r}", type_tok.offset)
        init_literal = None
        init_offset = 0
        if lx.at_punct("#"):
            lx.next()
            lx.expect_punct("(")
            lx.expect_punct(".")
            key = lx.expect_ident("parameter name")
            if key.value != "INIT":
                lx.error(f"unsupported parameter {key.value!r} (only INIT)", key.offset)
            lx.expect_punct("(")
            lit = lx.next()
            if lit.kind != "literal":
                lx.error("INIT parameter must be a sized literal", lit.offset)
            init_literal = lit.value.replace(" ", "")
            init_offset = lit.offset
            lx.expect_punct(")")
            lx.expect_punct(")")
        name_tok = lx.expect_ident("instance name")
        try:
            gate_id = self.netlist.create_gate(gate_type.name, name_tok.value)
        except NetlistError as exc:
            lx.error(str(exc), name_tok.offset)
        lx.expect_punct("(")
        if not lx.at_punct(")"):
            while True:
                self._parse_connection(gate_id, gate_type)
                if lx.at_punct(","):
                    lx.next()
                    continue
                break
        lx.expect_punct(")")
        lx.expect_punct(";")
        if init_literal is not None:
            self._store_init(gate_id, gate_type, init_literal, init_offset)

    def _parse_connection(self, gate_id: int, gate_type: GateType):
        lx = self.lx
        lx.expect_punct(".")
        pin_tok = lx.expect_ident("pin name")
        pin = pin_tok.value
        if gate_type.pin_direction(pin) is None:
            lx.error(f"cell {gate_type.name} has no pin {pin!r}", pin_tok.offset)
        lx.expect_punct("(")
        token = lx.next()
        if token.kind == "literal":
            bit = self._parse_bit_literal(token)
            net_id = self._const_net(bit, token.offset)
        elif token.kind == "ident":
            if token.value not in self.net_ids:
                lx.error(f"connection to undeclared net {token.value!r}", token.offset)
            net_id = self.net_ids[token.value]
        else:
            lx.error("expected net name or 1-bit literal", token.offset)
        lx.expect_punct(")")
        self._connect(net_id, gate_id, pin, token.offset)

    def _store_init(self, gate_id: int, gate_type: GateType, literal: str, offset: int):
        if gate_type.ff_spec is not None:
            key = gate_type.ff_spec.init_key
            bit = self._parse_ff_init(literal, offset)
            value = str(bit)
        else:
            key = gate_type.lut_spec.config_key if gate_type.lut_spec else "INIT"
            value = literal
        try:
            self.netlist.set_gate_data(gate_id, key, value)
        except (NetlistError, InitFormatError) as exc:
            self.lx.error(str(exc), offset)

    def _parse_ff_init(self, literal: str, offset: int) -> int:
        try:
            width, value = parse_sized_literal(literal)
        except InitFormatError as exc:
            self.lx.error(str(exc), offset)
        if width != 1:
            self.lx.error("FF INIT must be a 1-bit literal", offset)
        return value & 1


def parse_verilog(text: str, library: GateLibrary,
                  design_name: str | None = None) -> Netlist:
    """Parse one flat structural module into a netlist."""
    netlist = _Parser(text, library).parse()
    if design_name:
        netlist.design_name = design_name
    log.info("parsed %s: %d gates, %d nets",
             netlist.design_name, len(netlist.gates), len(netlist.nets))
    return netlist


def load_verilog(path, library: GateLibrary) -> Netlist:
    return parse_verilog(Path(path).read_text(), library)


# -- writer ------------------------------------------------------------------


def _emit_name(name: str) -> str:
    if _SIMPLE_NAME_RE.match(name) and name not in KEYWORDS:
        return name
    # Escaped identifiers are whitespace-terminated, so embedded whitespace
    # cannot round-trip; substitute rather than fail.
    cleaned = re.sub(r"\s", "_", name)
    return "\\" + cleaned + " "


def write_verilog_text(netlist: Netlist, allow_dangling: bool = False) -> str:
    """Render the netlist as synthesizable structural Verilog."""
    inputs = sorted((n for n in netlist.nets.values() if n.is_global_input),
                    key=lambda n: n.id)
    outputs = sorted((n for n in netlist.nets.values() if n.is_global_output),
                     key=lambda n: n.id)
    for net in inputs:
        if net.is_global_output:
            raise NetlistError(
                f"net {net.name!r} is both global input and output; not representable")
    internal = sorted((n for n in netlist.nets.values()
                       if not n.is_global_input and not n.is_global_output),
                      key=lambda n: n.id)

    lines = []
    port_names = [_emit_name(n.name) for n in inputs + outputs]
    header = f"module {_emit_name(netlist.design_name or 'top')}"
    if port_names:
        header += " (" + ", ".join(port_names) + ")"
    lines.append(header + ";")
    for net in inputs:
        lines.append(f"  input {_emit_name(net.name)};")
    for net in outputs:
        lines.append(f"  output {_emit_name(net.name)};")
    for net in internal:
        lines.append(f"  wire {_emit_name(net.name)};")

    for gid in sorted(netlist.gates):
        gate = netlist.gates[gid]
        if gate.type.is_constant:
            out_pin = gate.type.output_pins[0]
            net = netlist.net_of(gid, out_pin)
            if net is None:
                if not allow_dangling:
                    raise NetlistError(
                        f"constant gate {gate.name!r} has an unconnected output "
                        f"(pass allow_dangling to skip)")
                continue
            bit = "1'b1" if gate.type.category is GateCategory.CONST_ONE else "1'b0"
            lines.append(f"  assign {_emit_name(net.name)} = {bit};")
            continue
        conns = []
        for pin in gate.type.input_pins + gate.type.output_pins:
            net = netlist.net_of(gid, pin)
            if net is None:
                if not allow_dangling:
                    raise NetlistError(
                        f"pin {pin!r} of gate {gate.name!r} is unconnected "
                        f"(pass allow_dangling to skip)")
                continue
            conns.append(f".{pin}({_emit_name(net.name)})")
        param = _init_param(gate)
        type_part = _emit_name(gate.type.name) + (f" #(.INIT({param}))" if param else "")
        lines.append(f"  {type_part} {_emit_name(gate.name)} ({', '.join(conns)});")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def _init_param(gate) -> str | None:
    gt = gate.type
    if gt.lut_spec is not None:
        return gate.data.get(gt.lut_spec.config_key)
    if gt.ff_spec is not None:
        bit = gate.data.get(gt.ff_spec.init_key)
        return None if bit is None else f"1'b{bit}"
    return gate.data.get("INIT")


def write_verilog(netlist: Netlist, destination, allow_dangling: bool = False) -> None:
    text = write_verilog_text(netlist, allow_dangling=allow_dangling)
    Path(destination).write_text(text)
    log.info("wrote %s (%d gates) to %s", netlist.design_name, len(netlist.gates), destination)
