"""Detection and removal of payload bits hidden in constant-tied LUTs.

A LUT input tied to a constant rail makes half of its config entries
unselectable; marking schemes park identification bits there.  Detection is
structural (the tie must come from a CONST gate), extraction reads the dead
entries, removal zeroes them without touching live behavior.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

from .errors import AnalysisError
from .initcodec import decode_init, encode_init, literal_base
from .library import GateCategory
from .netlist import Netlist

log = logging.getLogger("netrev.watermark")


@dataclass
class WatermarkFinding:
    gate_id: int
    gate_name: str
    tied_pins: dict[str, int]  # pin -> tie value
    unreachable_indices: list[int]  # ascending
    payload_bits: list[int]  # aligned to unreachable_indices
    suspicious: bool

    def payload_hex(self) -> str:
        value = 0
        for i, bit in enumerate(self.payload_bits):
            value |= bit << i
        digits = max(1, (len(self.payload_bits) + 3) // 4)
        return f"0x{value:0{digits}X}"


def find_constant_tied_luts(netlist: Netlist) -> list[tuple[int, dict[str, int]]]:
    """Every LUT with at least one input pin driven by a CONST gate."""
    found = []
    for gid in sorted(netlist.gates):
        gate = netlist.gates[gid]
        if gate.type.category is not GateCategory.LUT:
            continue
        tied: dict[str, int] = {}
        for pin in gate.type.input_pins:
            net = netlist.net_of(gid, pin)
            if net is None or net.source is None:
                continue
            source = netlist.gates[net.source.gate_id].type.category
            if source is GateCategory.CONST_ZERO:
                tied[pin] = 0
            elif source is GateCategory.CONST_ONE:
                tied[pin] = 1
        if tied:
            found.append((gid, tied))
    return found


def _tied_pins_of(netlist: Netlist, gate_id: int) -> dict[str, int]:
    for gid, tied in find_constant_tied_luts(netlist):
        if gid == gate_id:
            return tied
    return {}


def unreachable_indices(pin_order, tied: dict[str, int]) -> list[int]:
    """Config indices that contradict at least one tied pin."""
    positions = {pin: j for j, pin in enumerate(pin_order)}
    out = []
    for index in range(1 << len(pin_order)):
        for pin, value in tied.items():
            if (index >> positions[pin]) & 1 != value:
                out.append(index)
                break
    return out


def extract_watermark(netlist: Netlist, gate_id: int) -> WatermarkFinding:
    """Read the dead config entries of one constant-tied LUT."""
    gate = netlist.gate(gate_id)
    if gate.type.category is not GateCategory.LUT:
        raise AnalysisError(f"gate {gate.name!r} is not a LUT")
    tied = _tied_pins_of(netlist, gate_id)
    if not tied:
        raise AnalysisError(f"LUT {gate.name!r} has no constant-tied inputs")
    spec = gate.type.lut_spec
    literal = gate.data.get(spec.config_key)
    if literal is None:
        raise AnalysisError(f"LUT {gate.name!r} has no {spec.config_key!r} config")
    bits = decode_init(literal, len(gate.type.input_pins))
    dead = unreachable_indices(spec.pin_order, tied)
    payload = [bits[i] for i in dead]
    return WatermarkFinding(
        gate_id=gate_id,
        gate_name=gate.name,
        tied_pins=tied,
        unreachable_indices=dead,
        payload_bits=payload,
        suspicious=any(payload),
    )


def remove_watermark(netlist: Netlist, gate_id: int) -> WatermarkFinding:
    """Zero the dead entries; live entries and behavior stay untouched."""
    finding = extract_watermark(netlist, gate_id)
    gate = netlist.gate(gate_id)
    spec = gate.type.lut_spec
    literal = gate.data[spec.config_key]
    bits = decode_init(literal, len(gate.type.input_pins))
    for index in finding.unreachable_indices:
        bits[index] = 0
    scrubbed = encode_init(bits, literal_base(literal))
    netlist.set_gate_data(gate_id, spec.config_key, scrubbed)
    if finding.suspicious:
        log.info("scrubbed %d payload bit(s) from %r", sum(finding.payload_bits),
                 gate.name)
    return finding


def scan_watermarks(netlist: Netlist) -> list[WatermarkFinding]:
    """Extract findings for every constant-tied LUT, ascending gate id."""
    return [extract_watermark(netlist, gid)
            for gid, _ in find_constant_tied_luts(netlist)]


def scrub_all(netlist: Netlist) -> list[WatermarkFinding]:
    """Remove every watermark; returns the pre-scrub findings."""
    return [remove_watermark(netlist, gid)
            for gid, _ in find_constant_tied_luts(netlist)]


def findings_report(findings: list[WatermarkFinding]) -> dict:
    return {
        "suspicious": sum(1 for f in findings if f.suspicious),
        "findings": [
            {
                "gate": f.gate_id,
                "name": f.gate_name,
                "tied_pins": dict(sorted(f.tied_pins.items())),
                "unreachable_indices": f.unreachable_indices,
                "payload_bits": f.payload_bits,
                "payload_hex": f.payload_hex(),
                "suspicious": f.suspicious,
            }
            for f in findings
        ],
    }


def findings_csv(findings: list[WatermarkFinding]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["gate_id", "gate_name", "tied_pins", "payload_hex", "suspicious"])
    for f in findings:
        ties = ";".join(f"{pin}={val}" for pin, val in sorted(f.tied_pins.items()))
        writer.writerow([f.gate_id, f.gate_name, ties, f.payload_hex(),
                         int(f.suspicious)])
    return buf.getvalue()
