"""netrev: reverse engineering toolkit for flat gate-level netlists."""

__version__ = "0.1.0"

from .boolfunc import BooleanFunction, parse_expression
from .cones import cone_function, from_combinational, from_lut
from .errors import NetrevError
from .fsm import brute_force_state_graph, find_fsm_candidates
from .graph import build_digraph, tarjan_scc
from .harpoon import analyze_harpoon, apply_harpoon_patch
from .initcodec import decode_init, encode_init
from .library import GateCategory, GateLibrary, GateType, load_gate_library
from .netlist import Netlist
from .snapshot import load_snapshot, save_snapshot
from .verilog import parse_verilog, write_verilog
from .watermark import extract_watermark, remove_watermark, scan_watermarks

__all__ = [
    "BooleanFunction",
    "GateCategory",
    "GateLibrary",
    "GateType",
    "Netlist",
    "NetrevError",
    "analyze_harpoon",
    "apply_harpoon_patch",
    "brute_force_state_graph",
    "build_digraph",
    "cone_function",
    "decode_init",
    "encode_init",
    "extract_watermark",
    "find_fsm_candidates",
    "from_combinational",
    "from_lut",
    "load_gate_library",
    "load_snapshot",
    "parse_expression",
    "parse_verilog",
    "remove_watermark",
    "save_snapshot",
    "scan_watermarks",
    "tarjan_scc",
    "write_verilog",
]
