"""FSM candidate detection and reachable state-graph extraction.

A candidate is an SCC of the gate graph containing at least one FF: the FFs
form the state register, the combinational members form the transition
logic.  States are brute-forced breadth-first from the FF init values over
every assignment of the external inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .boolfunc import BooleanFunction, packed_table
from .cones import cone_function
from .errors import AnalysisError, FsmLimitError
from .graph import build_digraph, tarjan_scc
from .library import GateCategory
from .netlist import Netlist

log = logging.getLogger("netrev.fsm")

DEFAULT_MAX_INPUTS = 10
DEFAULT_MAX_STATES = 65536


@dataclass
class FsmCandidate:
    scc_gates: set[int]
    state_ffs: list[int]  # ascending gate id; position = state bit
    combinational_gates: set[int]
    external_input_nets: list[int]  # ascending net id, clock nets excluded
    clock_net: int | None

    @property
    def num_bits(self) -> int:
        return len(self.state_ffs)


@dataclass
class RejectedCandidate:
    scc_gates: set[int]
    reason: str


@dataclass
class FsmScan:
    candidates: list[FsmCandidate]
    rejected: list[RejectedCandidate]


@dataclass
class StateGraph:
    candidate: FsmCandidate
    input_names: list[str]  # aligned to external_input_nets; bit j of an assignment
    initial_state: int  # bit i corresponds to state_ffs[i]
    states: set[int] = field(default_factory=set)
    transitions: dict[tuple[int, int], int] = field(default_factory=dict)
    condensed_edges: dict[tuple[int, int], BooleanFunction] = field(default_factory=dict)

    @property
    def num_bits(self) -> int:
        return self.candidate.num_bits

    def state_label(self, state: int) -> str:
        return format(state, f"0{self.num_bits}b")  # bit 0 rightmost

    def assignment(self, input_index: int) -> dict[str, int]:
        return {name: (input_index >> j) & 1 for j, name in enumerate(self.input_names)}


def find_fsm_candidates(netlist: Netlist) -> FsmScan:
    """One candidate per feedback SCC with FFs; problems become rejections."""
    graph = build_digraph(netlist)
    candidates: list[FsmCandidate] = []
    rejected: list[RejectedCandidate] = []
    for scc in tarjan_scc(graph):
        ffs = sorted(g for g in scc
                     if netlist.gates[g].type.category is GateCategory.FF)
        if not ffs:
            continue  # a combinational loop, not an FSM
        try:
            candidates.append(_build_candidate(netlist, scc, ffs))
        except AnalysisError as exc:
            rejected.append(RejectedCandidate(scc, str(exc)))
    # ranking: most state bits first, then fewest inputs, then stable by gates
    candidates.sort(key=lambda c: (-len(c.state_ffs), len(c.external_input_nets),
                                   min(c.scc_gates)))
    log.info("%d FSM candidate(s), %d rejected", len(candidates), len(rejected))
    return FsmScan(candidates, rejected)


def _build_candidate(netlist: Netlist, scc: set[int], ffs: list[int]) -> FsmCandidate:
    clock_nets = set()
    clock_pin_of: dict[int, str] = {}
    for gid in sorted(scc):
        gate = netlist.gates[gid]
        category = gate.type.category
        if category is GateCategory.LATCH:
            raise AnalysisError(f"contains latch gate {gate.name!r}")
        if category is GateCategory.FF:
            clock_pin_of[gid] = gate.type.ff_spec.clock_pin
            clock = netlist.net_of(gid, gate.type.ff_spec.clock_pin)
            clock_nets.add(clock.id if clock else None)
    if len(clock_nets) > 1:
        raise AnalysisError("state FFs use more than one clock net")

    boundary: set[int] = set()
    for gid in sorted(scc):
        gate = netlist.gates[gid]
        for pin in gate.type.input_pins:
            if pin == clock_pin_of.get(gid):
                continue
            net = netlist.net_of(gid, pin)
            if net is None:
                raise AnalysisError(
                    f"pin {pin!r} of gate {gate.name!r} in the transition logic "
                    f"is unconnected")
            if net.source is None or net.source.gate_id not in scc:
                boundary.add(net.id)
    clock_net = next(iter(clock_nets)) if clock_nets else None
    return FsmCandidate(
        scc_gates=set(scc),
        state_ffs=ffs,
        combinational_gates=set(scc) - set(ffs),
        external_input_nets=sorted(boundary),
        clock_net=clock_net,
    )


def _state_variable_map(netlist: Netlist, candidate: FsmCandidate) -> dict[str, str]:
    """FF output net name -> s<i> rename map."""
    mapping = {}
    for i, gid in enumerate(candidate.state_ffs):
        gate = netlist.gates[gid]
        out_net = None
        for pin in gate.type.output_pins:
            net = netlist.net_of(gid, pin)
            if net is not None:
                out_net = net
                break
        if out_net is None:
            raise AnalysisError(f"state FF {gate.name!r} has no connected output")
        mapping[out_net.name] = f"s{i}"
    return mapping


def extract_transition_functions(netlist: Netlist,
                                 candidate: FsmCandidate) -> dict[int, BooleanFunction]:
    """Next-state function per state FF, over s<i> and external input names."""
    stop_nets = set(candidate.external_input_nets)
    rename = _state_variable_map(netlist, candidate)
    input_names = [netlist.nets[n].name for n in candidate.external_input_nets]
    if len(set(input_names)) != len(input_names):
        raise AnalysisError("two external input nets share a name")
    collisions = set(input_names) & set(rename.values())
    if collisions:
        raise AnalysisError(
            f"input net names collide with state variables: {sorted(collisions)}")

    def boundary_cone(net_id: int) -> BooleanFunction:
        fn = cone_function(netlist, netlist.nets[net_id], stop_nets=stop_nets)
        try:
            return fn.rename({v: rename[v] for v in fn.support if v in rename})
        except ValueError as exc:
            raise AnalysisError(str(exc)) from exc

    functions: dict[int, BooleanFunction] = {}
    for i, gid in enumerate(candidate.state_ffs):
        gate = netlist.gates[gid]
        spec = gate.type.ff_spec
        data_net = netlist.net_of(gid, spec.data_pin)
        if data_net is None:
            raise AnalysisError(f"data pin of FF {gate.name!r} is unconnected")
        nxt = boundary_cone(data_net.id)
        current = BooleanFunction.variable(f"s{i}")
        if spec.enable_pin:
            enable_net = netlist.net_of(gid, spec.enable_pin)
            if enable_net is None:
                raise AnalysisError(f"enable pin of FF {gate.name!r} is unconnected")
            enable = boundary_cone(enable_net.id)
            nxt = (enable & nxt) | (~enable & current)
        if spec.reset_pin:
            reset_net = netlist.net_of(gid, spec.reset_pin)
            if reset_net is not None:
                # synchronous active-high clear, priority over enable/data
                nxt = ~boundary_cone(reset_net.id) & nxt
        functions[gid] = nxt
    return functions


def initial_state(netlist: Netlist, candidate: FsmCandidate) -> int:
    state = 0
    for i, gid in enumerate(candidate.state_ffs):
        gate = netlist.gates[gid]
        raw = gate.data.get(gate.type.ff_spec.init_key)
        if raw is None:
            log.warning("FF %r has no init value, assuming 0", gate.name)
            raw = "0"
        if raw == "1":
            state |= 1 << i
    return state


def brute_force_state_graph(netlist: Netlist, candidate: FsmCandidate,
                            max_inputs: int = DEFAULT_MAX_INPUTS,
                            max_states: int = DEFAULT_MAX_STATES) -> StateGraph:
    """BFS over reachable states, expanding every input assignment."""
    inputs = candidate.external_input_nets
    if len(inputs) > max_inputs:
        raise FsmLimitError(
            f"candidate has {len(inputs)} external inputs (limit {max_inputs})")
    functions = extract_transition_functions(netlist, candidate)
    input_names = [netlist.nets[n].name for n in inputs]
    n_bits = candidate.num_bits
    order = [f"s{i}" for i in range(n_bits)] + input_names

    tables = [packed_table(functions[gid], order) for gid in candidate.state_ffs]
    n_inputs = len(input_names)

    sg = StateGraph(candidate, input_names, initial_state(netlist, candidate))
    sg.states.add(sg.initial_state)
    frontier = [sg.initial_state]
    check_budget = 4096  # re-verify packed tables against direct evaluation
    while frontier:
        state = frontier.pop(0)
        for assignment in range(1 << n_inputs):
            index = state | (assignment << n_bits)
            nxt = 0
            for i, table in enumerate(tables):
                nxt |= ((table >> index) & 1) << i
            if check_budget > 0:
                check_budget -= 1
                env = {f"s{i}": (state >> i) & 1 for i in range(n_bits)}
                env.update({name: (assignment >> j) & 1
                            for j, name in enumerate(input_names)})
                direct = 0
                for i, gid in enumerate(candidate.state_ffs):
                    direct |= functions[gid].evaluate(env) << i
                assert direct == nxt, "transition table disagrees with evaluation"
            sg.transitions[(state, assignment)] = nxt
            if nxt not in sg.states:
                if len(sg.states) >= max_states:
                    raise FsmLimitError(
                        f"state limit {max_states} exceeded",
                        states_found=len(sg.states),
                        transitions_found=len(sg.transitions))
                sg.states.add(nxt)
                frontier.append(nxt)

    pair_bits: dict[tuple[int, int], list[int]] = {}
    for (state, assignment), nxt in sg.transitions.items():
        bits = pair_bits.setdefault((state, nxt), [0] * (1 << n_inputs))
        bits[assignment] = 1
    for key in sorted(pair_bits):
        sg.condensed_edges[key] = BooleanFunction.from_truth_table(
            input_names, pair_bits[key])
    log.info("state graph: %d states, %d transitions, %d edges",
             len(sg.states), len(sg.transitions), len(sg.condensed_edges))
    return sg


def candidates_report(netlist: Netlist, scan: FsmScan) -> dict:
    """JSON-ready summary for the CLI and the HTTP API."""
    entries = []
    for idx, cand in enumerate(scan.candidates):
        entries.append({
            "index": idx,
            "state_ffs": [{"id": gid, "name": netlist.gates[gid].name}
                          for gid in cand.state_ffs],
            "gates": sorted(cand.scc_gates),
            "inputs": [{"id": nid, "name": netlist.nets[nid].name}
                       for nid in cand.external_input_nets],
            "clock_net": cand.clock_net,
        })
    rejects = [{"gates": sorted(r.scc_gates), "reason": r.reason}
               for r in scan.rejected]
    return {"candidates": entries, "rejected": rejects}


def state_graph_report(sg: StateGraph) -> dict:
    return {
        "state_bits": sg.num_bits,
        "inputs": sg.input_names,
        "initial_state": sg.state_label(sg.initial_state),
        "states": [sg.state_label(s) for s in sorted(sg.states)],
        "edges": [
            {"from": sg.state_label(a), "to": sg.state_label(b),
             "condition": fn.to_expr()}
            for (a, b), fn in sorted(sg.condensed_edges.items())
        ],
    }


def export_dot(sg: StateGraph, destination) -> None:
    Path(destination).write_text(to_dot(sg))


def to_dot(sg: StateGraph) -> str:
    """Render the state graph as a GRAPHVIZ digraph."""
    lines = ["digraph fsm {", "  rankdir=LR;"]
    for state in sorted(sg.states):
        shape = "doublecircle" if state == sg.initial_state else "circle"
        lines.append(f'  "{sg.state_label(state)}" [shape={shape}];')
    for (src, dst) in sorted(sg.condensed_edges):
        label = sg.condensed_edges[(src, dst)].to_expr().replace('"', r"\"")
        lines.append(f'  "{sg.state_label(src)}" -> "{sg.state_label(dst)}" '
                     f'[label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
