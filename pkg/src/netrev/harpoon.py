"""Attack on prepended-FSM obfuscation: recover the enabling input sequence
and patch FF init values so the design boots directly into the protected
machine.

Detection rule: in the condensation of the state graph, the original machine
is the unique terminal (no outgoing edges) component that does not contain
the initial state.  Added obfuscation modes keep looping back to their entry
state, while the protected machine never leaves its own region.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import AmbiguousOriginalRegion, AnalysisError, NoObfuscationPrefix
from .fsm import FsmCandidate, StateGraph
from .graph import Digraph, condensation, tarjan_scc
from .netlist import Netlist

log = logging.getLogger("netrev.harpoon")


@dataclass
class HarpoonResult:
    enabling_key: list[dict[str, int]]  # one input assignment per clock
    obfuscation_states: set[int]
    original_states: set[int]
    original_initial_state: int
    patched_ff_inits: dict[int, int]  # FF gate id -> init bit


def _state_digraph(sg: StateGraph) -> Digraph:
    graph = Digraph(sg.states)
    for (src, dst) in sg.condensed_edges:
        graph.add_edge(src, dst)
    return graph


def analyze_harpoon(sg: StateGraph) -> HarpoonResult:
    """Locate the original region and a minimal enabling sequence into it."""
    graph = _state_digraph(sg)
    sccs = tarjan_scc(graph, include_trivial=True)
    comp_of = {state: i for i, scc in enumerate(sccs) for state in scc}
    dag = condensation(graph, sccs)

    terminal = [i for i in range(len(sccs)) if not dag.successors[i]]
    init_comp = comp_of[sg.initial_state]
    regions = [i for i in terminal if i != init_comp]
    if not regions:
        raise NoObfuscationPrefix(
            "no obfuscation prefix detected: the initial state already belongs "
            "to the only terminal region")
    if len(regions) > 1:
        raise AmbiguousOriginalRegion(
            f"{len(regions)} disjoint terminal regions qualify as the original machine",
            candidates=[set(sccs[i]) for i in regions])
    original = set(sccs[regions[0]])

    key, entry = _shortest_key(sg, original)
    result = HarpoonResult(
        enabling_key=[sg.assignment(a) for a in key],
        obfuscation_states=sg.states - original,
        original_states=original,
        original_initial_state=entry,
        patched_ff_inits={gid: (entry >> i) & 1
                          for i, gid in enumerate(sg.candidate.state_ffs)},
    )
    _check_key(sg, result)
    log.info("enabling key of length %d recovered; original region has %d states",
             len(key), len(original))
    return result


def _shortest_key(sg: StateGraph, targets: set[int]) -> tuple[list[int], int]:
    """BFS by levels; ties resolved to the lexicographically smallest
    assignment-index sequence."""
    if sg.initial_state in targets:
        return [], sg.initial_state
    n_inputs = len(sg.input_names)
    best: dict[int, tuple[int, ...]] = {sg.initial_state: ()}
    level = {sg.initial_state: ()}
    while level:
        nxt_level: dict[int, tuple[int, ...]] = {}
        hits: list[tuple[tuple[int, ...], int]] = []
        for state in sorted(level):
            seq = level[state]
            for assignment in range(1 << n_inputs):
                nxt = sg.transitions[(state, assignment)]
                cand = seq + (assignment,)
                if nxt in targets:
                    hits.append((cand, nxt))
                    continue
                if nxt in best:  # reached at an earlier level: shorter path exists
                    continue
                if nxt not in nxt_level or cand < nxt_level[nxt]:
                    nxt_level[nxt] = cand
        if hits:
            seq, entry = min(hits)
            return list(seq), entry
        for state, seq in nxt_level.items():
            best[state] = seq
        level = nxt_level
    raise AnalysisError("original region is unreachable from the initial state")


def _check_key(sg: StateGraph, result: HarpoonResult):
    """Replay the key through the transition relation; must land inside."""
    state = sg.initial_state
    for step in result.enabling_key:
        assignment = 0
        for j, name in enumerate(sg.input_names):
            assignment |= step[name] << j
        state = sg.transitions[(state, assignment)]
    if state not in result.original_states:
        raise AnalysisError("internal error: enabling key replay left the original region")
    if state != result.original_initial_state:
        raise AnalysisError("internal error: enabling key replay hit a different entry state")


def apply_harpoon_patch(netlist: Netlist, candidate: FsmCandidate,
                        result: HarpoonResult) -> None:
    """Rewrite each state FF's init value to the original entry state."""
    for gid in candidate.state_ffs:
        gate = netlist.gate(gid)
        spec = gate.type.ff_spec
        if spec is None or not spec.init_key:
            raise AnalysisError(
                f"FF {gate.name!r} has no init key in its library definition")
        netlist.set_gate_data(gid, spec.init_key, str(result.patched_ff_inits[gid]))
    log.info("patched %d FF init values", len(candidate.state_ffs))


def attack_report(sg: StateGraph, result: HarpoonResult) -> dict:
    """JSON report: key, regions, patched init bits."""
    return {
        "key": result.enabling_key,
        "key_length": len(result.enabling_key),
        "original_initial_state": sg.state_label(result.original_initial_state),
        "original_states": [sg.state_label(s) for s in sorted(result.original_states)],
        "obfuscation_states": [sg.state_label(s) for s in sorted(result.obfuscation_states)],
        "patched_ffs": [{"gate": gid, "init": bit}
                        for gid, bit in sorted(result.patched_ff_inits.items())],
    }
