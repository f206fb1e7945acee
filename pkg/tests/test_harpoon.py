import pytest

from fixtures_netlists import (
    KEY_ASSIGNMENTS,
    ORIGINAL_STATES,
    OBFUSCATION_STATES,
    S0,
    build_harpoon_netlist,
)
from netrev.errors import AmbiguousOriginalRegion, NoObfuscationPrefix
from netrev.fsm import FsmCandidate, StateGraph, brute_force_state_graph, find_fsm_candidates
from netrev.harpoon import analyze_harpoon, apply_harpoon_patch, attack_report
from netrev.netlist import EventKind, netlists_equal
from netrev.verilog import parse_verilog, write_verilog_text
from oracle_sim import reachable_transitions


@pytest.fixture
def harpoon(lib):
    nl = build_harpoon_netlist(lib)
    cand = find_fsm_candidates(nl).candidates[0]
    sg = brute_force_state_graph(nl, cand)
    return nl, cand, sg


def make_state_graph(transitions, initial=0, n_bits=2, input_names=("x",)):
    """Tiny synthetic graphs for the error paths."""
    cand = FsmCandidate(set(), list(range(n_bits)), set(), [], None)
    states = {s for s, _ in transitions} | set(transitions.values())
    sg = StateGraph(cand, list(input_names), initial, states=states,
                    transitions=dict(transitions))
    for (s, a), n in transitions.items():
        key = (s, n)
        if key not in sg.condensed_edges:
            from netrev.boolfunc import BooleanFunction

            sg.condensed_edges[key] = BooleanFunction.constant(1)
    return sg


def test_key_of_length_three(harpoon):
    nl, cand, sg = harpoon
    result = analyze_harpoon(sg)
    assert len(result.enabling_key) == 3
    expected = [sg.assignment(a) for a in KEY_ASSIGNMENTS]
    assert result.enabling_key == expected
    assert result.original_states == ORIGINAL_STATES
    assert result.obfuscation_states == OBFUSCATION_STATES
    assert result.original_initial_state == S0


def test_patch_makes_original_only_reachable(harpoon):
    nl, cand, sg = harpoon
    result = analyze_harpoon(sg)
    apply_harpoon_patch(nl, cand, result)
    sg2 = brute_force_state_graph(nl, cand)
    assert sg2.initial_state == S0
    assert sg2.states == ORIGINAL_STATES
    assert not (sg2.states & result.obfuscation_states)


def test_patch_changes_only_ff_init_data(harpoon):
    nl, cand, sg = harpoon
    before = {nid: (net.source, frozenset(net.sinks)) for nid, net in nl.nets.items()}
    gates_before = set(nl.gates)
    result = analyze_harpoon(sg)
    events_before = len(nl.events)
    apply_harpoon_patch(nl, cand, result)
    assert set(nl.gates) == gates_before
    after = {nid: (net.source, frozenset(net.sinks)) for nid, net in nl.nets.items()}
    assert after == before
    new_events = nl.events[events_before:]
    assert [e.kind for e in new_events] == [EventKind.GATE_DATA_CHANGED] * 4


def test_patch_survives_verilog_roundtrip(harpoon, lib):
    nl, cand, sg = harpoon
    result = analyze_harpoon(sg)
    apply_harpoon_patch(nl, cand, result)
    reparsed = parse_verilog(write_verilog_text(nl), lib)
    cand2 = find_fsm_candidates(reparsed).candidates[0]
    sg2 = brute_force_state_graph(reparsed, cand2)
    sg1 = brute_force_state_graph(nl, cand)
    assert sg2.states == sg1.states == ORIGINAL_STATES
    assert sg2.transitions == sg1.transitions
    # independent simulator agrees on the patched design
    init, states, transitions = reachable_transitions(
        reparsed, [reparsed.gates[g].name for g in cand2.state_ffs], ["k0", "k1"])
    assert init == S0
    assert states == ORIGINAL_STATES


def test_patch_idempotent_writes(lib):
    nl = build_harpoon_netlist(lib)
    cand = find_fsm_candidates(nl).candidates[0]
    sg = brute_force_state_graph(nl, cand)
    result = analyze_harpoon(sg)
    apply_harpoon_patch(nl, cand, result)
    n_events = len(nl.events)
    apply_harpoon_patch(nl, cand, result)  # same values again
    assert len(nl.events) == n_events + 4  # writes recorded even if unchanged
    for event in nl.events[n_events:]:
        assert event.payload["old"] == event.payload["new"]


def test_single_scc_reports_no_prefix():
    # 2 states looping on each other: everything is one terminal SCC
    sg = make_state_graph({(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 0}, n_bits=1)
    with pytest.raises(NoObfuscationPrefix):
        analyze_harpoon(sg)


def test_two_terminal_regions_ambiguous():
    # initial state 0 branches into two separate sink loops 1 and 2
    transitions = {(0, 0): 1, (0, 1): 2, (1, 0): 1, (1, 1): 1, (2, 0): 2, (2, 1): 2}
    sg = make_state_graph(transitions)
    with pytest.raises(AmbiguousOriginalRegion) as exc:
        analyze_harpoon(sg)
    assert sorted(map(sorted, exc.value.candidates)) == [[1], [2]]


def test_lexicographic_tie_break():
    # two length-2 routes into the sink 3: via 1 (inputs 1,0) or via 2 (0,1);
    # tie on length; (0,1) is lexicographically smaller
    transitions = {
        (0, 0): 2, (0, 1): 1,
        (1, 0): 3, (1, 1): 0,
        (2, 0): 0, (2, 1): 3,
        (3, 0): 3, (3, 1): 3,
    }
    sg = make_state_graph(transitions)
    result = analyze_harpoon(sg)
    assert [a["x"] for a in result.enabling_key] == [0, 1]


def test_attack_report_shape(harpoon):
    nl, cand, sg = harpoon
    result = analyze_harpoon(sg)
    report = attack_report(sg, result)
    assert report["key_length"] == 3
    assert report["original_initial_state"] == "1000"
    assert len(report["original_states"]) == 4
    assert len(report["obfuscation_states"]) == 8
    assert len(report["patched_ffs"]) == 4
