"""Acceptance suite: one test per release criterion, at its stated bound.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS lines.
"""

import itertools
import random
import resource
import time

from corpus_verilog import CORPUS
from fixtures_netlists import ORIGINAL_STATES, build_harpoon_netlist
from netrev.cones import cone_function
from netrev.fsm import brute_force_state_graph, find_fsm_candidates
from netrev.graph import Digraph, build_digraph, tarjan_scc
from netrev.harpoon import analyze_harpoon, apply_harpoon_patch
from netrev.netlist import Netlist, netlists_equal, replay_events
from netrev.snapshot import netlist_from_dict, netlist_to_dict
from netrev.verilog import parse_verilog, write_verilog_text
from netrev.watermark import remove_watermark, scan_watermarks
from oracle_sim import reachable_transitions
from test_graph import closure_scc_oracle
from test_netlist import drive_random_mutations


def report(name, detail):
    print(f"ACCEPTANCE PASS: {name} ({detail})")


def test_scc_oracle_200_random_digraphs():
    rng = random.Random(0xACCE55)
    start = time.perf_counter()
    for trial in range(200):
        n = rng.randint(1, 50)
        density = rng.uniform(0.05, 0.3)
        nodes = list(range(n))
        edges = [(u, v) for u in nodes for v in nodes
                 if u != v and rng.random() < density]
        graph = Digraph(nodes)
        for u, v in edges:
            graph.add_edge(u, v)
        got = set(frozenset(s) for s in tarjan_scc(graph, include_trivial=True))
        expected = closure_scc_oracle(nodes, edges)
        assert got == expected, f"partition mismatch on trial {trial}"
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"SCC oracle took {elapsed:.2f}s (limit 5s)"
    report("SCC oracle", f"200 digraphs in {elapsed:.2f}s")


def test_hdl_roundtrip_corpus():
    from conftest import LIB_PATH
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    assert len(CORPUS) >= 20, "corpus must hold at least 20 designs"
    checked_cones = 0
    for name, text in sorted(CORPUS.items()):
        nl1 = parse_verilog(text, lib)
        nl2 = parse_verilog(write_verilog_text(nl1), lib)
        outs1 = {n.name: cone_function(nl1, n, var_limit=20)
                 for n in nl1.global_output_nets()}
        outs2 = {n.name: cone_function(nl2, n, var_limit=20)
                 for n in nl2.global_output_nets()}
        assert outs1 == outs2, f"output cones differ after round trip: {name}"
        checked_cones += len(outs1)
    report("HDL round trip", f"{len(CORPUS)} designs, {checked_cones} output cones exact")


FSM_FIXTURES = ["toggle_ff", "counter2", "gray3_luts", "enable_toggle",
                "mealy_detector"]


def test_fsm_extraction_against_simulator():
    from conftest import LIB_PATH
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    for name in FSM_FIXTURES:
        nl = parse_verilog(CORPUS[name], lib)
        start = time.perf_counter()
        scan = find_fsm_candidates(nl)
        assert len(scan.candidates) == 1, name
        cand = scan.candidates[0]
        sg = brute_force_state_graph(nl, cand)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"{name} took {elapsed:.2f}s (limit 1s)"
        init, states, transitions = reachable_transitions(
            nl,
            [nl.gates[g].name for g in cand.state_ffs],
            [nl.nets[n].name for n in cand.external_input_nets])
        assert sg.initial_state == init, name
        assert sg.states == states, name
        assert sg.transitions == transitions, name
    report("FSM extraction oracle", f"{len(FSM_FIXTURES)} machines exact, <1s each")


def test_harpoon_end_to_end():
    from conftest import LIB_PATH
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    nl = build_harpoon_netlist(lib)
    cand = find_fsm_candidates(nl).candidates[0]
    sg = brute_force_state_graph(nl, cand)
    assert len(sg.states) == 12  # 5 obfuscation + 3 black-hole + 4 original
    result = analyze_harpoon(sg)
    assert len(result.enabling_key) == 3
    assert result.original_states == ORIGINAL_STATES

    apply_harpoon_patch(nl, cand, result)
    sg_patched = brute_force_state_graph(nl, cand)
    assert sg_patched.states == ORIGINAL_STATES

    reparsed = parse_verilog(write_verilog_text(nl), lib)
    cand2 = find_fsm_candidates(reparsed).candidates[0]
    sg_reparsed = brute_force_state_graph(reparsed, cand2)
    assert sg_reparsed.states == sg_patched.states
    assert sg_reparsed.transitions == sg_patched.transitions
    assert sg_reparsed.condensed_edges == sg_patched.condensed_edges
    report("obfuscation attack end-to-end",
           "key length 3; 4 original states after patch; identical after HDL round trip")


def test_watermark_detection_and_removal():
    from conftest import LIB_PATH
    from fixtures_netlists import WATERMARKED_DESIGN
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    nl = parse_verilog(WATERMARKED_DESIGN, lib)
    findings = scan_watermarks(nl)
    assert len(findings) == 1 and findings[0].suspicious
    assert findings[0].unreachable_indices == [4, 5, 6, 7]
    lut_id = findings[0].gate_id

    before = cone_function(nl, "c")
    remove_watermark(nl, lut_id)
    after = cone_function(nl, "c")
    assert nl.gates[lut_id].data["INIT"] == "8'b00000101"
    for a, b in itertools.product([0, 1], repeat=2):
        assert before.evaluate({"a": a, "b": b}) == after.evaluate({"a": a, "b": b})
    assert not scan_watermarks(nl)[0].suspicious

    false_positives = 0
    for name, text in sorted(CORPUS.items()):
        clean = parse_verilog(text, lib)
        false_positives += sum(f.suspicious for f in scan_watermarks(clean))
    assert false_positives == 0
    report("watermark detection/removal",
           "payload found+scrubbed; function preserved; 0 false positives on corpus")


def generate_big_design(n_gates=100_000):
    """Blocks of 100 gates: one feedback FF plus a combinational chain."""
    lines = ["module big (clk, x0, x1, y);", "  input clk, x0, x1;", "  output y;"]
    n_blocks = n_gates // 100
    for b in range(n_blocks):
        lines.append(f"  wire {', '.join(f'w{b}_{i}' for i in range(100))};")
    body = []
    for b in range(n_blocks):
        prev_block = f"w{b - 1}_99" if b else "x0"
        body.append(f"  DFF #(.INIT(1'b0)) ff{b} (.C(clk), .D(w{b}_98), .Q(w{b}_0));")
        body.append(f"  NAND2 g{b}_1 (.A(w{b}_0), .B({prev_block}), .O(w{b}_1));")
        for i in range(2, 99):
            body.append(f"  INV g{b}_{i} (.I(w{b}_{i - 1}), .O(w{b}_{i}));")
        body.append(f"  XOR2 g{b}_99 (.A(w{b}_98), .B(x1), .O(w{b}_99));")
    body.append(f"  BUF yb (.I(w{n_blocks - 1}_99), .O(y));")
    lines.extend(body)
    lines.append("endmodule")
    return "\n".join(lines)


def test_scale_smoke_100k_gates():
    from conftest import LIB_PATH
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    text = generate_big_design(100_000)
    start = time.perf_counter()
    nl = parse_verilog(text, lib)
    graph = build_digraph(nl)
    sccs = tarjan_scc(graph)
    elapsed = time.perf_counter() - start
    assert len(nl.gates) == 100_001  # + output buffer
    assert len(sccs) == 1000
    assert all(len(s) == 99 for s in sccs)  # FF + 98-gate feedback chain
    assert elapsed < 30.0, f"scale smoke took {elapsed:.1f}s (limit 30s)"
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / (1024 ** 2)
    assert peak_gb < 4.0, f"peak RSS {peak_gb:.2f} GB (limit 4 GB)"
    report("scale smoke", f"100k gates in {elapsed:.1f}s, peak {peak_gb:.2f} GB")


def test_netlist_core_property_suite():
    from conftest import LIB_PATH
    from netrev.library import load_gate_library

    lib = load_gate_library(LIB_PATH)
    rng = random.Random(0xCAFE)
    nl = Netlist("prop", lib)
    drive_random_mutations(nl, rng, 1000)
    problems = nl.audit()
    assert problems == [], problems

    rebuilt = replay_events(nl.events, lib, design_name="prop")
    assert netlists_equal(rebuilt, nl)

    roundtripped = netlist_from_dict(netlist_to_dict(nl), lib)
    assert netlists_equal(roundtripped, nl)
    report("netlist-core properties",
           f"1000 mutations: integrity, replay, snapshot identity "
           f"({len(nl.gates)} gates, {len(nl.events)} events)")
