import itertools

import pytest

from netrev.boolfunc import BooleanFunction, parse_expression
from netrev.cones import cone_function, from_combinational, from_lut
from netrev.errors import AnalysisError, SupportLimitError
from netrev.netlist import Netlist


def wire(nl, name, source=None, sinks=()):
    nid = nl.create_net(name)
    if source:
        nl.connect(nid, source[0], source[1])
    for gate_id, pin in sinks:
        nl.connect(nid, gate_id, pin)
    return nid


def test_from_lut_fig4_shape(lib):
    nl = Netlist("wm", lib)
    lut = nl.create_gate("LUT3", "lut0")
    nl.set_gate_data(lut, "INIT", "8'b00000101")
    for net, pin in [("a", "I0"), ("b", "I1"), ("g", "I2")]:
        wire(nl, net, sinks=[(lut, pin)])
    f = from_lut(nl, lut)
    # 8'b00000101 = !I0 & !I2; the function does not depend on I1 (net b)
    assert f.support == ("a", "g")
    assert f == parse_expression("!a & !g", {"a", "g"})
    assert f.evaluate({"a": 0, "g": 0}) == 1
    assert f.evaluate({"a": 1, "g": 0}) == 0


def test_from_lut_identity(lib):
    nl = Netlist("l1", lib)
    lut = nl.create_gate("LUT1", "l")
    nl.set_gate_data(lut, "INIT", "2'b10")
    wire(nl, "x", sinks=[(lut, "I0")])
    assert from_lut(nl, lut) == BooleanFunction.variable("x")


def test_from_lut_all_zero_is_constant(lib):
    nl = Netlist("l0", lib)
    lut = nl.create_gate("LUT3", "l")
    nl.set_gate_data(lut, "INIT", "8'b00000000")
    for net, pin in [("a", "I0"), ("b", "I1"), ("c", "I2")]:
        wire(nl, net, sinks=[(lut, pin)])
    f = from_lut(nl, lut)
    assert f == BooleanFunction.constant(0)
    assert f.support == ()


def test_from_lut_missing_init(lib):
    nl = Netlist("l", lib)
    lut = nl.create_gate("LUT2", "l")
    with pytest.raises(AnalysisError, match="INIT"):
        from_lut(nl, lut)


def test_from_combinational_nand(lib):
    nl = Netlist("c", lib)
    g = nl.create_gate("NAND2", "n0")
    wire(nl, "x", sinks=[(g, "A")])
    wire(nl, "y", sinks=[(g, "B")])
    fns = from_combinational(nl, g)
    assert fns["O"] == parse_expression("!(x & y)", {"x", "y"})


def test_from_combinational_buffer_identity(lib):
    nl = Netlist("c", lib)
    g = nl.create_gate("BUF", "b0")
    wire(nl, "x", sinks=[(g, "I")])
    assert from_combinational(nl, g)["O"] == BooleanFunction.variable("x")


def test_from_combinational_ff_rejected(lib):
    nl = Netlist("c", lib)
    g = nl.create_gate("DFF", "r0")
    with pytest.raises(AnalysisError, match="not combinational"):
        from_combinational(nl, g)


def test_from_combinational_shared_input_net(lib):
    nl = Netlist("c", lib)
    g = nl.create_gate("XOR2", "x0")
    wire(nl, "s", sinks=[(g, "A"), (g, "B")])
    assert from_combinational(nl, g)["O"] == BooleanFunction.constant(0)


def test_cone_inv_after_ff(lib):
    nl = Netlist("c", lib)
    ff = nl.create_gate("DFF", "r0")
    inv = nl.create_gate("INV", "i0")
    wire(nl, "q", source=(ff, "Q"), sinks=[(inv, "I")])
    out = wire(nl, "y", source=(inv, "O"))
    f = cone_function(nl, out)
    assert f == parse_expression("!q", {"q"})


def test_cone_nand_tree_and4(lib):
    # AND(a,b,c,d) built as INV(NAND(INV(NAND(a,b)) NAND... use two levels:
    # t1 = !(a&b), t2 = !(c&d), y = !(t1 | t2) via NOR2 = a&b&c&d
    nl = Netlist("c", lib)
    n1 = nl.create_gate("NAND2", "n1")
    n2 = nl.create_gate("NAND2", "n2")
    nor = nl.create_gate("NOR2", "n3")
    for name, sink in [("a", (n1, "A")), ("b", (n1, "B")), ("c", (n2, "A")), ("d", (n2, "B"))]:
        wire(nl, name, sinks=[sink])
    wire(nl, "t1", source=(n1, "O"), sinks=[(nor, "A")])
    wire(nl, "t2", source=(n2, "O"), sinks=[(nor, "B")])
    out = wire(nl, "y", source=(nor, "O"))
    f = cone_function(nl, out)
    # brute-force oracle over all 16 assignments
    for bits in itertools.product([0, 1], repeat=4):
        env = dict(zip("abcd", bits))
        assert f.evaluate(env) == (bits[0] & bits[1] & bits[2] & bits[3])


def test_cone_combinational_loop(lib):
    nl = Netlist("c", lib)
    inv = nl.create_gate("INV", "i0")
    loop = nl.create_net("w")
    nl.connect(loop, inv, "O")
    nl.connect(loop, inv, "I")
    with pytest.raises(AnalysisError, match="loop"):
        cone_function(nl, loop)


def test_cone_latch_rejected(lib):
    nl = Netlist("c", lib)
    latch = nl.create_gate("DLATCH", "l0")
    inv = nl.create_gate("INV", "i0")
    wire(nl, "lq", source=(latch, "Q"), sinks=[(inv, "I")])
    out = wire(nl, "y", source=(inv, "O"))
    with pytest.raises(AnalysisError, match="LATCH"):
        cone_function(nl, out)


def test_cone_through_const_gate(lib):
    nl = Netlist("c", lib)
    gnd = nl.create_gate("GND", "g0")
    a = nl.create_gate("AND2", "a0")
    wire(nl, "zero", source=(gnd, "G"), sinks=[(a, "A")])
    wire(nl, "x", sinks=[(a, "B")])
    out = wire(nl, "y", source=(a, "O"))
    assert cone_function(nl, out) == BooleanFunction.constant(0)


def test_cone_stop_nets(lib):
    nl = Netlist("c", lib)
    i1 = nl.create_gate("INV", "i1")
    i2 = nl.create_gate("INV", "i2")
    wire(nl, "x", sinks=[(i1, "I")])
    mid = wire(nl, "m", source=(i1, "O"), sinks=[(i2, "I")])
    out = wire(nl, "y", source=(i2, "O"))
    assert cone_function(nl, out) == parse_expression("x", {"x"})
    assert cone_function(nl, out, stop_nets={mid}) == parse_expression("!m", {"m"})


def test_cone_deep_chain_is_iterative(lib):
    nl = Netlist("chain", lib)
    prev = wire(nl, "x")
    gates = []
    for k in range(3000):
        g = nl.create_gate("INV", f"inv{k}")
        nl.connect(prev, g, "I")
        prev = wire(nl, f"w{k}", source=(g, "O"))
        gates.append(g)
    f = cone_function(nl, prev)
    assert f == parse_expression("x", {"x"})  # 3000 inversions cancel


def test_from_lut_truth_table_inverts_config_decoding(lib):
    # truth_table over the pin-order net names must reproduce the raw
    # decoded config exactly, even when net names sort differently
    import random

    from netrev.initcodec import decode_init, encode_init

    rng = random.Random(5150)
    for _ in range(25):
        nl = Netlist("inv", lib)
        lut = nl.create_gate("LUT3", "l")
        bits = [rng.randint(0, 1) for _ in range(8)]
        nl.set_gate_data(lut, "INIT", encode_init(bits))
        names = ["z_net", "a_net", "m_net"]  # deliberately non-lexicographic
        for name, pin in zip(names, ["I0", "I1", "I2"]):
            wire(nl, name, sinks=[(lut, pin)])
        f = from_lut(nl, lut)
        assert f.truth_table(names) == bits
        assert decode_init(encode_init(bits), 3) == bits


def test_cone_variable_cap(lib):
    nl = Netlist("wide", lib)
    # tree of AND2 gates over 8 leaf inputs with a tiny limit
    level = [wire(nl, f"in{k}") for k in range(8)]
    idx = 0
    while len(level) > 1:
        nxt = []
        for a, b in zip(level[::2], level[1::2]):
            g = nl.create_gate("AND2", f"and{idx}")
            idx += 1
            nl.connect(a, g, "A")
            nl.connect(b, g, "B")
            nxt.append(wire(nl, f"t{idx}", source=(g, "O")))
        level = nxt
    with pytest.raises(SupportLimitError):
        cone_function(nl, level[0], var_limit=4)
