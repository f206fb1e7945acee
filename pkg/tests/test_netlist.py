import random

import pytest

from netrev.errors import NetlistError
from netrev.netlist import EventKind, Netlist, netlists_equal, replay_events


@pytest.fixture
def nl(lib):
    return Netlist("t", lib)


def test_create_gate_ids_start_at_one(nl):
    assert nl.create_gate("INV", "u1") == 1
    assert len(nl.gates) == 1
    assert nl.events[-1].kind is EventKind.GATE_CREATED


def test_duplicate_gate_name_rejected(nl):
    nl.create_gate("INV", "u1")
    with pytest.raises(NetlistError, match="already in use"):
        nl.create_gate("INV", "u1")


def test_unknown_type_rejected(nl):
    with pytest.raises(Exception, match="unknown gate type"):
        nl.create_gate("NO_SUCH", "u1")


def test_ids_never_reused(nl):
    first = nl.create_gate("INV", "a")
    nl.delete_gate(first)
    second = nl.create_gate("INV", "b")
    assert second != first
    assert second == first + 1


def test_delete_gate_clears_endpoints(nl):
    g = nl.create_gate("INV", "u1")
    n_in = nl.create_net("x")
    n_out = nl.create_net("y")
    nl.connect(n_in, g, "I")
    nl.connect(n_out, g, "O")
    nl.delete_gate(g)
    assert nl.gates == {}
    assert set(nl.nets) == {n_in, n_out}
    assert nl.net(n_out).source is None
    assert nl.net(n_in).sinks == set()


def test_delete_unknown_gate(nl):
    with pytest.raises(NetlistError, match="unknown gate id 99"):
        nl.delete_gate(99)


def test_single_source_many_sinks(nl):
    drv = nl.create_gate("INV", "drv")
    s1 = nl.create_gate("INV", "s1")
    s2 = nl.create_gate("INV", "s2")
    net = nl.create_net("w")
    nl.connect(net, drv, "O")
    nl.connect(net, s1, "I")
    nl.connect(net, s2, "I")
    assert nl.net(net).source.gate_id == drv
    assert len(nl.net(net).sinks) == 2


def test_second_source_rejected(nl):
    a = nl.create_gate("INV", "a")
    b = nl.create_gate("INV", "b")
    net = nl.create_net("w")
    nl.connect(net, a, "O")
    with pytest.raises(NetlistError, match="already has a source"):
        nl.connect(net, b, "O")


def test_pin_in_two_nets_rejected(nl):
    g = nl.create_gate("INV", "g")
    n1 = nl.create_net("w1")
    n2 = nl.create_net("w2")
    nl.connect(n1, g, "I")
    with pytest.raises(NetlistError, match="already connected"):
        nl.connect(n2, g, "I")


def test_driving_global_input_rejected(nl):
    g = nl.create_gate("INV", "g")
    n = nl.create_net("pi", global_input=True)
    with pytest.raises(NetlistError, match="global input"):
        nl.connect(n, g, "O")


def test_disconnect_restores_state(nl):
    g = nl.create_gate("INV", "g")
    n = nl.create_net("w")
    nl.connect(n, g, "I")
    nl.disconnect(n, g, "I")
    assert nl.net(n).sinks == set()
    assert nl.net_of(g, "I") is None


def test_disconnect_absent_endpoint(nl):
    g = nl.create_gate("INV", "g")
    n = nl.create_net("w")
    with pytest.raises(NetlistError, match="not connected"):
        nl.disconnect(n, g, "I")


def test_disconnect_source_keeps_sinks(nl):
    drv = nl.create_gate("INV", "drv")
    snk = nl.create_gate("INV", "snk")
    n = nl.create_net("w")
    nl.connect(n, drv, "O")
    nl.connect(n, snk, "I")
    nl.disconnect(n, drv, "O")
    assert nl.net(n).source is None
    assert len(nl.net(n).sinks) == 1


def test_set_ff_init(nl):
    g = nl.create_gate("DFF", "r0")
    nl.set_gate_data(g, "INIT", "0")
    assert nl.gate(g).data["INIT"] == "0"
    ev = nl.events[-1]
    assert ev.kind is EventKind.GATE_DATA_CHANGED
    assert ev.payload["old"] is None


def test_set_lut_init_validated(nl):
    g = nl.create_gate("LUT3", "l0")
    nl.set_gate_data(g, "INIT", "8'b00000101")
    with pytest.raises(Exception, match="need 8"):
        nl.set_gate_data(g, "INIT", "4'hF")


def test_set_ff_init_validated(nl):
    g = nl.create_gate("DFF", "r0")
    with pytest.raises(NetlistError, match="'0' or '1'"):
        nl.set_gate_data(g, "INIT", "2")


def test_submodule_lifecycle(nl):
    gids = [nl.create_gate("INV", f"g{i}") for i in range(3)]
    mid = nl.create_submodule("fsm_candidate", gids)
    assert mid == 1
    assert nl.submodule(mid).gate_ids == set(gids)
    with pytest.raises(NetlistError, match="cycle"):
        nl.update_submodule(mid, parent=mid)
    nl.delete_gate(gids[0])
    assert nl.submodule(mid).gate_ids == set(gids[1:])


def test_submodule_dangling_member_rejected(nl):
    with pytest.raises(NetlistError, match="unknown gate"):
        nl.create_submodule("m", [42])


def test_submodule_parent_chain_cycle(nl):
    a = nl.create_submodule("a")
    b = nl.create_submodule("b", parent=a)
    with pytest.raises(NetlistError, match="cycle"):
        nl.update_submodule(a, parent=b)


def test_event_per_mutation_and_replay(nl, lib):
    g1 = nl.create_gate("INV", "g1")
    g2 = nl.create_gate("DFF", "g2")
    n1 = nl.create_net("w1")
    n2 = nl.create_net("w2", global_input=True)
    nl.connect(n1, g1, "O")
    nl.connect(n1, g2, "D")
    nl.connect(n2, g1, "I")
    nl.set_gate_data(g2, "INIT", "1")
    mid = nl.create_submodule("m", [g1], [n1], color=(255, 0, 0))
    nl.update_submodule(mid, name="renamed", color=(0, 255, 0))
    nl.delete_gate(g1)
    assert len(nl.events) == 11
    rebuilt = replay_events(nl.events, lib, design_name="t")
    assert netlists_equal(rebuilt, nl)
    assert [e.kind for e in rebuilt.events] == [e.kind for e in nl.events]


OPS = ["create_gate", "create_net", "connect", "disconnect", "set_data",
       "delete_gate", "delete_net", "module"]
WEIGHTS = [6, 6, 10, 2, 3, 1, 1, 2]


def drive_random_mutations(nl, rng, steps):
    """Apply random mutations; invalid attempts are allowed to fail cleanly."""
    types = ["INV", "NAND2", "XOR2", "LUT3", "DFF", "BUF"]
    counter = 0
    for _ in range(steps):
        op = rng.choices(OPS, WEIGHTS)[0]
        try:
            if op == "create_gate":
                counter += 1
                nl.create_gate(rng.choice(types), f"g{counter}")
            elif op == "create_net":
                counter += 1
                nl.create_net(f"w{counter}", global_input=rng.random() < 0.1)
            elif op == "connect" and nl.gates and nl.nets:
                gate = nl.gates[rng.choice(list(nl.gates))]
                pin = rng.choice(gate.type.input_pins + gate.type.output_pins)
                nl.connect(rng.choice(list(nl.nets)), gate.id, pin)
            elif op == "disconnect" and nl.nets:
                net = nl.nets[rng.choice(list(nl.nets))]
                eps = net.endpoints()
                if eps:
                    ep = rng.choice(eps)
                    nl.disconnect(net.id, ep.gate_id, ep.pin)
            elif op == "set_data" and nl.gates:
                gate = nl.gates[rng.choice(list(nl.gates))]
                if gate.type.lut_spec:
                    bits = "".join(rng.choice("01") for _ in range(2 ** len(gate.type.input_pins)))
                    nl.set_gate_data(gate.id, "INIT", f"{len(bits)}'b{bits}")
                elif gate.type.ff_spec:
                    nl.set_gate_data(gate.id, "INIT", rng.choice("01"))
                else:
                    nl.set_gate_data(gate.id, "note", "x")
            elif op == "delete_gate" and nl.gates:
                nl.delete_gate(rng.choice(list(nl.gates)))
            elif op == "delete_net" and nl.nets:
                nl.delete_net(rng.choice(list(nl.nets)))
            elif op == "module":
                if nl.submodules and rng.random() < 0.3:
                    mid = rng.choice(list(nl.submodules))
                    nl.update_submodule(mid, name=f"m{counter}")
                else:
                    counter += 1
                    gids = rng.sample(list(nl.gates), min(len(nl.gates), 3)) if nl.gates else []
                    nl.create_submodule(f"m{counter}", gids)
        except NetlistError:
            pass


def test_random_mutations_keep_integrity(nl, lib):
    rng = random.Random(20240817)
    drive_random_mutations(nl, rng, 1000)
    assert nl.audit() == []
    rebuilt = replay_events(nl.events, lib, design_name="t")
    assert netlists_equal(rebuilt, nl)


def test_bulk_build_under_ten_seconds(lib):
    import time

    start = time.perf_counter()
    nl = Netlist("bulk", lib)
    for i in range(100_000):
        nl.create_gate("INV", f"g{i}")
    for i in range(100_000):
        nl.create_net(f"w{i}")
    for i in range(0, 100_000, 2):
        nl.connect(i + 1, i + 1, "O")
        nl.connect(i + 1, i + 2, "I")
    elapsed = time.perf_counter() - start
    assert len(nl.gates) == 100_000 and len(nl.nets) == 100_000
    assert elapsed < 10.0, f"bulk build took {elapsed:.1f}s"


def test_reader_blocks_writer(nl):
    import threading
    import time

    nl.create_gate("INV", "g1")
    reader_in = threading.Event()
    release = threading.Event()
    order = []

    def reader():
        with nl.read_access():
            reader_in.set()
            release.wait(5)
            order.append("read-done")

    def writer():
        reader_in.wait(5)
        nl.create_gate("INV", "g2")  # must wait for the reader to drain
        order.append("write-done")

    threads = [threading.Thread(target=reader), threading.Thread(target=writer)]
    for t in threads:
        t.start()
    reader_in.wait(5)
    time.sleep(0.05)  # give the writer a chance to (wrongly) slip through
    assert order == []
    release.set()
    for t in threads:
        t.join(5)
    assert order == ["read-done", "write-done"]
    assert len(nl.gates) == 2


def test_stats(nl):
    nl.create_gate("INV", "a")
    nl.create_gate("DFF", "r")
    nl.create_net("w", global_input=True)
    s = nl.stats()
    assert s["gates"] == 2
    assert s["nets"] == 1
    assert s["global_inputs"] == 1
    assert s["gates_by_category"] == {"COMBINATIONAL": 1, "FF": 1}
