import random
import time

import pytest

from netrev.graph import (
    Digraph,
    build_digraph,
    condensation,
    k_hop_neighborhood,
    shortest_path,
    tarjan_scc,
)
from netrev.netlist import Netlist


def digraph_from_edges(nodes, edges):
    g = Digraph(nodes)
    for a, b in edges:
        g.add_edge(a, b)
    return g


def closure_scc_oracle(nodes, edges):
    """Partition via transitive closure: u ~ v iff u reaches v and v reaches u."""
    nodes = list(nodes)
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for a, b in edges:
        reach[idx[a]][idx[b]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    groups = {}
    for i, node in enumerate(nodes):
        key = frozenset(j for j in range(n) if reach[i][j] and reach[j][i])
        groups.setdefault(key, set()).add(node)
    return set(frozenset(g) for g in groups.values())


def test_chain_digraph(lib):
    nl = Netlist("chain", lib)
    gs = [nl.create_gate("INV", f"i{k}") for k in range(3)]
    for a, b in zip(gs, gs[1:]):
        net = nl.create_net(f"n{a}")
        nl.connect(net, a, "O")
        nl.connect(net, b, "I")
    g = build_digraph(nl)
    assert set(g.nodes) == set(gs)
    assert g.edge_count() == 2
    assert g.successors[gs[0]] == {gs[1]}


def test_multi_sink_fanout(lib):
    nl = Netlist("fan", lib)
    drv = nl.create_gate("INV", "drv")
    sinks = [nl.create_gate("INV", f"s{k}") for k in range(3)]
    net = nl.create_net("w")
    nl.connect(net, drv, "O")
    for s in sinks:
        nl.connect(net, s, "I")
    g = build_digraph(nl)
    assert g.successors[drv] == set(sinks)


def test_empty_netlist_graph(lib):
    g = build_digraph(Netlist("empty", lib))
    assert len(g.nodes) == 0
    assert tarjan_scc(g) == []


def test_node_filter(lib):
    nl = Netlist("f", lib)
    a = nl.create_gate("INV", "a")
    b = nl.create_gate("INV", "b")
    net = nl.create_net("w")
    nl.connect(net, a, "O")
    nl.connect(net, b, "I")
    g = build_digraph(nl, node_filter=lambda gid: gid == a)
    assert set(g.nodes) == {a}
    assert g.edge_count() == 0


def test_cycle_with_tail():
    g = digraph_from_edges([1, 2, 3, 4], [(1, 2), (2, 3), (3, 1), (3, 4)])
    nontrivial = tarjan_scc(g)
    assert nontrivial == [{1, 2, 3}]
    full = tarjan_scc(g, include_trivial=True)
    assert sorted(map(sorted, full)) == [[1, 2, 3], [4]]


def test_self_loop_singleton_is_not_trivial():
    g = digraph_from_edges([1, 2], [(1, 1), (1, 2)])
    assert tarjan_scc(g) == [{1}]


def test_bridged_two_cycles_reverse_topological_order():
    # a<->b  ->  c<->d : the sink-side component comes first
    g = digraph_from_edges("abcd", [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c"), ("b", "c")])
    sccs = tarjan_scc(g)
    assert sccs == [{"c", "d"}, {"a", "b"}]


def test_random_digraphs_match_closure_oracle():
    rng = random.Random(4242)
    for trial in range(60):
        n = rng.randint(1, 50)
        density = rng.uniform(0.05, 0.3)
        nodes = list(range(n))
        edges = [(u, v) for u in nodes for v in nodes
                 if u != v and rng.random() < density]
        got = set(frozenset(s) for s in
                  tarjan_scc(digraph_from_edges(nodes, edges), include_trivial=True))
        assert got == closure_scc_oracle(nodes, edges), f"trial {trial}"


def test_partition_properties_and_acyclic_condensation():
    rng = random.Random(7)
    nodes = list(range(40))
    edges = [(u, v) for u in nodes for v in nodes if u != v and rng.random() < 0.1]
    g = digraph_from_edges(nodes, edges)
    sccs = tarjan_scc(g, include_trivial=True)
    seen = set()
    for scc in sccs:
        assert not (scc & seen)
        seen |= scc
    assert seen == set(nodes)
    dag = condensation(g, sccs)
    assert tarjan_scc(dag) == []  # no nontrivial SCC -> acyclic
    # reverse topological: edges must point from later to earlier list entries
    comp = {n: i for i, scc in enumerate(sccs) for n in scc}
    for u, v in edges:
        if comp[u] != comp[v]:
            assert comp[u] > comp[v]


def test_shortest_path_to_self():
    g = digraph_from_edges([1], [])
    assert shortest_path(g, 1, {1}) == [1]


def test_shortest_path_unreachable():
    g = digraph_from_edges([1, 2], [(2, 1)])
    assert shortest_path(g, 1, {2}) is None


def test_shortest_path_three_hops():
    # mirrors the obfuscation entry path: o0 -> o1 -> o2 -> original
    edges = [("o0", "o1"), ("o0", "a0"), ("o1", "o2"), ("o1", "o3"),
             ("o2", "s0"), ("a0", "a1"), ("s0", "s1")]
    g = digraph_from_edges({e for p in edges for e in p}, edges)
    path = shortest_path(g, "o0", {"s0", "s1"})
    assert path == ["o0", "o1", "o2", "s0"]


def test_k_hop_neighborhood():
    g = digraph_from_edges([1, 2, 3, 4, 5], [(1, 2), (2, 3), (3, 4), (4, 5)])
    assert k_hop_neighborhood(g, [3], 0) == {3}
    assert k_hop_neighborhood(g, [3], 1) == {2, 3, 4}  # undirected hops
    assert k_hop_neighborhood(g, [1], 99) == {1, 2, 3, 4, 5}


def test_linear_time_smoke():
    rng = random.Random(1)

    def runtime(n):
        nodes = list(range(n))
        g = Digraph(nodes)
        for _ in range(3 * n):
            g.add_edge(rng.randrange(n), rng.randrange(n))
        t0 = time.perf_counter()
        tarjan_scc(g, include_trivial=True)
        return time.perf_counter() - t0

    small, large = runtime(2000), runtime(20000)
    assert large < max(small, 0.01) * 40  # generous: smoke, not a hard gate
