"""Digraph view of a netlist plus the graph algorithms the analyses need.

Nodes are hashable ids (gate ids for netlist graphs, encoded states for
state graphs).  Tarjan is iterative so 100k-node netlists cannot blow the
recursion limit.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable

Node = Hashable


class Digraph:
    """Adjacency-set digraph with lazily derived predecessors."""

    def __init__(self, nodes: Iterable[Node] = ()):
        self.successors: dict[Node, set[Node]] = {n: set() for n in nodes}
        self._predecessors: dict[Node, set[Node]] | None = None

    @property
    def nodes(self):
        return self.successors.keys()

    def add_node(self, node: Node):
        self.successors.setdefault(node, set())
        self._predecessors = None

    def add_edge(self, src: Node, dst: Node):
        self.successors.setdefault(src, set()).add(dst)
        self.successors.setdefault(dst, set())
        self._predecessors = None

    def predecessors(self, node: Node) -> set[Node]:
        if self._predecessors is None:
            preds: dict[Node, set[Node]] = {n: set() for n in self.successors}
            for src, dsts in self.successors.items():
                for dst in dsts:
                    preds[dst].add(src)
            self._predecessors = preds
        return self._predecessors[node]

    def edge_count(self) -> int:
        return sum(len(s) for s in self.successors.values())


def build_digraph(netlist, node_filter: Callable[[int], bool] | None = None) -> Digraph:
    """Gate-level digraph: one edge per (driver gate, sink gate) net pair."""
    if node_filter is None:
        graph = Digraph(netlist.gates.keys())
        for net in netlist.nets.values():
            if net.source is None:
                continue
            src = net.source.gate_id
            for ep in net.sinks:
                graph.add_edge(src, ep.gate_id)
    else:
        graph = Digraph(g for g in netlist.gates if node_filter(g))
        for net in netlist.nets.values():
            if net.source is None or not node_filter(net.source.gate_id):
                continue
            src = net.source.gate_id
            for ep in net.sinks:
                if node_filter(ep.gate_id):
                    graph.add_edge(src, ep.gate_id)
    return graph


def tarjan_scc(graph: Digraph, include_trivial: bool = False) -> list[set[Node]]:
    """Strongly connected components, sinks of the condensation first.

    The returned list is in reverse topological order of the condensation:
    a component appears before every component with an edge into it.  By
    default loop-free singletons are dropped (an FSM needs feedback); pass
    ``include_trivial=True`` for the full partition.
    """
    succ = graph.successors
    index: dict[Node, int] = {}
    lowlink: dict[Node, int] = {}
    on_stack: set[Node] = set()
    stack: list[Node] = []
    counter = 0
    sccs: list[set[Node]] = []

    # Explicit DFS stack entries: (node, iterator over successors)
    for root in succ:
        if root in index:
            continue
        work: list[tuple[Node, Iterable[Node]]] = [(root, iter(succ[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = lowlink[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    lowlink[node] = min(lowlink[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                scc = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    scc.add(member)
                    if member == node:
                        break
                if include_trivial or len(scc) > 1 or node in succ[node]:
                    sccs.append(scc)
    return sccs


def condensation(graph: Digraph, sccs: list[set[Node]]) -> Digraph:
    """DAG over SCC indices (per the given list) induced by graph edges."""
    component: dict[Node, int] = {}
    for i, scc in enumerate(sccs):
        for node in scc:
            component[node] = i
    dag = Digraph(range(len(sccs)))
    for src, dsts in graph.successors.items():
        if src not in component:
            continue
        for dst in dsts:
            if dst in component and component[src] != component[dst]:
                dag.add_edge(component[src], component[dst])
    return dag


def shortest_path(graph: Digraph, start: Node, targets: set[Node]) -> list[Node] | None:
    """BFS path from start into targets (inclusive), or None."""
    if start in targets:
        return [start]
    parent: dict[Node, Node] = {start: start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in graph.successors.get(node, ()):
            if nxt in parent:
                continue
            parent[nxt] = node
            if nxt in targets:
                path = [nxt]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(nxt)
    return None


def k_hop_neighborhood(graph: Digraph, seeds: Iterable[Node], k: int) -> set[Node]:
    """Nodes within k undirected hops of the seed set (for focus views)."""
    current = {s for s in seeds if s in graph.successors}
    result = set(current)
    for _ in range(k):
        frontier = set()
        for node in current:
            frontier |= graph.successors[node]
            frontier |= graph.predecessors(node)
        frontier -= result
        if not frontier:
            break
        result |= frontier
        current = frontier
    return result
