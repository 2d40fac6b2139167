"""Capacitated flow networks over the fab logistics graph.

Capacities are integer kilograms per planning horizon, so flow conservation
and cut comparisons are exact integer arithmetic.  Edge costs are Fractions
(scenario files store integer milli-units per kg), so min-cost optimality
checks never see float drift.

Max flow uses shortest augmenting paths (BFS on the residual graph), min-cost
flow uses successive shortest paths with node potentials, and min cut reads
the source-side reachability of the final residual graph.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from heapq import heappop, heappush
from typing import Iterable, Mapping

from .errors import (
    DanglingEdge,
    DuplicateNode,
    InfeasibleDemand,
    NoOriginOrDestination,
    ValidationErrors,
)

SOURCE_ID = "__src__"
SINK_ID = "__snk__"


class NodeKind(Enum):
    SOURCE = "source"
    PRODUCTION = "production"
    LOGISTICS = "logistics"
    DESTINATION = "destination"
    SINK = "sink"


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    capacity_kg: int
    cost_per_kg: Fraction = Fraction(0)
    transit_time_h: float = 0.0


@dataclass(frozen=True)
class FlowNetwork:
    """Directed graph with designated single source and sink.

    `nodes` maps node id to NodeKind.  When a scenario declares several
    origins or destinations, build_network adds synthetic SOURCE/SINK nodes
    here; with a single origin and destination the declared nodes themselves
    are designated and no synthetic nodes appear.
    """

    nodes: Mapping[str, NodeKind]
    edges: tuple[Edge, ...]
    source: str
    sink: str

    def out_edges(self, node: str) -> list[Edge]:
        return [e for e in self.edges if e.tail == node]


@dataclass(frozen=True)
class FlowAssignment:
    """A feasible flow: kg per edge plus the total value shipped."""

    flow: Mapping[tuple[str, str], int]
    value: int


def make_network(
    nodes: Iterable[tuple[str, NodeKind]],
    edges: Iterable[Edge],
    source: str,
    sink: str,
) -> FlowNetwork:
    """Validated constructor used by tests and by build_network."""
    node_map: dict[str, NodeKind] = {}
    for node_id, kind in nodes:
        if node_id in node_map:
            raise DuplicateNode(f"node id declared twice: {node_id}")
        node_map[node_id] = kind
    problems = []
    seen_pairs: set[tuple[str, str]] = set()
    edge_list = []
    for e in edges:
        if e.tail not in node_map or e.head not in node_map:
            raise DanglingEdge(f"edge {e.tail}->{e.head} references unknown node")
        if e.tail == e.head:
            problems.append(f"self loop on {e.tail}")
            continue
        if (e.tail, e.head) in seen_pairs:
            problems.append(f"parallel edge {e.tail}->{e.head}")
            continue
        if e.capacity_kg < 0 or int(e.capacity_kg) != e.capacity_kg:
            problems.append(f"capacity of {e.tail}->{e.head} must be a non-negative integer")
            continue
        if e.cost_per_kg < 0:
            problems.append(f"cost of {e.tail}->{e.head} must be non-negative")
            continue
        if e.transit_time_h < 0:
            problems.append(f"transit time of {e.tail}->{e.head} must be non-negative")
            continue
        seen_pairs.add((e.tail, e.head))
        edge_list.append(e)
    if source not in node_map or sink not in node_map:
        raise NoOriginOrDestination("designated source or sink is not a declared node")
    if problems:
        raise ValidationErrors(problems)
    return FlowNetwork(nodes=node_map, edges=tuple(edge_list), source=source, sink=sink)


def build_network(scenario) -> FlowNetwork:
    """Assemble a FlowNetwork from a scenario's network section.

    Production nodes act as origins, destination nodes as sinks.  With more
    than one origin (or destination) a synthetic super source (super sink) is
    attached by zero-cost edges whose capacity exceeds any possible flow
    (sum of all finite capacities plus one).
    """
    section = getattr(scenario, "network", None)
    if section is None:
        raise NoOriginOrDestination("scenario has no network section")
    declared = list(section.nodes)
    edges = list(section.edges)
    origins = [nid for nid, kind in declared if kind == NodeKind.PRODUCTION]
    dests = [nid for nid, kind in declared if kind == NodeKind.DESTINATION]
    if not origins or not dests:
        raise NoOriginOrDestination("scenario declares no origin or no destination node")
    unlimited = sum(e.capacity_kg for e in edges) + 1
    if len(origins) == 1:
        source = origins[0]
    else:
        source = SOURCE_ID
        declared.append((SOURCE_ID, NodeKind.SOURCE))
        edges.extend(Edge(SOURCE_ID, nid, unlimited) for nid in origins)
    if len(dests) == 1:
        sink = dests[0]
    else:
        sink = SINK_ID
        declared.append((SINK_ID, NodeKind.SINK))
        edges.extend(Edge(nid, SINK_ID, unlimited) for nid in dests)
    return make_network(declared, edges, source, sink)


# --- residual graph machinery ----------------------------------------------

class _Arc:
    __slots__ = ("head", "cap", "cost", "rev", "edge_key")

    def __init__(self, head, cap, cost, rev, edge_key):
        self.head = head
        self.cap = cap
        self.cost = cost
        self.rev = rev       # index of the reverse arc in graph[head]
        self.edge_key = edge_key  # (tail, head) for forward arcs, None for reverse


def _build_residual(net: FlowNetwork):
    index = {nid: i for i, nid in enumerate(net.nodes)}
    graph: list[list[_Arc]] = [[] for _ in index]
    for e in net.edges:
        u, v = index[e.tail], index[e.head]
        fwd = _Arc(v, e.capacity_kg, e.cost_per_kg, len(graph[v]), (e.tail, e.head))
        rev = _Arc(u, 0, -e.cost_per_kg, len(graph[u]), None)
        graph[u].append(fwd)
        graph[v].append(rev)
    return index, graph


def _extract_flow(net: FlowNetwork, graph, index) -> dict[tuple[str, str], int]:
    cap_by_key = {(e.tail, e.head): e.capacity_kg for e in net.edges}
    flow = {key: 0 for key in cap_by_key}
    for arcs in graph:
        for arc in arcs:
            if arc.edge_key is not None:
                flow[arc.edge_key] = cap_by_key[arc.edge_key] - arc.cap
    return flow


def max_flow(net: FlowNetwork) -> FlowAssignment:
    """Maximum s-t flow via BFS augmenting paths (Edmonds-Karp)."""
    index, graph = _build_residual(net)
    s, t = index[net.source], index[net.sink]
    total = 0
    while True:
        # shortest augmenting path in the residual graph
        parent: list[tuple[int, int] | None] = [None] * len(graph)
        parent[s] = (s, -1)
        queue = deque([s])
        while queue and parent[t] is None:
            u = queue.popleft()
            for ai, arc in enumerate(graph[u]):
                if arc.cap > 0 and parent[arc.head] is None:
                    parent[arc.head] = (u, ai)
                    queue.append(arc.head)
        if parent[t] is None:
            break
        bottleneck = None
        v = t
        while v != s:
            u, ai = parent[v]
            cap = graph[u][ai].cap
            bottleneck = cap if bottleneck is None else min(bottleneck, cap)
            v = u
        v = t
        while v != s:
            u, ai = parent[v]
            arc = graph[u][ai]
            arc.cap -= bottleneck
            graph[v][arc.rev].cap += bottleneck
            v = u
        total += bottleneck
    return FlowAssignment(flow=_extract_flow(net, graph, index), value=total)


def min_cut(net: FlowNetwork) -> tuple[frozenset[str], int]:
    """Source side of a minimum cut and its capacity (equals the max flow)."""
    fa = max_flow(net)
    # rebuild residual capacities from the computed flow
    index, graph = _build_residual(net)
    for u, arcs in enumerate(graph):
        for arc in arcs:
            if arc.edge_key is not None:
                used = fa.flow[arc.edge_key]
                arc.cap -= used
                graph[arc.head][arc.rev].cap += used
    reachable = {index[net.source]}
    queue = deque(reachable)
    while queue:
        u = queue.popleft()
        for arc in graph[u]:
            if arc.cap > 0 and arc.head not in reachable:
                reachable.add(arc.head)
                queue.append(arc.head)
    names = {i: nid for nid, i in index.items()}
    side = frozenset(names[i] for i in reachable)
    capacity = sum(
        e.capacity_kg for e in net.edges if e.tail in side and e.head not in side
    )
    return side, capacity


def min_cost_flow(net: FlowNetwork, demand: int) -> FlowAssignment:
    """Cheapest feasible flow of exactly `demand` kg from source to sink.

    Successive shortest paths with node potentials; all costs are
    non-negative so potentials start at zero and Dijkstra applies throughout.
    Raises InfeasibleDemand when the network cannot carry the demand.
    """
    if demand < 0:
        raise ValidationErrors(["demand must be non-negative"])
    index, graph = _build_residual(net)
    s, t = index[net.source], index[net.sink]
    n = len(graph)
    potential = [Fraction(0)] * n
    sent = 0
    while sent < demand:
        dist: list[Fraction | None] = [None] * n
        parent: list[tuple[int, int] | None] = [None] * n
        dist[s] = Fraction(0)
        heap = [(Fraction(0), s)]
        while heap:
            d, u = heappop(heap)
            if dist[u] is not None and d > dist[u]:
                continue
            for ai, arc in enumerate(graph[u]):
                if arc.cap <= 0:
                    continue
                nd = d + arc.cost + potential[u] - potential[arc.head]
                if dist[arc.head] is None or nd < dist[arc.head]:
                    dist[arc.head] = nd
                    parent[arc.head] = (u, ai)
                    heappush(heap, (nd, arc.head))
        if dist[t] is None:
            raise InfeasibleDemand(demand, sent)
        for v in range(n):
            if dist[v] is not None:
                potential[v] += dist[v]
        bottleneck = demand - sent
        v = t
        while v != s:
            u, ai = parent[v]
            bottleneck = min(bottleneck, graph[u][ai].cap)
            v = u
        v = t
        while v != s:
            u, ai = parent[v]
            arc = graph[u][ai]
            arc.cap -= bottleneck
            graph[v][arc.rev].cap += bottleneck
            v = u
        sent += bottleneck
    return FlowAssignment(flow=_extract_flow(net, graph, index), value=sent)


def flow_cost(net: FlowNetwork, assignment: FlowAssignment) -> Fraction:
    """Total cost of an assignment, exact."""
    by_key = {(e.tail, e.head): e.cost_per_kg for e in net.edges}
    return sum(
        (by_key[key] * kg for key, kg in assignment.flow.items()),
        Fraction(0),
    )


def conservation_residuals(net: FlowNetwork, assignment: FlowAssignment) -> dict[str, int]:
    """Net outflow minus inflow per node; zero everywhere except source/sink."""
    net_out: dict[str, int] = {nid: 0 for nid in net.nodes}
    for (tail, head), kg in assignment.flow.items():
        net_out[tail] += kg
        net_out[head] -= kg
    return {
        nid: v
        for nid, v in net_out.items()
        if nid not in (net.source, net.sink)
    }
