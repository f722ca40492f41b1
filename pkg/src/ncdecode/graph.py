"""Per-sink factor graphs and cycle removal by variable stretching."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import DemandNotCovered, ValidationError
from .model import FunctionDemand, MessageDemand, NetworkCodeInstance, ReceivedVector, map_values
from .tables import BoolTable

DUMMY_REF = "g"


class NodeKind(str, Enum):
    VARIABLE = "variable"
    FACTOR = "factor"
    DUMMY = "dummy_factor"


@dataclass(frozen=True)
class FGNode:
    node_id: int
    kind: NodeKind
    name: str
    domain: tuple[int, ...]
    kernel: BoolTable | None = None  # over the pre-stretch domain; None for variable nodes
    var: int | None = None  # message index of a variable node
    edge_id: str | None = None

    @property
    def a(self) -> int:
        return 0 if self.kind is NodeKind.VARIABLE else 1

    @property
    def is_variable(self) -> bool:
        return self.kind is NodeKind.VARIABLE


@dataclass(frozen=True, eq=False)
class FactorGraph:
    q: int
    omega: int
    nodes: tuple[FGNode, ...]
    edges: frozenset
    sink_id: str = ""
    removed_edges: tuple[tuple[int, int], ...] = ()
    stretch_log: tuple[tuple[int, tuple[int, ...]], ...] = ()
    isolated: tuple[int, ...] = ()
    unconstrained: tuple[int, ...] = ()

    def __post_init__(self):
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for a, b in edges:
            if self.nodes[a].is_variable == self.nodes[b].is_variable:
                raise ValidationError(f"edge ({a},{b}) does not join a variable and a factor node")

    @cached_property
    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {n.node_id: [] for n in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for v in adj.values():
            v.sort()
        return adj

    def degree(self, z: int) -> int:
        return len(self.adjacency[z])

    def q_node(self, z: int) -> int:
        return self.q ** len(self.nodes[z].domain)

    def q_edge(self, a: int, b: int) -> int:
        return self.q ** len(set(self.nodes[a].domain) & set(self.nodes[b].domain))

    @property
    def variables(self) -> list[FGNode]:
        return [n for n in self.nodes if n.is_variable]

    @property
    def factors(self) -> list[FGNode]:
        return [n for n in self.nodes if not n.is_variable]

    def variable_node(self, i: int) -> int:
        for n in self.nodes:
            if n.var == i:
                return n.node_id
        raise KeyError(i)

    def node_named(self, name: str) -> FGNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    @cached_property
    def components(self) -> list[list[int]]:
        """Connected components, each sorted, ordered by their lowest node id."""
        seen: set[int] = set()
        comps = []
        for n in self.nodes:
            if n.node_id in seen:
                continue
            comp, queue = [], deque([n.node_id])
            seen.add(n.node_id)
            while queue:
                z = queue.popleft()
                comp.append(z)
                for u in self.adjacency[z]:
                    if u not in seen:
                        seen.add(u)
                        queue.append(u)
            comps.append(sorted(comp))
        return comps

    def component_of(self, z: int) -> list[int]:
        for c in self.components:
            if z in c:
                return c
        raise KeyError(z)

    @property
    def acyclic(self) -> bool:
        return len(self.edges) == len(self.nodes) - len(self.components)

    @property
    def max_domain_size(self) -> int:
        return max(len(n.domain) for n in self.nodes)

    def kernel_table(self, z: int) -> BoolTable:
        """Local kernel of node ``z`` on its (possibly stretched) domain."""
        n = self.nodes[z]
        if n.kernel is None:
            return BoolTable.ones(n.domain, self.q)
        return n.kernel.extend(n.domain)

    def describe(self) -> str:
        lines = []
        for n in self.nodes:
            dom = ",".join(f"x{i}" for i in n.domain)
            nb = ",".join(self.nodes[u].name for u in self.adjacency[n.node_id])
            lines.append(f"{n.node_id} {n.kind.value} {n.name} domain={{{dom}}} nbrs=[{nb}]")
        return "\n".join(lines)


# --- construction -----------------------------------------------------------------


def _base_graph(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector):
    sink = inst.sink(sink_id)
    if received.sink_id != sink_id:
        raise ValidationError(f"received vector belongs to sink {received.sink_id}, not {sink_id}")
    received.check(inst)
    q = inst.q
    nodes: list[FGNode] = [
        FGNode(i - 1, NodeKind.VARIABLE, f"x{i}", (i,), var=i) for i in range(1, inst.omega + 1)
    ]
    edges = []
    for m in sink.in_edges:
        nid = len(nodes)
        kernel = BoolTable(m.support, map_values(m, q) == received.values[m.edge_id], q)
        nodes.append(FGNode(nid, NodeKind.FACTOR, f"f[{m.edge_id}]", m.support, kernel, edge_id=m.edge_id))
        edges.extend((i - 1, nid) for i in m.support)
    covered = {i for m in sink.in_edges for i in m.support}
    isolated = tuple(i for i in range(1, inst.omega + 1) if i not in covered)
    return sink, nodes, edges, isolated


def build_decoding_graph(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector) -> FactorGraph:
    sink, nodes, edges, isolated = _base_graph(inst, sink_id, received)
    if not isinstance(sink.demand, MessageDemand):
        raise ValidationError(f"sink {sink_id} demands a function; use build_function_graph")
    lost = [i for i in sink.demand.indices if i in isolated]
    if lost:
        raise DemandNotCovered(f"sink {sink_id}: demanded x{lost} appear in no incoming map")
    return FactorGraph(inst.q, inst.omega, tuple(nodes), frozenset(edges), sink_id, isolated=isolated)


def build_function_graph(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector) -> FactorGraph:
    sink, nodes, edges, isolated = _base_graph(inst, sink_id, received)
    demand = sink.demand
    if not isinstance(demand, FunctionDemand):
        raise ValidationError(f"sink {sink_id} demands messages; use build_decoding_graph")
    gid = len(nodes)
    nodes.append(FGNode(gid, NodeKind.DUMMY, DUMMY_REF, demand.args, BoolTable.ones(demand.args, inst.q)))
    edges.extend((i - 1, gid) for i in demand.args)
    free = tuple(i for i in demand.args if i in isolated)
    if free:
        warnings.warn(
            f"sink {sink_id}: function arguments {['x%d' % i for i in free]} are unconstrained "
            "by every incoming map; any value is consistent",
            stacklevel=2,
        )
    return FactorGraph(
        inst.q, inst.omega, tuple(nodes), frozenset(edges), sink_id, isolated=isolated, unconstrained=free
    )


# --- acyclification ---------------------------------------------------------------


def _bfs_forest(n_nodes: int, edges: tuple[tuple[int, int], ...]) -> frozenset:
    adj: dict[int, list[int]] = {i: [] for i in range(n_nodes)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj.values():
        v.sort()
    seen: set[int] = set()
    tree = set()
    for start in range(n_nodes):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            z = queue.popleft()
            for u in adj[z]:
                if u not in seen:
                    seen.add(u)
                    tree.add((min(z, u), max(z, u)))
                    queue.append(u)
    return frozenset(tree)


def _forest_path(adj: dict[int, list[int]], src: int, dst: int) -> tuple[int, ...]:
    prev = {src: None}
    queue = deque([src])
    while queue:
        z = queue.popleft()
        if z == dst:
            break
        for u in adj[z]:
            if u not in prev:
                prev[u] = z
                queue.append(u)
    if dst not in prev:
        raise ValidationError(f"no forest path between nodes {src} and {dst}")
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return tuple(reversed(path))


@lru_cache(maxsize=1024)
def _stretch_plan(domains: tuple[tuple[int, ...], ...], edges: tuple[tuple[int, int], ...],
                  var_of: tuple[int | None, ...], removed: tuple[tuple[int, int], ...] | None):
    n = len(domains)
    if removed is None:
        tree = _bfs_forest(n, edges)
        removed = tuple(sorted(set(edges) - tree))
    kept = tuple(e for e in edges if e not in set(removed))
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in kept:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj.values():
        v.sort()
    new_domains = [set(d) for d in domains]
    log = []
    for a, b in removed:
        x, w = (a, b) if var_of[a] is not None else (b, a)
        path = _forest_path(adj, x, w)
        for z in path:
            new_domains[z].add(var_of[x])
        log.append((var_of[x], path))
    return removed, tuple(log), tuple(tuple(sorted(d)) for d in new_domains)


def resolve_override(g: FactorGraph, pairs: Iterable[Sequence]) -> tuple[tuple[int, int], ...]:
    """Map ``(variable index, factor edge id)`` pairs to node-id edges of ``g``."""
    out = []
    for pair in pairs:
        if len(pair) != 2:
            raise ValidationError(f"override entry {pair!r} is not a (variable, edge) pair")
        i, ref = pair
        try:
            v = g.variable_node(int(i))
        except (KeyError, ValueError):
            raise ValidationError(f"override names unknown variable {i!r}") from None
        matches = [n.node_id for n in g.nodes if n.edge_id == str(ref)]
        if not matches and str(ref) == DUMMY_REF:
            matches = [n.node_id for n in g.nodes if n.kind is NodeKind.DUMMY]
        if not matches:
            raise ValidationError(f"override names unknown factor {ref!r}")
        e = (min(v, matches[0]), max(v, matches[0]))
        if e not in g.edges:
            raise ValidationError(f"override edge (x{i}, {ref}) is not in the factor graph")
        out.append(e)
    return tuple(sorted(set(out)))


def acyclify(g: FactorGraph, override: Iterable[Sequence] | None = None) -> FactorGraph:
    """Spanning forest (BFS from the lowest id, ascending neighbours) plus variable stretching.

    ``override`` lists ``(variable index, factor edge id)`` pairs to delete instead
    of the BFS choice; what remains must be a spanning forest of ``g``.
    """
    removed = None
    if override is not None:
        removed = resolve_override(g, override)
        kept = g.edges - set(removed)
        probe = FactorGraph(g.q, g.omega, g.nodes, kept)
        if not probe.acyclic or len(probe.components) != len(g.components):
            raise ValidationError("tree override does not leave a spanning forest")
    elif g.acyclic:
        return g
    domains = tuple(n.domain for n in g.nodes)
    edges = tuple(sorted(g.edges))
    var_of = tuple(n.var for n in g.nodes)
    removed_edges, log, new_domains = _stretch_plan(domains, edges, var_of, removed)
    nodes = tuple(replace(n, domain=d) for n, d in zip(g.nodes, new_domains))
    return FactorGraph(
        g.q, g.omega, nodes, g.edges - set(removed_edges), g.sink_id,
        removed_edges=removed_edges, stretch_log=log, isolated=g.isolated, unconstrained=g.unconstrained,
    )
