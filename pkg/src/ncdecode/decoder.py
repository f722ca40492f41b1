"""Decoding at a sink (single-vertex + traceback, multiple-vertex, all-vertex) and function computation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .engine import SingleVertexRun, run_all_vertex, run_multiple_vertex, run_single_vertex
from .errors import Inconsistent, NotDecodable, ValidationError
from .graph import FactorGraph, NodeKind, acyclify, build_decoding_graph, build_function_graph
from .model import FunctionDemand, MessageDemand, NetworkCodeInstance, ReceivedVector
from .tables import BoolTable, OpCount, OpLog, support, support_restricted

TRACEBACK = "single_vertex_traceback"
MULTIPLE_VERTEX = "multiple_vertex"
ALL_VERTEX = "all_vertex"
MODES = (TRACEBACK, MULTIPLE_VERTEX, ALL_VERTEX)


@dataclass
class DecodeResult:
    sink_id: str
    mode: str
    graph: FactorGraph
    log: OpLog
    assignment: dict[int, int] = field(default_factory=dict)
    function_value: int | None = None
    function_support: list[tuple[int, ...]] | None = None
    roots: tuple[int, ...] = ()
    visited: tuple[int, ...] = ()

    @property
    def ops(self) -> OpCount:
        return self.log.count


def choose_root(g: FactorGraph, demand: Iterable[int], nodes: Sequence[int] | None = None) -> int:
    """Node with the most demanded variables; ties go to the larger domain, then the lower id."""
    D = set(demand)
    if not D:
        raise ValidationError("empty demand")
    cands = nodes if nodes is not None else [n.node_id for n in g.nodes]
    return min(
        cands,
        key=lambda z: (-len(D & set(g.nodes[z].domain)), -len(g.nodes[z].domain), z),
    )


def traceback_step(g: FactorGraph, z: int, lam: BoolTable, known: dict[int, int],
                   demand: Iterable[int] | None = None, log: OpLog | None = None) -> dict[int, int]:
    """Slice ``lam`` at the already-known values and return the first configuration hit.

    Costs ``q^|A| - 1`` comparisons for the ``|A|`` unknown variables. With
    ``demand`` given, every hit must agree on the demanded coordinates.
    """
    A = [v for v in lam.vars if v not in known]
    idx = tuple(known[v] if v in known else slice(None) for v in lam.vars)
    hits = np.argwhere(lam.bits[idx])
    if log is not None:
        log.add("traceback", (z,), cmp_ops=g.q ** len(A) - 1)
    if len(hits) == 0:
        raise Inconsistent(f"traceback at {g.nodes[z].name}: empty slice")
    if demand is not None:
        D = set(demand)
        pos = [k for k, v in enumerate(A) if v in D]
        if len({tuple(h[pos]) for h in hits}) > 1:
            raise NotDecodable(f"traceback at {g.nodes[z].name}: demanded messages not unique")
    return {v: int(s) for v, s in zip(A, hits[0])}


def _root_support(g: FactorGraph, run: SingleVertexRun, D: set[int], log: OpLog) -> dict[int, int]:
    t = run.marginal.table
    hits, cost = support(t)
    log.add("support", (run.root,), cmp_ops=cost)
    if not hits:
        raise Inconsistent("received data is impossible under the code (empty root support)")
    pos = [k for k, v in enumerate(t.vars) if v in D]
    if len({tuple(h[k] for k in pos) for h in hits}) > 1:
        raise NotDecodable(f"demanded messages at root {g.nodes[run.root].name} are not unique")
    return dict(zip(t.vars, hits[0]))


def _traceback(g: FactorGraph, run: SingleVertexRun, D: set[int], decided: dict[int, int], log: OpLog) -> list[int]:
    st = run.store
    visited = [run.root]

    def visit(z: int) -> None:
        p = st.parent[z]
        sep = set(g.nodes[z].domain) & set(g.nodes[p].domain)
        # the slice is only consistent once the whole separator towards the root is fixed
        if not sep <= decided.keys() and p not in visited:
            visit(p)
        known = {v: decided[v] for v in g.nodes[z].domain if v in decided}
        decided.update(traceback_step(g, z, st.partials[z], known, D, log))
        visited.append(z)

    for z in st.order[1:]:
        if D <= decided.keys():
            break
        if z not in visited and (set(g.nodes[z].domain) & D) - decided.keys():
            visit(z)
    return visited


def _merge(assignment: dict[int, int], new: dict[int, int]) -> None:
    for v, s in new.items():
        if assignment.get(v, s) != s:
            raise Inconsistent(f"x{v} decoded inconsistently")
        assignment[v] = s


def _restricted_unique(t: BoolTable, J: list[int], z: int, g: FactorGraph, log: OpLog) -> dict[int, int]:
    hits, cost = support_restricted(t, J)
    log.add("support", (z,), cmp_ops=cost)
    if not hits:
        raise Inconsistent(f"empty support at {g.nodes[z].name}")
    if len(hits) > 1:
        raise NotDecodable(f"demanded messages at {g.nodes[z].name} are not unique")
    return dict(zip(sorted(J), hits[0]))


def prepare_graph(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector,
                  override=None) -> FactorGraph:
    sink = inst.sink(sink_id)
    build = build_decoding_graph if isinstance(sink.demand, MessageDemand) else build_function_graph
    return acyclify(build(inst, sink_id, received), override)


def decode(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector, mode: str = TRACEBACK,
           override=None) -> DecodeResult:
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}")
    sink = inst.sink(sink_id)
    if not isinstance(sink.demand, MessageDemand):
        raise ValidationError(f"sink {sink_id} demands a function; use compute_function")
    g = prepare_graph(inst, sink_id, received, override)
    D = set(sink.demand.indices)
    log = OpLog()
    assignment: dict[int, int] = {}

    if mode == ALL_VERTEX:
        run = run_all_vertex(g)
        log.extend(run.log)
        for z in sorted(run.marginals):
            t = run.marginals[z].table
            J = [v for v in t.vars if v in D]
            _merge(assignment, _restricted_unique(t, J, z, g, log))
        return DecodeResult(sink_id, mode, g, log, {v: assignment[v] for v in sorted(D)},
                            roots=tuple(s.root for s in run.stores), visited=tuple(sorted(run.marginals)))

    roots, visited = [], []
    for comp in g.components:
        Dc = {i for i in D if g.variable_node(i) in comp}
        if not Dc:
            continue
        root = choose_root(g, Dc, comp)
        roots.append(root)
        run = run_single_vertex(g, root)
        log.extend(run.log)
        if mode == TRACEBACK:
            decided = _root_support(g, run, Dc, log)
            visited += _traceback(g, run, Dc, decided, log)
            _merge(assignment, {v: decided[v] for v in Dc})
        else:
            covered = Dc & set(g.nodes[root].domain)
            zprime = [root]
            for z in run.store.order[1:]:
                new = (set(g.nodes[z].domain) & Dc) - covered
                if new:
                    zprime.append(z)
                    covered |= new
            marginals, extra = run_multiple_vertex(g, run, zprime[1:])
            log.extend(extra)
            for z in zprime:
                t = marginals[z].table
                _merge(assignment, _restricted_unique(t, [v for v in t.vars if v in Dc], z, g, log))
            visited += zprime
    return DecodeResult(sink_id, mode, g, log, {v: assignment[v] for v in sorted(D)},
                        roots=tuple(roots), visited=tuple(visited))


def compute_function(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector, override=None,
                     full_support: bool = False) -> DecodeResult:
    """Evaluate the sink's target function on the first consistent argument tuple.

    The scan stops at the first hit (comparisons counted up to it) unless
    ``full_support`` asks for the whole restricted support set.
    """
    sink = inst.sink(sink_id)
    demand = sink.demand
    if not isinstance(demand, FunctionDemand):
        raise ValidationError(f"sink {sink_id} demands messages; use decode")
    g = prepare_graph(inst, sink_id, received, override)
    root = next(n.node_id for n in g.nodes if n.kind is NodeKind.DUMMY)
    run = run_single_vertex(g, root)
    log = OpLog()
    log.extend(run.log)
    t = run.marginal.table
    pos = [t.vars.index(i) for i in demand.args]
    flat = t.bits.reshape(-1)
    S = None
    if full_support:
        hits, cost = support(t)
        log.add("support", (root,), cmp_ops=cost)
        S = list(dict.fromkeys(tuple(h[p] for p in pos) for h in hits))
        first = hits[0] if hits else None
    else:
        nz = np.flatnonzero(flat)
        if len(nz):
            log.add("support", (root,), cmp_ops=int(nz[0]))
            first = tuple(int(i) for i in np.unravel_index(nz[0], t.bits.shape))
        else:
            log.add("support", (root,), cmp_ops=t.size - 1)
            first = None
    if first is None:
        raise Inconsistent("received data is impossible under the code (empty support)")
    xhat = tuple(first[p] for p in pos)
    return DecodeResult(sink_id, "function", g, log, dict(zip(demand.args, xhat)),
                        function_value=demand(xhat, inst.q), function_support=S,
                        roots=(root,), visited=(root,))
