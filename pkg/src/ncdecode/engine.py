"""Boolean-semiring sum-product on acyclic factor graphs, with exact operation tallies.

Every node orders its neighbours as ``k_1, ..., k_d``: the parent first (for the
root, its lowest-id neighbour), then the children by ascending id. On the way
up a node forms the suffix products ``c_{d+1} = h, c_d = h k_d, ..., c_2``;
``c_2`` is the partial marginal lambda that traceback later slices. The
all-vertex pass adds the prefix products ``b_i`` and combines them with the
stored suffixes, so no product is recomputed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ValidationError
from .graph import FactorGraph
from .tables import BoolTable, OpCount, OpLog, conjoin, conjoin_all, marginalize


@dataclass(frozen=True)
class Message:
    from_node: int
    to_node: int
    table: BoolTable


@dataclass(frozen=True)
class Marginal:
    node_id: int
    table: BoolTable


@dataclass
class MessageStore:
    root: int
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    order: list[int]  # breadth-first from the root
    messages: dict[tuple[int, int], BoolTable] = field(default_factory=dict)
    partials: dict[int, BoolTable] = field(default_factory=dict)
    suffix: dict[int, dict[int, BoolTable]] = field(default_factory=dict)

    def neighbours(self, z: int) -> list[int]:
        """``k_1 .. k_d`` for node ``z``."""
        p = self.parent[z]
        return ([p] if p is not None else []) + self.children[z]

    def path_from_root(self, z: int) -> list[int]:
        path = [z]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return list(reversed(path))


@dataclass
class SingleVertexRun:
    root: int
    marginal: Marginal
    store: MessageStore
    log: OpLog

    @property
    def ops(self) -> OpCount:
        return self.log.count


@dataclass
class AllVertexRun:
    marginals: dict[int, Marginal]
    stores: list[MessageStore]
    log: OpLog

    @property
    def ops(self) -> OpCount:
        return self.log.count


def _shared(g: FactorGraph, a: int, b: int) -> tuple[int, ...]:
    other = set(g.nodes[b].domain)
    return tuple(v for v in g.nodes[a].domain if v in other)


def _require_acyclic(g: FactorGraph) -> None:
    if not g.acyclic:
        raise ValidationError("sum-product needs an acyclic factor graph; run acyclify first")


# --- single-message primitives ---------------------------------------------------


def _outgoing(g: FactorGraph, z: int, to: int, incoming: Mapping[int, BoolTable]) -> tuple[Message, OpCount]:
    expected = set(g.adjacency[z]) - {to}
    if to not in g.adjacency[z]:
        raise ValidationError(f"nodes {z} and {to} are not adjacent")
    if set(incoming) != expected:
        raise ValidationError(f"node {z} needs messages from {sorted(expected)}, got {sorted(incoming)}")
    dom = g.nodes[z].domain
    tables = [g.kernel_table(z)] + [incoming[u] for u in sorted(incoming, reverse=True)]
    lam, ands = conjoin_all(tables, dom, g.q)
    out, ors = marginalize(lam, _shared(g, z, to))
    return Message(z, to, out), OpCount(ands, ors)


def leaf_message(g: FactorGraph, z: int, to: int) -> tuple[Message, OpCount]:
    if g.degree(z) != 1:
        raise ValidationError(f"node {z} is not a leaf")
    return _outgoing(g, z, to, {})


def var_to_factor(g: FactorGraph, v: int, w: int, incoming: Mapping[int, BoolTable]) -> tuple[Message, OpCount]:
    if not g.nodes[v].is_variable or g.nodes[w].is_variable:
        raise ValidationError("var_to_factor needs a variable source and a factor target")
    return _outgoing(g, v, w, incoming)


def factor_to_var(g: FactorGraph, w: int, v: int, incoming: Mapping[int, BoolTable]) -> tuple[Message, OpCount]:
    if g.nodes[w].is_variable or not g.nodes[v].is_variable:
        raise ValidationError("factor_to_var needs a factor source and a variable target")
    return _outgoing(g, w, v, incoming)


# --- schedules ----------------------------------------------------------------


def _rooted(g: FactorGraph, root: int) -> MessageStore:
    parent: dict[int, int | None] = {root: None}
    children: dict[int, list[int]] = {}
    order = []
    queue = deque([root])
    while queue:
        z = queue.popleft()
        order.append(z)
        children[z] = [u for u in g.adjacency[z] if u != parent[z]]
        for u in children[z]:
            parent[u] = z
            queue.append(u)
    return MessageStore(root, parent, children, order)


def _upward(g: FactorGraph, root: int, log: OpLog) -> tuple[MessageStore, Marginal]:
    if root not in g.adjacency:
        raise ValidationError(f"invalid root {root}")
    st = _rooted(g, root)
    root_marginal = None
    for z in reversed(st.order):
        kin = st.neighbours(z)
        d = len(kin)
        dom = g.nodes[z].domain
        c = g.kernel_table(z)
        suffix = {d + 1: c}
        ands = 0
        for i in range(d, 1, -1):
            c, n = conjoin(c, st.messages[(kin[i - 1], z)], dom)
            ands += n
            suffix[i] = c
        if d == 0:
            suffix[2] = c
        st.suffix[z] = suffix
        lam = suffix[2]
        st.partials[z] = lam
        if z != root:
            p = st.parent[z]
            msg, ors = marginalize(lam, _shared(g, z, p))
            st.messages[(z, p)] = msg
            log.add("message", (z, p), ands, ors)
        else:
            if d:
                table, n = conjoin(st.messages[(kin[0], z)], lam, dom)
                ands += n
            else:
                table = lam
            root_marginal = Marginal(z, table)
            log.add("marginal", (z,), ands)
    return st, root_marginal


def run_single_vertex(g: FactorGraph, root: int) -> SingleVertexRun:
    """All messages flow to ``root`` (its component only); returns its marginal."""
    _require_acyclic(g)
    log = OpLog()
    st, marg = _upward(g, root, log)
    return SingleVertexRun(root, marg, st, log)


def send_direct(g: FactorGraph, st: MessageStore, z: int, to: int, log: OpLog) -> BoolTable:
    """Compute ``z -> to`` straight from its definition, reusing stored inputs."""
    if (z, to) in st.messages:
        return st.messages[(z, to)]
    incoming = {u: st.messages[(u, z)] for u in g.adjacency[z] if u != to}
    msg, cnt = _outgoing(g, z, to, incoming)
    st.messages[(z, to)] = msg.table
    log.add("message", (z, to), cnt.and_ops, cnt.or_ops)
    return msg.table


def run_multiple_vertex(g: FactorGraph, run: SingleVertexRun, targets: Iterable[int]) -> tuple[dict[int, Marginal], OpLog]:
    """Continue a single-vertex run until every target has all its messages.

    Reverse messages are computed along root-to-target paths only; a target's
    marginal is its parent message ANDed with its stored partial marginal.
    """
    st, log = run.store, OpLog()
    out = {run.root: run.marginal}
    for z in targets:
        if z in out:
            continue
        path = st.path_from_root(z)
        for u, v in zip(path, path[1:]):
            send_direct(g, st, u, v, log)
        table, n = conjoin(st.messages[(st.parent[z], z)], st.partials[z], g.nodes[z].domain)
        log.add("marginal", (z,), n)
        out[z] = Marginal(z, table)
    return out, log


def _downward(g: FactorGraph, st: MessageStore, root_marginal: Marginal, log: OpLog) -> dict[int, Marginal]:
    marginals = {st.root: root_marginal}
    for z in st.order:
        kin = st.neighbours(z)
        d = len(kin)
        if d == 0:
            continue
        dom = g.nodes[z].domain
        c = st.suffix[z]
        k1 = st.messages[(kin[0], z)]
        if z != st.root:
            table, n = conjoin(k1, c[2], dom)
            marginals[z] = Marginal(z, table)
            log.add("marginal", (z,), n)
        else:
            msg, ors = marginalize(c[2], _shared(g, z, kin[0]))
            st.messages[(z, kin[0])] = msg
            log.add("message", (z, kin[0]), 0, ors)
        b = k1
        for i in range(2, d + 1):
            ands = 0
            if i >= 3:
                b, n = conjoin(b, st.messages[(kin[i - 2], z)], dom)
                ands += n
            hat, n = conjoin(b, c[i + 1], dom)
            ands += n
            msg, ors = marginalize(hat, _shared(g, z, kin[i - 1]))
            st.messages[(z, kin[i - 1])] = msg
            log.add("message", (z, kin[i - 1]), ands, ors)
    return marginals


def run_all_vertex(g: FactorGraph) -> AllVertexRun:
    """Marginals at every node: up and down each component, rooted at its lowest id."""
    _require_acyclic(g)
    log = OpLog()
    marginals: dict[int, Marginal] = {}
    stores = []
    for comp in g.components:
        st, rm = _upward(g, comp[0], log)
        marginals.update(_downward(g, st, rm, log))
        stores.append(st)
    return AllVertexRun(marginals, stores, log)
