"""Closed-form operation counts on a factor tree, set against the instrumented engine."""

from __future__ import annotations

from dataclasses import dataclass, field

from .decoder import ALL_VERTEX, MODES, MULTIPLE_VERTEX, TRACEBACK, choose_root, decode
from .engine import run_all_vertex, run_single_vertex
from .errors import ValidationError
from .graph import FactorGraph
from .model import MessageDemand, NetworkCodeInstance, ReceivedVector
from .tables import OpCount


REPORT_KEYS = {TRACEBACK: "traceback", MULTIPLE_VERTEX: "multiple_vertex", ALL_VERTEX: "all_vertex"}


@dataclass
class CountReport:
    root: int
    C1: int
    C2: int
    C3: int
    C4: int
    C5: int
    m: int
    omega: int
    fast_decodable: bool
    nodes: list[tuple[str, int, int, int]]  # (name, d_z, q_z, a_z)
    edges: list[tuple[str, str, int]]  # (name, name, q_e)
    instrumented: dict[str, OpCount] = field(default_factory=dict)

    @property
    def predictions(self) -> dict[str, int]:
        return {"C1": self.C1, "C2": self.C2, "C3": self.C3, "C4": self.C4, "C5": self.C5}

    # closed form each instrumented run is compared with
    _PAIRING = {"single_vertex": "C1", "traceback": "C3", "all_vertex_sp": "C4", "all_vertex": "C5"}

    def to_text(self) -> str:
        lines = ["[graph-stats]"]
        lines.append(f"nodes={len(self.nodes)}")
        lines.append(f"edges={len(self.edges)}")
        lines.append(f"root={self.root}")
        for name, d, qz, a in self.nodes:
            lines.append(f"node.{name}=d:{d},q:{qz},a:{a}")
        for u, v, qe in self.edges:
            lines.append(f"edge.{u}|{v}=q:{qe}")
        lines.append("[predictions]")
        lines += [f"{k}={v}" for k, v in self.predictions.items()]
        lines.append("[instrumented]")
        for mode, c in self.instrumented.items():
            lines.append(f"{mode}.and={c.and_ops}")
            lines.append(f"{mode}.or={c.or_ops}")
            lines.append(f"{mode}.cmp={c.cmp_ops}")
            lines.append(f"{mode}_total={c.total}")
            key = self._PAIRING.get(mode)
            if key:
                lines.append(f"{mode}.vs_{key}={c.total - self.predictions[key]}")
        lines.append("[fast-decodability]")
        lines.append(f"m={self.m}")
        lines.append(f"omega={self.omega}")
        lines.append(f"fast_decodable={str(self.fast_decodable).lower()}")
        return "\n".join(lines) + "\n"


def predict(g: FactorGraph, root: int) -> CountReport:
    """Evaluate the five closed forms literally on ``g`` (no leaf corrections)."""
    if not g.acyclic:
        raise ValidationError("closed forms need an acyclic factor graph")
    if not 0 <= root < len(g.nodes):
        raise ValidationError(f"invalid root {root}")
    Z = [n.node_id for n in g.nodes]
    qz = {z: g.q_node(z) for z in Z}
    d = {z: g.degree(z) for z in Z}
    sum_dq = sum(d[z] * qz[z] for z in Z)
    sum_qe = sum(g.q_edge(a, b) for a, b in g.edges)
    sum_qv = sum(qz[n.node_id] for n in g.nodes if n.is_variable)
    sum_qw = sum(qz[n.node_id] for n in g.nodes if not n.is_variable)
    c1 = sum_dq - sum_qe - sum_qv
    c2 = c1 + qz[root] - 1
    c3 = sum_dq - sum_qe + sum_qw - len(Z)
    c4 = sum((4 * d[z] - 5) * qz[z] for z in Z) + 2 * sum_qw - 2 * sum_qe
    c5 = c4 + sum(qz.values()) - len(Z)
    m, fast = fast_decodability(g, g.omega)
    return CountReport(
        root, c1, c2, c3, c4, c5, m, g.omega, fast,
        nodes=[(g.nodes[z].name, d[z], qz[z], g.nodes[z].a) for z in Z],
        edges=[(g.nodes[a].name, g.nodes[b].name, g.q_edge(a, b)) for a, b in sorted(g.edges)],
    )


def fast_decodability(g: FactorGraph, omega: int, q: int | None = None) -> tuple[int, bool]:
    """Largest local domain after stretching, and whether it beats the brute-force exponent."""
    m = g.max_domain_size
    return m, m < omega


def analyze(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector, override=None,
            root: int | None = None) -> CountReport:
    """Predictions plus instrumented counts for every decoding mode on one received vector."""
    sink = inst.sink(sink_id)
    if not isinstance(sink.demand, MessageDemand):
        raise ValidationError("analyze needs a sink that demands messages")
    runs = {mode: decode(inst, sink_id, received, mode, override) for mode in MODES}
    g = runs[TRACEBACK].graph
    if root is None:
        root = runs[TRACEBACK].roots[0] if runs[TRACEBACK].roots else choose_root(g, sink.demand.indices)
    rep = predict(g, root)
    rep.instrumented["single_vertex"] = run_single_vertex(g, root).ops
    rep.instrumented["all_vertex_sp"] = run_all_vertex(g).ops
    for mode, key in REPORT_KEYS.items():
        rep.instrumented[key] = runs[mode].ops
    return rep
