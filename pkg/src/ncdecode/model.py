"""Problem statement: alphabets, global encoding maps, sink demands and received data.

Symbols are held internally as integers ``0..q-1``; names only matter at the
document boundary. Tables are row-major over the ascending support, last index
fastest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import ParseError, ValidationError

PRIME_FIELD = "prime_field"
SYMBOL_SET = "symbol_set"

Assignment = dict  # variable index (1-based) -> symbol


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class Alphabet:
    kind: str
    q: int
    symbol_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in (PRIME_FIELD, SYMBOL_SET):
            raise ValidationError(f"unknown alphabet kind {self.kind!r}")
        if self.q < 2:
            raise ValidationError("alphabet size q must be at least 2")
        if self.kind == PRIME_FIELD and not _is_prime(self.q):
            raise ValidationError(f"prime_field alphabet needs a prime q, got {self.q}")
        if self.symbol_names is not None:
            names = tuple(self.symbol_names)
            object.__setattr__(self, "symbol_names", names)
            if len(names) != self.q or len(set(names)) != self.q:
                raise ValidationError("symbol_names must list exactly q distinct names")

    @property
    def is_field(self) -> bool:
        return self.kind == PRIME_FIELD

    def name(self, symbol: int) -> str:
        return self.symbol_names[symbol] if self.symbol_names else str(symbol)

    def symbol(self, token: Any) -> int:
        """Resolve a document token (name or integer) to an internal symbol."""
        names = self.symbol_names or tuple(str(i) for i in range(self.q))
        if isinstance(token, str) and token in names:
            return names.index(token)
        # bare integers only when names are the defaults, otherwise they are ambiguous
        if (
            self.symbol_names is None
            and isinstance(token, int)
            and not isinstance(token, bool)
            and 0 <= token < self.q
        ):
            return token
        raise ValidationError(f"invalid symbol {token!r} for alphabet of size {self.q}")


@dataclass(frozen=True)
class EncodingMap:
    """Global encoding map of one edge: either linear coefficients or an explicit table."""

    edge_id: str
    support: tuple[int, ...]
    linear: tuple[int, ...] | None = None
    table: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        s = self.support
        if not s:
            raise ValidationError(f"edge {self.edge_id}: empty support")
        if any(a >= b for a, b in zip(s, s[1:])):
            raise ValidationError(f"edge {self.edge_id}: support must be distinct and ascending")
        if (self.linear is None) == (self.table is None):
            raise ValidationError(f"edge {self.edge_id}: exactly one of linear/table required")
        if self.linear is not None:
            object.__setattr__(self, "linear", tuple(self.linear))
            if len(self.linear) != len(s):
                raise ValidationError(f"edge {self.edge_id}: one coefficient per support index")
            if any(c == 0 for c in self.linear):
                raise ValidationError(
                    f"edge {self.edge_id}: zero coefficient; drop the variable from the support"
                )
        else:
            object.__setattr__(self, "table", tuple(self.table))

    def check(self, alphabet: Alphabet, omega: int) -> None:
        q = alphabet.q
        if self.support[0] < 1 or self.support[-1] > omega:
            raise ValidationError(f"edge {self.edge_id}: support index outside 1..{omega}")
        if self.linear is not None:
            if not alphabet.is_field:
                raise ValidationError(f"edge {self.edge_id}: linear map needs a prime_field alphabet")
            if any(not 0 < c < q for c in self.linear):
                raise ValidationError(f"edge {self.edge_id}: coefficient outside the field")
        else:
            if len(self.table) != q ** len(self.support):
                raise ValidationError(
                    f"edge {self.edge_id}: table has {len(self.table)} entries, "
                    f"expected q^{len(self.support)} = {q ** len(self.support)}"
                )
            if any(not 0 <= v < q for v in self.table):
                raise ValidationError(f"edge {self.edge_id}: table entry outside alphabet")


@dataclass(frozen=True)
class MessageDemand:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValidationError("message demand must be nonempty, distinct and ascending")


@dataclass(frozen=True)
class FunctionDemand:
    """Target function g over ``args`` given as a row-major table."""

    args: tuple[int, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "table", tuple(self.table))
        a = self.args
        if not a or any(x >= y for x, y in zip(a, a[1:])):
            raise ValidationError("function args must be nonempty, distinct and ascending")

    def __call__(self, values: Iterable[int], q: int) -> int:
        return self.table[_row_major_index(tuple(values), q)]


@dataclass(frozen=True)
class SinkSpec:
    sink_id: str
    in_edges: tuple[EncodingMap, ...]
    demand: MessageDemand | FunctionDemand

    def __post_init__(self):
        object.__setattr__(self, "in_edges", tuple(self.in_edges))
        if not self.in_edges:
            raise ValidationError(f"sink {self.sink_id}: no incoming edges")
        ids = [m.edge_id for m in self.in_edges]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"sink {self.sink_id}: duplicate edge ids")

    def edge(self, edge_id: str) -> EncodingMap:
        for m in self.in_edges:
            if m.edge_id == edge_id:
                return m
        raise ValidationError(f"sink {self.sink_id}: no edge {edge_id!r}")

    @property
    def demands_messages(self) -> bool:
        return isinstance(self.demand, MessageDemand)


@dataclass(frozen=True)
class NetworkCodeInstance:
    alphabet: Alphabet
    omega: int
    sinks: tuple[SinkSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "sinks", tuple(self.sinks))
        if self.omega < 1:
            raise ValidationError("omega must be at least 1")
        if not self.sinks:
            raise ValidationError("instance has no sinks")
        ids = [s.sink_id for s in self.sinks]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate sink ids")
        q = self.alphabet.q
        for s in self.sinks:
            for m in s.in_edges:
                m.check(self.alphabet, self.omega)
            d = s.demand
            idx = d.indices if isinstance(d, MessageDemand) else d.args
            if idx[0] < 1 or idx[-1] > self.omega:
                raise ValidationError(f"sink {s.sink_id}: demand index outside 1..{self.omega}")
            if isinstance(d, FunctionDemand):
                if len(d.table) != q ** len(d.args):
                    raise ValidationError(f"sink {s.sink_id}: function table has wrong size")
                if any(not 0 <= v < q for v in d.table):
                    raise ValidationError(f"sink {s.sink_id}: function value outside alphabet")

    @property
    def q(self) -> int:
        return self.alphabet.q

    def sink(self, sink_id: str) -> SinkSpec:
        for s in self.sinks:
            if s.sink_id == sink_id:
                return s
        raise ValidationError(f"unknown sink {sink_id!r}")


@dataclass(frozen=True)
class ReceivedVector:
    sink_id: str
    values: Mapping[str, int] = field(default_factory=dict)

    def check(self, inst: NetworkCodeInstance) -> None:
        sink = inst.sink(self.sink_id)
        expected = {m.edge_id for m in sink.in_edges}
        if set(self.values) != expected:
            missing = sorted(expected - set(self.values))
            extra = sorted(set(self.values) - expected)
            raise ValidationError(
                f"received vector does not match sink {self.sink_id}: "
                f"missing {missing}, unexpected {extra}"
            )
        for e, v in self.values.items():
            if not 0 <= v < inst.q:
                raise ValidationError(f"received symbol for {e} outside alphabet")


# --- evaluation ---------------------------------------------------------------


def _row_major_index(values: tuple[int, ...], q: int) -> int:
    idx = 0
    for v in values:
        idx = idx * q + v
    return idx


def eval_map(m: EncodingMap, a: Mapping[int, int], q: int) -> int:
    """Evaluate ``m`` at assignment ``a``; variables outside the support are ignored."""
    try:
        xs = tuple(a[i] for i in m.support)
    except KeyError as exc:
        raise ValidationError(f"edge {m.edge_id}: assignment misses x{exc.args[0]}") from None
    if m.linear is not None:
        return sum(c * x for c, x in zip(m.linear, xs)) % q
    return m.table[_row_major_index(xs, q)]


@lru_cache(maxsize=4096)
def map_values(m: EncodingMap, q: int) -> np.ndarray:
    """All outputs of ``m`` as an array of shape ``(q,) * len(support)``."""
    k = len(m.support)
    if m.linear is not None:
        grids = np.indices((q,) * k)
        out = sum(c * g for c, g in zip(m.linear, grids)) % q
    else:
        out = np.asarray(m.table, dtype=np.int64).reshape((q,) * k)
    out = np.asarray(out, dtype=np.int64)
    out.setflags(write=False)
    return out


def evaluate_received(inst: NetworkCodeInstance, sink_id: str, x_star: Mapping[int, int]) -> ReceivedVector:
    sink = inst.sink(sink_id)
    missing = [i for i in range(1, inst.omega + 1) if i not in x_star]
    if missing:
        raise ValidationError(f"x_star must be total; missing {missing}")
    return ReceivedVector(sink_id, {m.edge_id: eval_map(m, x_star, inst.q) for m in sink.in_edges})


# --- documents ------------------------------------------------------------------


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _req(obj: Mapping, key: str, where: str) -> Any:
    if not isinstance(obj, Mapping) or key not in obj:
        raise ValidationError(f"{where}: missing key {key!r}")
    return obj[key]


def _int_list(v: Any, where: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
        raise ValidationError(f"{where}: expected a list of integers")
    return v


def instance_from_dict(doc: Mapping) -> NetworkCodeInstance:
    a = _req(doc, "alphabet", "instance")
    names = a.get("symbol_names") if isinstance(a, Mapping) else None
    alphabet = Alphabet(
        _req(a, "kind", "alphabet"), _req(a, "q", "alphabet"), tuple(names) if names is not None else None
    )
    omega = _req(doc, "omega", "instance")
    if not isinstance(omega, int):
        raise ValidationError("omega must be an integer")
    sinks = []
    raw_sinks = _req(doc, "sinks", "instance")
    if not isinstance(raw_sinks, list):
        raise ValidationError("sinks must be a list")
    for s in raw_sinks:
        sid = str(_req(s, "id", "sink"))
        edges = []
        for e in _req(s, "in_edges", f"sink {sid}"):
            eid = str(_req(e, "id", f"sink {sid} edge"))
            where = f"sink {sid} edge {eid}"
            support = _int_list(_req(e, "support", where), where)
            body = _req(e, "map", where)
            if not isinstance(body, Mapping) or len(body) != 1:
                raise ValidationError(f"{where}: map must have exactly one of 'linear'/'table'")
            if "linear" in body:
                if not alphabet.is_field:
                    raise ValidationError(f"{where}: linear map needs a prime_field alphabet")
                coeffs = [alphabet.symbol(c) for c in body["linear"]]
                edges.append(EncodingMap(eid, tuple(support), linear=tuple(coeffs)))
            elif "table" in body:
                entries = [alphabet.symbol(c) for c in body["table"]]
                edges.append(EncodingMap(eid, tuple(support), table=tuple(entries)))
            else:
                raise ValidationError(f"{where}: unknown map body {list(body)}")
        d = _req(s, "demand", f"sink {sid}")
        if isinstance(d, Mapping) and "messages" in d:
            demand = MessageDemand(tuple(_int_list(d["messages"], f"sink {sid} demand")))
        elif isinstance(d, Mapping) and "function" in d:
            f = d["function"]
            args = _int_list(_req(f, "args", f"sink {sid} function"), f"sink {sid} function")
            table = [alphabet.symbol(v) for v in _req(f, "table", f"sink {sid} function")]
            demand = FunctionDemand(tuple(args), tuple(table))
        else:
            raise ValidationError(f"sink {sid}: demand must be 'messages' or 'function'")
        sinks.append(SinkSpec(sid, tuple(edges), demand))
    return NetworkCodeInstance(alphabet, omega, tuple(sinks))


def parse_instance(text: str) -> NetworkCodeInstance:
    return instance_from_dict(_load_json(text))


def instance_to_dict(inst: NetworkCodeInstance) -> dict:
    ab = inst.alphabet
    n = ab.name
    alpha: dict[str, Any] = {"kind": ab.kind, "q": ab.q}
    if ab.symbol_names is not None:
        alpha["symbol_names"] = list(ab.symbol_names)
    sinks = []
    for s in inst.sinks:
        edges = []
        for m in s.in_edges:
            body = {"linear": [n(c) for c in m.linear]} if m.linear is not None else {"table": [n(v) for v in m.table]}
            edges.append({"id": m.edge_id, "support": list(m.support), "map": body})
        if isinstance(s.demand, MessageDemand):
            demand: dict[str, Any] = {"messages": list(s.demand.indices)}
        else:
            demand = {"function": {"args": list(s.demand.args), "table": [n(v) for v in s.demand.table]}}
        sinks.append({"id": s.sink_id, "in_edges": edges, "demand": demand})
    return {"alphabet": alpha, "omega": inst.omega, "sinks": sinks}


def serialize_instance(inst: NetworkCodeInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def parse_received(text: str, inst: NetworkCodeInstance, sink_id: str | None = None) -> ReceivedVector:
    """Parse ``{"sink": id, "values": {...}}``; a bare ``{edge: symbol}`` map needs ``sink_id``."""
    doc = _load_json(text)
    if not isinstance(doc, Mapping):
        raise ValidationError("received document must be an object")
    if "values" in doc:
        sid = str(doc.get("sink", sink_id)) if doc.get("sink", sink_id) is not None else None
        values = doc["values"]
    else:
        sid, values = sink_id, doc
    if sid is None:
        raise ValidationError("received document names no sink")
    if sink_id is not None and sid != sink_id:
        raise ValidationError(f"received document is for sink {sid}, not {sink_id}")
    if not isinstance(values, Mapping):
        raise ValidationError("received values must be an object")
    rv = ReceivedVector(sid, {str(k): inst.alphabet.symbol(v) for k, v in values.items()})
    rv.check(inst)
    return rv


def serialize_received(rv: ReceivedVector, alphabet: Alphabet) -> str:
    return json.dumps({"sink": rv.sink_id, "values": {k: alphabet.name(v) for k, v in rv.values.items()}}) + "\n"
