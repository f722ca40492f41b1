"""Boolean tables over configuration spaces and the semiring operation tally.

Tables are numpy bool arrays with one axis of length q per variable, axes in
ascending variable order, so C-order flattening is the row-major layout used
everywhere else.

Counting rules:

* one AND per entry of the result for every pairwise product of two
  non-trivial tables; a product with an all-ones table is free;
* OR-marginalization costs ``(#configurations folded - 1)`` per output entry,
  and nothing when the input is all-ones;
* a support scan costs ``len(table) - 1`` comparisons;
* extending a table to more variables is index arithmetic and costs nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class BoolTable:
    vars: tuple[int, ...]
    bits: np.ndarray
    q: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        shape = (self.q,) * len(self.vars)
        if bits.shape != shape:
            if bits.size != self.q ** len(self.vars):
                raise ValueError(f"table over {self.vars} needs {self.q ** len(self.vars)} entries, got {bits.size}")
            bits = bits.reshape(shape)
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "bits", bits)

    @classmethod
    def ones(cls, vars: Sequence[int], q: int) -> "BoolTable":
        return cls(tuple(vars), np.ones((q,) * len(vars), dtype=bool), q)

    @property
    def trivial(self) -> bool:
        return bool(self.bits.all())

    @property
    def size(self) -> int:
        return self.q ** len(self.vars)

    def flat(self) -> list[int]:
        return [int(b) for b in self.bits.reshape(-1)]

    def __eq__(self, other):
        if not isinstance(other, BoolTable):
            return NotImplemented
        return self.vars == other.vars and self.q == other.q and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BoolTable(vars={self.vars}, bits={''.join(map(str, self.flat()))})"

    def extend(self, vars: Sequence[int]) -> "BoolTable":
        """Broadcast onto a superset of variables (free)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = set(self.vars) - set(vars)
        if missing:
            raise ValueError(f"cannot extend {self.vars} onto {vars}")
        shape = [self.q if v in self.vars else 1 for v in vars]
        return BoolTable(vars, np.broadcast_to(self.bits.reshape(shape), (self.q,) * len(vars)), self.q)

    def at(self, assignment: dict[int, int]) -> bool:
        return bool(self.bits[tuple(assignment[v] for v in self.vars)])


@dataclass
class OpCount:
    and_ops: int = 0
    or_ops: int = 0
    cmp_ops: int = 0

    @property
    def total(self) -> int:
        """Headline total; comparisons count as additions."""
        return self.and_ops + self.or_ops + self.cmp_ops

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.and_ops + other.and_ops, self.or_ops + other.or_ops, self.cmp_ops + other.cmp_ops)

    def __iadd__(self, other: "OpCount") -> "OpCount":
        self.and_ops += other.and_ops
        self.or_ops += other.or_ops
        self.cmp_ops += other.cmp_ops
        return self


@dataclass(frozen=True)
class OpRecord:
    """One tallied step. ``kind`` is message, marginal, support or traceback."""

    kind: str
    nodes: tuple[int, ...]
    and_ops: int = 0
    or_ops: int = 0
    cmp_ops: int = 0

    @property
    def count(self) -> OpCount:
        return OpCount(self.and_ops, self.or_ops, self.cmp_ops)


@dataclass
class OpLog:
    records: list[OpRecord] = field(default_factory=list)

    def add(self, kind: str, nodes: Iterable[int], and_ops=0, or_ops=0, cmp_ops=0) -> OpRecord:
        rec = OpRecord(kind, tuple(nodes), and_ops, or_ops, cmp_ops)
        self.records.append(rec)
        return rec

    @property
    def count(self) -> OpCount:
        total = OpCount()
        for r in self.records:
            total += r.count
        return total

    def extend(self, other: "OpLog") -> None:
        self.records.extend(other.records)


def conjoin(a: BoolTable, b: BoolTable, domain: Sequence[int]) -> tuple[BoolTable, int]:
    """Pointwise AND of ``a`` and ``b`` extended to ``domain``; returns (table, ANDs)."""
    if a.trivial:
        return b.extend(domain), 0
    if b.trivial:
        return a.extend(domain), 0
    ea, eb = a.extend(domain), b.extend(domain)
    out = BoolTable(tuple(domain), np.logical_and(ea.bits, eb.bits), a.q)
    return out, out.size


def conjoin_all(tables: Iterable[BoolTable], domain: Sequence[int], q: int) -> tuple[BoolTable, int]:
    acc = BoolTable.ones(domain, q)
    ands = 0
    for t in tables:
        acc, n = conjoin(acc, t, domain)
        ands += n
    return acc, ands


def marginalize(t: BoolTable, onto: Sequence[int]) -> tuple[BoolTable, int]:
    """OR out every variable not in ``onto``; returns (table, ORs)."""
    onto = tuple(v for v in t.vars if v in set(onto))
    if onto == t.vars:
        return t, 0
    if t.trivial:
        return BoolTable.ones(onto, t.q), 0
    axes = tuple(i for i, v in enumerate(t.vars) if v not in onto)
    out = BoolTable(onto, np.any(t.bits, axis=axes), t.q)
    folded = t.size // out.size
    return out, out.size * (folded - 1)


def support(t: BoolTable) -> tuple[list[tuple[int, ...]], int]:
    """All configurations mapped to 1, in row-major order, and the scan cost."""
    hits = [tuple(int(i) for i in idx) for idx in np.argwhere(t.bits)]
    return hits, t.size - 1


def support_restricted(t: BoolTable, J: Sequence[int]) -> tuple[list[tuple[int, ...]], int]:
    """Distinct projections of the support onto ``J`` (in ``t.vars`` order); same cost as a full scan."""
    pos = [t.vars.index(j) for j in sorted(J)]
    hits, cost = support(t)
    seen: dict[tuple[int, ...], None] = {}
    for h in hits:
        seen.setdefault(tuple(h[p] for p in pos), None)
    return list(seen), cost
