"""Ground truth by exhaustive enumeration of the message space."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import SizeGuardExceeded, ValidationError
from .model import FunctionDemand, MessageDemand, NetworkCodeInstance, ReceivedVector, map_values
from .tables import BoolTable

SIZE_GUARD = 10**7


def _guard(q: int, omega: int) -> None:
    if q**omega > SIZE_GUARD:
        raise SizeGuardExceeded(f"q^omega = {q}^{omega} exceeds the enumeration guard {SIZE_GUARD}")


def _full(t: np.ndarray, support: Sequence[int], omega: int) -> np.ndarray:
    shape = [1] * omega
    for i in support:
        shape[i - 1] = t.shape[0]
    return t.reshape(shape)


def global_function(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector) -> np.ndarray:
    """Boolean array over A^omega: does x reproduce every received symbol?"""
    _guard(inst.q, inst.omega)
    received.check(inst)
    sink = inst.sink(sink_id)
    out = np.ones((inst.q,) * inst.omega, dtype=bool)
    for m in sink.in_edges:
        out &= _full(map_values(m, inst.q) == received.values[m.edge_id], m.support, inst.omega)
    return out


def brute_force_decode(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector) -> set[tuple[int, ...]]:
    """Distinct demanded-coordinate projections of every consistent message vector."""
    d = inst.sink(sink_id).demand
    if not isinstance(d, MessageDemand):
        raise ValidationError(f"sink {sink_id} does not demand messages")
    sols = np.argwhere(global_function(inst, sink_id, received))
    cols = [i - 1 for i in d.indices]
    return {tuple(int(v) for v in row[cols]) for row in sols}


def brute_force_compute(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector) -> set[int]:
    d = inst.sink(sink_id).demand
    if not isinstance(d, FunctionDemand):
        raise ValidationError(f"sink {sink_id} does not demand a function")
    sols = np.argwhere(global_function(inst, sink_id, received))
    cols = [i - 1 for i in d.args]
    return {d(tuple(int(v) for v in row[cols]), inst.q) for row in sols}


def brute_force_projection(inst: NetworkCodeInstance, sink_id: str, received: ReceivedVector,
                           coords: Sequence[int]) -> set[tuple[int, ...]]:
    sols = np.argwhere(global_function(inst, sink_id, received))
    return {tuple(int(v) for v in row[[i - 1 for i in coords]]) for row in sols}


def brute_force_marginal(kernels: Sequence[BoolTable], omega: int, q: int, domain: Sequence[int]) -> BoolTable:
    """OR over everything outside ``domain`` of the AND of ``kernels``."""
    _guard(q, omega)
    g = np.ones((q,) * omega, dtype=bool)
    for k in kernels:
        g = g & _full(k.bits, k.vars, omega)
    drop = tuple(i for i in range(omega) if i + 1 not in set(domain))
    return BoolTable(tuple(sorted(domain)), np.any(g, axis=drop) if drop else g, q)


def code_table(inst: NetworkCodeInstance, sink_id: str) -> np.ndarray:
    """Received tuple for every x in A^omega, shape ``(q^omega, |In|)``, rows in row-major x order."""
    _guard(inst.q, inst.omega)
    sink = inst.sink(sink_id)
    cols = []
    for m in sink.in_edges:
        full = np.broadcast_to(_full(map_values(m, inst.q), m.support, inst.omega), (inst.q,) * inst.omega)
        cols.append(full.reshape(-1))
    return np.stack(cols, axis=1)


def all_messages(q: int, omega: int) -> np.ndarray:
    """Every x in A^omega as rows, row-major."""
    _guard(q, omega)
    return np.indices((q,) * omega).reshape(omega, -1).T
