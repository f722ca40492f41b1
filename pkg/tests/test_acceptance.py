"""Acceptance criteria 1-8. A PASS/FAIL line per criterion is printed in the terminal summary."""

import time
from collections import Counter

import numpy as np
import pytest

from ncdecode import (
    MULTIPLE_VERTEX, TRACEBACK, acyclify, brute_force_compute, brute_force_decode, build_decoding_graph,
    compute_function, decode, evaluate_received, fast_decodability, fixture, predict, random_cyclic_instance,
    random_function_instance, random_tree_instance, run_all_vertex,
)
from ncdecode.decoder import prepare_graph
from ncdecode.oracle import all_messages, brute_force_marginal

Q = 4
N3_X = {1: 1, 2: 2, 3: 3, 4: 0, 5: 1}


def _labelled_rows(fx, result):
    lab = {n.node_id: fx.labels[n.name] for n in result.graph.nodes}
    return Counter(
        (rec.kind, "".join(lab[z] for z in rec.nodes), rec.and_ops, rec.or_ops, rec.cmp_ops)
        for rec in result.log.records
    )


def _run(fx, mode, x=N3_X):
    y = evaluate_received(fx.instance, "43", x)
    t0 = time.perf_counter()
    res = decode(fx.instance, "43", y, mode, fx.tree_override)
    return res, time.perf_counter() - t0


# single-vertex rows, traceback's support and traceback steps
TRACEBACK_ROWS = Counter({
    ("message", "ab", 0, 0, 0): 1,
    ("message", "bc", 0, 0, 0): 1,
    ("message", "cd", Q**3, Q**2 * (Q - 1), 0): 1,
    ("message", "de", 0, 0, 0): 1,
    ("message", "ef", Q**2, Q * (Q - 1), 0): 1,
    ("message", "fg", 0, 0, 0): 1,
    ("message", "gh", Q**2, 0, 0): 1,
    ("message", "hi", 0, 0, 0): 1,
    ("message", "kj", 0, 0, 0): 1,
    ("message", "ji", 0, 0, 0): 1,
    ("marginal", "i", 2 * Q**3, 0, 0): 1,
    ("support", "i", 0, 0, Q**3 - 1): 1,
    ("traceback", "e", 0, 0, Q - 1): 1,
    ("traceback", "c", 0, 0, Q - 1): 1,
})

# rows added on top of the single-vertex run in multiple-vertex mode
REVERSE_ROWS = Counter({
    ("message", "ih", Q**3, Q**2 * (Q - 1), 0): 1,
    ("message", "hg", 0, 0, 0): 1,
    ("message", "gf", Q**2, Q * (Q - 1), 0): 1,
    ("message", "fe", 0, 0, 0): 1,
    ("marginal", "e", Q**2, 0, 0): 1,
    ("message", "ed", Q**2, 0, 0): 1,
    ("message", "dc", 0, 0, 0): 1,
    ("marginal", "c", Q**3, 0, 0): 1,
    ("support", "i", 0, 0, Q**3 - 1): 1,
    ("support", "e", 0, 0, Q**2 - 1): 1,
    ("support", "c", 0, 0, Q**3 - 1): 1,
})


@pytest.mark.criterion(1, "per-message traceback counts and 353 total on n3-sink43")
def test_criterion_1_traceback_counts(n3):
    res, secs = _run(n3, TRACEBACK)
    rows = _labelled_rows(n3, res)
    # zero-cost rows may be absent depending on bookkeeping; every costed row must match exactly
    costed = Counter({r: c for r, c in rows.items() if r[2:] != (0, 0, 0)})
    expected = Counter({r: c for r, c in TRACEBACK_ROWS.items() if r[2:] != (0, 0, 0)})
    assert costed == expected
    assert res.ops.total == 5 * Q**3 + 2 * Q**2 + Q - 3 == 353
    assert res.assignment == N3_X
    assert secs < 1.0


@pytest.mark.criterion(2, "per-message multiple-vertex counts and 661 total on n3-sink43")
def test_criterion_2_multiple_vertex_counts(n3):
    res, secs = _run(n3, MULTIPLE_VERTEX)
    rows = _labelled_rows(n3, res)
    costed = Counter({r: c for r, c in rows.items() if r[2:] != (0, 0, 0)})
    base = Counter({r: c for r, c in TRACEBACK_ROWS.items() if r[0] in ("message", "marginal") and r[2:] != (0, 0, 0)})
    extra = Counter({r: c for r, c in REVERSE_ROWS.items() if r[2:] != (0, 0, 0)})
    assert costed == base + extra
    assert res.ops.total == 9 * Q**3 + 6 * Q**2 - 2 * Q - 3 == 661
    assert res.assignment == N3_X
    assert secs < 1.0


def _corpus_message_cases():
    fx = fixture("butterfly")
    yield fx.instance, "T1", None
    yield fx.instance, "T2", None
    n3 = fixture("n3-sink43")
    yield n3.instance, "43", n3.tree_override
    yield n3.instance, "43", None
    for seed in range(60):
        yield random_tree_instance(seed), "T", None


@pytest.mark.criterion(3, "traceback never costs more than multiple-vertex decoding")
def test_criterion_3_traceback_advantage(n3):
    tb, _ = _run(n3, TRACEBACK)
    mv, _ = _run(n3, MULTIPLE_VERTEX)
    assert tb.ops.total == 353 < 661 == mv.ops.total
    rng = np.random.default_rng(3)
    for inst, sink, override in _corpus_message_cases():
        for _ in range(3):
            x = {i: int(v) for i, v in enumerate(rng.integers(0, inst.q, inst.omega), start=1)}
            y = evaluate_received(inst, sink, x)
            a = decode(inst, sink, y, TRACEBACK, override)
            b = decode(inst, sink, y, MULTIPLE_VERTEX, override)
            assert a.assignment == b.assignment
            assert a.ops.total <= b.ops.total


def _sweep_decode(inst, sink, override=None):
    """Decode every received vector the code can produce and check against enumeration."""
    D = inst.sink(sink).demand.indices
    by_y = {}
    for row in all_messages(inst.q, inst.omega):
        x = {i: int(v) for i, v in enumerate(row, start=1)}
        y = evaluate_received(inst, sink, x)
        key = tuple(sorted(y.values.items()))
        if key not in by_y:
            res = decode(inst, sink, y, TRACEBACK, override)
            got = tuple(res.assignment[i] for i in D)
            assert brute_force_decode(inst, sink, y) == {got}
            by_y[key] = got
        assert by_y[key] == tuple(x[i] for i in D)


@pytest.mark.criterion(4, "decode equals brute-force projection on fixtures and 100+ random trees")
def test_criterion_4_oracle_equivalence():
    t0 = time.perf_counter()
    bf = fixture("butterfly")
    _sweep_decode(bf.instance, "T1")
    _sweep_decode(bf.instance, "T2")
    n3 = fixture("n3-sink43")
    _sweep_decode(n3.instance, "43", n3.tree_override)
    _sweep_decode(n3.instance, "43")
    ex3 = fixture("example3-majority")
    for row in all_messages(2, 4):
        x = {i: int(v) for i, v in enumerate(row, start=1)}
        y = evaluate_received(ex3.instance, "T", x)
        assert brute_force_compute(ex3.instance, "T", y) == {compute_function(ex3.instance, "T", y).function_value}
    for seed in range(110):
        inst = random_tree_instance(seed)
        assert inst.q**inst.omega <= 4096
        _sweep_decode(inst, "T")
    assert time.perf_counter() - t0 < 30


@pytest.mark.criterion(5, "every function-support element gives g(x*)")
def test_criterion_5_function_support_agrees():
    ex3 = fixture("example3-majority")
    inst = ex3.instance
    y = evaluate_received(inst, "T", {1: 1, 2: 1, 3: 1, 4: 0})
    res = compute_function(inst, "T", y, full_support=True)
    assert sorted(res.function_support) == [(0, 0, 0), (1, 1, 1)]
    g = inst.sink("T").demand
    assert {g(s, 2) for s in res.function_support} == {0}
    assert res.function_value == 0

    for seed in range(110):
        inst = random_function_instance(seed)
        g = inst.sink("T").demand
        seen = set()
        for row in all_messages(inst.q, inst.omega):
            x = {i: int(v) for i, v in enumerate(row, start=1)}
            y = evaluate_received(inst, "T", x)
            key = tuple(sorted(y.values.items()))
            if key in seen:
                continue
            seen.add(key)
            res = compute_function(inst, "T", y, full_support=True)
            truth = g(tuple(x[i] for i in g.args), inst.q)
            assert {g(s, inst.q) for s in res.function_support} == {truth}
            assert res.function_value == truth


def _corpus_graphs():
    bf = fixture("butterfly")
    for sink in ("T1", "T2"):
        y = evaluate_received(bf.instance, sink, {1: 0, 2: 0})
        yield prepare_graph(bf.instance, sink, y)
    n3 = fixture("n3-sink43")
    y = evaluate_received(n3.instance, "43", N3_X)
    yield prepare_graph(n3.instance, "43", y, n3.tree_override)
    yield prepare_graph(n3.instance, "43", y)
    ex3 = fixture("example3-majority")
    yield prepare_graph(ex3.instance, "T", evaluate_received(ex3.instance, "T", {1: 1, 2: 1, 3: 1, 4: 0}))
    for seed in range(40):
        inst = random_tree_instance(seed)
        yield prepare_graph(inst, "T", evaluate_received(inst, "T", {i: 0 for i in range(1, inst.omega + 1)}))


@pytest.mark.criterion(6, "closed forms on butterfly-T1 and C3 = C2 + sum(q_z - 1) for every root")
def test_criterion_6_predictors():
    bf = fixture("butterfly")
    g = prepare_graph(bf.instance, "T1", evaluate_received(bf.instance, "T1", {1: 1, 2: 0}))
    x1 = g.variable_node(1)
    rep = predict(g, x1)
    assert (rep.C1, rep.C2, rep.C3, rep.C4, rep.C5) == (6, 7, 12, 14, 20)
    for g in _corpus_graphs():
        for r in range(len(g.nodes)):
            rep = predict(g, r)
            rest = sum(g.q_node(z) - 1 for z in range(len(g.nodes)) if z != r)
            assert rep.C3 == rep.C2 + rest


@pytest.mark.criterion(7, "fast decodability: n3-sink43 m=3<5, butterfly-T1 m=omega=2")
def test_criterion_7_fast_decodability(n3):
    g = prepare_graph(n3.instance, "43", evaluate_received(n3.instance, "43", N3_X), n3.tree_override)
    assert fast_decodability(g, 5, 4) == (3, True)
    assert predict(g, 0).fast_decodable
    bf = fixture("butterfly")
    g = prepare_graph(bf.instance, "T1", evaluate_received(bf.instance, "T1", {1: 0, 2: 1}))
    assert fast_decodability(g, 2, 2) == (2, False)


@pytest.mark.criterion(8, "all-vertex marginals on stretched cyclic graphs equal brute force")
def test_criterion_8_stretching_exact():
    rng = np.random.default_rng(8)
    checked = 0
    for seed in range(60):
        inst = random_cyclic_instance(seed)
        for _ in range(2):
            x = {i: int(v) for i, v in enumerate(rng.integers(0, inst.q, inst.omega), start=1)}
            raw = build_decoding_graph(inst, "T", evaluate_received(inst, "T", x))
            assert not raw.acyclic
            g = acyclify(raw)
            kernels = [n.kernel for n in raw.nodes if n.kernel is not None]
            run = run_all_vertex(g)
            assert set(run.marginals) == set(range(len(g.nodes)))
            for z, m in run.marginals.items():
                assert m.table == brute_force_marginal(kernels, inst.omega, inst.q, g.nodes[z].domain)
            checked += 1
    assert checked == 120
