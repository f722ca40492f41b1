import json
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdecode import (
    Alphabet, EncodingMap, FunctionDemand, MessageDemand, NetworkCodeInstance, ParseError, SinkSpec,
    ValidationError, evaluate_received, fixture, parse_instance, parse_received, serialize_instance,
    serialize_received,
)
from ncdecode.model import PRIME_FIELD, SYMBOL_SET, eval_map, instance_to_dict


def test_butterfly_document_shape():
    inst = parse_instance(fixture("butterfly").instance_text)
    assert (inst.omega, inst.q) == (2, 2)
    assert [s.sink_id for s in inst.sinks] == ["T1", "T2"]
    assert all(s.demand == MessageDemand((1, 2)) for s in inst.sinks)


def test_single_message_identity_instance():
    doc = {
        "alphabet": {"kind": "prime_field", "q": 3},
        "omega": 1,
        "sinks": [{"id": "T", "in_edges": [{"id": "e", "support": [1], "map": {"linear": [1]}}],
                   "demand": {"messages": [1]}}],
    }
    inst = parse_instance(json.dumps(doc))
    assert eval_map(inst.sinks[0].in_edges[0], {1: 2}, 3) == 2


def test_zero_coefficient_rejected():
    doc = instance_to_dict(fixture("butterfly").instance)
    doc["sinks"][0]["in_edges"][1]["map"] = {"linear": [1, 0]}
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(doc))


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_instance('{\n  "omega": 2,\n  "sinks": [,]\n}')
    assert info.value.line == 3


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(omega=0),
    lambda d: d["alphabet"].update(q=4),  # not prime but declared as a field
    lambda d: d["sinks"][0]["in_edges"][0].update(support=[3]),
    lambda d: d["sinks"][0]["in_edges"][1].update(support=[2, 1]),
    lambda d: d["sinks"][0].update(demand={"messages": []}),
    lambda d: d["sinks"][0]["in_edges"].append(dict(d["sinks"][0]["in_edges"][0])),
])
def test_semantic_errors(mutate):
    doc = instance_to_dict(fixture("butterfly").instance)
    mutate(doc)
    with pytest.raises(ValidationError):
        parse_instance(json.dumps(doc))


def test_linear_gf2():
    m = EncodingMap("e", (1, 2), linear=(1, 1))
    assert eval_map(m, {1: 1, 2: 1}, 2) == 0


def test_reversed_word_map_over_z4():
    n3 = fixture("n3-sink43").instance
    m = n3.sink("43").edge("35-43")
    assert eval_map(m, {3: 1, 5: 1}, 4) == 3


def test_table_lookup_is_row_major():
    q = 3
    tab = tuple(range(9))
    tab = tuple(v % 3 for v in tab)
    m = EncodingMap("e", (2, 4), table=tab)
    for a, b in product(range(q), repeat=2):
        assert eval_map(m, {2: a, 4: b, 1: 0}, q) == tab[a * q + b]


def test_evaluate_received_examples():
    bf = fixture("butterfly").instance
    assert dict(evaluate_received(bf, "T1", {1: 1, 2: 0}).values) == {"V1-T1": 1, "V4-T1": 1}
    n3 = fixture("n3-sink43").instance
    y = evaluate_received(n3, "43", {i: 0 for i in range(1, 6)})
    assert set(y.values.values()) == {0}


def test_received_round_trip_and_formats():
    inst = fixture("butterfly").instance
    y = evaluate_received(inst, "T2", {1: 1, 2: 1})
    assert parse_received(serialize_received(y, inst.alphabet), inst) == y
    assert parse_received('{"V2-T2": 1, "V4-T2": 0}', inst, "T2").values == {"V2-T2": 1, "V4-T2": 0}
    with pytest.raises(ValidationError):
        parse_received('{"V2-T2": 1}', inst, "T2")
    with pytest.raises(ValidationError):
        parse_received('{"sink": "T1", "values": {"V1-T1": 1, "V4-T1": 2}}', inst)


def test_symbol_names():
    a = Alphabet(SYMBOL_SET, 3, ("a", "b", "c"))
    assert a.symbol("b") == 1 and a.name(2) == "c"
    with pytest.raises(ValidationError):
        a.symbol("z")
    with pytest.raises(ValidationError):
        Alphabet(PRIME_FIELD, 6)


def test_function_demand_lookup():
    g = FunctionDemand((1, 3), (0, 1, 1, 0))
    assert g((1, 0), 2) == 1 and g((1, 1), 2) == 0


# --- properties -------------------------------------------------------------------


@st.composite
def instances(draw):
    q = draw(st.sampled_from([2, 3, 4, 5]))
    kind = PRIME_FIELD if q in (2, 3, 5) and draw(st.booleans()) else SYMBOL_SET
    omega = draw(st.integers(1, 4))
    sinks = []
    for k in range(draw(st.integers(1, 2))):
        edges = []
        for e in range(draw(st.integers(1, 3))):
            support = tuple(sorted(draw(st.sets(st.integers(1, omega), min_size=1, max_size=min(3, omega)))))
            if kind == PRIME_FIELD and draw(st.booleans()):
                m = EncodingMap(f"e{e}", support, linear=tuple(draw(st.integers(1, q - 1)) for _ in support))
            else:
                m = EncodingMap(f"e{e}", support,
                                table=tuple(draw(st.lists(st.integers(0, q - 1),
                                                          min_size=q ** len(support), max_size=q ** len(support)))))
            edges.append(m)
        if draw(st.booleans()):
            demand = MessageDemand(tuple(sorted(draw(st.sets(st.integers(1, omega), min_size=1)))))
        else:
            args = tuple(sorted(draw(st.sets(st.integers(1, omega), min_size=1, max_size=3))))
            demand = FunctionDemand(args, tuple(draw(st.lists(st.integers(0, q - 1),
                                                               min_size=q ** len(args), max_size=q ** len(args)))))
        sinks.append(SinkSpec(f"T{k}", tuple(edges), demand))
    return NetworkCodeInstance(Alphabet(kind, q), omega, tuple(sinks))


@settings(max_examples=80, deadline=None)
@given(instances())
def test_serialize_round_trip(inst):
    assert parse_instance(serialize_instance(inst)) == inst


@st.composite
def linear_maps(draw):
    q = draw(st.sampled_from([2, 3, 5]))
    support = tuple(sorted(draw(st.sets(st.integers(1, 4), min_size=1, max_size=3))))
    coeffs = tuple(draw(st.integers(1, q - 1)) for _ in support)
    return q, EncodingMap("e", support, linear=coeffs)


@settings(max_examples=60, deadline=None)
@given(linear_maps())
def test_linear_maps_are_additive(case):
    q, m = case
    space = list(product(range(q), repeat=4))
    for a in space[:: max(1, len(space) // 40)]:
        for b in space[:: max(1, len(space) // 40)]:
            s = {i + 1: (a[i] + b[i]) % q for i in range(4)}
            lhs = eval_map(m, s, q)
            rhs = (eval_map(m, dict(enumerate(a, 1)), q) + eval_map(m, dict(enumerate(b, 1)), q)) % q
            assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(instances(), st.data())
def test_eval_ignores_variables_outside_support(inst, data):
    m = inst.sinks[0].in_edges[0]
    q = inst.q
    a = {i: data.draw(st.integers(0, q - 1)) for i in range(1, inst.omega + 1)}
    b = {i: (a[i] if i in m.support else data.draw(st.integers(0, q - 1))) for i in a}
    assert eval_map(m, a, q) == eval_map(m, b, q)
