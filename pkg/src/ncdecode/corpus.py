"""Built-in fixtures and seeded random instance generators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ValidationError
from .graph import build_decoding_graph
from .model import (
    PRIME_FIELD, SYMBOL_SET, Alphabet, EncodingMap, FunctionDemand, MessageDemand,
    NetworkCodeInstance, SinkSpec, evaluate_received, serialize_instance,
)
from .oracle import all_messages, code_table


@dataclass(frozen=True)
class CorpusFixture:
    name: str
    instance: NetworkCodeInstance
    notes: str
    tree_override: tuple[tuple[int, str], ...] | None = None
    expected: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)  # graph node name -> figure label

    @property
    def instance_text(self) -> str:
        return serialize_instance(self.instance)

    @property
    def default_sink(self) -> str:
        return self.instance.sinks[0].sink_id


def _table(q: int, arity: int, fn) -> tuple[int, ...]:
    return tuple(fn(*xs) for xs in product(range(q), repeat=arity))


def _butterfly() -> CorpusFixture:
    gf2 = Alphabet(PRIME_FIELD, 2)
    both = MessageDemand((1, 2))
    t1 = SinkSpec("T1", (EncodingMap("V1-T1", (1,), linear=(1,)), EncodingMap("V4-T1", (1, 2), linear=(1, 1))), both)
    t2 = SinkSpec("T2", (EncodingMap("V2-T2", (2,), linear=(1,)), EncodingMap("V4-T2", (1, 2), linear=(1, 1))), both)
    return CorpusFixture(
        "butterfly",
        NetworkCodeInstance(gf2, 2, (t1, t2)),
        "Butterfly network, binary LNC: T1 sees x1 and x1+x2, T2 sees x2 and x1+x2.",
    )


REVERSE_2BIT = (0, 2, 1, 3)


def _n3_sink43() -> CorpusFixture:
    q = 4
    t = REVERSE_2BIT
    add = lambda a, b: (a + b) % q  # noqa: E731
    maps = {
        "31-43": ((1, 2), _table(q, 2, add)),
        "32-43": ((1, 3), _table(q, 2, add)),
        "33-43": ((2, 3), _table(q, 2, add)),
        "34-43": ((3, 4), _table(q, 2, lambda a, b: (t[a] + b) % q)),
        "35-43": ((3, 5), _table(q, 2, lambda a, b: (t[a] + b) % q)),
        "36-43": ((4, 5), _table(q, 2, add)),
    }
    # listed 36..31 so that, among the two size-3 domains, node "i" has the lower id
    edges = tuple(EncodingMap(e, s, table=tab) for e, (s, tab) in sorted(maps.items(), reverse=True))
    inst = NetworkCodeInstance(Alphabet(SYMBOL_SET, q), 5, (SinkSpec("43", edges, MessageDemand((1, 2, 3, 4, 5))),))
    labels = {
        "f[33-43]": "a", "x2": "b", "f[31-43]": "c", "x1": "d", "f[32-43]": "e", "x3": "f",
        "f[34-43]": "g", "x4": "h", "f[36-43]": "i", "x5": "j", "f[35-43]": "k",
    }
    return CorpusFixture(
        "n3-sink43",
        inst,
        "Sink 43 of network N3: Z4 symbols as 2-bit words, t reverses the bits. "
        "The override deletes (x3, 33-43) and (x3, 35-43), giving the a-k path tree.",
        tree_override=((3, "33-43"), (3, "35-43")),
        expected={"traceback_total": 353, "multiple_vertex_total": 661},
        labels=labels,
    )


def _example3() -> CorpusFixture:
    q = 2
    maj = lambda a, b, c: int(a + b + c >= 2)  # noqa: E731
    g = _table(q, 3, lambda a, b, c: (a + b + c + maj(a, b, c)) % 2)
    edges = (
        EncodingMap("e1", (1, 2), linear=(1, 1)),
        EncodingMap("e2", (2, 3), linear=(1, 1)),
        EncodingMap("e3", (1, 3), linear=(1, 1)),
    )
    inst = NetworkCodeInstance(Alphabet(PRIME_FIELD, 2), 4, (SinkSpec("T", edges, FunctionDemand((1, 2, 3), g)),))
    return CorpusFixture(
        "example3-majority", inst,
        "omega=4 over GF(2); the sink wants x1+x2+x3+Maj(x1,x2,x3) from x1+x2, x2+x3, x1+x3.",
    )


FIXTURE_NAMES = ("butterfly", "n3-sink43", "example3-majority")


def fixture(name: str) -> CorpusFixture:
    if name == "butterfly":
        return _butterfly()
    if name == "n3-sink43":
        return _n3_sink43()
    if name == "example3-majority":
        return _example3()
    if name.startswith("random-tree-"):
        seed = int(name[len("random-tree-"):])
        return CorpusFixture(name, random_tree_instance(seed), f"random tree-shaped code, seed {seed}")
    if name.startswith("random-cyclic-"):
        seed = int(name[len("random-cyclic-"):])
        return CorpusFixture(name, random_cyclic_instance(seed), f"random cyclic code, seed {seed}")
    if name.startswith("random-function-"):
        seed = int(name[len("random-function-"):])
        return CorpusFixture(name, random_function_instance(seed), f"random function code, seed {seed}")
    raise ValidationError(f"unknown fixture {name!r}")


# --- random generation ------------------------------------------------------------


def _alphabet(rng: random.Random, max_space: int, omega_range: tuple[int, int]) -> tuple[Alphabet, int]:
    while True:
        q = rng.choice((2, 3, 4, 5))
        omega = rng.randint(*omega_range)
        if q**omega <= max_space:
            break
    kind = PRIME_FIELD if q in (2, 3, 5) and rng.random() < 0.6 else SYMBOL_SET
    return Alphabet(kind, q), omega


def _random_map(rng: random.Random, alphabet: Alphabet, edge_id: str, support: tuple[int, ...]) -> EncodingMap:
    q = alphabet.q
    coeffs = tuple(rng.randrange(1, q) for _ in support)
    style = rng.random()
    if alphabet.is_field and style < 0.5:
        return EncodingMap(edge_id, support, linear=coeffs)
    if style < 0.85:
        # invertible in each argument separately: a permuted weighted sum mod q
        perm = list(range(q))
        rng.shuffle(perm)
        if not alphabet.is_field:
            coeffs = tuple(rng.choice([c for c in range(1, q) if np.gcd(c, q) == 1]) for _ in support)
        tab = _table(q, len(support), lambda *xs: perm[sum(c * x for c, x in zip(coeffs, xs)) % q])
    else:
        tab = tuple(rng.randrange(q) for _ in range(q ** len(support)))
    return EncodingMap(edge_id, support, table=tab)


def decodable_indices(inst: NetworkCodeInstance, sink_id: str) -> tuple[int, ...]:
    """Messages that every consistent received vector pins down uniquely."""
    y = code_table(inst, sink_id)
    xs = all_messages(inst.q, inst.omega)
    _, fiber = np.unique(y, axis=0, return_inverse=True)
    fiber = fiber.reshape(-1)
    out = []
    for j in range(inst.omega):
        pairs = np.unique(np.stack([fiber, xs[:, j]], axis=1), axis=0)
        if len(pairs) == len(np.unique(fiber)):
            out.append(j + 1)
    return tuple(out)


def _with_demand(rng: random.Random, alphabet: Alphabet, omega: int, edges: list[EncodingMap]):
    probe = NetworkCodeInstance(alphabet, omega, (SinkSpec("T", tuple(edges), MessageDemand((1,))),))
    D = decodable_indices(probe, "T")
    if not D:
        return None
    if len(D) > 1 and rng.random() < 0.4:
        D = tuple(sorted(rng.sample(D, rng.randint(1, len(D)))))
    return NetworkCodeInstance(alphabet, omega, (SinkSpec("T", tuple(edges), MessageDemand(D)),))


def _tree_supports(rng: random.Random, omega: int) -> list[tuple[int, ...]]:
    """Factor supports whose bipartite graph with the omega variables is a forest."""
    introduced = [1]
    supports = [(1,)]
    nxt = 2
    while nxt <= omega:
        k = min(rng.choice((1, 1, 2)), omega - nxt + 1)
        new = list(range(nxt, nxt + k))
        nxt += k
        if rng.random() < 0.1:
            supports.append(tuple(new))  # starts a new component
        else:
            supports.append(tuple(sorted([rng.choice(introduced)] + new)))
        introduced += new
    for _ in range(rng.randint(0, omega)):
        supports.append((rng.choice(introduced),))
    rng.shuffle(supports)
    return supports


def random_tree_instance(seed: int, max_space: int = 1024) -> NetworkCodeInstance:
    """Seeded code whose factor graph is a forest; demand = the uniquely decodable messages."""
    rng = random.Random(seed)
    while True:
        alphabet, omega = _alphabet(rng, max_space, (1, 6))
        supports = _tree_supports(rng, omega)
        edges = [_random_map(rng, alphabet, f"e{k + 1}", s) for k, s in enumerate(supports)]
        inst = _with_demand(rng, alphabet, omega, edges)
        if inst is not None:
            return inst


def random_cyclic_instance(seed: int, max_space: int = 4096) -> NetworkCodeInstance:
    """Seeded code whose factor graph has at least one cycle."""
    rng = random.Random(seed)
    while True:
        alphabet, omega = _alphabet(rng, max_space, (3, 6))
        supports = []
        for _ in range(rng.randint(3, omega + 3)):
            k = rng.randint(1, min(3, omega))
            supports.append(tuple(sorted(rng.sample(range(1, omega + 1), k))))
        # variable-factor incidences beyond a forest mean a cycle exists
        covered = {i for s in supports for i in s}
        n_edges = sum(len(s) for s in supports)
        if n_edges <= len(covered) + len(supports) - 1:
            continue
        edges = [_random_map(rng, alphabet, f"e{k + 1}", s) for k, s in enumerate(supports)]
        inst = _with_demand(rng, alphabet, omega, edges)
        if inst is None:
            continue
        zero = {i: 0 for i in range(1, omega + 1)}
        if not build_decoding_graph(inst, "T", evaluate_received(inst, "T", zero)).acyclic:
            return inst


def random_function_instance(seed: int, max_space: int = 729) -> NetworkCodeInstance:
    """Seeded valid function-computation code.

    The target is constant on every class of argument tuples linked through a
    shared received vector, which is exactly what makes the code valid.
    """
    rng = random.Random(seed)
    while True:
        alphabet, omega = _alphabet(rng, max_space, (2, 4))
        q = alphabet.q
        supports = [tuple(sorted(rng.sample(range(1, omega + 1), rng.randint(1, min(3, omega)))))
                    for _ in range(rng.randint(1, omega + 1))]
        covered = sorted({i for s in supports for i in s})
        args = tuple(sorted(rng.sample(covered, rng.randint(1, len(covered)))))
        edges = tuple(_random_map(rng, alphabet, f"e{k + 1}", s) for k, s in enumerate(supports))
        probe = NetworkCodeInstance(alphabet, omega, (SinkSpec("T", edges, FunctionDemand(args, (0,) * q ** len(args))),))
        y = code_table(probe, "T")
        xs = all_messages(q, omega)
        _, fiber = np.unique(y, axis=0, return_inverse=True)
        parent = list(range(q ** len(args)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        arg_idx = np.zeros(len(xs), dtype=np.int64)
        for i in args:
            arg_idx = arg_idx * q + xs[:, i - 1]
        first: dict[int, int] = {}
        for f, a in zip(fiber.reshape(-1), arg_idx):
            a = int(a)
            if f in first:
                ra, rb = find(a), find(first[f])
                if ra != rb:
                    parent[ra] = rb
            else:
                first[f] = a
        classes = {find(a) for a in range(len(parent))}
        if len(classes) < 2:
            continue
        value = {c: rng.randrange(q) for c in classes}
        table = tuple(value[find(a)] for a in range(len(parent)))
        return NetworkCodeInstance(alphabet, omega, (SinkSpec("T", edges, FunctionDemand(args, table)),))
