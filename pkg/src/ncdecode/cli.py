"""Command-line front end: ``ncdecode decode|compute|analyze|corpus``."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Sequence

from .analyzer import analyze
from .corpus import FIXTURE_NAMES, CorpusFixture, fixture
from .decoder import ALL_VERTEX, MULTIPLE_VERTEX, TRACEBACK, DecodeResult, compute_function, decode
from .errors import NCDecodeError, OracleMismatch, ParseError, ValidationError
from .model import (
    FunctionDemand, MessageDemand, NetworkCodeInstance, ReceivedVector, evaluate_received,
    parse_instance, parse_received,
)
from .oracle import brute_force_compute, brute_force_decode

MODE_FLAGS = {"traceback": TRACEBACK, "multiple-vertex": MULTIPLE_VERTEX, "all-vertex": ALL_VERTEX}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncdecode", description="Sum-product decoding of network codes at a sink.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp: argparse.ArgumentParser, received: bool) -> None:
        sp.add_argument("--instance", required=True,
                        help=f"instance file, or a fixture name ({', '.join(FIXTURE_NAMES)}, random-tree-<seed>, ...)")
        sp.add_argument("--sink", help="sink id (default: the only sink, or the one named in --received)")
        sp.add_argument("--received", required=received,
                        help="received file, inline JSON, or shorthand {edge:symbol, ...}")
        sp.add_argument("--tree-override", metavar="PATH",
                        help="JSON list of [variable, edge_id] pairs to delete before stretching")
        sp.add_argument("--output", choices=("human", "machine"), default="human")

    dec = sub.add_parser("decode", help="recover the demanded messages")
    common(dec, True)
    dec.add_argument("--mode", choices=tuple(MODE_FLAGS), default="traceback")
    dec.add_argument("--count-ops", action="store_true", help="append the closed-form count report")
    dec.add_argument("--verify-oracle", action="store_true", help="cross-check against exhaustive enumeration")

    comp = sub.add_parser("compute", help="evaluate the sink's target function")
    common(comp, True)
    comp.add_argument("--count-ops", action="store_true", help="list the operation log")
    comp.add_argument("--verify-oracle", action="store_true")

    an = sub.add_parser("analyze", help="closed-form predictions beside instrumented counts")
    common(an, False)

    cor = sub.add_parser("corpus", help="write fixture instance documents")
    cor.add_argument("--out", required=True, help="target directory")
    cor.add_argument("--names", nargs="*", default=list(FIXTURE_NAMES))
    return p


def _load_instance(ref: str) -> tuple[NetworkCodeInstance, CorpusFixture | None]:
    path = Path(ref)
    if path.is_file():
        return parse_instance(path.read_text()), None
    try:
        fx = fixture(ref)
    except (ValidationError, ValueError):
        raise ValidationError(f"{ref!r} is neither a readable file nor a fixture name") from None
    return fx.instance, fx


def _shorthand(text: str) -> dict:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError("received data is not JSON or {edge:symbol, ...} shorthand")
    out = {}
    for item in filter(None, (s.strip() for s in body[1:-1].split(","))):
        key, sep, value = item.rpartition(":")
        if not sep or not key.strip():
            raise ParseError(f"bad shorthand entry {item!r}")
        value = value.strip().strip("'\"")
        out[key.strip().strip("'\"")] = int(value) if value.lstrip("-").isdigit() else value
    return out


def _load_received(ref: str, inst: NetworkCodeInstance, sink_id: str | None) -> ReceivedVector:
    path = Path(ref)
    text = path.read_text() if path.is_file() else ref
    try:
        json.loads(text)
    except json.JSONDecodeError:
        if path.is_file():
            return parse_received(text, inst, sink_id)  # surfaces the positioned ParseError
        text = json.dumps(_shorthand(text))
    return parse_received(text, inst, sink_id)


def _received_sink(ref: str) -> str | None:
    path = Path(ref)
    try:
        doc = json.loads(path.read_text() if path.is_file() else ref)
    except (json.JSONDecodeError, OSError):
        return None
    return str(doc["sink"]) if isinstance(doc, dict) and "sink" in doc else None


def _resolve_sink(args, inst: NetworkCodeInstance) -> str:
    if args.sink:
        inst.sink(args.sink)
        return args.sink
    if getattr(args, "received", None):
        named = _received_sink(args.received)
        if named is not None:
            return named
    if len(inst.sinks) == 1:
        return inst.sinks[0].sink_id
    raise ValidationError(f"instance has sinks {[s.sink_id for s in inst.sinks]}; pass --sink")


def _load_override(args, fx: CorpusFixture | None):
    if args.tree_override:
        try:
            pairs = json.loads(Path(args.tree_override).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        if not isinstance(pairs, list):
            raise ValidationError("tree override must be a list of [variable, edge_id] pairs")
        return [tuple(p) for p in pairs]
    return fx.tree_override if fx is not None else None


def _emit(lines: list[tuple[str, object]], human: str | None, machine: bool) -> None:
    if machine:
        for k, v in lines:
            print(f"{k}={v}")
    else:
        if human:
            print(human)
        for k, v in lines:
            print(f"  {k}: {v}")


def _op_lines(res: DecodeResult) -> list[tuple[str, object]]:
    c = res.ops
    return [("total", c.total), ("and_ops", c.and_ops), ("or_ops", c.or_ops), ("cmp_ops", c.cmp_ops)]


def _cmd_decode(args, inst, fx) -> int:
    sink_id = _resolve_sink(args, inst)
    rv = _load_received(args.received, inst, sink_id)
    override = _load_override(args, fx)
    res = decode(inst, sink_id, rv, MODE_FLAGS[args.mode], override)
    machine = args.output == "machine"
    names = inst.alphabet.name
    lines: list[tuple[str, object]] = [("sink", sink_id), ("mode", args.mode)]
    lines += [(f"x{i}", names(v)) for i, v in res.assignment.items()]
    lines += _op_lines(res)
    _emit(lines, " ".join(f"x{i}={names(v)}" for i, v in res.assignment.items()), machine)
    if args.count_ops:
        if not machine:
            for rec in res.log.records:
                path = "->".join(res.graph.nodes[z].name for z in rec.nodes)
                print(f"  {rec.kind} {path}: and={rec.and_ops} or={rec.or_ops} cmp={rec.cmp_ops}")
        print(analyze(inst, sink_id, rv, override).to_text(), end="")
    if args.verify_oracle:
        expect = brute_force_decode(inst, sink_id, rv)
        got = tuple(res.assignment[i] for i in sorted(res.assignment))
        if expect != {got}:
            raise OracleMismatch(f"oracle gives {sorted(expect)}, sum-product gave {got}")
        _emit([("oracle", "match")], None, machine)
    return 0


def _cmd_compute(args, inst, fx) -> int:
    sink_id = _resolve_sink(args, inst)
    rv = _load_received(args.received, inst, sink_id)
    res = compute_function(inst, sink_id, rv, _load_override(args, fx))
    machine = args.output == "machine"
    value = inst.alphabet.name(res.function_value)
    lines: list[tuple[str, object]] = [("sink", sink_id), ("g", value)]
    lines += [(f"x{i}", inst.alphabet.name(v)) for i, v in res.assignment.items()]
    lines += _op_lines(res)
    _emit(lines, f"g={value}", machine)
    if args.count_ops and not machine:
        for rec in res.log.records:
            path = "->".join(res.graph.nodes[z].name for z in rec.nodes)
            print(f"  {rec.kind} {path}: and={rec.and_ops} or={rec.or_ops} cmp={rec.cmp_ops}")
    if args.verify_oracle:
        expect = brute_force_compute(inst, sink_id, rv)
        if expect != {res.function_value}:
            raise OracleMismatch(f"oracle gives {sorted(expect)}, sum-product gave {res.function_value}")
        _emit([("oracle", "match")], None, machine)
    return 0


def _cmd_analyze(args, inst, fx) -> int:
    sink_id = _resolve_sink(args, inst)
    if args.received:
        rv = _load_received(args.received, inst, sink_id)
    else:
        # counts are data-independent apart from trivial tables, so any codeword will do
        rv = evaluate_received(inst, sink_id, {i: 0 for i in range(1, inst.omega + 1)})
    rep = analyze(inst, sink_id, rv, _load_override(args, fx))
    print(rep.to_text(), end="")
    return 0


def _cmd_corpus(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        fx = fixture(name)
        target = out / f"{name}.json"
        target.write_text(fx.instance_text)
        if fx.tree_override:
            (out / f"{name}.override.json").write_text(json.dumps([list(p) for p in fx.tree_override]) + "\n")
        print(target)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            if args.subcommand == "corpus":
                return _cmd_corpus(args)
            inst, fx = _load_instance(args.instance)
            handler = {"decode": _cmd_decode, "compute": _cmd_compute, "analyze": _cmd_analyze}[args.subcommand]
            if args.subcommand == "compute" and not isinstance(inst.sink(_resolve_sink(args, inst)).demand, FunctionDemand):
                raise ValidationError("compute needs a sink that demands a function")
            if args.subcommand in ("decode", "analyze") and not isinstance(
                    inst.sink(_resolve_sink(args, inst)).demand, MessageDemand):
                raise ValidationError(f"{args.subcommand} needs a sink that demands messages")
            return handler(args, inst, fx)
    except NCDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
