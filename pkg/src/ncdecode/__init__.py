"""Decode network codes at a sink with Boolean-semiring sum-product and counted operations."""

from .analyzer import CountReport, analyze, fast_decodability, predict
from .corpus import CorpusFixture, fixture, random_cyclic_instance, random_function_instance, random_tree_instance
from .decoder import (
    ALL_VERTEX, MULTIPLE_VERTEX, TRACEBACK, DecodeResult, choose_root, compute_function, decode, traceback_step,
)
from .engine import run_all_vertex, run_multiple_vertex, run_single_vertex
from .errors import (
    DemandNotCovered, Inconsistent, NCDecodeError, NotDecodable, OracleMismatch, ParseError, SizeGuardExceeded,
    ValidationError,
)
from .graph import FactorGraph, acyclify, build_decoding_graph, build_function_graph
from .model import (
    Alphabet, EncodingMap, FunctionDemand, MessageDemand, NetworkCodeInstance, ReceivedVector, SinkSpec,
    evaluate_received, parse_instance, parse_received, serialize_instance, serialize_received,
)
from .oracle import brute_force_compute, brute_force_decode
from .tables import BoolTable, OpCount

__all__ = [
    "ALL_VERTEX", "MULTIPLE_VERTEX", "TRACEBACK",
    "Alphabet", "BoolTable", "CorpusFixture", "CountReport", "DecodeResult", "DemandNotCovered",
    "EncodingMap", "FactorGraph", "FunctionDemand", "Inconsistent", "MessageDemand", "NCDecodeError",
    "NetworkCodeInstance", "NotDecodable", "OpCount", "OracleMismatch", "ParseError", "ReceivedVector",
    "SinkSpec", "SizeGuardExceeded", "ValidationError",
    "acyclify", "analyze", "brute_force_compute", "brute_force_decode", "build_decoding_graph",
    "build_function_graph", "choose_root", "compute_function", "decode", "evaluate_received",
    "fast_decodability", "fixture", "parse_instance", "parse_received", "predict",
    "random_cyclic_instance", "random_function_instance", "random_tree_instance",
    "run_all_vertex", "run_multiple_vertex", "run_single_vertex", "serialize_instance",
    "serialize_received", "traceback_step",
]
