"""Problem encoders: native instances to QUBO models and back."""

from __future__ import annotations

from ..qubo import QuboModel
from .base import DecodedSolution, Encoding, ProblemKind
from .bpp import BppInstance, decode_bpp, encode_bpp
from .io import (
    Instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    read_bpp_text,
    read_mcp_text,
    read_tsplib,
    save_instance,
)
from .mcp import McpInstance, decode_mcp, encode_mcp
from .tsp import TspInstance, decode_tsp, encode_tsp
from .vrp import VrpInstance, decode_vrp, encode_vrp

__all__ = [
    "BppInstance",
    "DecodedSolution",
    "Encoding",
    "Instance",
    "McpInstance",
    "ProblemKind",
    "TspInstance",
    "VrpInstance",
    "decode_bpp",
    "decode_mcp",
    "decode_sample",
    "decode_tsp",
    "decode_vrp",
    "encode_bpp",
    "encode_instance",
    "encode_mcp",
    "encode_tsp",
    "encode_vrp",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "read_bpp_text",
    "read_mcp_text",
    "read_tsplib",
    "save_instance",
]


def encode_instance(inst: Instance) -> tuple[QuboModel, Encoding]:
    """Dispatch on instance type."""
    if isinstance(inst, TspInstance):
        return encode_tsp(inst)
    if isinstance(inst, VrpInstance):
        return encode_vrp(inst)
    if isinstance(inst, BppInstance):
        return encode_bpp(inst)
    if isinstance(inst, McpInstance):
        return encode_mcp(inst)
    raise TypeError(f"not an encodable instance: {inst!r}")


def decode_sample(enc: Encoding, sample, inst: Instance) -> DecodedSolution:
    """Dispatch on the encoding's problem kind."""
    if enc.problem_kind is ProblemKind.TSP:
        return decode_tsp(enc, sample, inst)
    if enc.problem_kind is ProblemKind.VRP:
        return decode_vrp(enc, sample, inst)
    if enc.problem_kind is ProblemKind.BPP:
        return decode_bpp(enc, sample, inst)
    if enc.problem_kind is ProblemKind.MCP:
        return decode_mcp(enc, sample, inst)
    raise ValueError(f"unknown problem kind {enc.problem_kind!r}")
