"""Raster-model irregular strip packing solver."""

from .driver import RunRecord, SolverConfig, construct, gcdh
from .instances import InstanceFile, build_problem, parse_instance
from .nfp import Nfp, NfpTable, build_nfp, detect_corners
from .raster import (DoubleScanline, Outline, PixelShape, decode, encode,
                     polygon_outline, rasterize, rotate_and_rasterize)
from .results import ResultFile, load_result, verify_result
from .solver import (Layout, PenaltyState, Problem, cdh, gls, line_search,
                     make_problem, neighbor_search, piece_penalty,
                     update_weights)

__version__ = "0.1.0"

__all__ = [
    "DoubleScanline", "InstanceFile", "Layout", "Nfp", "NfpTable", "Outline",
    "PenaltyState", "PixelShape", "Problem", "ResultFile", "RunRecord",
    "SolverConfig", "build_nfp", "build_problem", "cdh", "construct", "decode",
    "detect_corners", "encode", "gcdh", "gls", "line_search", "load_result",
    "make_problem", "neighbor_search", "parse_instance", "piece_penalty",
    "polygon_outline", "rasterize", "rotate_and_rasterize", "update_weights",
    "verify_result",
]
