"""Alphabet-partitioned rank/select sequences and the indexes built on them."""

from ._accel import BACKEND
from .apstring import ApString, SizeReport
from .bitvectors import IntVector, PlainBitVector, RunBitVector, Space, SparseBitVector
from .distsim import ApClusterSim, ClusterSim, SimReport, distributed_table
from .docretrieval import Collection, tokenize
from .errors import AsapError, ConstructionError, FormatError, RangeError, SymbolNotFound
from .indexfile import Index
from .partition import (
    SymbolMap,
    SymbolStats,
    assign_dense,
    assign_explicit,
    assign_sparse,
    assign_uniform,
    build_map,
    entropy_h0,
)
from .runs import RunApString, RunLengthSequence, count_runs
from .sequences import WaveletMatrix
from .textsearch import FmIndex, build_bwt, invert_bwt, runs_in_bwt

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ApString", "SizeReport", "IntVector", "PlainBitVector", "RunBitVector",
    "Space", "SparseBitVector", "ApClusterSim", "ClusterSim", "SimReport",
    "distributed_table", "Collection", "tokenize", "AsapError", "ConstructionError",
    "FormatError", "RangeError", "SymbolNotFound", "Index", "SymbolMap", "SymbolStats",
    "assign_dense", "assign_explicit", "assign_sparse", "assign_uniform", "build_map",
    "entropy_h0", "RunApString", "RunLengthSequence", "count_runs", "WaveletMatrix",
    "FmIndex", "build_bwt", "invert_bwt", "runs_in_bwt",
]
