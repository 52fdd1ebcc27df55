"""Reservoir computing on measured (or simulated) physical readouts.

Scan files are ingested, preprocessed into a reservoir matrix, and a
linear readout is trained on it. Nonlinearity and linear memory capacity
score the reservoir itself.
"""

from .errors import InvalidParams, PhysrcError
from .ingest import ScanRecord, ScanSet, load_scan_set, parse_scan_file
from .metrics import linear_memory_capacity, nonlinearity, r_squared
from .pipeline import Pipeline
from .preprocess import ProcessParams, ReservoirMatrix, assemble
from .targets import (
    MackeyGlassParams,
    SignalSeries,
    generate_mackey_glass,
    generate_sawtooth_wave,
    generate_sine_wave,
    generate_square_wave,
    normalize_list,
)
from .training import (
    RcParams,
    RcResults,
    define_linear,
    define_logistic,
    define_ridge,
    fit_ridge,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidParams",
    "MackeyGlassParams",
    "PhysrcError",
    "Pipeline",
    "ProcessParams",
    "RcParams",
    "RcResults",
    "ReservoirMatrix",
    "ScanRecord",
    "ScanSet",
    "SignalSeries",
    "assemble",
    "define_linear",
    "define_logistic",
    "define_ridge",
    "fit_ridge",
    "generate_mackey_glass",
    "generate_sawtooth_wave",
    "generate_sine_wave",
    "generate_square_wave",
    "linear_memory_capacity",
    "load_scan_set",
    "nonlinearity",
    "normalize_list",
    "parse_scan_file",
    "r_squared",
]
