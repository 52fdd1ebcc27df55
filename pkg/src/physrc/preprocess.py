"""Preprocessing of scan sets and assembly of the reservoir matrix.

Stages always run in the same order::

    remove_bg -> smooth -> cut_xs -> sample -> stack rows
              -> normalize_local | normalize_global -> transpose
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.signal import savgol_filter

from .errors import (
    EmptySlice,
    InvalidParams,
    MissingBackground,
    RankTooHigh,
    WindowTooLarge,
)
from .ingest import ScanRecord, ScanSet

# external key name -> attribute name
PARAM_KEYS = {
    "Xs": "xs_col",
    "Readouts": "readout_col",
    "delimiter": "delimiter",
    "remove_bg": "remove_bg",
    "bg_fname": "bg_fname",
    "smooth": "smooth",
    "smooth_win": "smooth_win",
    "smooth_rank": "smooth_rank",
    "cut_xs": "cut_xs",
    "x1": "x1",
    "x2": "x2",
    "normalize_local": "normalize_local",
    "normalize_global": "normalize_global",
    "sample": "sample",
    "sample_rate": "sample_rate",
    "transpose": "transpose",
}
_FLAGS = ("remove_bg", "smooth", "cut_xs", "normalize_local", "normalize_global",
          "sample", "transpose")


@dataclass(frozen=True)
class ProcessParams:
    """Column selection plus the preprocessing menu.

    Every optional stage is off by default.
    """

    xs_col: str = "Xs"
    readout_col: str = "Readouts"
    delimiter: str = "\t"
    remove_bg: bool = False
    bg_fname: Optional[str] = None
    smooth: bool = False
    smooth_win: Optional[int] = None
    smooth_rank: Optional[int] = None
    cut_xs: bool = False
    x1: Optional[float] = None
    x2: Optional[float] = None
    normalize_local: bool = False
    normalize_global: bool = False
    sample: bool = False
    sample_rate: int = 1
    transpose: bool = False

    @classmethod
    def from_dict(cls, params: dict) -> "ProcessParams":
        """Build from a dict keyed by the external names (``"Xs"``, ...)."""
        kwargs = {}
        for key, value in params.items():
            if key not in PARAM_KEYS:
                raise InvalidParams(key, "unknown preprocessing parameter")
            kwargs[PARAM_KEYS[key]] = value
        p = cls(**kwargs)
        p.validate()
        return p

    def to_dict(self) -> dict:
        attrs = asdict(self)
        return {key: attrs[attr] for key, attr in PARAM_KEYS.items()}

    def validate(self):
        """Check the data-independent invariants; raise InvalidParams."""
        for name in _FLAGS:
            if not isinstance(getattr(self, name), bool):
                raise InvalidParams(name, "must be true or false")
        # flag conflicts first: they make the stage settings moot
        if self.normalize_local and self.normalize_global:
            raise InvalidParams(
                "normalize_global", "cannot be combined with normalize_local"
            )
        if self.transpose:
            others = [f for f in _FLAGS if f != "transpose" and getattr(self, f)]
            if others:
                raise InvalidParams(
                    "transpose", f"cannot be combined with {', '.join(others)}"
                )
        for name in ("xs_col", "readout_col", "delimiter"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise InvalidParams(_external(name), "must be a non-empty string")
        if self.remove_bg and not self.bg_fname:
            raise InvalidParams("bg_fname", "required when remove_bg is true")
        if self.smooth:
            win, rank = self.smooth_win, self.smooth_rank
            if not _is_int(win) or win < 1 or win % 2 == 0:
                raise InvalidParams("smooth_win", "must be an odd positive integer")
            if not _is_int(rank) or rank < 0:
                raise InvalidParams("smooth_rank", "must be a non-negative integer")
            if rank >= win:
                raise InvalidParams("smooth_rank", "must be less than smooth_win")
        if self.cut_xs:
            for name in ("x1", "x2"):
                if not _is_real(getattr(self, name)):
                    raise InvalidParams(name, "must be a number when cut_xs is true")
            if not self.x1 < self.x2:
                raise InvalidParams("x2", "x1 must be less than x2")
        if self.sample and (not _is_int(self.sample_rate) or self.sample_rate < 1):
            raise InvalidParams("sample_rate", "must be a positive integer")


def _external(attr):
    return next(k for k, v in PARAM_KEYS.items() if v == attr)


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, bool
    )


@dataclass(frozen=True)
class ReservoirMatrix:
    """Rows are time-indexed inputs, columns are readout nodes."""

    values: np.ndarray
    row_labels: tuple
    node_labels: tuple
    applied: Optional[ProcessParams] = None
    node_xs: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("reservoir matrix must be 2-D")
        if not np.all(np.isfinite(values)):
            raise ValueError("reservoir matrix contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "node_labels", tuple(self.node_labels))
        if len(self.row_labels) != values.shape[0]:
            raise ValueError("row_labels length does not match the row count")
        if len(self.node_labels) != values.shape[1]:
            raise ValueError("node_labels length does not match the column count")

    @classmethod
    def from_array(cls, values, applied=None) -> "ReservoirMatrix":
        values = np.asarray(values, dtype=float)
        n_rows, n_nodes = values.shape
        return cls(values, range(1, n_rows + 1), node_labels(n_nodes), applied)

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.values.shape[1]


def node_labels(n: int) -> tuple:
    return tuple(f"r{j}" for j in range(n))


def remove_background(scan_set: ScanSet) -> ScanSet:
    """Subtract the background readouts from every record."""
    bg = scan_set.background
    if bg is None:
        raise MissingBackground(f"no background record loaded for {scan_set.source_dir}")
    records = tuple(r.replace(readouts=r.readouts - bg.readouts) for r in scan_set.records)
    return ScanSet(records, bg, scan_set.source_dir, scan_set.prefix)


def savgol_smooth(seq, win: int, rank: int) -> np.ndarray:
    """Savitzky-Golay smoothing with polynomial-fit ('interp') edges."""
    seq = np.asarray(seq, dtype=float)
    if not _is_int(win) or win < 1 or win % 2 == 0:
        raise InvalidParams("smooth_win", f"must be an odd positive integer, got {win!r}")
    if not _is_int(rank) or rank < 0:
        raise InvalidParams("smooth_rank", f"must be a non-negative integer, got {rank!r}")
    if win > len(seq):
        raise WindowTooLarge(f"window {win} exceeds sequence length {len(seq)}")
    if rank >= win:
        raise RankTooHigh(f"polynomial rank {rank} must be below window {win}")
    return savgol_filter(seq, win, rank, mode="interp")


def cut_xs(record: ScanRecord, x1: float, x2: float) -> ScanRecord:
    """Keep samples with ``x1 <= x <= x2``."""
    if not x1 < x2:
        raise InvalidParams("x2", "x1 must be less than x2")
    keep = (record.xs >= x1) & (record.xs <= x2)
    if keep.sum() < 2:
        raise EmptySlice(f"fewer than 2 samples within [{x1}, {x2}]")
    return record.replace(xs=record.xs[keep], readouts=record.readouts[keep])


def sample(record: ScanRecord, rate: int) -> ScanRecord:
    """Keep every ``rate``-th sample starting at index 0."""
    if not _is_int(rate) or rate < 1:
        raise InvalidParams("sample_rate", "must be a positive integer")
    if rate == 1:
        return record
    return record.replace(xs=record.xs[::rate], readouts=record.readouts[::rate])


def normalize_local(m) -> np.ndarray:
    """Map each column onto [0, 1]; constant columns become zeros."""
    m = np.asarray(m, dtype=float)
    lo = m.min(axis=0)
    span = m.max(axis=0) - lo
    out = np.zeros_like(m)
    ok = span > 0
    out[:, ok] = (m[:, ok] - lo[ok]) / span[ok]
    return out


def normalize_global(m) -> np.ndarray:
    """Map the whole matrix onto [0, 1]; a constant matrix becomes zeros."""
    m = np.asarray(m, dtype=float)
    lo, hi = m.min(), m.max()
    if hi == lo:
        return np.zeros_like(m)
    return (m - lo) / (hi - lo)


def assemble(scan_set: ScanSet, params: ProcessParams) -> ReservoirMatrix:
    """Run the preprocessing stages and stack records into a matrix."""
    params.validate()
    if params.remove_bg:
        scan_set = remove_background(scan_set)
    records = list(scan_set.records)
    if params.smooth:
        n = len(scan_set.xs)
        if params.smooth_win >= n:
            raise WindowTooLarge(
                f"smooth_win={params.smooth_win} must be less than the "
                f"{n} samples per scan"
            )
        records = [
            r.replace(readouts=savgol_smooth(r.readouts, params.smooth_win, params.smooth_rank))
            for r in records
        ]
    if params.cut_xs:
        records = [cut_xs(r, params.x1, params.x2) for r in records]
    if params.sample:
        records = [sample(r, params.sample_rate) for r in records]

    values = np.vstack([r.readouts for r in records])
    node_xs = np.array(records[0].xs)
    if params.normalize_local:
        values = normalize_local(values)
    elif params.normalize_global:
        values = normalize_global(values)

    row_labels = [r.scan_index for r in records]
    if params.transpose:
        return ReservoirMatrix(
            values.T, range(values.shape[1]), node_labels(values.shape[0]), params
        )
    return ReservoirMatrix(values, row_labels, node_labels(values.shape[1]), params, node_xs)
