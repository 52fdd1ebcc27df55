"""Discovery, parsing and ordering of raw scan files.

A data directory holds one delimited text file per measurement ("scan").
Each file has a header line naming its columns followed by one row per
sample. Two of the columns are used: the independent variable (``Xs``)
and the measured readout (``Readouts``).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AmbiguousIndex,
    EmptyDirectory,
    MalformedRow,
    MissingColumn,
    NoIndex,
    NonMonotonicXs,
    XsMismatch,
)

XS_TOLERANCE = 1e-12

_DIGITS = re.compile(r"\d+")
# '.' radix only, optional exponent; rejects nan/inf and python's '1_000'
_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScanRecord:
    """One measurement: parallel ``xs`` and ``readouts`` arrays.

    ``scan_index`` is None for the background record. Parsed files must
    hold at least two samples; derived records (after decimation) may
    hold one.
    """

    scan_index: Optional[int]
    xs: np.ndarray
    readouts: np.ndarray
    path: Optional[Path] = field(default=None, compare=False)

    def __post_init__(self):
        xs = _frozen(self.xs)
        readouts = _frozen(self.readouts)
        where = f" ({self.path})" if self.path else ""
        if xs.ndim != 1 or readouts.ndim != 1 or len(xs) != len(readouts):
            raise ValueError(f"xs and readouts must be 1-D and equally long{where}")
        if len(xs) < 1:
            raise ValueError(f"a scan needs at least one sample{where}")
        if np.any(np.diff(xs) <= 0):
            raise NonMonotonicXs(f"xs must be strictly increasing{where}")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "readouts", readouts)

    def __len__(self):
        return len(self.xs)

    def __eq__(self, other):
        if not isinstance(other, ScanRecord):
            return NotImplemented
        return (
            self.scan_index == other.scan_index
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.readouts, other.readouts)
        )

    __hash__ = None

    def replace(self, xs=None, readouts=None) -> "ScanRecord":
        return ScanRecord(
            self.scan_index,
            self.xs if xs is None else xs,
            self.readouts if readouts is None else readouts,
            self.path,
        )


@dataclass(frozen=True)
class ScanSet:
    records: tuple
    background: Optional[ScanRecord]
    source_dir: Path
    prefix: str

    def __post_init__(self):
        records = tuple(sorted(self.records, key=lambda r: r.scan_index))
        indices = [r.scan_index for r in records]
        if len(set(indices)) != len(indices):
            raise AmbiguousIndex(f"duplicate scan indices in {self.source_dir}")
        if records:
            reference = records[0]
            for rec in records[1:]:
                _check_same_xs(reference, rec)
            if self.background is not None:
                _check_same_xs(reference, self.background)
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    @property
    def xs(self) -> np.ndarray:
        return self.records[0].xs

    @property
    def scan_indices(self) -> list:
        return [r.scan_index for r in self.records]


def _check_same_xs(reference: ScanRecord, other: ScanRecord):
    if len(other.xs) != len(reference.xs) or np.max(
        np.abs(other.xs - reference.xs)
    ) > XS_TOLERANCE:
        raise XsMismatch(
            f"xs of {other.path or other.scan_index} differ from "
            f"{reference.path or reference.scan_index}"
        )


def discover_files(directory, prefix: str, exclude: Sequence[str] = ()) -> list:
    """Return ``[(path, scan_index), ...]`` for files named ``prefix...``.

    The scan index is the first run of digits after the prefix and the
    result is ordered numerically, so ``scan10`` follows ``scan9``.
    Basenames listed in ``exclude`` are skipped.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"data directory not found: {directory}")
    excluded = set(exclude)
    found = {}
    for entry in os.scandir(directory):
        name = entry.name
        if not name.startswith(prefix) or name in excluded or not entry.is_file():
            continue
        match = _DIGITS.search(name, len(prefix))
        if match is None:
            raise NoIndex(f"{name}: no scan index after prefix {prefix!r}")
        index = int(match.group())
        if index in found:
            raise AmbiguousIndex(
                f"{found[index].name} and {name} both give scan index {index}"
            )
        found[index] = Path(entry.path)
    if not found:
        raise EmptyDirectory(f"no files starting with {prefix!r} in {directory}")
    return [(found[i], i) for i in sorted(found)]


def _parse_number(cell: str, path, lineno: int) -> float:
    text = cell.strip()
    if not _DECIMAL.fullmatch(text):
        raise MalformedRow(f"{path}:{lineno}: not a number: {cell!r}")
    return float(text)


def parse_scan_file(
    path,
    xs_col: str,
    readout_col: str,
    delimiter: str = "\t",
    scan_index: Optional[int] = None,
) -> ScanRecord:
    """Read the ``xs_col`` and ``readout_col`` columns of one scan file.

    Errors carry the path and the 1-based line number of the offending row.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline=None) as fh:
        lines = fh.read().split("\n")

    lineno = 0
    while lineno < len(lines) and not lines[lineno].strip():
        lineno += 1
    if lineno == len(lines):
        raise MissingColumn(f"{path}: file has no header line")
    header = [name.strip() for name in lines[lineno].split(delimiter)]
    for col in (xs_col, readout_col):
        if col not in header:
            raise MissingColumn(
                f"{path}:{lineno + 1}: column {col!r} not in header {header}"
            )
    ix, ir = header.index(xs_col), header.index(readout_col)
    n_fields = len(header)

    # trailing blank lines are dropped; interior ones are malformed
    last = len(lines)
    while last > lineno + 1 and not lines[last - 1].strip():
        last -= 1

    xs, readouts = [], []
    for i in range(lineno + 1, last):
        cells = lines[i].split(delimiter)
        if len(cells) != n_fields:
            raise MalformedRow(
                f"{path}:{i + 1}: expected {n_fields} fields, got {len(cells)}"
            )
        xs.append(_parse_number(cells[ix], path, i + 1))
        readouts.append(_parse_number(cells[ir], path, i + 1))

    if len(xs) < 2:
        raise MalformedRow(f"{path}: need at least 2 data rows, found {len(xs)}")
    try:
        return ScanRecord(scan_index, xs, readouts, path)
    except NonMonotonicXs:
        raise
    except ValueError as exc:
        raise MalformedRow(str(exc)) from None


def load_scan_set(
    directory,
    prefix: str,
    xs_col: str,
    readout_col: str,
    delimiter: str = "\t",
    bg_fname: Optional[str] = None,
) -> ScanSet:
    """Discover, parse and order every scan in ``directory``.

    The background file, if named, is parsed with the same columns and is
    never counted as a scan even when its name matches ``prefix``.
    """
    directory = Path(directory)
    exclude = (bg_fname,) if bg_fname else ()
    entries = discover_files(directory, prefix, exclude=exclude)
    records = [
        parse_scan_file(path, xs_col, readout_col, delimiter, scan_index=index)
        for path, index in entries
    ]
    background = None
    if bg_fname:
        bg_path = directory / bg_fname
        if not bg_path.is_file():
            raise FileNotFoundError(f"background file not found: {bg_path}")
        background = parse_scan_file(bg_path, xs_col, readout_col, delimiter)
    return ScanSet(tuple(records), background, directory, prefix)


def write_scan_file(
    path,
    xs,
    readouts,
    xs_col: str = "t",
    readout_col: str = "Voltage",
    delimiter: str = "\t",
):
    """Write a two-column scan file readable by :func:`parse_scan_file`.

    Values are written with ``repr`` so they re-parse bit-exactly.
    """
    xs = np.asarray(xs, dtype=float)
    readouts = np.asarray(readouts, dtype=float)
    if xs.shape != readouts.shape:
        raise ValueError("xs and readouts must have the same shape")
    rows = [f"{xs_col}{delimiter}{readout_col}"]
    rows.extend(
        f"{x!r}{delimiter}{r!r}" for x, r in zip(xs.tolist(), readouts.tolist())
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
