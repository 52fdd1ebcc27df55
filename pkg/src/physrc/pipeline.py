"""End-to-end workflow: load scans, build the reservoir, train and score.

Typical use::

    pipe = Pipeline("data/diode", "scan", {"Xs": "t", "Readouts": "Voltage"})
    pipe.define_target(generate_square_wave(pipe.get_df_length(), 10))
    pipe.run({"model": define_ridge({"alpha": 1e-6}), "tau": 0,
              "test_size": 0.3, "error_type": "MSE"})
    results = pipe.get_rc_results()

Note that a memoryless reservoir such as the bare diode circuit lacks the
echo state property; "reservoir" is used loosely for any readout matrix.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import LengthMismatch, NoInput, NoTarget, NotRun
from .ingest import ScanSet, load_scan_set
from .metrics import MemoryCapacityReport, linear_memory_capacity, nonlinearity
from .preprocess import ProcessParams, ReservoirMatrix, assemble
from .targets import SignalSeries, as_series
from .training import (
    RcParams,
    RcResults,
    TrainedReadout,
    align_tau,
    error,
    fit,
    predict,
    split_chronological,
)


class Pipeline:
    """Reservoir matrix plus target/input and the latest training results."""

    def __init__(self, data_dir, prefix: str, process_params=None):
        if process_params is None:
            params = ProcessParams()
        elif isinstance(process_params, ProcessParams):
            params = process_params
        else:
            params = ProcessParams.from_dict(process_params)
        params.validate()
        self.process_params = params
        self.scan_set: Optional[ScanSet] = load_scan_set(
            data_dir,
            prefix,
            params.xs_col,
            params.readout_col,
            params.delimiter,
            params.bg_fname,
        )
        self.matrix: ReservoirMatrix = assemble(self.scan_set, params)
        self._reset()

    @classmethod
    def from_matrix(cls, matrix) -> "Pipeline":
        """Wrap an in-memory matrix (no scan files involved)."""
        self = cls.__new__(cls)
        if not isinstance(matrix, ReservoirMatrix):
            matrix = ReservoirMatrix.from_array(matrix)
        self.process_params = matrix.applied
        self.scan_set = None
        self.matrix = matrix
        self._reset()
        return self

    def _reset(self):
        self.target: Optional[SignalSeries] = None
        self.input: Optional[SignalSeries] = None
        self.results: Optional[RcResults] = None
        self.readout: Optional[TrainedReadout] = None
        self.rc_params: Optional[RcParams] = None

    def get_df_length(self) -> int:
        return self.matrix.n_rows

    def _checked(self, values, name) -> SignalSeries:
        series = as_series(values, name)
        if len(series) != self.matrix.n_rows:
            raise LengthMismatch(
                f"{name} has {len(series)} values but the reservoir has "
                f"{self.matrix.n_rows} rows"
            )
        return series

    def define_target(self, values):
        self.target = self._checked(values, "target")
        self.results = None
        self.readout = None

    def define_input(self, values):
        self.input = self._checked(values, "input")

    def run(self, rc_params):
        """Align by tau, split chronologically, fit the readout and score it."""
        if self.target is None:
            raise NoTarget("define_target must be called before run")
        p = RcParams.from_dict(rc_params)
        X, y = align_tau(self.matrix.values, self.target.values, p.tau)
        (x_train, y_train), (x_test, y_test) = split_chronological(X, y, p.test_size)
        readout = fit(p.model, x_train, y_train)
        train_pred = predict(readout, x_train)
        test_pred = predict(readout, x_test)
        self.readout = readout
        self.rc_params = p
        self.results = RcResults(
            x_train=np.array(x_train),
            y_train=np.array(y_train),
            train_pred=train_pred,
            x_test=np.array(x_test),
            y_test=np.array(y_test),
            test_pred=test_pred,
            train_error=error(train_pred, y_train, p.error_type),
            test_error=error(test_pred, y_test, p.error_type),
        )

    def get_rc_results(self) -> RcResults:
        if self.results is None:
            raise NotRun("run must be called before get_rc_results")
        return self.results

    def _require_input(self):
        if self.input is None:
            raise NoInput("define_input must be called before computing metrics")
        return self.input

    def get_non_linearity(self) -> float:
        return nonlinearity(self._require_input(), self.matrix)[0]

    def get_non_linearity_per_channel(self) -> np.ndarray:
        return nonlinearity(self._require_input(), self.matrix)[1]

    def memory_capacity_report(
        self, kmax: int = 25, remove_auto_correlation: bool = False
    ) -> MemoryCapacityReport:
        return linear_memory_capacity(
            self._require_input(), self.matrix, kmax, remove_auto_correlation
        )

    def get_linear_memory_capacity(self, kmax: int = 25, remove_auto_correlation: bool = False):
        """Return ``(total, per_lag)``."""
        report = self.memory_capacity_report(kmax, remove_auto_correlation)
        return report.total, list(report.per_lag)
