"""Reservoir quality metrics: R², nonlinearity and linear memory capacity.

Both metrics use linear estimators scored by the squared correlation

    R²[a, b] = cov(a, b)² / (var(a) var(b))

(population moments). Nonlinearity of readout channel n is ``1 - R²``
between the channel and its best affine fit from the scalar input u(t).
Linear memory capacity sums, over lags 1..kmax, the R² between u(t-lag)
and its reconstruction from the full readout row at time t.

Estimators are fitted and scored in-sample.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesWarning, InvalidParams, LengthMismatch, TooFewRows
from .preprocess import ReservoirMatrix
from .targets import as_series
from .training import RidgeParams, fit_linear, fit_ridge, predict

MC_RIDGE_ALPHA = 1e-6
_FLAT_ULPS = 8


def _is_flat(x) -> bool:
    # spread within a few ulps of the magnitude is rounding noise, e.g. the
    # output of a fitted line whose slope came out as 1e-17
    return np.ptp(x) <= _FLAT_ULPS * np.finfo(float).eps * np.max(np.abs(x))


def r_squared(a, b) -> float:
    """Squared Pearson correlation; 0 (with a warning) if either is constant.

    "Constant" includes series whose spread is at rounding level.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise TooFewRows("R² needs at least 2 samples")
    if _is_flat(a) or _is_flat(b):
        warnings.warn("R² of a constant series is defined as 0", DegenerateSeriesWarning, stacklevel=2)
        return 0.0
    ac = a - a.mean()
    bc = b - b.mean()
    cov = np.mean(ac * bc)
    return float(cov * cov / (np.mean(ac * ac) * np.mean(bc * bc)))


@dataclass(frozen=True)
class MetricsInput:
    """Input series u(t) paired with the readouts it produced, row by row."""

    input_series: np.ndarray
    readouts: np.ndarray

    def __post_init__(self):
        u = np.array(as_series(self.input_series).values, dtype=float)
        r = self.readouts
        r = r.values if isinstance(r, ReservoirMatrix) else np.asarray(r, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        if r.ndim != 2:
            raise ValueError("readouts must be a 2-D matrix")
        if u.size != r.shape[0]:
            raise LengthMismatch(
                f"input has {u.size} samples but readouts have {r.shape[0]} rows"
            )
        object.__setattr__(self, "input_series", u)
        object.__setattr__(self, "readouts", r)


@dataclass(frozen=True)
class MemoryCapacityReport:
    total: float
    per_lag: tuple
    kmax: int
    auto_correlation_removed: bool

    def __iter__(self):
        # allows ``total, per_lag = report``
        yield self.total
        yield list(self.per_lag)


def nonlinearity(input_series, readouts):
    """Mean and per-channel nonlinearity ``1 - R²[fit(u), y_n]``.

    Constant channels score 0. A channel with no linear trend at all (flat
    estimate) scores 1.
    """
    m = MetricsInput(input_series, readouts)
    u = m.input_series
    per_channel = np.empty(m.readouts.shape[1])
    for n, channel in enumerate(m.readouts.T):
        if _is_flat(channel):
            per_channel[n] = 0.0
            continue
        estimate = predict(fit_linear(u, channel), u)
        if _is_flat(estimate):
            per_channel[n] = 1.0
            continue
        per_channel[n] = 1.0 - r_squared(estimate, channel)
    return float(per_channel.mean()), per_channel


def remove_auto_correlation_profile(input_series, kmax: int) -> np.ndarray:
    """Entry lag-1 is R²[u(t), u(t - lag)] over the overlapping samples."""
    u = as_series(input_series).values
    if kmax < 1 or kmax >= u.size - 1:
        raise TooFewRows(f"kmax={kmax} needs more than {kmax + 1} samples, got {u.size}")
    return np.array([r_squared(u[lag:], u[:-lag]) for lag in range(1, kmax + 1)])


def linear_memory_capacity(
    input_series, readouts, kmax: int = 25, remove_auto_correlation: bool = False
) -> MemoryCapacityReport:
    """Sum over lags of how well the readout row recovers the delayed input.

    For each lag, a ridge estimator (alpha=1e-6, with intercept) maps
    x(t) to u(t - lag) over rows ``lag .. L-1``. With
    ``remove_auto_correlation`` the input's own lag-R² is subtracted, which
    can make entries negative.
    """
    m = MetricsInput(input_series, readouts)
    if not isinstance(kmax, (int, np.integer)) or kmax < 1:
        raise InvalidParams("kmax", "must be a positive integer")
    u, X = m.input_series, m.readouts
    L = u.size
    if L <= kmax + 2:
        raise TooFewRows(f"memory capacity with kmax={kmax} needs more than {kmax + 2} rows")

    params = RidgeParams(alpha=MC_RIDGE_ALPHA, fit_intercept=True)
    per_lag = []
    for lag in range(1, kmax + 1):
        features = X[lag:]
        delayed = u[: L - lag]
        estimate = predict(fit_ridge(features, delayed, params), features)
        score = r_squared(estimate, delayed)
        if remove_auto_correlation:
            score -= r_squared(u[lag:], delayed)
        per_lag.append(score)
    per_lag = tuple(per_lag)
    return MemoryCapacityReport(sum(per_lag), per_lag, int(kmax), bool(remove_auto_correlation))
