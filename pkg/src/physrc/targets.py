"""Input and target signal generators, plus portable series I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadPeriodCount, EmptySeries, InvalidParams, SeriesError


@dataclass(frozen=True)
class SignalSeries:
    """A finite 1-D real sequence, used both as input u(t) and target y(t)."""

    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise EmptySeries(f"series {self.name!r} is empty")
        if not np.all(np.isfinite(values)):
            raise SeriesError(f"series {self.name!r} contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __getitem__(self, item):
        return self.values[item]


def as_series(values, name: str = "") -> SignalSeries:
    if isinstance(values, SignalSeries):
        return values
    return SignalSeries(values, name)


def _check_periods(length, num_periods):
    if not (isinstance(length, int) and isinstance(num_periods, int)):
        raise BadPeriodCount("length and num_periods must be integers")
    if num_periods < 1 or length < 2 * num_periods:
        raise BadPeriodCount(
            f"need length >= 2*num_periods >= 2, got length={length}, "
            f"num_periods={num_periods}"
        )


def _phase_numerators(length, num_periods):
    # frac(i / P) with P = length / num_periods, kept as exact integers:
    # frac = ((i * num_periods) mod length) / length
    return (np.arange(length) * num_periods) % length


def generate_square_wave(length: int, num_periods: int) -> SignalSeries:
    """Square wave in {0, 1}, high for the first half of each period."""
    _check_periods(length, num_periods)
    high = 2 * _phase_numerators(length, num_periods) < length
    return SignalSeries(high.astype(float), "square")


def generate_sawtooth_wave(length: int, num_periods: int) -> SignalSeries:
    """Rising ramp in [0, 1) restarting every period."""
    _check_periods(length, num_periods)
    return SignalSeries(_phase_numerators(length, num_periods) / length, "sawtooth")


def generate_sine_wave(
    length: int | None = None, num_periods: int = 1, points_per_period: int | None = None
) -> SignalSeries:
    """``sin(2*pi*i/P)`` for ``i = 0 .. length-1``.

    With ``points_per_period`` the length is ``num_periods * points_per_period``.
    """
    if points_per_period is not None:
        implied = num_periods * points_per_period
        if length is not None and length != implied:
            raise BadPeriodCount(
                f"length={length} disagrees with num_periods*points_per_period={implied}"
            )
        length = implied
    if length is None:
        raise BadPeriodCount("give either length or points_per_period")
    _check_periods(length, num_periods)
    i = np.arange(length)
    return SignalSeries(np.sin(2.0 * np.pi * i * num_periods / length), "sine")


@dataclass(frozen=True)
class MackeyGlassParams:
    """Parameters of dx/dt = beta x(t-tau) / (1 + x(t-tau)^n) - gamma x(t).

    ``washout`` and ``length`` count kept samples, i.e. after taking every
    ``subsample``-th integration step.
    """

    length: int = 1000
    beta: float = 0.2
    gamma: float = 0.1
    n_exp: float = 10.0
    tau_delay: float = 17.0
    dt: float = 0.1
    subsample: int = 10
    washout: int = 1000
    x0: float = 1.2

    @property
    def delay_steps(self) -> int:
        return int(round(self.tau_delay / self.dt))

    def validate(self):
        if not self.dt > 0:
            raise InvalidParams("dt", "must be positive")
        ratio = self.tau_delay / self.dt
        if round(ratio) < 1 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise InvalidParams("tau_delay", "tau_delay/dt must be a positive integer")
        if not isinstance(self.subsample, int) or self.subsample < 1:
            raise InvalidParams("subsample", "must be a positive integer")
        if not isinstance(self.washout, int) or self.washout < 0:
            raise InvalidParams("washout", "must be a non-negative integer")
        if not isinstance(self.length, int) or self.length < 1:
            raise InvalidParams("length", "must be a positive integer")


def generate_mackey_glass(params: MackeyGlassParams | None = None, **overrides) -> SignalSeries:
    """Integrate the Mackey-Glass delay equation with fixed-step RK4.

    The history before t=0 is the constant ``x0``. Delayed values at the
    half step come from cubic Hermite interpolation of the stored
    trajectory and its derivative, which keeps the scheme fourth order.
    """
    p = params or MackeyGlassParams()
    if overrides:
        p = MackeyGlassParams(**{**p.__dict__, **overrides})
    p.validate()

    beta, gamma, n_exp, dt, x0 = p.beta, p.gamma, p.n_exp, p.dt, p.x0
    d = p.delay_steps
    n_steps = (p.washout + p.length - 1) * p.subsample

    def rhs(x, xd):
        return beta * xd / (1.0 + xd**n_exp) - gamma * x

    # xs[k] = x(k*dt); fs[k] = x'(k*dt) from the right.  Indices below 0
    # are the constant history, whose derivative is zero.
    xs = np.empty(n_steps + 1)
    fs = np.empty(n_steps + 1)
    xs[0] = x0
    for k in range(n_steps):
        x = xs[k]
        j = k - d
        xd0 = xs[j] if j >= 0 else x0
        k1 = rhs(x, xd0)
        fs[k] = k1
        fd0 = fs[j] if j >= 0 else 0.0
        if j + 1 > 0:
            xd1, fd1 = xs[j + 1], fs[j + 1]
        else:
            # interval ends at or before t=0: still on the flat history
            xd1, fd1 = x0, 0.0
        xdm = 0.5 * (xd0 + xd1) + dt / 8.0 * (fd0 - fd1)

        k2 = rhs(x + 0.5 * dt * k1, xdm)
        k3 = rhs(x + 0.5 * dt * k2, xdm)
        k4 = rhs(x + dt * k3, xd1)
        xs[k + 1] = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    kept = xs[:: p.subsample][p.washout : p.washout + p.length]
    return SignalSeries(kept, "mackey_glass")


def normalize_list(series) -> SignalSeries:
    """Affine map onto [0, 1]; a constant series maps to zeros."""
    s = as_series(series)
    lo, hi = s.values.min(), s.values.max()
    if hi == lo:
        return SignalSeries(np.zeros_like(s.values), s.name)
    return SignalSeries((s.values - lo) / (hi - lo), s.name)


def save_series(path, series):
    """Write one value per line using round-trip decimal rendering."""
    s = as_series(series)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(repr(v) for v in s.values.tolist()) + "\n")


def load_series(path, name: str | None = None) -> SignalSeries:
    path = Path(path)
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise SeriesError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not values:
        raise EmptySeries(f"{path}: no values")
    return SignalSeries(values, name if name is not None else path.stem)

