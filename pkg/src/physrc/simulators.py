"""Synthetic physical reservoirs that write scan files for ingestion.

Three systems are provided:

* a diode in series with a resistor, time-multiplexed over N random
  current windows (memoryless, nonlinear);
* the same circuit with a capacitor across the diode+resistor branch,
  whose voltage relaxes towards the diode voltage at a state-dependent
  rate (nonlinear with fading memory);
* a leaky tanh echo state network.

The diode uses the Shockley equation with generic parameters. They are
stand-ins chosen for a plausible I-V knee, not a model of a specific part.
Every generator is deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from scipy.special import lambertw

from .errors import InvalidParams, SpectralRadiusFailure, UnstableTimestep
from .ingest import write_scan_file
from .targets import as_series, save_series

CURRENT_RANGE = (1e-5, 2e-2)


@dataclass(frozen=True)
class DiodeCircuitParams:
    saturation_current: float = 1e-12
    thermal_voltage: float = 0.02585
    ideality: float = 1.8
    series_resistance: float = 100.0

    def validate(self):
        for name in ("saturation_current", "thermal_voltage", "ideality", "series_resistance"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise InvalidParams(name, "must be positive")


@dataclass(frozen=True)
class RcCircuitParams(DiodeCircuitParams):
    """Diode circuit plus a capacitor.

    Each input sample is held for ``hold_time`` seconds; the capacitor
    voltage is integrated at ``timestep`` and read at the end of the hold.

    ``dynamics`` selects the capacitor equation:

    * ``"kcl"``: C dV/dt = I - I_branch(V), where I_branch is the current
      the diode+resistor branch draws at voltage V;
    * ``"linear"``: dV/dt = (V_diode(I) - V) / (R C), the same circuit with
      the branch linearised to its series resistance.

    Both settle at V_diode(I) for a held current.
    """

    capacitance: float = 1e-4
    timestep: float = 5e-4
    hold_time: float = 1e-2
    v0: float = 0.0
    dynamics: str = "kcl"

    @property
    def time_constant(self) -> float:
        return self.series_resistance * self.capacitance

    def validate(self):
        super().validate()
        for name in ("capacitance", "timestep", "hold_time"):
            if not getattr(self, name) > 0:
                raise InvalidParams(name, "must be positive")
        if self.dynamics not in ("kcl", "linear"):
            raise InvalidParams("dynamics", "must be 'kcl' or 'linear'")
        if self.timestep > self.time_constant / 5:
            raise UnstableTimestep(
                f"timestep {self.timestep:g}s must not exceed RC/5 = "
                f"{self.time_constant / 5:g}s"
            )


@dataclass(frozen=True)
class MultiplexWindows:
    """Current windows ``[(i_low, i_high), ...]`` in amperes."""

    bounds: tuple
    seed: Optional[int] = None

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise InvalidParams("windows", "need at least one window")
        for lo, hi in bounds:
            if not 0 <= lo < hi:
                raise InvalidParams("windows", f"bad window ({lo}, {hi})")
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_windows(self) -> int:
        return len(self.bounds)

    @classmethod
    def random(cls, n_windows: int, seed: int = 0, current_range=CURRENT_RANGE):
        """Draw ``n_windows`` bound pairs uniformly inside ``current_range``."""
        if n_windows < 1:
            raise InvalidParams("windows", "must be a positive integer")
        lo, hi = current_range
        rng = np.random.default_rng(seed)
        bounds = []
        while len(bounds) < n_windows:
            a, b = np.sort(rng.uniform(lo, hi, size=2))
            if a < b:
                bounds.append((a, b))
        return cls(tuple(bounds), seed)


def diode_voltage(current, params: DiodeCircuitParams | None = None):
    """V = n*Vt*ln(1 + I/Is) + I*R."""
    p = params or DiodeCircuitParams()
    i = np.asarray(current, dtype=float)
    return (
        p.ideality * p.thermal_voltage * np.log1p(i / p.saturation_current)
        + i * p.series_resistance
    )


def branch_current(voltage, params: DiodeCircuitParams | None = None):
    """Inverse of :func:`diode_voltage` via the Lambert W function."""
    p = params or DiodeCircuitParams()
    a = p.ideality * p.thermal_voltage
    r, i_s = p.series_resistance, p.saturation_current
    v = np.asarray(voltage, dtype=float)
    return (a / r) * lambertw((i_s * r / a) * np.exp((v + i_s * r) / a)).real - i_s


def map_input_to_currents(u, windows: MultiplexWindows) -> np.ndarray:
    """Affinely map the range of ``u`` onto each window; shape (L, N)."""
    u = as_series(u).values
    lo, hi = u.min(), u.max()
    scaled = (u - lo) / (hi - lo) if hi > lo else np.zeros_like(u)
    bounds = np.array(windows.bounds)
    return bounds[:, 0] + scaled[:, None] * (bounds[:, 1] - bounds[:, 0])


def simulate_diode(u, windows: MultiplexWindows, params: DiodeCircuitParams | None = None):
    """Readout row t is the instantaneous voltage for each window's current."""
    p = params or DiodeCircuitParams()
    p.validate()
    return diode_voltage(map_input_to_currents(u, windows), p)


def simulate_rc_circuit(u, windows: MultiplexWindows, params: RcCircuitParams | None = None):
    """Capacitor voltage at the end of each input hold; shape (L, N).

    Integration uses the explicit trapezoidal (Heun) rule at
    ``params.timestep``. Each window has its own capacitor history, starting
    from ``params.v0``.
    """
    p = params or RcCircuitParams()
    p.validate()
    currents = map_input_to_currents(u, windows)
    n_sub = max(1, int(round(p.hold_time / p.timestep)))
    h = p.hold_time / n_sub

    if p.dynamics == "linear":
        drive = diode_voltage(currents, p)

        def slope(v, i, target):
            return (target - v) / p.time_constant
    else:
        drive = currents

        def slope(v, i, target):
            return (i - branch_current(v, p)) / p.capacitance

    out = np.empty_like(currents)
    v = np.full(currents.shape[1], float(p.v0))
    for t in range(currents.shape[0]):
        i, target = currents[t], drive[t]
        for _ in range(n_sub):
            k1 = slope(v, i, target)
            k2 = slope(v + h * k1, i, target)
            v = v + 0.5 * h * (k1 + k2)
        out[t] = v
    return out


@dataclass(frozen=True)
class EsnParams:
    n_nodes: int = 100
    spectral_radius: float = 0.9
    input_scale: float = 1.0
    leak_rate: float = 1.0
    seed: int = 0
    activation: str = "tanh"

    def validate(self):
        if not isinstance(self.n_nodes, int) or self.n_nodes < 1:
            raise InvalidParams("n_nodes", "must be a positive integer")
        if not self.spectral_radius >= 0:
            raise InvalidParams("spectral_radius", "must be non-negative")
        if not 0 < self.leak_rate <= 1:
            raise InvalidParams("leak_rate", "must lie in (0, 1]")
        if self.activation != "tanh":
            raise InvalidParams("activation", "only 'tanh' is supported")


def esn_weights(params: EsnParams):
    """Return ``(W_res, W_in)`` with W_res rescaled to the requested spectral radius."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    n = params.n_nodes
    w = rng.uniform(-1.0, 1.0, size=(n, n))
    w_in = rng.uniform(-1.0, 1.0, size=n) * params.input_scale
    if params.spectral_radius == 0:
        return np.zeros((n, n)), w_in
    rho = np.max(np.abs(np.linalg.eigvals(w)))
    if not np.isfinite(rho) or rho == 0:
        raise SpectralRadiusFailure(f"cannot rescale a matrix with spectral radius {rho}")
    w *= params.spectral_radius / rho
    achieved = np.max(np.abs(np.linalg.eigvals(w)))
    if abs(achieved - params.spectral_radius) > 1e-6:
        raise SpectralRadiusFailure(
            f"rescaled spectral radius {achieved} misses target {params.spectral_radius}"
        )
    return w, w_in


def run_esn(u, params: EsnParams | None = None, state0=None) -> np.ndarray:
    """x(t) = (1-a) x(t-1) + a tanh(W_res x(t-1) + W_in u(t)); shape (L, N)."""
    p = params or EsnParams()
    w, w_in = esn_weights(p)
    u = as_series(u).values
    a = p.leak_rate
    x = np.zeros(p.n_nodes) if state0 is None else np.array(state0, dtype=float)
    states = np.empty((u.size, p.n_nodes))
    for t, ut in enumerate(u):
        x = (1.0 - a) * x + a * np.tanh(w @ x + w_in * ut)
        states[t] = x
    return states


def esn_background(n_nodes: int) -> np.ndarray:
    """Smooth baseline added to ESN 'spectra' when a background file is requested."""
    j = np.arange(n_nodes)
    return 1.0 + 0.5 * np.sin(2.0 * np.pi * j / max(n_nodes, 2))


def write_dataset(
    matrix,
    out_dir,
    xs=None,
    xs_col: str = "t",
    readout_col: str = "Voltage",
    prefix: str = "scan",
    delimiter: str = "\t",
):
    """Write row t of ``matrix`` as ``{prefix}{t+1}.txt``."""
    matrix = np.asarray(matrix, dtype=float)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    xs = np.arange(matrix.shape[1], dtype=float) if xs is None else np.asarray(xs, float)
    for t, row in enumerate(matrix):
        write_scan_file(out_dir / f"{prefix}{t + 1}.txt", xs, row, xs_col, readout_col, delimiter)


def _write_windows(windows: MultiplexWindows, out_dir):
    with open(Path(out_dir) / "windows.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("window,i_low,i_high\n")
        for j, (lo, hi) in enumerate(windows.bounds):
            fh.write(f"{j},{lo!r},{hi!r}\n")


def simulate_diode_dataset(u, windows, params=None, out_dir=None):
    """Simulate the diode reservoir; write scans, input.txt and windows.csv."""
    m = simulate_diode(u, windows, params)
    if out_dir is not None:
        write_dataset(m, out_dir)
        save_series(Path(out_dir) / "input.txt", u)
        _write_windows(windows, out_dir)
    return m


def simulate_rc_circuit_dataset(u, windows, params=None, out_dir=None):
    """Simulate the capacitor+diode reservoir and write it like the diode one."""
    m = simulate_rc_circuit(u, windows, params)
    if out_dir is not None:
        write_dataset(m, out_dir)
        save_series(Path(out_dir) / "input.txt", u)
        _write_windows(windows, out_dir)
    return m


def simulate_esn_dataset(u, params=None, out_dir=None, bg_fname: Optional[str] = None):
    """Simulate the ESN; one scan file per time step (columns node, State).

    With ``bg_fname`` a fixed baseline is added to every scan and written
    to that file, so background removal recovers the node states.
    """
    p = params or EsnParams()
    states = run_esn(u, p)
    if out_dir is not None:
        written = states
        if bg_fname:
            baseline = esn_background(p.n_nodes)
            written = states + baseline
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            write_scan_file(out / bg_fname, np.arange(p.n_nodes, dtype=float), baseline,
                            "node", "State")
        write_dataset(written, out_dir, xs_col="node", readout_col="State")
        save_series(Path(out_dir) / "input.txt", u)
    return states
