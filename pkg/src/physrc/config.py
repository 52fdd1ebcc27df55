"""Declarative run configuration loaded from YAML.

Layout (every section except ``data`` and ``target`` is optional)::

    data:    {dir, prefix, xs_col, readout_col, delimiter, bg_fname}
    process: {remove_bg, smooth, smooth_win, ...}        # preprocessing keys
    target:  {kind, length, num_periods, points_per_period, file,
              normalize, mackey_glass: {...}}
    model:   {kind, alpha, fit_intercept, tol, max_iter}
    rc:      {tau, test_size, error_type}
    metrics: {enabled, kmax, remove_auto_correlation, input_file | input}

Relative paths resolve against the directory holding the config file.
Everything is validated up front; failures raise InvalidParams whose
``field`` is the dotted path of the offending key (``"rc.tau"``).
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import InvalidParams
from .preprocess import PARAM_KEYS, ProcessParams
from .targets import (
    MackeyGlassParams,
    SignalSeries,
    generate_mackey_glass,
    generate_sawtooth_wave,
    generate_sine_wave,
    generate_square_wave,
    load_series,
    normalize_list,
)
from .training import ModelSpec, RcParams, define_linear, define_logistic, define_ridge

SIGNAL_KINDS = ("square", "sawtooth", "sine", "mackey_glass", "file")
_SECTIONS = ("data", "process", "target", "model", "rc", "metrics")
_DATA_KEYS = {"dir", "prefix", "xs_col", "readout_col", "delimiter", "bg_fname"}
# data.* keys that feed the preprocessing parameters
_DATA_TO_PROCESS = {
    "xs_col": "Xs",
    "readout_col": "Readouts",
    "delimiter": "delimiter",
    "bg_fname": "bg_fname",
}
_SIGNAL_KEYS = {"kind", "length", "num_periods", "points_per_period", "file", "normalize",
                "mackey_glass"}
_MODEL_KEYS = {"kind", "alpha", "fit_intercept", "tol", "max_iter"}
_RC_KEYS = {"tau", "test_size", "error_type"}
_METRICS_KEYS = {"enabled", "kmax", "remove_auto_correlation", "input_file", "input"}

# YAML 1.1 reads "1e-6" (no dot) as a string; accept such numerals
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")


# -- scalar coercion ---------------------------------------------------------

def _float(value, path):
    if isinstance(value, bool):
        raise InvalidParams(path, "must be a number")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str) and _FLOAT_RE.match(value.strip()):
        return float(value)
    raise InvalidParams(path, f"must be a number, got {value!r}")


def _int(value, path):
    if isinstance(value, bool):
        raise InvalidParams(path, "must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and _INT_RE.match(value.strip()):
        return int(value)
    raise InvalidParams(path, f"must be an integer, got {value!r}")


def _bool(value, path):
    if isinstance(value, bool):
        return value
    raise InvalidParams(path, f"must be true or false, got {value!r}")


def _str(value, path):
    if isinstance(value, str) and value:
        return value
    raise InvalidParams(path, f"must be a non-empty string, got {value!r}")


def _section(raw, name, allowed, required=False) -> dict:
    block = raw.get(name)
    if block is None:
        if required:
            raise InvalidParams(name, "section is required")
        return {}
    if not isinstance(block, dict):
        raise InvalidParams(name, "must be a mapping")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise InvalidParams(f"{name}.{unknown[0]}", "unknown key")
    return block


@contextmanager
def _prefixed(section):
    """Re-raise InvalidParams (and constructor TypeErrors) under ``section``."""
    try:
        yield
    except InvalidParams as exc:
        raise InvalidParams(f"{section}.{exc.field}", exc.message) from None
    except TypeError as exc:
        raise InvalidParams(section, str(exc)) from None


# -- signals -----------------------------------------------------------------

@dataclass(frozen=True)
class SignalConfig:
    """How to build a target or input series once the row count is known."""

    kind: str
    length: Optional[int] = None
    num_periods: Optional[int] = None
    points_per_period: Optional[int] = None
    file: Optional[Path] = None
    normalize: bool = False
    mackey_glass: MackeyGlassParams = field(default_factory=MackeyGlassParams)

    def build(self, n_rows: int) -> SignalSeries:
        length = self.length if self.length is not None else n_rows
        if self.kind == "square":
            s = generate_square_wave(length, self.num_periods)
        elif self.kind == "sawtooth":
            s = generate_sawtooth_wave(length, self.num_periods)
        elif self.kind == "sine":
            if self.points_per_period is not None:
                s = generate_sine_wave(None, self.num_periods, self.points_per_period)
            else:
                s = generate_sine_wave(length, self.num_periods)
        elif self.kind == "mackey_glass":
            s = generate_mackey_glass(self.mackey_glass, length=length)
        else:
            s = load_series(self.file)
        return normalize_list(s) if self.normalize else s


def _parse_signal(block, path, base_dir) -> SignalConfig:
    unknown = sorted(set(block) - _SIGNAL_KEYS)
    if unknown:
        raise InvalidParams(f"{path}.{unknown[0]}", "unknown key")
    kind = block.get("kind")
    if kind not in SIGNAL_KINDS:
        raise InvalidParams(f"{path}.kind", f"must be one of {', '.join(SIGNAL_KINDS)}")

    def opt_int(key, minimum):
        if block.get(key) is None:
            return None
        value = _int(block[key], f"{path}.{key}")
        if value < minimum:
            raise InvalidParams(f"{path}.{key}", f"must be at least {minimum}")
        return value

    length = opt_int("length", 1)
    num_periods = opt_int("num_periods", 1)
    ppp = opt_int("points_per_period", 2)
    normalize = _bool(block.get("normalize", False), f"{path}.normalize")

    if kind in ("square", "sawtooth", "sine") and num_periods is None:
        raise InvalidParams(f"{path}.num_periods", f"required for kind {kind}")
    if ppp is not None and kind != "sine":
        raise InvalidParams(f"{path}.points_per_period", "only used with kind sine")
    if length is not None and ppp is not None and length != num_periods * ppp:
        raise InvalidParams(f"{path}.length", "disagrees with num_periods*points_per_period")
    if length is not None and num_periods is not None and length < 2 * num_periods:
        raise InvalidParams(f"{path}.num_periods", "need length >= 2*num_periods")

    file = None
    if kind == "file":
        file = base_dir / _str(block.get("file"), f"{path}.file")
    elif "file" in block:
        raise InvalidParams(f"{path}.file", "only used with kind file")

    mg = MackeyGlassParams()
    if "mackey_glass" in block:
        if kind != "mackey_glass":
            raise InvalidParams(f"{path}.mackey_glass", "only used with kind mackey_glass")
        mg = _parse_mackey_glass(block["mackey_glass"] or {}, f"{path}.mackey_glass")
    return SignalConfig(kind, length, num_periods, ppp, file, normalize, mg)


def _parse_mackey_glass(block, path) -> MackeyGlassParams:
    if not isinstance(block, dict):
        raise InvalidParams(path, "must be a mapping")
    ints = {"subsample", "washout", "length"}
    floats = {"beta", "gamma", "n_exp", "tau_delay", "dt", "x0"}
    kwargs = {}
    for key, value in block.items():
        if key in ints:
            kwargs[key] = _int(value, f"{path}.{key}")
        elif key in floats:
            kwargs[key] = _float(value, f"{path}.{key}")
        else:
            raise InvalidParams(f"{path}.{key}", "unknown key")
    p = MackeyGlassParams(**kwargs)
    with _prefixed(path):
        p.validate()
    return p


# -- run config --------------------------------------------------------------

@dataclass(frozen=True)
class MetricsConfig:
    enabled: bool = False
    kmax: int = 25
    remove_auto_correlation: bool = False
    input: Optional[SignalConfig] = None


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path
    prefix: str
    process: ProcessParams
    target: SignalConfig
    rc: RcParams
    metrics: MetricsConfig
    raw: dict
    source: Optional[Path] = None


def _parse_model(block) -> ModelSpec:
    kind = block.get("kind", "ridge")
    builders = {"ridge": define_ridge, "linear": define_linear, "logistic": define_logistic}
    if kind not in builders:
        raise InvalidParams("model.kind", f"must be one of {', '.join(builders)}")
    params = {}
    if "alpha" in block:
        params["alpha"] = _float(block["alpha"], "model.alpha")
    if "tol" in block:
        params["tol"] = _float(block["tol"], "model.tol")
    if "fit_intercept" in block:
        params["fit_intercept"] = _bool(block["fit_intercept"], "model.fit_intercept")
    if block.get("max_iter") is not None:
        params["max_iter"] = _int(block["max_iter"], "model.max_iter")
    with _prefixed("model"):
        return builders[kind](params)


def _parse_rc(block, model) -> RcParams:
    kwargs = {"model": model}
    if "tau" in block:
        kwargs["tau"] = _int(block["tau"], "rc.tau")
    if "test_size" in block:
        kwargs["test_size"] = _float(block["test_size"], "rc.test_size")
    if "error_type" in block:
        kwargs["error_type"] = block["error_type"]
    with _prefixed("rc"):
        return RcParams(**kwargs)


def _parse_process(data, block) -> ProcessParams:
    merged = {}
    for key, ext in _DATA_TO_PROCESS.items():
        if key in data:
            merged[ext] = data[key]
    for key, value in block.items():
        if key in merged and merged[key] != value:
            raise InvalidParams(f"process.{key}", "conflicts with the data section")
        merged[key] = value
    coerced = {}
    for key, value in merged.items():
        if key in ("smooth_win", "smooth_rank", "sample_rate") and value is not None:
            value = _int(value, f"process.{key}")
        elif key in ("x1", "x2") and value is not None:
            value = _float(value, f"process.{key}")
        coerced[key] = value
    with _prefixed("process"):
        return ProcessParams.from_dict(coerced)


def _parse_metrics(block, base_dir) -> MetricsConfig:
    enabled = _bool(block.get("enabled", False), "metrics.enabled")
    kmax = _int(block.get("kmax", 25), "metrics.kmax")
    if kmax < 1:
        raise InvalidParams("metrics.kmax", "must be a positive integer")
    remove = _bool(
        block.get("remove_auto_correlation", False), "metrics.remove_auto_correlation"
    )
    if "input_file" in block and "input" in block:
        raise InvalidParams("metrics.input", "give either input_file or input, not both")
    signal = None
    if "input_file" in block:
        signal = SignalConfig("file", file=base_dir / _str(block["input_file"], "metrics.input_file"))
    elif "input" in block:
        if not isinstance(block["input"], dict):
            raise InvalidParams("metrics.input", "must be a mapping")
        signal = _parse_signal(block["input"], "metrics.input", base_dir)
    if enabled and signal is None:
        raise InvalidParams("metrics.input_file", "required when metrics are enabled")
    return MetricsConfig(enabled, kmax, remove, signal)


def parse_config(raw, base_dir=".", source=None) -> RunConfig:
    """Validate a config mapping; relative paths resolve against ``base_dir``."""
    if not isinstance(raw, dict):
        raise InvalidParams("config", "top level must be a mapping")
    unknown = sorted(set(raw) - set(_SECTIONS))
    if unknown:
        raise InvalidParams(unknown[0], "unknown section")
    base_dir = Path(base_dir)

    data = _section(raw, "data", _DATA_KEYS, required=True)
    data_dir = base_dir / _str(data.get("dir"), "data.dir")
    prefix = _str(data.get("prefix"), "data.prefix")
    for key in ("xs_col", "readout_col", "delimiter"):
        if key in data:
            _str(data[key], f"data.{key}")

    process = _parse_process(data, _section(raw, "process", PARAM_KEYS))
    target = _parse_signal(_section(raw, "target", _SIGNAL_KEYS, required=True), "target",
                           base_dir)
    model = _parse_model(_section(raw, "model", _MODEL_KEYS))
    rc = _parse_rc(_section(raw, "rc", _RC_KEYS), model)
    metrics = _parse_metrics(_section(raw, "metrics", _METRICS_KEYS), base_dir)
    return RunConfig(data_dir, prefix, process, target, rc, metrics, raw, source)


def load_config(path) -> RunConfig:
    """Read and validate a YAML config file.

    Syntax errors surface as ``yaml.YAMLError``; everything else as
    InvalidParams. A missing file raises FileNotFoundError.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return parse_config(raw if raw is not None else {}, path.parent, path)
