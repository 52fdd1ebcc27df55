"""``physrc`` command line: run, targets, simulate, metrics.

Exit codes: 0 success, 1 invalid configuration or parameters, 2 data or
I/O errors. Diagnostics go to stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from . import simulators as sim
from .config import RunConfig, load_config
from .errors import InvalidParams, PhysrcError
from .metrics import linear_memory_capacity, nonlinearity
from .pipeline import Pipeline
from .targets import (
    MackeyGlassParams,
    generate_mackey_glass,
    generate_sawtooth_wave,
    generate_sine_wave,
    generate_square_wave,
    load_series,
    normalize_list,
    save_series,
)

EXIT_INVALID = 1
EXIT_DATA = 2


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(func):
    """Map library exceptions onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InvalidParams as exc:
            _fail(EXIT_INVALID, str(exc))
        except yaml.YAMLError as exc:
            _fail(EXIT_INVALID, f"cannot parse config: {exc}")
        except (PhysrcError, OSError, ValueError) as exc:
            _fail(EXIT_DATA, str(exc))

    return wrapper


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _write_predictions(path, start, target, prediction):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("index,target,prediction\n")
        for k, (y, p) in enumerate(zip(np.asarray(target).tolist(), prediction.tolist())):
            fh.write(f"{start + k},{y!r},{p!r}\n")


def _write_weights(path, readout, node_labels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("node,weight\n")
        for label, w in zip(node_labels, readout.weights.tolist()):
            fh.write(f"{label},{w!r}\n")
        fh.write(f"intercept,{readout.intercept!r}\n")


def _metrics_payload(cfg: RunConfig, pipe: Pipeline) -> dict:
    pipe.define_input(cfg.metrics.input.build(pipe.get_df_length()))
    report = pipe.memory_capacity_report(cfg.metrics.kmax, cfg.metrics.remove_auto_correlation)
    return {
        "nl": pipe.get_non_linearity(),
        "lmc_total": report.total,
        "lmc_per_lag": list(report.per_lag),
    }


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Physical reservoir computing toolkit."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
              help="YAML run configuration.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for results.json and CSV outputs.")
@click.option("--figures/--no-figures", default=False, help="Also render PNG figures.")
@handle_errors
def run(config_path, out_dir, figures):
    """Train and evaluate a readout as described by a config file."""
    try:
        cfg = load_config(config_path)
    except FileNotFoundError as exc:
        _fail(EXIT_INVALID, f"config not found: {exc.filename}")
    pipe = Pipeline(cfg.data_dir, cfg.prefix, cfg.process)
    pipe.define_target(cfg.target.build(pipe.get_df_length()))
    pipe.run(cfg.rc)
    results = pipe.get_rc_results()

    payload = {"train_error": results.train_error, "test_error": results.test_error}
    if cfg.metrics.enabled:
        payload.update(_metrics_payload(cfg, pipe))
    payload["config"] = cfg.raw

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "results.json", payload)
    n_train = len(results.y_train)
    _write_predictions(out / "train.csv", 0, results.y_train, results.train_pred)
    _write_predictions(out / "test.csv", n_train, results.y_test, results.test_pred)
    _write_weights(out / "weights.csv", pipe.readout, pipe.matrix.node_labels)

    if figures:
        from . import plotting

        plotting.plot_predictions(results, out / "predictions.png")
        plotting.plot_reservoir(pipe.matrix, out / "reservoir.png", n_train)
        if "lmc_per_lag" in payload:
            plotting.plot_memory_capacity(
                payload["lmc_per_lag"], out / "memory_capacity.png", payload["lmc_total"]
            )
    click.echo(
        f"train_error={results.train_error:.6e} test_error={results.test_error:.6e}"
    )


def _mackey_glass_options(func):
    options = [
        click.option("--beta", type=float, default=MackeyGlassParams.beta),
        click.option("--gamma", type=float, default=MackeyGlassParams.gamma),
        click.option("--n-exp", type=float, default=MackeyGlassParams.n_exp),
        click.option("--tau-delay", type=float, default=MackeyGlassParams.tau_delay),
        click.option("--dt", type=float, default=MackeyGlassParams.dt),
        click.option("--subsample", type=int, default=MackeyGlassParams.subsample),
        click.option("--washout", type=int, default=MackeyGlassParams.washout),
        click.option("--x0", type=float, default=MackeyGlassParams.x0),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _mg_params(length, kw) -> MackeyGlassParams:
    return MackeyGlassParams(
        length=length,
        beta=kw["beta"],
        gamma=kw["gamma"],
        n_exp=kw["n_exp"],
        tau_delay=kw["tau_delay"],
        dt=kw["dt"],
        subsample=kw["subsample"],
        washout=kw["washout"],
        x0=kw["x0"],
    )


@main.command()
@click.argument("kind", type=click.Choice(["square", "sawtooth", "sine", "mackey-glass"]))
@click.option("--length", type=int, default=None, help="Number of samples.")
@click.option("--periods", type=int, default=1, show_default=True)
@click.option("--points-per-period", type=int, default=None, help="Sine only.")
@click.option("--normalize", is_flag=True, help="Rescale onto [0, 1].")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None,
              help="Output file (one value per line); stdout if omitted.")
@_mackey_glass_options
@handle_errors
def targets(kind, length, periods, points_per_period, normalize, out_file, **mg):
    """Generate a target or input series."""
    if kind != "sine" and points_per_period is not None:
        raise InvalidParams("points-per-period", "only valid for sine")
    if kind == "sine":
        series = generate_sine_wave(length, periods, points_per_period)
    elif length is None:
        if kind != "mackey-glass":
            raise InvalidParams("length", f"required for {kind}")
        series = generate_mackey_glass(_mg_params(MackeyGlassParams.length, mg))
    elif kind == "square":
        series = generate_square_wave(length, periods)
    elif kind == "sawtooth":
        series = generate_sawtooth_wave(length, periods)
    else:
        series = generate_mackey_glass(_mg_params(length, mg))
    if normalize:
        series = normalize_list(series)
    if out_file:
        save_series(out_file, series)
    else:
        click.echo("\n".join(repr(v) for v in series.values.tolist()))


@main.command()
@click.option("--system", type=click.Choice(["diode", "rc-circuit", "esn"]), required=True)
@click.option("--input", "input_kind", type=click.Choice(["sine", "mackey-glass", "file"]),
              default="sine", show_default=True)
@click.option("--input-file", type=click.Path(dir_okay=False), default=None)
@click.option("--length", type=int, default=None,
              help="Input length (Mackey-Glass; sine uses periods x points).")
@click.option("--periods", type=int, default=10, show_default=True)
@click.option("--points-per-period", type=int, default=50, show_default=True)
@click.option("--windows", type=int, default=501, show_default=True,
              help="Number of multiplexed current windows (circuits).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--nodes", type=int, default=100, show_default=True, help="ESN size.")
@click.option("--spectral-radius", type=float, default=0.9, show_default=True)
@click.option("--input-scale", type=float, default=1.0, show_default=True)
@click.option("--leak-rate", type=float, default=1.0, show_default=True)
@click.option("--hold-time", type=float, default=None,
              help="Seconds each input sample is held (rc-circuit).")
@click.option("--bg-fname", default=None, help="Also write an ESN background file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--figures/--no-figures", default=False, help="Also render line profiles.")
@handle_errors
def simulate(system, input_kind, input_file, length, periods, points_per_period, windows,
             seed, nodes, spectral_radius, input_scale, leak_rate, hold_time, bg_fname,
             out_dir, figures):
    """Generate a synthetic reservoir dataset as scan files."""
    if input_kind == "sine":
        u = generate_sine_wave(None, periods, points_per_period)
    elif input_kind == "mackey-glass":
        u = normalize_list(
            generate_mackey_glass(length=length if length else MackeyGlassParams.length)
        )
    else:
        if not input_file:
            raise InvalidParams("input-file", "required with --input file")
        u = load_series(input_file)

    out = Path(out_dir)
    if system == "esn":
        params = sim.EsnParams(nodes, spectral_radius, input_scale, leak_rate, seed)
        m = sim.simulate_esn_dataset(u, params, out, bg_fname)
    else:
        if bg_fname:
            raise InvalidParams("bg-fname", "only used with --system esn")
        w = sim.MultiplexWindows.random(windows, seed)
        if system == "diode":
            m = sim.simulate_diode_dataset(u, w, None, out)
        else:
            params = sim.RcCircuitParams()
            if hold_time is not None:
                params = sim.RcCircuitParams(hold_time=hold_time)
            m = sim.simulate_rc_circuit_dataset(u, w, params, out)
    if figures:
        from . import plotting

        plotting.plot_line_profiles(m, u, out / "line_profiles.png")
    click.echo(f"wrote {m.shape[0]} scans x {m.shape[1]} readouts to {out}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None,
              help="JSON output file; stdout if omitted.")
@click.option("--plot", "plot_file", type=click.Path(dir_okay=False), default=None,
              help="Render per-lag memory capacity to this PNG.")
@handle_errors
def metrics(config_path, out_file, plot_file):
    """Nonlinearity and linear memory capacity of a dataset."""
    try:
        cfg = load_config(config_path)
    except FileNotFoundError as exc:
        _fail(EXIT_INVALID, f"config not found: {exc.filename}")
    if cfg.metrics.input is None:
        raise InvalidParams("metrics.input_file", "required for the metrics command")
    pipe = Pipeline(cfg.data_dir, cfg.prefix, cfg.process)
    u = cfg.metrics.input.build(pipe.get_df_length())
    pipe.define_input(u)
    nl_mean, nl_per_channel = nonlinearity(u, pipe.matrix)
    report = linear_memory_capacity(
        u, pipe.matrix, cfg.metrics.kmax, cfg.metrics.remove_auto_correlation
    )
    payload = {
        "nl_mean": nl_mean,
        "nl_per_channel": nl_per_channel.tolist(),
        "lmc_total": report.total,
        "lmc_per_lag": list(report.per_lag),
        "kmax": report.kmax,
        "remove_auto_correlation": report.auto_correlation_removed,
    }
    if out_file:
        _write_json(out_file, payload)
    else:
        click.echo(json.dumps(payload, indent=2))
    if plot_file:
        from . import plotting

        plotting.plot_memory_capacity(report.per_lag, plot_file, report.total)


if __name__ == "__main__":
    main()
