"""Figure rendering for reports written next to the CSV/JSON outputs.

Figures are built on bare :class:`matplotlib.figure.Figure` objects, so no
pyplot state or interactive backend is involved and the functions are safe
to call from a headless CLI.
"""

from __future__ import annotations

import math

import numpy as np
from matplotlib.figure import Figure

TARGET_STYLE = dict(color="red", ls="--", lw=1.2, label="target")
PRED_STYLE = dict(color="navy", lw=1.0, label="prediction")


def new_figure(width=8.0, height=None, nrows=1, ncols=1, **kwargs):
    """Figure with golden-ratio height and sensible font sizes."""
    if height is None:
        height = width * (math.sqrt(5) - 1.0) / 2.0
    fig = Figure(figsize=(width, height), facecolor="w")
    axes = fig.subplots(nrows, ncols, squeeze=False, **kwargs)
    for ax in axes.flat:
        ax.tick_params(labelsize=9)
    return fig, axes


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    return path


def plot_predictions(results, path, title=None):
    """Train and test predictions against their targets, side by side."""
    fig, axes = new_figure(10, 3.6, 1, 2, sharey=True)
    n_train = len(results.y_train)
    train_t = np.arange(n_train)
    test_t = n_train + np.arange(len(results.y_test))
    for ax, t, y, pred, name, err in (
        (axes[0, 0], train_t, results.y_train, results.train_pred, "train", results.train_error),
        (axes[0, 1], test_t, results.y_test, results.test_pred, "test", results.test_error),
    ):
        ax.plot(t, y, **TARGET_STYLE)
        ax.plot(t, pred, **PRED_STYLE)
        ax.set_title(f"{name} (error = {err:.3e})", fontsize=10)
        ax.set_xlabel("row")
    axes[0, 0].set_ylabel("output")
    axes[0, 1].legend(fontsize=8, loc="best")
    if title:
        fig.suptitle(title, fontsize=11)
    return _save(fig, path)


def plot_reservoir(matrix, path, n_train=None):
    """Heat map of the reservoir matrix (rows = inputs, columns = nodes)."""
    values = getattr(matrix, "values", matrix)
    fig, axes = new_figure(7, 4.5)
    ax = axes[0, 0]
    im = ax.imshow(values, aspect="auto", interpolation="nearest", cmap="viridis")
    if n_train is not None:
        ax.axhline(n_train - 0.5, color="white", lw=1.0, ls="--")
    ax.set_xlabel("readout node")
    ax.set_ylabel("input row")
    fig.colorbar(im, ax=ax, label="readout")
    return _save(fig, path)


def plot_memory_capacity(per_lag, path, total=None):
    per_lag = np.asarray(per_lag, dtype=float)
    fig, axes = new_figure(6)
    ax = axes[0, 0]
    lags = np.arange(1, per_lag.size + 1)
    ax.bar(lags, per_lag, color="steelblue")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("lag")
    ax.set_ylabel("R²")
    if total is not None:
        ax.set_title(f"linear memory capacity = {total:.3f}", fontsize=10)
    return _save(fig, path)


def plot_line_profiles(matrix, input_series, path, channels=(0, 1, 2)):
    """Input signal above a few readout channels over time."""
    values = getattr(matrix, "values", matrix)
    channels = [c for c in channels if c < values.shape[1]]
    fig, axes = new_figure(7, 5, 2, 1, sharex=True)
    axes[0, 0].plot(np.asarray(input_series, dtype=float), color="k", lw=1.0)
    axes[0, 0].set_ylabel("input")
    for c in channels:
        axes[1, 0].plot(values[:, c], lw=1.0, label=f"r{c}")
    axes[1, 0].set_ylabel("readout")
    axes[1, 0].set_xlabel("row")
    axes[1, 0].legend(fontsize=8)
    return _save(fig, path)
