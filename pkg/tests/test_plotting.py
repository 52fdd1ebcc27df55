import numpy as np
from matplotlib.image import imread

from physrc.plotting import (
    plot_line_profiles,
    plot_memory_capacity,
    plot_predictions,
    plot_reservoir,
)
from physrc.training import RcResults


def fake_results():
    y = np.sin(np.linspace(0, 6, 100))
    return RcResults(np.zeros((70, 2)), y[:70], y[:70] + 0.01, np.zeros((30, 2)), y[70:],
                     y[70:] - 0.01, 1e-4, 1e-4)


def test_figures_render(tmp_path):
    m = np.random.default_rng(0).normal(size=(100, 6))
    paths = [
        plot_predictions(fake_results(), tmp_path / "p.png", title="demo"),
        plot_reservoir(m, tmp_path / "r.png", n_train=70),
        plot_memory_capacity([0.9, 0.5, 0.1], tmp_path / "mc.png", total=1.5),
        plot_line_profiles(m, np.arange(100.0), tmp_path / "l.png", channels=(0, 1, 99)),
    ]
    for path in paths:
        img = imread(path)
        assert img.ndim == 3 and img.shape[0] > 100
        assert img.std() > 0  # not blank
