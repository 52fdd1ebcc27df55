import numpy as np
import pytest

from physrc.errors import EmptyDirectory, LengthMismatch, NoInput, NotRun, NoTarget
from physrc.pipeline import Pipeline
from physrc.targets import generate_sine_wave, generate_square_wave
from physrc.training import define_ridge

RC = {"model": define_ridge({"alpha": 1e-6}), "tau": 0, "test_size": 0.3, "error_type": "MSE"}
COLS = {"Xs": "t", "Readouts": "Voltage"}


@pytest.fixture(scope="module")
def diode_pipe(diode_dataset):
    return Pipeline(diode_dataset, "scan", COLS)


def test_construct_500_by_501(diode_pipe):
    assert diode_pipe.matrix.shape == (500, 501)
    assert diode_pipe.get_df_length() == 500
    assert diode_pipe.matrix.node_labels[-1] == "r500"


def test_empty_dir(tmp_path):
    with pytest.raises(EmptyDirectory):
        Pipeline(tmp_path, "scan", COLS)


def test_transposed_length(tmp_path, scan_writer):
    scan_writer(tmp_path, np.arange(15.0).reshape(3, 5))
    p = Pipeline(tmp_path, "scan", {**COLS, "transpose": True})
    assert p.get_df_length() == 5


def test_state_machine(tmp_path, scan_writer):
    scan_writer(tmp_path, np.random.default_rng(0).normal(size=(20, 4)))
    p = Pipeline(tmp_path, "scan", COLS)
    with pytest.raises(NotRun):
        p.get_rc_results()
    with pytest.raises(NoTarget):
        p.run(RC)
    with pytest.raises(NoInput):
        p.get_non_linearity()
    with pytest.raises(LengthMismatch):
        p.define_target(np.zeros(19))
    with pytest.raises(LengthMismatch):
        p.define_input(np.zeros(21))
    p.define_target(np.arange(20.0))
    p.run(RC)
    assert p.get_rc_results() is p.results
    p.define_target(np.arange(20.0) * 2)
    with pytest.raises(NotRun):
        p.get_rc_results()


def test_square_task_and_result_layout(diode_pipe):
    target = generate_square_wave(500, 10)
    diode_pipe.define_target(target)
    diode_pipe.run(RC)
    res = diode_pipe.get_rc_results()
    assert res.test_error < 0.5 * np.var(target.values)
    d = res.to_dict()
    assert set(d) == {"train", "test", "error"}
    assert set(d["train"]) == {"x_train", "y_train", "train_pred"}
    assert set(d["test"]) == {"x_test", "y_test", "test_pred"}
    assert res["error"]["test_error"] == res.test_error
    assert len(res.x_train) + len(res.x_test) == 500
    assert len(res.x_train) == 350


def test_tau_shapes(tmp_path, scan_writer):
    scan_writer(tmp_path, np.random.default_rng(1).normal(size=(40, 3)))
    p = Pipeline(tmp_path, "scan", COLS)
    p.define_target(np.random.default_rng(2).normal(size=40))
    p.run({**RC, "tau": 10})
    res = p.get_rc_results()
    assert len(res.x_train) + len(res.x_test) == 30


def test_rerun_is_bit_identical(diode_dataset):
    target = generate_square_wave(500, 10)
    out = []
    for _ in range(2):
        p = Pipeline(diode_dataset, "scan", COLS)
        p.define_target(target)
        p.run(RC)
        out.append(p.get_rc_results())
    a, b = out
    assert a.test_pred.tobytes() == b.test_pred.tobytes()
    assert a.train_error == b.train_error


def test_metrics_delegation(diode_pipe):
    u = generate_sine_wave(None, 10, 50)
    diode_pipe.define_input(u)
    nl = diode_pipe.get_non_linearity()
    assert 0 <= nl <= 1
    assert diode_pipe.get_non_linearity_per_channel().shape == (501,)
    total, per_lag = diode_pipe.get_linear_memory_capacity(kmax=5)
    assert len(per_lag) == 5 and total == sum(per_lag)


def test_from_matrix():
    m = np.random.default_rng(3).normal(size=(30, 4))
    p = Pipeline.from_matrix(m)
    p.define_target(m @ [1.0, 2.0, 3.0, 4.0])
    p.run({**RC, "model": define_ridge({"alpha": 1e-12})})
    assert p.get_rc_results().test_error < 1e-12
