import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ridge_oracle
from physrc.errors import (
    ConvergenceWarning,
    InvalidParams,
    NonBinaryTarget,
    NonFiniteInput,
    SingularSystem,
    TauTooLarge,
    TooFewRows,
)
from physrc.training import (
    LogisticParams,
    RcParams,
    RidgeParams,
    TrainedReadout,
    align_tau,
    define_linear,
    define_logistic,
    define_ridge,
    error,
    fit,
    fit_linear,
    fit_logistic,
    fit_ridge,
    logistic_objective,
    predict,
    predict_labels,
    split_chronological,
)


def test_align_tau():
    X = np.arange(10.0).reshape(5, 2)
    y = np.arange(5.0)
    X0, y0 = align_tau(X, y, 0)
    np.testing.assert_array_equal(X0, X)
    np.testing.assert_array_equal(y0, y)
    X2, y2 = align_tau(X, y, 2)
    np.testing.assert_array_equal(X2, X[:3])
    assert y2.tolist() == [2, 3, 4]
    with pytest.raises(TauTooLarge):
        align_tau(X, y, 5)
    with pytest.raises(InvalidParams):
        align_tau(X, y, -1)


def test_split_chronological():
    X = np.arange(20.0).reshape(10, 2)
    y = np.arange(10.0)
    (xtr, ytr), (xte, yte) = split_chronological(X, y, 0.3)
    assert len(ytr) == 7 and len(yte) == 3
    np.testing.assert_array_equal(np.vstack([xtr, xte]), X)
    np.testing.assert_array_equal(np.concatenate([ytr, yte]), y)
    (_, ytr), (_, yte) = split_chronological(X, y, 0.25)  # 7.5 rounds up
    assert len(ytr) == 8
    (xtr, _), (xte, _) = split_chronological(X, y, 0.999)
    assert len(xtr) == 1 and len(xte) == 9
    with pytest.raises(TooFewRows):
        split_chronological(X[:1], y[:1], 0.3)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 200), st.floats(0.01, 0.99))
def test_split_partition_property(L, test_size):
    X = np.arange(L, dtype=float)[:, None]
    try:
        (xtr, _), (xte, _) = split_chronological(X, X[:, 0], test_size)
    except TooFewRows:
        return
    assert len(xtr) >= 1 and len(xte) >= 1
    assert len(xtr) + len(xte) == L
    assert len(xtr) == int(np.ceil(round((1 - test_size) * L, 9)))


def test_exact_recovery():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 2))
    y = 3 * X[:, 0] - 2 * X[:, 1] + 1
    r = fit_linear(X, y)
    np.testing.assert_allclose(r.weights, [3, -2], atol=1e-10)
    assert r.intercept == pytest.approx(1, abs=1e-10)


def test_huge_alpha_shrinks_to_mean():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(40, 3))
    y = rng.normal(size=40) + 5
    r = fit_ridge(X, y, RidgeParams(alpha=1e12))
    assert np.max(np.abs(r.weights)) < 1e-6
    assert r.intercept == pytest.approx(y.mean(), abs=1e-6)


@pytest.mark.parametrize("alpha", [1e-3, 1.0])
@pytest.mark.parametrize("fit_intercept", [True, False])
def test_ridge_matches_normal_equation_oracle(alpha, fit_intercept):
    rng = np.random.default_rng(2)
    X = rng.normal(size=(50, 8))
    y = rng.normal(size=50)
    r = fit_ridge(X, y, RidgeParams(alpha=alpha, fit_intercept=fit_intercept))
    w, b = ridge_oracle(X.tolist(), y.tolist(), alpha, fit_intercept)
    assert np.max(np.abs(r.weights - w)) < 1e-8
    assert abs(r.intercept - b) < 1e-8


def test_ridge_local_optimality_probe():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 5))
    y = rng.normal(size=40)
    alpha = 0.1
    r = fit_ridge(X, y, RidgeParams(alpha=alpha))

    def objective(w, b):
        res = X @ w + b - y
        return res @ res + alpha * w @ w

    base = objective(r.weights, r.intercept)
    for j in range(5):
        for step in (1e-6, -1e-6):
            w = np.array(r.weights)
            w[j] += step
            assert objective(w, r.intercept) >= base - 1e-12


def test_train_mse_monotone_in_alpha():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(60, 10))
    y = X @ rng.normal(size=10) + rng.normal(size=60)
    mses = [error(predict(fit_ridge(X, y, RidgeParams(alpha=a)), X), y)
            for a in (10.0, 1.0, 0.1, 0.0)]
    assert all(b <= a + 1e-12 for a, b in zip(mses, mses[1:]))


def test_rank_deficient_alpha_zero():
    rng = np.random.default_rng(5)
    a = rng.normal(size=20)
    X = np.column_stack([a, a, rng.normal(size=20)])
    y = 2 * a + X[:, 2]
    r = fit_linear(X, y)
    np.testing.assert_allclose(r.weights, [1, 1, 1], atol=1e-10)  # minimum norm
    with pytest.raises(SingularSystem):
        fit_ridge(X, y, RidgeParams(alpha=0.0), rank_fallback=False)


def test_constant_column_gets_zero_weight():
    rng = np.random.default_rng(6)
    X = np.column_stack([rng.normal(size=15), np.full(15, 3.3)])
    r = fit_linear(X, 2 * X[:, 0])
    assert r.weights[1] == 0.0


def test_non_finite_rejected():
    with pytest.raises(NonFiniteInput):
        fit_ridge([[1.0], [np.inf]], [1.0, 2.0])
    with pytest.raises(NonFiniteInput):
        TrainedReadout([np.nan], 0.0, "ridge")


def test_ridge_deterministic():
    rng = np.random.default_rng(7)
    X, y = rng.normal(size=(30, 6)), rng.normal(size=30)
    a, b = fit_ridge(X, y), fit_ridge(X, y)
    assert a.weights.tobytes() == b.weights.tobytes() and a.intercept == b.intercept


def test_predict_matches_row_loop():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(10, 4))
    r = TrainedReadout(rng.normal(size=4), 0.7, "ridge")
    loop = [sum(X[i, j] * r.weights[j] for j in range(4)) + 0.7 for i in range(10)]
    np.testing.assert_allclose(predict(r, X), loop, atol=1e-12)
    zero = TrainedReadout(np.zeros(4), 2.5, "ridge")
    assert np.all(predict(zero, X) == 2.5)


def test_logistic_separable():
    x = np.linspace(-3, 3, 40)[:, None]
    y = (x[:, 0] > 0).astype(float)
    r = fit_logistic(x, y, LogisticParams(alpha=1.0))
    assert r.converged
    assert np.all(predict_labels(r, x) == y)


def test_logistic_all_zero_targets():
    X = np.random.default_rng(9).normal(size=(20, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        r = fit_logistic(X, np.zeros(20), LogisticParams(alpha=1.0, max_iter=50))
    assert r.intercept < -3
    assert np.all(predict(r, X) < 0.5)


def test_logistic_gradient_vanishes_finite_difference():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(40, 3))
    y = (X @ [1.0, -2.0, 0.5] + rng.normal(size=40) > 0).astype(float)
    alpha = 0.5
    r = fit_logistic(X, y, LogisticParams(alpha=alpha))
    w = np.concatenate([r.weights, [r.intercept]])
    h = 1e-6
    grad = np.array([
        (logistic_objective(w + h * e, X, y, alpha) - logistic_objective(w - h * e, X, y, alpha))
        / (2 * h)
        for e in np.eye(4)
    ])
    assert np.linalg.norm(grad) < 1e-6


def test_logistic_non_binary():
    with pytest.raises(NonBinaryTarget):
        fit_logistic([[0.0], [1.0]], [0.0, 0.5])


def test_logistic_non_convergence_warns():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(30, 2))
    y = (X[:, 0] > 0).astype(float)
    with pytest.warns(ConvergenceWarning):
        r = fit_logistic(X, y, LogisticParams(alpha=1e-3, max_iter=1, tol=1e-12))
    assert not r.converged


def test_error_metrics():
    t = np.array([1.0, 2.0, 3.0])
    assert error(t, t, "MSE") == 0 and error(t, t, "MAE") == 0
    assert error(t + 1, t, "MSE") == 1 and error(t + 1, t, "MAE") == 1
    with pytest.raises(InvalidParams):
        error(t, t, "RMSE")


def test_model_definitions():
    model = define_ridge({"alpha": 1e-3, "copy_X": True, "solver": "auto"})
    assert model.kind == "ridge" and model.params.alpha == 1e-3
    assert define_linear().params.alpha == 0.0
    assert define_logistic({"alpha": 2.0}).params.alpha == 2.0
    with pytest.raises(InvalidParams):
        define_ridge({"alpha": -1})


def test_rc_params_validation():
    RcParams(define_ridge(), 0, 0.3, "MAE")
    for kwargs in ({"tau": -1}, {"test_size": 1.0}, {"error_type": "x"}, {"model": "ridge"}):
        with pytest.raises(InvalidParams):
            RcParams(**kwargs)


def test_tau_shift_composition():
    rng = np.random.default_rng(12)
    X = rng.normal(size=(60, 5))
    y = rng.normal(size=60)
    k = 4
    Xa, ya = align_tau(X, y, k)
    Xb, yb = align_tau(X[: 60 - k], y[k:], 0)
    (xa, ta), _ = split_chronological(Xa, ya, 0.3)
    (xb, tb), _ = split_chronological(Xb, yb, 0.3)
    pa = predict(fit(define_ridge(), xa, ta), xa)
    pb = predict(fit(define_ridge(), xb, tb), xb)
    np.testing.assert_allclose(pa, pb, atol=1e-12, rtol=0)
