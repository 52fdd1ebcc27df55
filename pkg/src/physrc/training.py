"""Readout training: the linear map from reservoir states to outputs.

Three models are provided (ridge, ordinary least squares and L2-penalised
logistic regression), all fitted in closed form or by Newton iterations
with no randomness, so identical inputs give bit-identical weights.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.special import expit

from .errors import (
    ConvergenceWarning,
    InvalidParams,
    NonBinaryTarget,
    NonFiniteInput,
    SingularSystem,
    TauTooLarge,
    TooFewRows,
)

MODEL_KINDS = ("ridge", "linear", "logistic")
ERROR_TYPES = ("MSE", "MAE")


@dataclass(frozen=True)
class RidgeParams:
    """Ridge settings.

    ``tol`` and ``max_iter`` are accepted for config compatibility; the
    direct solver does not iterate.
    """

    alpha: float = 1e-3
    fit_intercept: bool = True
    tol: float = 1e-4
    max_iter: Optional[int] = None

    def validate(self):
        if not _is_real(self.alpha) or not self.alpha >= 0 or not math.isfinite(self.alpha):
            raise InvalidParams("alpha", "must be a finite non-negative number")
        if not isinstance(self.fit_intercept, bool):
            raise InvalidParams("fit_intercept", "must be true or false")
        if not _is_real(self.tol) or not self.tol > 0:
            raise InvalidParams("tol", "must be positive")
        if self.max_iter is not None and (not _is_int(self.max_iter) or self.max_iter < 1):
            raise InvalidParams("max_iter", "must be a positive integer or null")


@dataclass(frozen=True)
class LogisticParams:
    """L2-penalised logistic regression; ``alpha`` weights 0.5*||w||^2."""

    alpha: float = 1.0
    fit_intercept: bool = True
    tol: float = 1e-8
    max_iter: Optional[int] = 100

    validate = RidgeParams.validate


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: object

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidParams("model", f"unknown model kind {self.kind!r}")
        self.params.validate()


def _params_from(cls, params):
    if params is None:
        return cls()
    if isinstance(params, cls):
        return params
    known = cls.__dataclass_fields__
    kwargs = {k: v for k, v in dict(params).items() if k in known}
    return cls(**kwargs)


def define_ridge(params=None) -> ModelSpec:
    """Ridge model from a parameter mapping; unrelated keys are ignored."""
    return ModelSpec("ridge", _params_from(RidgeParams, params))


def define_linear(params=None) -> ModelSpec:
    p = _params_from(RidgeParams, params)
    return ModelSpec("linear", RidgeParams(0.0, p.fit_intercept, p.tol, p.max_iter))


def define_logistic(params=None) -> ModelSpec:
    return ModelSpec("logistic", _params_from(LogisticParams, params))


@dataclass(frozen=True)
class TrainedReadout:
    weights: np.ndarray
    intercept: float
    model_kind: str
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if not np.all(np.isfinite(w)) or not math.isfinite(self.intercept):
            raise NonFiniteInput("fitted readout has non-finite entries")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intercept", float(self.intercept))


@dataclass(frozen=True)
class RcParams:
    model: ModelSpec = field(default_factory=define_ridge)
    tau: int = 0
    test_size: float = 0.3
    error_type: str = "MSE"

    def __post_init__(self):
        if not isinstance(self.model, ModelSpec):
            raise InvalidParams("model", "must be a model from define_ridge/define_linear/define_logistic")
        if not _is_int(self.tau) or self.tau < 0:
            raise InvalidParams("tau", "must be a non-negative integer")
        if not _is_real(self.test_size) or not 0 < self.test_size < 1:
            raise InvalidParams("test_size", "must lie strictly between 0 and 1")
        if self.error_type not in ERROR_TYPES:
            raise InvalidParams("error_type", f"must be one of {ERROR_TYPES}")

    @classmethod
    def from_dict(cls, params) -> "RcParams":
        if isinstance(params, cls):
            return params
        return cls(**dict(params))


@dataclass
class RcResults:
    x_train: np.ndarray
    y_train: np.ndarray
    train_pred: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    test_pred: np.ndarray
    train_error: float
    test_error: float

    def to_dict(self) -> dict:
        """Nested train/test/error layout."""
        return {
            "train": {
                "x_train": self.x_train,
                "y_train": self.y_train,
                "train_pred": self.train_pred,
            },
            "test": {
                "x_test": self.x_test,
                "y_test": self.y_test,
                "test_pred": self.test_pred,
            },
            "error": {"train_error": self.train_error, "test_error": self.test_error},
        }

    def __getitem__(self, key):
        return self.to_dict()[key]


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, bool
    )


def _as_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"X has shape {X.shape} but y has {y.shape[0]} entries")
    if X.shape[0] < 1:
        raise TooFewRows("need at least one row to fit")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("X or y contains NaN or Inf")
    return X, y


def align_tau(X, y, tau: int):
    """Pair row t of X with y(t + tau)."""
    X = np.asarray(X)
    y = np.asarray(y)
    L = X.shape[0]
    if len(y) != L:
        raise ValueError(f"X has {L} rows but y has {len(y)} entries")
    if not _is_int(tau) or tau < 0:
        raise InvalidParams("tau", "must be a non-negative integer")
    if tau >= L:
        raise TauTooLarge(f"tau={tau} leaves no rows out of {L}")
    return X[: L - tau], y[tau:]


def split_chronological(X, y, test_size: float):
    """First ceil((1 - test_size) * L) rows train, the rest test; no shuffling."""
    X = np.asarray(X)
    y = np.asarray(y)
    L = X.shape[0]
    if not 0 < test_size < 1:
        raise InvalidParams("test_size", "must lie strictly between 0 and 1")
    # the 1e-9 slack stops 0.7*10 = 7.000000000000001 rounding up to 8
    n_train = math.ceil((1.0 - test_size) * L - 1e-9)
    if n_train < 1 or n_train >= L:
        raise TooFewRows(
            f"test_size={test_size} on {L} rows leaves {n_train} train / {L - n_train} test"
        )
    return (X[:n_train], y[:n_train]), (X[n_train:], y[n_train:])


def fit_ridge(X, y, params: RidgeParams | None = None, rank_fallback: bool = True) -> TrainedReadout:
    """Solve (Xc^T Xc + alpha I) w = Xc^T yc by Cholesky factorisation.

    With ``alpha == 0`` and a rank-deficient design the minimum-norm least
    squares solution is returned, or SingularSystem is raised when
    ``rank_fallback`` is off.
    """
    p = params or RidgeParams()
    p.validate()
    X, y = _as_xy(X, y)
    n_features = X.shape[1]

    if p.fit_intercept:
        x_mean = X.mean(axis=0)
        y_mean = y.mean()
        Xc = X - x_mean
        # constant columns centre to exact zeros, not rounding residue
        Xc[:, np.ptp(X, axis=0) == 0] = 0.0
        yc = y - y_mean
    else:
        x_mean = np.zeros(n_features)
        y_mean = 0.0
        Xc, yc = X, y

    gram = Xc.T @ Xc
    rhs = Xc.T @ yc
    if p.alpha > 0:
        gram[np.diag_indices_from(gram)] += p.alpha
        try:
            w = linalg.cho_solve(linalg.cho_factor(gram, lower=True), rhs)
        except linalg.LinAlgError:
            # numerically indefinite despite alpha > 0; solve the stacked system
            aug = np.vstack([Xc, math.sqrt(p.alpha) * np.eye(n_features)])
            w = np.linalg.lstsq(aug, np.concatenate([yc, np.zeros(n_features)]), rcond=None)[0]
    else:
        rank = np.linalg.matrix_rank(Xc) if Xc.size else 0
        if rank < n_features:
            if not rank_fallback:
                raise SingularSystem(
                    f"design matrix has rank {rank} < {n_features} features and alpha=0"
                )
            w = np.linalg.lstsq(Xc, yc, rcond=None)[0]
        else:
            w = linalg.cho_solve(linalg.cho_factor(gram, lower=True), rhs)

    intercept = y_mean - float(x_mean @ w) if p.fit_intercept else 0.0
    return TrainedReadout(w, intercept, "ridge" if p.alpha > 0 else "linear")


def fit_linear(X, y, fit_intercept: bool = True) -> TrainedReadout:
    return fit_ridge(X, y, RidgeParams(alpha=0.0, fit_intercept=fit_intercept))


def logistic_objective(w, X, y, alpha, fit_intercept=True) -> float:
    """Penalised negative log-likelihood; the intercept (last entry) is not penalised."""
    Xa = np.hstack([X, np.ones((X.shape[0], 1))]) if fit_intercept else X
    z = Xa @ w
    penal = w[:-1] if fit_intercept else w
    return float(np.sum(np.logaddexp(0.0, z) - y * z) + 0.5 * alpha * penal @ penal)


def fit_logistic(X, y, params: LogisticParams | None = None) -> TrainedReadout:
    """Iteratively reweighted least squares (Newton's method).

    Stops when the largest weight update is below ``tol``. If ``max_iter``
    is reached first a ConvergenceWarning is issued and the iterate with
    the lowest objective is returned.
    """
    p = params or LogisticParams()
    p.validate()
    X, y = _as_xy(X, y)
    if not np.all((y == 0) | (y == 1)):
        raise NonBinaryTarget("logistic regression needs targets in {0, 1}")

    Xa = np.hstack([X, np.ones((X.shape[0], 1))]) if p.fit_intercept else X
    n = Xa.shape[1]
    reg = np.full(n, float(p.alpha))
    if p.fit_intercept:
        reg[-1] = 0.0

    w = np.zeros(n)
    best_w, best_obj = w, logistic_objective(w, X, y, p.alpha, p.fit_intercept)
    max_iter = p.max_iter if p.max_iter is not None else 100
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        prob = expit(Xa @ w)
        grad = Xa.T @ (prob - y) + reg * w
        s = prob * (1.0 - prob)
        hess = (Xa * s[:, None]).T @ Xa + np.diag(reg)
        try:
            with warnings.catch_warnings():
                # saturated probabilities make the intercept curvature tiny;
                # the objective check below guards the iterate instead
                warnings.simplefilter("ignore", linalg.LinAlgWarning)
                step = linalg.solve(hess, grad, assume_a="sym")
        except (linalg.LinAlgError, ValueError):
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        w = w - step
        obj = logistic_objective(w, X, y, p.alpha, p.fit_intercept)
        if obj <= best_obj:
            best_w, best_obj = w, obj
        if np.max(np.abs(step)) < p.tol:
            converged = True
            break

    if not converged:
        warnings.warn(
            f"logistic fit did not converge in {max_iter} iterations",
            ConvergenceWarning,
            stacklevel=2,
        )
        w = best_w
    if p.fit_intercept:
        return TrainedReadout(w[:-1], w[-1], "logistic", converged, it)
    return TrainedReadout(w, 0.0, "logistic", converged, it)


def fit(model: ModelSpec, X, y) -> TrainedReadout:
    if model.kind == "logistic":
        return fit_logistic(X, y, model.params)
    if model.kind == "linear":
        return fit_ridge(X, y, RidgeParams(0.0, model.params.fit_intercept))
    return fit_ridge(X, y, model.params)


def predict(readout: TrainedReadout, X) -> np.ndarray:
    """Linear output ``X @ w + b``; probabilities for logistic readouts."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    z = X @ readout.weights + readout.intercept
    if readout.model_kind == "logistic":
        return expit(z)
    return z


def predict_labels(readout: TrainedReadout, X) -> np.ndarray:
    return (predict(readout, X) >= 0.5).astype(float)


def error(pred, truth, kind: str = "MSE") -> float:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {truth.shape}")
    resid = pred - truth
    if kind == "MSE":
        return float(np.mean(resid**2))
    if kind == "MAE":
        return float(np.mean(np.abs(resid)))
    raise InvalidParams("error_type", f"must be one of {ERROR_TYPES}")
