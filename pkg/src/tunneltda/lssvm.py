"""Least-squares SVM trained by solving its KKT optimality system directly.

Training reduces to one dense (m+1) x (m+1) linear solve: the bordered system

    [ 0   1^T          ] [ b ]   [ 0 ]
    [ 1   K + I/gamma  ] [ c ] = [ y ]

where K is the kernel Gram matrix. For regression the stored coefficients c
are the Lagrange multipliers themselves; for classification they absorb the
labels (c_i = alpha_i * y_i), so in both cases the bias row enforces the
optimality condition that the multipliers weighted by their labels sum to
zero, and prediction is sum_i c_i k(x_i, x) + b.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningWarning, InputError, NumericalError

CONDITION_WARN_THRESHOLD = 1e12
KKT_RESIDUAL_TOL = 1e-8  # relative to the right-hand side


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice: 'linear' dot product or 'rbf' with width sigma."""

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise InputError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and not (self.sigma is not None and self.sigma > 0):
            raise InputError("rbf kernel needs sigma > 0")


@dataclass(frozen=True)
class TrainingSet:
    inputs: np.ndarray   # (m, d)
    targets: np.ndarray  # (m,)

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        targets = np.asarray(self.targets, dtype=float).ravel()
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        if inputs.ndim != 2 or inputs.shape[0] != targets.shape[0]:
            raise InputError(
                f"inputs {inputs.shape} and targets {targets.shape} do not align"
            )
        if inputs.shape[0] < 2:
            raise InputError("need at least 2 training samples")
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(targets))):
            raise InputError("training data must be finite")

    @property
    def m(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class LssvmModel:
    """Trained model: support coefficients, bias, and the data they refer to."""

    alphas: np.ndarray
    bias: float
    gamma: float
    kernel: KernelSpec
    inputs: np.ndarray
    classification: bool = False

    @property
    def slacks(self) -> np.ndarray:
        # Optimality ties each multiplier to its slack: alpha_i = gamma * e_i.
        return self.alphas / self.gamma


def gram_matrix(kernel: KernelSpec, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Kernel matrix k(x_i, z_j); symmetric PSD when X is Z."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if kernel.kind == "linear":
        return X @ Z.T
    sq = ((X[:, None, :] - Z[None, :, :]) ** 2).sum(axis=-1)
    return np.exp(-sq / (2.0 * kernel.sigma ** 2))


def _kkt_system(ts: TrainingSet, gamma: float, kernel: KernelSpec):
    m = ts.m
    K = gram_matrix(kernel, ts.inputs, ts.inputs)
    A = np.zeros((m + 1, m + 1))
    A[0, 1:] = 1.0
    A[1:, 0] = 1.0
    A[1:, 1:] = K + np.eye(m) / gamma
    rhs = np.concatenate(([0.0], ts.targets))
    return A, rhs


def _solve(ts: TrainingSet, gamma: float, kernel: KernelSpec) -> tuple[float, np.ndarray]:
    if not gamma > 0:
        raise InputError(f"gamma must be positive, got {gamma}")
    A, rhs = _kkt_system(ts, gamma, kernel)
    cond = np.linalg.cond(A)
    if cond > CONDITION_WARN_THRESHOLD:
        warnings.warn(
            f"KKT system condition number {cond:.3g} exceeds {CONDITION_WARN_THRESHOLD:.0e}; "
            "solution may be inaccurate (near-duplicate inputs or extreme gamma)",
            ConditioningWarning,
        )
    try:
        z = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"KKT system is singular: {exc}") from exc
    residual = np.abs(A @ z - rhs).max() / max(1.0, np.abs(rhs).max())
    if not np.isfinite(z).all() or residual > KKT_RESIDUAL_TOL:
        raise NumericalError(
            f"KKT solve failed: relative residual {residual:.3g} (condition {cond:.3g})"
        )
    return float(z[0]), z[1:]


def train_classifier(ts: TrainingSet, gamma: float, kernel: KernelSpec) -> LssvmModel:
    """Train on labels in {-1, +1}; callers take the sign of predict()."""
    if not np.all(np.isin(ts.targets, (-1.0, 1.0))):
        raise InputError("classifier targets must be -1 or +1")
    bias, coeffs = _solve(ts, gamma, kernel)
    return LssvmModel(coeffs, bias, float(gamma), kernel, ts.inputs, classification=True)


def train_regressor(ts: TrainingSet, gamma: float, kernel: KernelSpec) -> LssvmModel:
    """Train on real-valued targets; interpolates them as gamma grows."""
    bias, coeffs = _solve(ts, gamma, kernel)
    return LssvmModel(coeffs, bias, float(gamma), kernel, ts.inputs, classification=False)


def predict(model: LssvmModel, x: np.ndarray) -> float:
    """Decision value at one input vector."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != model.inputs.shape[1]:
        raise InputError(
            f"input has dimension {x.shape[0]}, model was trained on {model.inputs.shape[1]}"
        )
    return float(predict_batch(model, x[None, :])[0])


def predict_batch(model: LssvmModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.inputs.shape[1]:
        raise InputError(
            f"inputs have dimension {X.shape[1]}, model was trained on {model.inputs.shape[1]}"
        )
    return gram_matrix(model.kernel, X, model.inputs) @ model.alphas + model.bias


def kkt_residual(model: LssvmModel, ts: TrainingSet) -> float:
    """Max-norm residual of the optimality system at the model's coefficients."""
    A, rhs = _kkt_system(ts, model.gamma, model.kernel)
    z = np.concatenate(([model.bias], model.alphas))
    return float(np.abs(A @ z - rhs).max())


def loo_squared_errors(ts: TrainingSet, gamma: float, kernel: KernelSpec) -> np.ndarray:
    """Leave-one-out squared prediction errors, one per training sample."""
    errs = np.empty(ts.m)
    index = np.arange(ts.m)
    for i in range(ts.m):
        mask = index != i
        sub = TrainingSet(ts.inputs[mask], ts.targets[mask])
        model = train_regressor(sub, gamma, kernel)
        errs[i] = (predict(model, ts.inputs[i]) - ts.targets[i]) ** 2
    return errs


def select_hyperparameters(
    ts: TrainingSet,
    gamma_grid: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0),
    sigma_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0),
) -> tuple[float, KernelSpec, float]:
    """Grid search for the regressor: smallest mean LOO error wins.

    Ties keep the earlier grid entry, so the search is deterministic.
    Returns (gamma, kernel, loo_mse).
    """
    best = None
    for gamma in gamma_grid:
        for sigma in sigma_grid:
            kernel = KernelSpec("rbf", sigma)
            mse = float(loo_squared_errors(ts, gamma, kernel).mean())
            if best is None or mse < best[2]:
                best = (gamma, kernel, mse)
    return best
