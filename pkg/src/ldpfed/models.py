"""Per-record prediction, loss and gradients for the three model families.

Weights are 5-vectors laid out as (w1, w2, w3, w4, bias); gradients use the
same layout, with the bias partial last.  Losses are the standard forms:
half squared error for linear regression, log-loss over {-1, +1} labels for
logistic regression, and unregularized hinge loss for the SVM.

Synthetic labels come from a fixed generating rule: the raw linear score of
the features under IDEAL_WEIGHTS, thresholded at zero for the classifiers.
A model that learns IDEAL_WEIGHTS therefore fits the generated data exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDatasetError, ModelKindError

# Weights of the generating rule behind every synthetic training record:
# four feature coefficients and the intercept.
IDEAL_WEIGHTS = np.array([-0.55, -0.82, 0.07, 0.95, 0.31])

FEATURE_DIM = 4


class ModelKind(str, enum.Enum):
    LINEAR = "linear"
    LOGISTIC = "logistic"
    SVM = "svm"

    @property
    def is_classifier(self) -> bool:
        return self is not ModelKind.LINEAR


@dataclass(frozen=True)
class TrainingRecord:
    """One user's private datum: 4 features in [-1, 1] plus a label."""

    features: tuple[float, float, float, float]
    label: float


def predict_raw(w: np.ndarray, x) -> float:
    """Raw linear score w1*x1 + ... + w4*x4 + bias."""
    return float(np.dot(w[:FEATURE_DIM], x) + w[FEATURE_DIM])


def generate_label(kind: ModelKind, x) -> float:
    """Label a feature vector with the fixed generating rule.

    Regression keeps the raw score; classifiers get +1 on a strictly
    positive score and -1 otherwise.
    """
    d = predict_raw(IDEAL_WEIGHTS, x)
    if kind is ModelKind.LINEAR:
        return d
    return 1.0 if d > 0 else -1.0


def _stable_sigmoid(z: float) -> float:
    # 1 / (1 + e^z) without overflow for large |z|
    if z >= 0:
        ez = math.exp(-z)
        return ez / (1.0 + ez)
    return 1.0 / (1.0 + math.exp(z))


def gradient(kind: ModelKind, w: np.ndarray, rec: TrainingRecord) -> np.ndarray:
    """Per-record loss gradient, ordered (d/dw1..d/dw4, d/dbias).

    All three families share the shape scale * (x1, x2, x3, x4, 1):
    the residual for linear regression, -y * sigma(-y * raw) for logistic
    regression, and -y inside the hinge margin (zero outside) for the SVM.
    """
    x = rec.features
    y = rec.label
    raw = predict_raw(w, x)
    if kind is ModelKind.LINEAR:
        scale = raw - y
    elif kind is ModelKind.LOGISTIC:
        scale = -y * _stable_sigmoid(y * raw)
    else:
        if y * raw < 1.0:
            scale = -y
        else:
            return np.zeros(FEATURE_DIM + 1)
    return scale * np.array([x[0], x[1], x[2], x[3], 1.0])


def loss(kind: ModelKind, w: np.ndarray, rec: TrainingRecord) -> float:
    """Per-record loss matching the gradient formulas above."""
    raw = predict_raw(w, rec.features)
    y = rec.label
    if kind is ModelKind.LINEAR:
        return 0.5 * (raw - y) ** 2
    if kind is ModelKind.LOGISTIC:
        # ln(1 + e^(-y*raw)), computed overflow-free
        m = -y * raw
        return m + math.log1p(math.exp(-m)) if m > 0 else math.log1p(math.exp(m))
    return max(0.0, 1.0 - y * raw)


def features_matrix(records) -> tuple[np.ndarray, np.ndarray]:
    """Stack records into an (n, 4) feature matrix and an (n,) label vector."""
    x = np.array([r.features for r in records], dtype=float).reshape(-1, FEATURE_DIM)
    y = np.array([r.label for r in records], dtype=float)
    return x, y


def cost_from_arrays(kind: ModelKind, w: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Mean per-record loss, vectorized over a prepared feature matrix."""
    if len(y) == 0:
        raise EmptyDatasetError("cost is undefined for an empty dataset")
    raw = x @ w[:FEATURE_DIM] + w[FEATURE_DIM]
    if kind is ModelKind.LINEAR:
        return float(np.mean(0.5 * (raw - y) ** 2))
    if kind is ModelKind.LOGISTIC:
        return float(np.mean(np.logaddexp(0.0, -y * raw)))
    return float(np.mean(np.maximum(0.0, 1.0 - y * raw)))


def accuracy_from_arrays(w: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Fraction of records whose score sign matches the label; sign(0) is +1."""
    if len(y) == 0:
        raise EmptyDatasetError("accuracy is undefined for an empty dataset")
    raw = x @ w[:FEATURE_DIM] + w[FEATURE_DIM]
    predicted = np.where(raw >= 0.0, 1.0, -1.0)
    return float(np.mean(predicted == y))


def dataset_cost(kind: ModelKind, w: np.ndarray, records) -> float:
    """Arithmetic mean of the per-record loss over a dataset."""
    x, y = features_matrix(records)
    return cost_from_arrays(kind, w, x, y)


def dataset_accuracy(kind: ModelKind, w: np.ndarray, records) -> float:
    """Classification accuracy; undefined for linear regression."""
    if not kind.is_classifier:
        raise ModelKindError("accuracy is only defined for classifier models")
    x, y = features_matrix(records)
    return accuracy_from_arrays(w, x, y)
