"""The untrusted aggregator's side: gradient inversion and recovery scoring.

For all three model families the per-record gradient has the shape
(scale * x1, ..., scale * x4, scale), so dividing the feature partials by
the bias partial returns the raw features whenever the scale is nonzero.
The label falls out too: linear regression exposes it through the residual,
the classifiers through the sign of the bias partial.

Recovery quality is scored per user as e^(-k * L1(x, x_recovered)) in
[0, 1]: 1 means exact recovery, and the score decays toward 0 as the
reconstruction drifts.  With the default k = 0.5, scores below
e^-1 ~ 0.368 mark reconstructions too far off to count as a good guess.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .engine import Session
from .errors import NotTrainedError
from .models import FEATURE_DIM, ModelKind, predict_raw

DEFAULT_SHARPNESS = 0.5

# Bias partials smaller than this carry no usable signal (e.g. an SVM
# record outside the hinge margin submits an all-zero gradient).
BIAS_SIGNAL_FLOOR = 1e-12


@dataclass(frozen=True)
class RecoveredRecord:
    features: tuple[float, float, float, float] | None
    label: float | None
    recovered: bool

    def to_dict(self) -> dict:
        return {
            "features": None if self.features is None else list(self.features),
            "label": self.label,
            "recovered": self.recovered,
        }


@dataclass(frozen=True)
class RecoveryResult:
    user_id: int
    recovered: RecoveredRecord
    exp_hamming: float

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "recovered": self.recovered.to_dict(),
            "exp_hamming": self.exp_hamming,
        }


@dataclass(frozen=True)
class RecoveryReport:
    per_user: list[RecoveryResult]
    average_exp_hamming: float

    def to_dict(self) -> dict:
        return {
            "per_user": [r.to_dict() for r in self.per_user],
            "average_exp_hamming": self.average_exp_hamming,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def invert_gradient(kind: ModelKind, w: np.ndarray, g: np.ndarray) -> RecoveredRecord:
    """Reconstruct a training record from one submitted gradient.

    w must be the weights that were in force when g was submitted.  The
    recovered features are clamped to the known data domain [-1, 1], which
    keeps a single wild component ratio from blowing up the L1 distance.
    """
    g = np.asarray(g, dtype=float)
    g_bias = float(g[FEATURE_DIM])
    if abs(g_bias) < BIAS_SIGNAL_FLOOR:
        return RecoveredRecord(features=None, label=None, recovered=False)
    feats = tuple(min(1.0, max(-1.0, float(v) / g_bias)) for v in g[:FEATURE_DIM])
    if kind is ModelKind.LINEAR:
        # residual = raw - y, and the bias partial equals the residual
        label = predict_raw(w, feats) - g_bias
    else:
        # bias partial is -y * positive_factor, so its sign encodes -y
        label = -1.0 if g_bias > 0 else 1.0
    return RecoveredRecord(features=feats, label=label, recovered=True)


def exp_hamming(x, x_r, k: float = DEFAULT_SHARPNESS) -> float:
    """Recovery score e^(-k * sum_i |x_i - x_ri|), in (0, 1] for finite input."""
    if not (k > 0):
        raise ValueError(f"sharpness k must be positive, got {k!r}")
    distance = sum(abs(float(a) - float(b)) for a, b in zip(x, x_r))
    return math.exp(-k * distance)


def recover_session(session: Session, k: float = DEFAULT_SHARPNESS) -> RecoveryReport:
    """Attack every submission of the session's most recent epoch.

    Failed inversions score 0 and still count toward the average, matching
    the metric's no-information-gained limit.
    """
    if not (k > 0):
        raise ValueError(f"sharpness k must be positive, got {k!r}")
    if not session.last_epoch_log:
        raise NotTrainedError("no training epoch has run yet; nothing to recover")
    results: list[RecoveryResult] = []
    for entry in session.last_epoch_log:
        rec = invert_gradient(
            session.config.model, entry.weights_at_submission, entry.reported_gradient
        )
        if rec.recovered:
            truth = session.users[entry.user_id].features
            score = exp_hamming(truth, rec.features, k)
        else:
            score = 0.0
        results.append(RecoveryResult(entry.user_id, rec, score))
    average = sum(r.exp_hamming for r in results) / len(results)
    return RecoveryReport(per_user=results, average_exp_hamming=average)
