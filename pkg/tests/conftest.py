"""Shared helpers for the test suite.

Tests draw their randomness from seeded SplitMix64 generators so every run
is reproducible; there is no use of the global random module anywhere.
"""

import numpy as np

from ldpfed.models import ModelKind, TrainingRecord, generate_label, gradient, loss
from ldpfed.rng import SplitMix64


def random_weights(rng: SplitMix64) -> np.ndarray:
    return 2.0 * rng.next_units(5) - 1.0


def random_record(rng: SplitMix64, kind: ModelKind) -> TrainingRecord:
    feats = tuple(float(v) for v in 2.0 * rng.next_units(4) - 1.0)
    return TrainingRecord(feats, generate_label(kind, feats))


def finite_difference_max_error(
    kind: ModelKind,
    points: int,
    seed: int,
    step: float = 1e-6,
    svm_kink_margin: float = 1e-3,
) -> float:
    """Worst |analytic - central difference| over `points` random (w, record)
    pairs, all 5 weight components each.  SVM pairs too close to the hinge
    kink are skipped (the loss is not differentiable there) and redrawn.
    """
    rng = SplitMix64(seed)
    worst = 0.0
    checked = 0
    while checked < points:
        w = random_weights(rng)
        rec = random_record(rng, kind)
        if kind is ModelKind.SVM:
            raw = float(np.dot(w[:4], rec.features) + w[4])
            if abs(1.0 - rec.label * raw) < svm_kink_margin:
                continue
        g = gradient(kind, w, rec)
        for i in range(5):
            bump = np.zeros(5)
            bump[i] = step
            numeric = (loss(kind, w + bump, rec) - loss(kind, w - bump, rec)) / (
                2.0 * step
            )
            worst = max(worst, abs(numeric - float(g[i])))
        checked += 1
    return worst
