"""Deterministic federated-training sessions.

A Session owns all mutable state of one simulated deployment: the model
weights, the user records, the PRNG, and the submission log of the most
recent epoch.  Every random draw flows through the session's SplitMix64 in
a fixed order (5 weight draws at creation, then 4 draws per generated user,
then the per-mechanism draws during training), so a (config, action
sequence) pair always reproduces the same session bit for bit.

Training is sequential single-record SGD: each user in insertion order
computes the gradient at the current weights, submits it (perturbed when a
mechanism is configured), and the aggregator applies the update before the
next user submits.  The submission log keeps exactly what the aggregator
saw: the weights in force and the reported gradient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyDatasetError
from .mechanisms import MechanismKind, perturb_gradient
from .models import (
    FEATURE_DIM,
    ModelKind,
    TrainingRecord,
    accuracy_from_arrays,
    cost_from_arrays,
    features_matrix,
    generate_label,
    gradient,
)
from .rng import MASK64, SplitMix64

DEFAULT_LEARNING_RATE = 0.01


@dataclass(frozen=True)
class SessionConfig:
    model: ModelKind
    mechanism: MechanismKind
    epsilon: float | None
    seed: int
    learning_rate: float = DEFAULT_LEARNING_RATE

    def __post_init__(self):
        if self.mechanism is not MechanismKind.NONE and self.epsilon is None:
            raise ConfigError(
                f"mechanism {self.mechanism.value!r} requires a privacy budget"
            )
        if self.epsilon is not None and (
            not math.isfinite(self.epsilon) or self.epsilon <= 0
        ):
            raise ConfigError(f"epsilon must be a positive finite real, got {self.epsilon!r}")
        if not (0 <= self.seed <= MASK64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate!r}")

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "mechanism": self.mechanism.value,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "learning_rate": self.learning_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        try:
            model = ModelKind(d["model"])
            mechanism = MechanismKind(d["mechanism"])
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad model or mechanism: {exc}") from exc
        epsilon = d.get("epsilon")
        return cls(
            model=model,
            mechanism=mechanism,
            epsilon=None if epsilon is None else float(epsilon),
            seed=int(d["seed"]),
            learning_rate=float(d.get("learning_rate", DEFAULT_LEARNING_RATE)),
        )


@dataclass(frozen=True)
class SubmissionLogEntry:
    """What the aggregator observed for one user: the weights in force at
    submission time and the gradient actually transmitted."""

    user_id: int
    weights_at_submission: np.ndarray
    reported_gradient: np.ndarray

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "weights_at_submission": [float(v) for v in self.weights_at_submission],
            "reported_gradient": [float(v) for v in self.reported_gradient],
        }


@dataclass(frozen=True)
class TrainEvent:
    """Post-update dataset metrics emitted after one user's submission."""

    user_id: int
    cost_after_update: float
    accuracy_after_update: float | None

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "cost_after_update": self.cost_after_update,
            "accuracy_after_update": self.accuracy_after_update,
        }


class Session:
    """Mutable simulation state; single-owner, see module docstring."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.rng = SplitMix64(config.seed)
        # Initial weights: 5 consecutive draws mapped onto [-1, 1],
        # in layout order (w1..w4, bias).
        self.weights = 2.0 * self.rng.next_units(5) - 1.0
        self.users: list[TrainingRecord] = []
        self.epoch_count = 0
        self.last_epoch_log: list[SubmissionLogEntry] = []
        # Cached feature matrix / label vector for vectorized metrics.
        self._x = np.empty((0, FEATURE_DIM))
        self._y = np.empty(0)

    def add_users(self, n: int) -> None:
        """Generate n synthetic users, 4 uniform feature draws each."""
        if n < 1:
            raise ValueError(f"user count must be a positive integer, got {n!r}")
        feats = (2.0 * self.rng.next_units(4 * n) - 1.0).reshape(n, FEATURE_DIM)
        for row in feats:
            features = (float(row[0]), float(row[1]), float(row[2]), float(row[3]))
            label = generate_label(self.config.model, features)
            self.users.append(TrainingRecord(features, label))
        self._x = np.vstack([self._x, feats])
        self._y = np.concatenate([self._y, [u.label for u in self.users[-n:]]])

    def train_epoch(self) -> list[TrainEvent]:
        """Run one epoch of sequential SGD; returns one event per user.

        Replaces the submission log and bumps the epoch counter.  The cost
        (and accuracy, for classifiers) in each event is computed over the
        whole dataset under the freshly updated weights.
        """
        if not self.users:
            raise EmptyDatasetError("cannot train a session with no users")
        cfg = self.config
        is_classifier = cfg.model.is_classifier
        w = self.weights
        log: list[SubmissionLogEntry] = []
        events: list[TrainEvent] = []
        for user_id, rec in enumerate(self.users):
            g_true = gradient(cfg.model, w, rec)
            g_sent = perturb_gradient(g_true, cfg.epsilon, cfg.mechanism, self.rng)
            log.append(SubmissionLogEntry(user_id, w.copy(), g_sent))
            w = w - cfg.learning_rate * g_sent
            cost = cost_from_arrays(cfg.model, w, self._x, self._y)
            acc = accuracy_from_arrays(w, self._x, self._y) if is_classifier else None
            events.append(TrainEvent(user_id, cost, acc))
        self.weights = w
        self.last_epoch_log = log
        self.epoch_count += 1
        return events

    def metrics(self) -> tuple[float, float | None]:
        """Dataset cost and, for classifiers, accuracy under current weights."""
        if not self.users:
            raise EmptyDatasetError("session has no users")
        cost = cost_from_arrays(self.config.model, self.weights, self._x, self._y)
        acc = (
            accuracy_from_arrays(self.weights, self._x, self._y)
            if self.config.model.is_classifier
            else None
        )
        return cost, acc

    def to_snapshot(self) -> dict:
        """Canonical JSON-ready document; field order is part of the contract.

        The rng state is rendered as a decimal string because it spans the
        full 64-bit range, which JSON consumers with double-precision
        numbers would silently truncate.
        """
        return {
            "config": self.config.to_dict(),
            "weights": [float(v) for v in self.weights],
            "users": [
                {"features": list(u.features), "label": u.label} for u in self.users
            ],
            "rng": str(self.rng.state),
            "epoch_count": self.epoch_count,
            "last_epoch_log": [entry.to_dict() for entry in self.last_epoch_log],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_snapshot())

    @classmethod
    def from_snapshot(cls, snapshot: dict) -> "Session":
        """Rebuild a session, including its PRNG position, from a snapshot."""
        session = cls.__new__(cls)
        session.config = SessionConfig.from_dict(snapshot["config"])
        session.weights = np.array(snapshot["weights"], dtype=float)
        session.users = [
            TrainingRecord(tuple(float(v) for v in u["features"]), float(u["label"]))
            for u in snapshot["users"]
        ]
        session.rng = SplitMix64(int(snapshot["rng"]))
        session.epoch_count = int(snapshot["epoch_count"])
        session.last_epoch_log = [
            SubmissionLogEntry(
                user_id=int(e["user_id"]),
                weights_at_submission=np.array(e["weights_at_submission"], dtype=float),
                reported_gradient=np.array(e["reported_gradient"], dtype=float),
            )
            for e in snapshot["last_epoch_log"]
        ]
        if session.users:
            session._x, session._y = features_matrix(session.users)
        else:
            session._x = np.empty((0, FEATURE_DIM))
            session._y = np.empty(0)
        return session

    @classmethod
    def from_json(cls, text: str) -> "Session":
        return cls.from_snapshot(json.loads(text))
