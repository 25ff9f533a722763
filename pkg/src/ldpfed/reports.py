"""Headless experiment runs and their delimited/JSON renderings.

run_experiment is the one code path behind both the `simulate` command and
each row of a sweep, so identical parameters always produce identical
numbers no matter which surface asked for them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .engine import Session, SessionConfig
from .mechanisms import MechanismKind
from .models import ModelKind
from .recovery import DEFAULT_SHARPNESS, RecoveryReport, recover_session


@dataclass(frozen=True)
class EpochSummary:
    epoch: int
    cost: float
    accuracy: float | None
    average_exp_hamming: float


@dataclass(frozen=True)
class ExperimentReport:
    model: str
    mechanism: str
    epsilon: float | None
    users: int
    epochs: int
    seed: int
    learning_rate: float
    k: float
    final_cost: float
    final_accuracy: float | None
    average_exp_hamming: float
    epoch_summaries: list[EpochSummary]

    def to_dict(self) -> dict:
        return {
            "config": {
                "model": self.model,
                "mechanism": self.mechanism,
                "epsilon": self.epsilon,
                "users": self.users,
                "epochs": self.epochs,
                "seed": self.seed,
                "learning_rate": self.learning_rate,
                "k": self.k,
            },
            "final_cost": self.final_cost,
            "final_accuracy": self.final_accuracy,
            "average_exp_hamming": self.average_exp_hamming,
            "epochs_summary": [
                {
                    "epoch": s.epoch,
                    "cost": s.cost,
                    "accuracy": s.accuracy,
                    "average_exp_hamming": s.average_exp_hamming,
                }
                for s in self.epoch_summaries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        """One row per epoch; run-level fields are echoed on every row so
        each row is self-describing and rows from different runs can be
        concatenated."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "model",
                "mechanism",
                "epsilon",
                "users",
                "epochs",
                "seed",
                "learning_rate",
                "k",
                "epoch",
                "cost",
                "accuracy",
                "average_exp_hamming",
            ]
        )
        for s in self.epoch_summaries:
            writer.writerow(
                [
                    self.model,
                    self.mechanism,
                    _cell(self.epsilon),
                    self.users,
                    self.epochs,
                    self.seed,
                    self.learning_rate,
                    self.k,
                    s.epoch,
                    s.cost,
                    _cell(s.accuracy),
                    s.average_exp_hamming,
                ]
            )
        return buf.getvalue()


def _cell(value: float | None):
    # empty cell for absent values; str(float) round-trips exactly in py3
    return "" if value is None else value


def run_experiment(
    model: ModelKind,
    mechanism: MechanismKind,
    epsilon: float | None,
    users: int,
    epochs: int,
    seed: int,
    k: float = DEFAULT_SHARPNESS,
    learning_rate: float = 0.01,
) -> tuple[ExperimentReport, RecoveryReport]:
    """Run the canonical experiment: fresh session, one user batch, a fixed
    number of epochs, with the recovery attack replayed on every epoch's log."""
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    config = SessionConfig(
        model=model,
        mechanism=mechanism,
        epsilon=epsilon,
        seed=seed,
        learning_rate=learning_rate,
    )
    session = Session(config)
    session.add_users(users)
    summaries: list[EpochSummary] = []
    recovery: RecoveryReport | None = None
    for epoch in range(1, epochs + 1):
        events = session.train_epoch()
        last = events[-1]
        # the submission log now holds exactly this epoch's traffic, so the
        # attack here measures what an eavesdropper would get per round
        recovery = recover_session(session, k)
        summaries.append(
            EpochSummary(
                epoch,
                last.cost_after_update,
                last.accuracy_after_update,
                recovery.average_exp_hamming,
            )
        )
    assert recovery is not None
    final_cost, final_accuracy = session.metrics()
    report = ExperimentReport(
        model=model.value,
        mechanism=mechanism.value,
        epsilon=epsilon,
        users=users,
        epochs=epochs,
        seed=seed,
        learning_rate=learning_rate,
        k=k,
        final_cost=final_cost,
        final_accuracy=final_accuracy,
        average_exp_hamming=recovery.average_exp_hamming,
        epoch_summaries=summaries,
    )
    return report, recovery


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    seed: int
    final_cost: float
    final_accuracy: float | None
    avg_exp_hamming: float


SWEEP_COLUMNS = ["epsilon", "seed", "final_cost", "final_accuracy", "avg_exp_hamming"]


def run_sweep(
    model: ModelKind,
    mechanism: MechanismKind,
    epsilons: list[float],
    seeds: int,
    users: int,
    epochs: int,
    k: float = DEFAULT_SHARPNESS,
    learning_rate: float = 0.01,
) -> list[SweepRow]:
    """One experiment per (epsilon, seed) pair; seeds run 0..seeds-1."""
    rows: list[SweepRow] = []
    for epsilon in epsilons:
        for seed in range(seeds):
            report, _ = run_experiment(
                model, mechanism, epsilon, users, epochs, seed, k, learning_rate
            )
            rows.append(
                SweepRow(
                    epsilon=epsilon,
                    seed=seed,
                    final_cost=report.final_cost,
                    final_accuracy=report.final_accuracy,
                    avg_exp_hamming=report.average_exp_hamming,
                )
            )
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.epsilon,
                row.seed,
                row.final_cost,
                _cell(row.final_accuracy),
                row.avg_exp_hamming,
            ]
        )
    return buf.getvalue()
