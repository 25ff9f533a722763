"""Federated-learning simulator with local differential privacy.

Users compute per-record gradients locally and submit them to an untrusted
aggregator running sequential SGD.  Without perturbation the aggregator can
invert each submission back into the user's training record; the four LDP
mechanisms here defeat that, at a measurable cost to model quality.
"""

from .engine import Session, SessionConfig, SubmissionLogEntry, TrainEvent
from .errors import (
    BudgetError,
    ConfigError,
    EmptyDatasetError,
    LdpFedError,
    ModelKindError,
    NotTrainedError,
)
from .mechanisms import (
    EPS_STAR,
    GRADIENT_DIM,
    MechanismKind,
    duchi_magnitude,
    duchi_max_privacy_ratio,
    duchi_output_probabilities,
    duchi_perturb,
    hybrid_perturb,
    laplace_perturb,
    perturb_batch,
    perturb_gradient,
    perturb_scalar,
    piecewise_bounds,
    piecewise_perturb,
)
from .models import (
    FEATURE_DIM,
    IDEAL_WEIGHTS,
    ModelKind,
    TrainingRecord,
    dataset_accuracy,
    dataset_cost,
    generate_label,
    gradient,
    loss,
    predict_raw,
)
from .recovery import (
    DEFAULT_SHARPNESS,
    RecoveredRecord,
    RecoveryReport,
    RecoveryResult,
    exp_hamming,
    invert_gradient,
    recover_session,
)
from .reports import ExperimentReport, SweepRow, run_experiment, run_sweep
from .rng import SplitMix64, rng_next

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ConfigError",
    "DEFAULT_SHARPNESS",
    "EPS_STAR",
    "EmptyDatasetError",
    "ExperimentReport",
    "FEATURE_DIM",
    "GRADIENT_DIM",
    "IDEAL_WEIGHTS",
    "LdpFedError",
    "MechanismKind",
    "ModelKind",
    "ModelKindError",
    "NotTrainedError",
    "RecoveredRecord",
    "RecoveryReport",
    "RecoveryResult",
    "Session",
    "SessionConfig",
    "SplitMix64",
    "SubmissionLogEntry",
    "SweepRow",
    "TrainEvent",
    "TrainingRecord",
    "dataset_accuracy",
    "dataset_cost",
    "duchi_magnitude",
    "duchi_max_privacy_ratio",
    "duchi_output_probabilities",
    "duchi_perturb",
    "exp_hamming",
    "generate_label",
    "gradient",
    "hybrid_perturb",
    "invert_gradient",
    "laplace_perturb",
    "loss",
    "perturb_batch",
    "perturb_gradient",
    "perturb_scalar",
    "piecewise_bounds",
    "piecewise_perturb",
    "predict_raw",
    "recover_session",
    "rng_next",
    "run_experiment",
    "run_sweep",
]
