"""Session lifecycle: seeding, user generation, SGD epochs, snapshots."""

import json

import numpy as np
import pytest

from ldpfed.engine import Session, SessionConfig
from ldpfed.errors import ConfigError, EmptyDatasetError
from ldpfed.mechanisms import MechanismKind
from ldpfed.models import IDEAL_WEIGHTS, ModelKind, gradient
from ldpfed.rng import SplitMix64


def make_config(**overrides):
    base = dict(
        model=ModelKind.LINEAR,
        mechanism=MechanismKind.NONE,
        epsilon=None,
        seed=42,
    )
    base.update(overrides)
    return SessionConfig(**base)


# --- config validation ---


def test_mechanism_without_budget_rejected():
    with pytest.raises(ConfigError):
        make_config(mechanism=MechanismKind.DUCHI)


def test_nonpositive_budget_rejected():
    for eps in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(ConfigError):
            make_config(mechanism=MechanismKind.LAPLACE, epsilon=eps)


def test_bad_learning_rate_rejected():
    with pytest.raises(ConfigError):
        make_config(learning_rate=0.0)
    with pytest.raises(ConfigError):
        make_config(learning_rate=-0.5)


def test_seed_range_enforced():
    with pytest.raises(ConfigError):
        make_config(seed=-1)
    with pytest.raises(ConfigError):
        make_config(seed=2**64)
    make_config(seed=2**64 - 1)  # top of the range is fine


def test_none_mechanism_needs_no_budget():
    cfg = make_config()
    assert cfg.epsilon is None


# --- session construction and user generation ---


def test_initial_weights_deterministic_and_bounded():
    a = Session(make_config())
    b = Session(make_config())
    assert np.array_equal(a.weights, b.weights)
    assert a.weights.shape == (5,)
    assert np.all(np.abs(a.weights) <= 1.0)
    assert a.epoch_count == 0
    assert a.users == []


def test_draw_order_weights_then_features():
    # the session must consume exactly 5 draws for weights and 4 per user
    session = Session(make_config(seed=7))
    replay = SplitMix64(7)
    expected_w = 2.0 * replay.next_units(5) - 1.0
    assert np.array_equal(session.weights, expected_w)
    assert session.rng.state == replay.state

    session.add_users(3)
    feats = (2.0 * replay.next_units(12) - 1.0).reshape(3, 4)
    for user, row in zip(session.users, feats):
        assert user.features == tuple(row)
    assert session.rng.state == replay.state


def test_add_users_counts_and_labels():
    session = Session(make_config(model=ModelKind.SVM, seed=3))
    session.add_users(10)
    assert len(session.users) == 10
    session.add_users(100)
    assert len(session.users) == 110
    assert all(u.label in (-1.0, 1.0) for u in session.users)


def test_add_users_rejects_nonpositive_count():
    session = Session(make_config())
    with pytest.raises(ValueError):
        session.add_users(0)
    with pytest.raises(ValueError):
        session.add_users(-5)


def test_add_users_is_deterministic():
    a = Session(make_config(seed=9))
    b = Session(make_config(seed=9))
    a.add_users(20)
    b.add_users(20)
    assert a.users == b.users


# --- training ---


def zero_weight_snapshot(users, model="linear"):
    """A session poised at all-zero weights over the given records."""
    return {
        "config": {
            "model": model,
            "mechanism": "none",
            "epsilon": None,
            "seed": 0,
            "learning_rate": 0.01,
        },
        "weights": [0.0, 0.0, 0.0, 0.0, 0.0],
        "users": users,
        "rng": "0",
        "epoch_count": 0,
        "last_epoch_log": [],
    }


def test_single_step_hand_computed():
    snapshot = zero_weight_snapshot(
        [{"features": [0.5, -0.5, 0.2, 0.1], "label": 1.0}]
    )
    session = Session.from_snapshot(snapshot)
    events = session.train_epoch()
    assert len(events) == 1
    entry = session.last_epoch_log[0]
    assert np.allclose(entry.reported_gradient, [-0.5, 0.5, -0.2, -0.1, -1.0])
    assert np.array_equal(entry.weights_at_submission, np.zeros(5))
    assert np.allclose(session.weights, [0.005, -0.005, 0.002, 0.001, 0.01])
    assert session.epoch_count == 1


def test_train_requires_users():
    with pytest.raises(EmptyDatasetError):
        Session(make_config()).train_epoch()


def test_one_event_and_log_entry_per_user():
    session = Session(make_config(seed=5))
    session.add_users(17)
    events = session.train_epoch()
    assert [e.user_id for e in events] == list(range(17))
    assert [e.user_id for e in session.last_epoch_log] == list(range(17))


def test_reported_gradient_is_true_gradient_without_ldp():
    session = Session(make_config(seed=6))
    session.add_users(8)
    session.train_epoch()
    for entry in session.last_epoch_log:
        expected = gradient(
            ModelKind.LINEAR,
            entry.weights_at_submission,
            session.users[entry.user_id],
        )
        assert np.array_equal(entry.reported_gradient, expected)


def test_weight_update_identity_across_log():
    session = Session(
        make_config(mechanism=MechanismKind.PIECEWISE, epsilon=2.0, seed=11)
    )
    session.add_users(12)
    session.train_epoch()
    log = session.last_epoch_log
    lr = session.config.learning_rate
    for prev, nxt in zip(log, log[1:]):
        stepped = prev.weights_at_submission - lr * prev.reported_gradient
        assert np.allclose(nxt.weights_at_submission, stepped, atol=1e-15)
    final = log[-1].weights_at_submission - lr * log[-1].reported_gradient
    assert np.allclose(session.weights, final, atol=1e-15)


def test_log_is_replaced_each_epoch():
    session = Session(make_config(seed=12))
    session.add_users(4)
    session.train_epoch()
    first = [entry.reported_gradient.copy() for entry in session.last_epoch_log]
    session.train_epoch()
    assert len(session.last_epoch_log) == 4
    assert session.epoch_count == 2
    changed = any(
        not np.array_equal(a, b.reported_gradient)
        for a, b in zip(first, session.last_epoch_log)
    )
    assert changed


def test_classifier_events_carry_accuracy():
    session = Session(make_config(model=ModelKind.LOGISTIC, seed=13))
    session.add_users(5)
    events = session.train_epoch()
    assert all(0.0 <= e.accuracy_after_update <= 1.0 for e in events)
    regression = Session(make_config(seed=13))
    regression.add_users(5)
    assert all(e.accuracy_after_update is None for e in regression.train_epoch())


def test_full_run_determinism():
    def run():
        s = Session(make_config(mechanism=MechanismKind.HYBRID, epsilon=4.0, seed=21))
        s.add_users(30)
        s.train_epoch()
        s.add_users(5)
        s.train_epoch()
        return s.to_json()

    assert run() == run()


def test_cost_non_increasing_on_noiseless_linear():
    session = Session(make_config(seed=42))
    session.add_users(100)
    finals = []
    for _ in range(50):
        events = session.train_epoch()
        finals.append(events[-1].cost_after_update)
    assert all(b <= a for a, b in zip(finals, finals[1:]))


def test_convergence_toward_generating_weights():
    session = Session(make_config(seed=42))
    session.add_users(100)
    for _ in range(500):
        session.train_epoch()
        if float(np.max(np.abs(session.weights - IDEAL_WEIGHTS))) < 0.05:
            break
    assert float(np.max(np.abs(session.weights - IDEAL_WEIGHTS))) < 0.05


def test_metrics_match_event_stream():
    session = Session(make_config(model=ModelKind.SVM, seed=14))
    session.add_users(9)
    events = session.train_epoch()
    cost, accuracy = session.metrics()
    assert cost == events[-1].cost_after_update
    assert accuracy == events[-1].accuracy_after_update


def test_metrics_require_users():
    with pytest.raises(EmptyDatasetError):
        Session(make_config()).metrics()


# --- snapshots ---


def test_snapshot_field_order_is_canonical():
    session = Session(make_config(seed=15))
    session.add_users(2)
    session.train_epoch()
    snapshot = session.to_snapshot()
    assert list(snapshot) == [
        "config",
        "weights",
        "users",
        "rng",
        "epoch_count",
        "last_epoch_log",
    ]
    assert isinstance(snapshot["rng"], str)  # 64-bit state survives JS doubles
    assert json.loads(session.to_json()) == snapshot


def test_snapshot_round_trip_exact():
    session = Session(
        make_config(model=ModelKind.LOGISTIC, mechanism=MechanismKind.LAPLACE,
                    epsilon=1.5, seed=16)
    )
    session.add_users(6)
    session.train_epoch()
    restored = Session.from_snapshot(session.to_snapshot())
    assert restored.to_snapshot() == session.to_snapshot()
    assert Session.from_json(session.to_json()).to_json() == session.to_json()


def test_restored_session_reproduces_the_event_log():
    original = Session(
        make_config(mechanism=MechanismKind.DUCHI, epsilon=2.0, seed=17)
    )
    original.add_users(10)
    frozen = original.to_snapshot()

    events = original.train_epoch()
    replayed = Session.from_snapshot(frozen).train_epoch()
    assert [e.to_dict() for e in replayed] == [e.to_dict() for e in events]


def test_restored_session_continues_identically():
    session = Session(
        make_config(mechanism=MechanismKind.PIECEWISE, epsilon=1.0, seed=18)
    )
    session.add_users(5)
    session.train_epoch()
    twin = Session.from_snapshot(session.to_snapshot())
    # both continue from the same point: more users, another epoch
    session.add_users(3)
    twin.add_users(3)
    a = session.train_epoch()
    b = twin.train_epoch()
    assert [e.to_dict() for e in a] == [e.to_dict() for e in b]
    assert session.to_json() == twin.to_json()
