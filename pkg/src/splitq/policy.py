"""Softmax question policy over attribute predicates.

Features are computed from public information only: the object list and
the dialogue history. The policy maintains its own belief (the consistent
set implied by the history) and never sees the target or the trainer's
candidate tracker; that asymmetry is enforced by DialogueState carrying
neither.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .world import Answer, GameInstance, Question, ValidationError, WorldView

FEATURE_NAMES = (
    "f_balance",
    "f_repeat",
    "f_yes_frac",
    "f_bias_q",
    "f_stop_bias",
    "f_singleton",
)

GREEDY = "greedy"
SAMPLE = "sample"

CHECKPOINT_FORMAT_VERSION = 1


class _StopAction:
    """Singleton marker for ending the dialogue."""

    __slots__ = ()

    def __repr__(self):
        return "STOP"


STOP = _StopAction()


@dataclass(frozen=True)
class PolicyParams:
    """One weight per feature plus a softmax temperature."""

    theta: tuple[float, ...]
    temperature: float = 1.0
    stop_enabled: bool = True
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if len(self.theta) != len(self.feature_names):
            raise ValidationError(
                f"theta has {len(self.theta)} weights for {len(self.feature_names)} features"
            )
        if not self.temperature > 0:
            raise ValidationError(f"temperature must be > 0, got {self.temperature}")


def initial_params(temperature: float = 1.0, stop_enabled: bool = True) -> PolicyParams:
    """Uniform policy: all weights zero."""
    return PolicyParams(theta=(0.0,) * len(FEATURE_NAMES), temperature=temperature, stop_enabled=stop_enabled)


@dataclass(frozen=True)
class DialogueState:
    """What the questioner is allowed to see: objects and history, no target."""

    view: WorldView
    history: tuple[tuple[Question, Answer], ...] = ()

    @property
    def round_index(self) -> int:
        return len(self.history)


def dialogue_state(game: GameInstance, history=()) -> DialogueState:
    """Public state for a game; drops the target by construction."""
    return DialogueState(game.view, tuple(history))


@dataclass(frozen=True)
class ActionChoice:
    action: Question | _StopAction
    log_prob: float
    score_gradient: tuple[float, ...]


def _belief(state: DialogueState) -> tuple[np.ndarray, np.ndarray]:
    """(object mask of the consistent set, asked-question mask)."""
    view = state.view
    codes = view.answer_codes
    mask = np.ones(len(view.objects), dtype=bool)
    asked = np.zeros(codes.shape[1], dtype=bool)
    for question, ans in state.history:
        col = view.question_index[question]
        mask &= codes[:, col] == int(ans)
        asked[col] = True
    return mask, asked


def consistent_set(state: DialogueState) -> tuple[int, ...]:
    """Objects whose truthful answers match every history entry.

    May be empty when noisy answers contradict each other; consumers fall
    back to the full object set in that case.
    """
    mask, _ = _belief(state)
    return tuple(int(i) for i in np.flatnonzero(mask))


def _feature_table(state: DialogueState, with_stop: bool) -> np.ndarray:
    """Feature rows for every question in enumeration order, then STOP.

    Question features come from the belief set S (consistent set, falling
    back to all objects when noisy answers contradict each other): the
    YES fraction p of S, the split balance 1 - |2p - 1|, and a repeat flag.
    """
    view = state.view
    mask, asked = _belief(state)
    m = int(mask.sum())
    if m == 0:
        mask = np.ones(len(view.objects), dtype=bool)
        m = len(view.objects)
    n_q = len(view.questions)
    yes_frac = view.is_yes[mask].sum(axis=0) / m
    feats = np.zeros((n_q + 1 if with_stop else n_q, len(FEATURE_NAMES)))
    feats[:n_q, 0] = 1.0 - np.abs(2.0 * yes_frac - 1.0)
    feats[:n_q, 1] = asked
    feats[:n_q, 2] = yes_frac
    feats[:n_q, 3] = 1.0
    if with_stop:
        feats[n_q, 4] = 1.0
        feats[n_q, 5] = 1.0 if m == 1 else 0.0
    return feats


def _action_table(params: PolicyParams, state: DialogueState):
    """(features, probabilities, stop available) for the current state.

    STOP joins the action space from the second round on, when enabled.
    """
    include_stop = params.stop_enabled and state.round_index >= 1
    feats = _feature_table(state, with_stop=include_stop)
    logits = feats @ np.asarray(params.theta) / params.temperature
    logits -= logits.max()
    probs = np.exp(logits)
    probs /= probs.sum()
    return feats, probs, include_stop


def features(state: DialogueState, action: Question | _StopAction) -> np.ndarray:
    """Feature vector for one action in the current state."""
    feats = _feature_table(state, with_stop=True)
    if action is STOP:
        return feats[-1].copy()
    try:
        col = state.view.question_index[action]
    except KeyError:
        raise ValidationError(f"action {action!r} not in the question space") from None
    return feats[col].copy()


def action_distribution(params: PolicyParams, state: DialogueState) -> dict:
    """Softmax probabilities over all available actions."""
    _, probs, include_stop = _action_table(params, state)
    actions: list = list(state.view.questions)
    if include_stop:
        actions.append(STOP)
    return dict(zip(actions, (float(p) for p in probs)))


def select_action(
    params: PolicyParams,
    state: DialogueState,
    mode: str = SAMPLE,
    rng: np.random.Generator | None = None,
) -> ActionChoice:
    """Pick an action greedily or by sampling; returns log-prob and score gradient.

    Greedy ties break toward the earlier action in enumeration order. The
    score gradient is (phi(a) - sum_a' pi(a') phi(a')) / temperature.
    """
    feats, probs, include_stop = _action_table(params, state)
    if mode == GREEDY:
        idx = int(np.argmax(probs))
    elif mode == SAMPLE:
        if rng is None:
            raise ValueError("rng is required for sampling")
        u = rng.random()
        idx = min(int(np.searchsorted(np.cumsum(probs), u, side="right")), len(probs) - 1)
    else:
        raise ValidationError(f"unknown selection mode {mode!r}")
    n_q = len(state.view.questions)
    action = STOP if (include_stop and idx == n_q) else state.view.questions[idx]
    gradient = (feats[idx] - probs @ feats) / params.temperature
    return ActionChoice(
        action=action,
        log_prob=float(np.log(probs[idx])),
        score_gradient=tuple(float(g) for g in gradient),
    )


# --- checkpoints --------------------------------------------------------------


def checkpoint_dict(
    params: PolicyParams,
    training_config_digest: str = "",
    rng_seed: int = 0,
    epoch: int = 0,
) -> dict:
    return {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "feature_names": list(params.feature_names),
        "theta": list(params.theta),
        "temperature": params.temperature,
        "stop_enabled": params.stop_enabled,
        "training_config_digest": training_config_digest,
        "rng_seed": rng_seed,
        "epoch": epoch,
    }


def save_checkpoint(path, params: PolicyParams, **meta) -> None:
    doc = checkpoint_dict(params, **meta)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def params_from_checkpoint(doc: dict) -> tuple[PolicyParams, dict]:
    version = doc.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ValidationError(f"unsupported checkpoint format_version {version!r}")
    params = PolicyParams(
        theta=tuple(float(t) for t in doc["theta"]),
        temperature=float(doc["temperature"]),
        stop_enabled=bool(doc["stop_enabled"]),
        feature_names=tuple(doc["feature_names"]),
    )
    meta = {k: doc[k] for k in ("training_config_digest", "rng_seed", "epoch")}
    return params, meta


def load_checkpoint(path) -> tuple[PolicyParams, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"checkpoint {path} is not valid JSON: {exc}") from exc
    return params_from_checkpoint(doc)


def hand_bisection_params(
    balance_weight: float = 50.0,
    repeat_weight: float = -50.0,
    temperature: float = 1.0,
    stop_enabled: bool = True,
) -> PolicyParams:
    """Reference policy: greedily prefer even splits, avoid repeats."""
    theta = [0.0] * len(FEATURE_NAMES)
    theta[FEATURE_NAMES.index("f_balance")] = balance_weight
    theta[FEATURE_NAMES.index("f_repeat")] = repeat_weight
    return PolicyParams(theta=tuple(theta), temperature=temperature, stop_enabled=stop_enabled)
