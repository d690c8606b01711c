"""Episode rollouts and policy-gradient training.

One rollout plays a full game: the policy asks questions (or stops), the
oracle answers for the hidden target, the candidate tracker logs per-round
split statistics, and the guesser makes the final prediction. Training is
plain stochastic gradient ascent on the score function weighted by the
episode return minus a moving-average baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING, Callable

import numpy as np

from . import ade, guesser, oracle, policy, rewards, seeding
from .world import (
    GameInstance,
    Question,
    ValidationError,
    WorldSpec,
    game_from_dict,
    game_to_dict,
)

if TYPE_CHECKING:
    from .metrics import EvalReport

REPLAY_FORMAT_VERSION = 1


class TrainingDivergedError(RuntimeError):
    """Non-finite parameters or gradients during training."""


@dataclass(frozen=True)
class RolloutConfig:
    """Everything a single episode needs besides the policy and the game."""

    j_max: int = 5
    oracle_config: oracle.OracleConfig = oracle.OracleConfig()
    guesser_config: guesser.GuesserConfig = guesser.GuesserConfig()
    reward_config: rewards.RewardConfig = rewards.RewardConfig()
    per_round_shaping: bool = False

    def __post_init__(self):
        if self.j_max < 1:
            raise ValidationError(f"j_max must be >= 1, got {self.j_max}")


@dataclass(frozen=True)
class EpisodeRecord:
    """One finished episode: actions, split stats, rewards, outcome."""

    game_seed: int
    n_objects: int
    actions: tuple[policy.ActionChoice, ...]
    round_stats: tuple[ade.RoundStat, ...]
    k_end: int
    guess_correct: bool
    r_b: float
    r_c: float
    r_s: float
    total_return: float
    j_end: int
    ade_resets: int = 0
    action_returns: tuple[float, ...] | None = None

    @property
    def questions(self) -> tuple[Question, ...]:
        return tuple(c.action for c in self.actions if c.action is not policy.STOP)


def rollout(
    params: policy.PolicyParams,
    game: GameInstance,
    cfg: RolloutConfig,
    mode: str,
    rng: np.random.Generator,
) -> EpisodeRecord:
    """Play one episode. Tracker state never reaches the policy.

    With a noisy oracle the candidate set can empty out; the tracker then
    restarts from the full object set (mirroring the policy's and guesser's
    fallback) and the event is counted in ``ade_resets``.
    """
    noisy = cfg.oracle_config.noise_rate > 0.0
    tracker = ade.new_tracker(game)
    history: list[tuple[Question, object]] = []
    choices: list[policy.ActionChoice] = []
    ade_resets = 0
    for _ in range(cfg.j_max):
        state = policy.DialogueState(game.view, tuple(history))
        choice = policy.select_action(params, state, mode, rng)
        choices.append(choice)
        if choice.action is policy.STOP:
            break
        question = choice.action
        target_answer = oracle.answer_for_target(question, game, cfg.oracle_config, rng)
        if not tracker.candidates:
            tracker = ade.new_tracker(game)
            ade_resets += 1
        distribution = ade.answer_distribution(tracker, question, game, cfg.oracle_config, rng)
        tracker, _ = ade.update(tracker, question, distribution, target_answer, allow_empty=noisy)
        history.append((question, target_answer))
    guess_id = guesser.guess(game, history, cfg.guesser_config, rng)
    guess_correct = guess_id == game.target_id
    k_end = len(tracker.candidates) if tracker.candidates else game.n_objects
    outcome = rewards.EpisodeOutcome(
        round_stats=tracker.rounds,
        k_end=k_end,
        n_objects=game.n_objects,
        guess_correct=guess_correct,
    )
    rcfg = cfg.reward_config
    r_b = rewards.binary_reward(outcome, rcfg)
    r_c = rewards.candidate_min_reward(outcome, rcfg)
    r_s = rewards.success_reward(outcome)
    total = rewards.combined_reward(outcome, rcfg)
    action_returns = None
    if cfg.per_round_shaping:
        action_returns = _shaped_returns(choices, tracker.rounds, rcfg, r_c, r_s)
    return EpisodeRecord(
        game_seed=game.seed,
        n_objects=game.n_objects,
        actions=tuple(choices),
        round_stats=tracker.rounds,
        k_end=k_end,
        guess_correct=guess_correct,
        r_b=r_b,
        r_c=r_c,
        r_s=r_s,
        total_return=total,
        j_end=len(history),
        ade_resets=ade_resets,
        action_returns=action_returns,
    )


def _shaped_returns(choices, round_stats, rcfg, r_c, r_s) -> tuple[float, ...]:
    """Suffix credit: each question sees the split scores it could still affect."""
    scores = [ade.round_binary_score(s) for s in round_stats]
    terminal = r_c + (r_s if rcfg.use_rs else 0.0)
    out = []
    q_index = 0
    for choice in choices:
        if choice.action is policy.STOP:
            out.append(terminal)
        else:
            out.append(rcfg.gamma * sum(scores[q_index:]) + terminal)
            q_index += 1
    return tuple(out)


@dataclass(frozen=True)
class BaselineState:
    """Moving-average return baseline; ``value`` None until the first batch."""

    decay: float = 0.99
    value: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.decay < 1.0):
            raise ValidationError(f"baseline decay must be in [0, 1), got {self.decay}")


def reinforce_update(
    params: policy.PolicyParams,
    batch: list[EpisodeRecord],
    baseline_state: BaselineState,
    learning_rate: float,
) -> tuple[policy.PolicyParams, BaselineState]:
    """One gradient-ascent step on the batch; pure function of its inputs.

    The advantage subtracts the exponential moving average of batch-mean
    returns, initialized to the first batch's mean.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    batch_mean = float(np.mean([r.total_return for r in batch]))
    baseline = batch_mean if baseline_state.value is None else baseline_state.value
    grad = np.zeros(len(params.theta))
    for record in batch:
        returns = record.action_returns
        for t, choice in enumerate(record.actions):
            advantage = (returns[t] if returns is not None else record.total_return) - baseline
            grad += advantage * np.asarray(choice.score_gradient)
    grad /= len(batch)
    if not np.all(np.isfinite(grad)):
        raise TrainingDivergedError(f"non-finite policy gradient: {grad}")
    new_theta = np.asarray(params.theta) + learning_rate * grad
    if not np.all(np.isfinite(new_theta)):
        raise TrainingDivergedError(f"non-finite parameters after update: {new_theta}")
    new_value = baseline_state.decay * baseline + (1.0 - baseline_state.decay) * batch_mean
    return (
        replace(params, theta=tuple(float(t) for t in new_theta)),
        replace(baseline_state, value=new_value),
    )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 64
    epochs: int = 150
    games_per_epoch: int = 6400
    j_max: int = 5
    reward_config: rewards.RewardConfig = rewards.RewardConfig()
    oracle_config: oracle.OracleConfig = oracle.OracleConfig()
    guesser_config: guesser.GuesserConfig = guesser.GuesserConfig()
    world_spec: WorldSpec = WorldSpec()
    baseline_decay: float = 0.99
    master_seed: int = 0
    temperature: float = 1.0
    stop_enabled: bool = True
    per_round_shaping: bool = False
    n_fixed_worlds: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        for name in ("batch_size", "games_per_epoch", "j_max"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.games_per_epoch % self.batch_size != 0:
            raise ValidationError(
                f"games_per_epoch ({self.games_per_epoch}) must be a multiple of "
                f"batch_size ({self.batch_size})"
            )
        if not (0.0 <= self.baseline_decay < 1.0):
            raise ValidationError(f"baseline_decay must be in [0, 1), got {self.baseline_decay}")

    def rollout_config(self) -> RolloutConfig:
        return RolloutConfig(
            j_max=self.j_max,
            oracle_config=self.oracle_config,
            guesser_config=self.guesser_config,
            reward_config=self.reward_config,
            per_round_shaping=self.per_round_shaping,
        )

    def initial_params(self) -> policy.PolicyParams:
        return policy.initial_params(self.temperature, self.stop_enabled)


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    report: "EvalReport"


def train(
    config: TrainConfig,
    on_epoch: Callable[[int, policy.PolicyParams, "EpochLog"], None] | None = None,
) -> tuple[policy.PolicyParams, list[EpochLog]]:
    """Run the full training loop; reproducible from master_seed alone.

    World and episode seeds are spawned per (epoch, batch, episode) slot,
    so results do not depend on rollout scheduling. Per-epoch rows
    summarize the training episodes themselves (sampling mode).
    """
    from .metrics import summarize  # local import: metrics needs rollout

    params = config.initial_params()
    rcfg = config.rollout_config()
    baseline = BaselineState(decay=config.baseline_decay)
    pool = [
        config.world_spec.instantiate(
            seeding.spawn_seed(config.master_seed, seeding.STREAM_WORLD, 0, 0, i)
        )
        for i in range(config.n_fixed_worlds)
    ]
    n_batches = config.games_per_epoch // config.batch_size
    log: list[EpochLog] = []
    episode_counter = 0
    for epoch in range(1, config.epochs + 1):
        epoch_records: list[EpisodeRecord] = []
        for b in range(n_batches):
            batch: list[EpisodeRecord] = []
            for i in range(config.batch_size):
                if pool:
                    game = pool[episode_counter % len(pool)]
                else:
                    world_seed = seeding.spawn_seed(
                        config.master_seed, seeding.STREAM_WORLD, epoch, b, i
                    )
                    game = config.world_spec.instantiate(world_seed)
                rng = seeding.spawn_rng(config.master_seed, seeding.STREAM_EPISODE, epoch, b, i)
                batch.append(rollout(params, game, rcfg, policy.SAMPLE, rng))
                episode_counter += 1
            params, baseline = reinforce_update(params, batch, baseline, config.learning_rate)
            epoch_records.extend(batch)
        entry = EpochLog(epoch, summarize(epoch_records, mode=policy.SAMPLE, seed=config.master_seed))
        log.append(entry)
        if on_epoch is not None:
            on_epoch(epoch, params, entry)
    return params, log


def ablation_suite(base: TrainConfig) -> list[tuple[str, TrainConfig]]:
    """Reward ablations: no split reward, no candidate-minimization, success only."""
    rc = base.reward_config
    wo_rb = replace(rc, gamma=0.0)
    wo_rc = replace(rc, alpha=0.0, beta=0.0)
    rs_only = replace(rc, gamma=0.0, alpha=0.0, beta=0.0, use_rs=True)
    return [
        ("wo_rb", replace(base, reward_config=wo_rb)),
        ("wo_rc", replace(base, reward_config=wo_rc)),
        ("rs_only", replace(base, reward_config=rs_only)),
    ]


# --- episode and replay serialization ----------------------------------------


def _action_to_dict(choice: policy.ActionChoice) -> dict:
    doc = {
        "log_prob": choice.log_prob,
        "score_gradient": list(choice.score_gradient),
    }
    if choice.action is policy.STOP:
        doc["kind"] = "stop"
    else:
        doc["kind"] = "question"
        doc["attribute"] = choice.action.attribute
        doc["value"] = choice.action.value
    return doc


def _action_from_dict(doc: dict) -> policy.ActionChoice:
    action = (
        policy.STOP
        if doc["kind"] == "stop"
        else Question(doc["attribute"], doc["value"])
    )
    return policy.ActionChoice(
        action=action,
        log_prob=float(doc["log_prob"]),
        score_gradient=tuple(float(g) for g in doc["score_gradient"]),
    )


def record_to_dict(record: EpisodeRecord) -> dict:
    return {
        "game_seed": record.game_seed,
        "n_objects": record.n_objects,
        "actions": [_action_to_dict(c) for c in record.actions],
        "round_stats": [
            {"k": s.k, "l": s.l, "yes": s.yes_count, "no": s.no_count, "na": s.na_count}
            for s in record.round_stats
        ],
        "k_end": record.k_end,
        "guess_correct": record.guess_correct,
        "r_b": record.r_b,
        "r_c": record.r_c,
        "r_s": record.r_s,
        "total_return": record.total_return,
        "j_end": record.j_end,
        "ade_resets": record.ade_resets,
        "action_returns": list(record.action_returns) if record.action_returns is not None else None,
    }


def record_from_dict(doc: dict) -> EpisodeRecord:
    return EpisodeRecord(
        game_seed=int(doc["game_seed"]),
        n_objects=int(doc["n_objects"]),
        actions=tuple(_action_from_dict(a) for a in doc["actions"]),
        round_stats=tuple(
            ade.RoundStat(s["k"], s["l"], s["yes"], s["no"], s["na"])
            for s in doc["round_stats"]
        ),
        k_end=int(doc["k_end"]),
        guess_correct=bool(doc["guess_correct"]),
        r_b=float(doc["r_b"]),
        r_c=float(doc["r_c"]),
        r_s=float(doc["r_s"]),
        total_return=float(doc["total_return"]),
        j_end=int(doc["j_end"]),
        ade_resets=int(doc["ade_resets"]),
        action_returns=(
            tuple(float(r) for r in doc["action_returns"])
            if doc.get("action_returns") is not None
            else None
        ),
    )


def rollout_config_to_dict(cfg: RolloutConfig) -> dict:
    return {
        "j_max": cfg.j_max,
        "oracle": {"noise_rate": cfg.oracle_config.noise_rate, "seed": cfg.oracle_config.seed},
        "guesser": {"mode": cfg.guesser_config.mode, "softness": cfg.guesser_config.softness},
        "reward": {
            "alpha": cfg.reward_config.alpha,
            "beta": cfg.reward_config.beta,
            "gamma": cfg.reward_config.gamma,
            "use_rs": cfg.reward_config.use_rs,
            "include_alpha_with_rs": cfg.reward_config.include_alpha_with_rs,
            "rb_aggregation": cfg.reward_config.rb_aggregation,
        },
        "per_round_shaping": cfg.per_round_shaping,
    }


def rollout_config_from_dict(doc: dict) -> RolloutConfig:
    return RolloutConfig(
        j_max=int(doc["j_max"]),
        oracle_config=oracle.OracleConfig(**doc["oracle"]),
        guesser_config=guesser.GuesserConfig(**doc["guesser"]),
        reward_config=rewards.RewardConfig(**doc["reward"]),
        per_round_shaping=bool(doc.get("per_round_shaping", False)),
    )


def write_replay(
    path,
    params: policy.PolicyParams,
    cfg: RolloutConfig,
    mode: str,
    entries: list[tuple[GameInstance, int, EpisodeRecord]],
    config_digest: str = "",
) -> None:
    """Persist everything needed to re-run the episodes bit for bit."""
    doc = {
        "format_version": REPLAY_FORMAT_VERSION,
        "config_digest": config_digest,
        "mode": mode,
        "params": policy.checkpoint_dict(params),
        "rollout_config": rollout_config_to_dict(cfg),
        "games": [
            {
                "world": game_to_dict(game),
                "episode_seed": episode_seed,
                "record": record_to_dict(record),
            }
            for game, episode_seed, record in entries
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def read_replay(path) -> dict:
    doc = json.loads(Path(path).read_text())
    version = doc.get("format_version")
    if version != REPLAY_FORMAT_VERSION:
        raise ValidationError(f"unsupported replay format_version {version!r}")
    return doc


def verify_replay(path) -> int:
    """Re-run every stored episode and compare records; returns games checked."""
    doc = read_replay(path)
    params, _ = policy.params_from_checkpoint(doc["params"])
    cfg = rollout_config_from_dict(doc["rollout_config"])
    mode = doc["mode"]
    checked = 0
    for entry in doc["games"]:
        game = game_from_dict(entry["world"])
        rng = np.random.default_rng(np.random.SeedSequence(int(entry["episode_seed"])))
        rerun = rollout(params, game, cfg, mode, rng)
        stored = record_from_dict(entry["record"])
        if rerun != stored:
            raise ValidationError(f"replay mismatch for game seed {game.seed}")
        checked += 1
    return checked
