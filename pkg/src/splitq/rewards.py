"""Episode reward functions.

Three signals: a per-round split score summed over the dialogue (rewards
even YES/NO splits), a terminal candidate-minimization bonus on successful
games (rewards ending with few surviving candidates), and a plain 0/1
success reward. The combined return weighs the split score by gamma and
adds the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

from .ade import RoundStat, round_binary_score

RB_SUM = "sum"
RB_MEAN = "mean"


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = 4.0
    beta: float = 0.7
    gamma: float = 0.8
    use_rs: bool = False
    include_alpha_with_rs: bool = False
    rb_aggregation: str = RB_SUM

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.rb_aggregation not in (RB_SUM, RB_MEAN):
            raise ValueError(f"rb_aggregation must be 'sum' or 'mean', got {self.rb_aggregation!r}")

    @property
    def success_bonus(self) -> float:
        """The constant part of the candidate-minimization reward.

        When the separate 0/1 success reward is active, the alpha bonus is
        dropped (not stacked) unless explicitly re-enabled.
        """
        if self.use_rs and not self.include_alpha_with_rs:
            return 0.0
        return self.alpha


@dataclass(frozen=True)
class EpisodeOutcome:
    """What the reward functions need to know about one finished episode."""

    round_stats: tuple[RoundStat, ...]
    k_end: int
    n_objects: int
    guess_correct: bool

    def __post_init__(self):
        if not self.round_stats:
            raise ValueError("round_stats must be non-empty")
        if not (1 <= self.k_end <= self.n_objects):
            raise ValueError(f"k_end {self.k_end} out of range 1..{self.n_objects}")


def binary_reward(outcome: EpisodeOutcome, config: RewardConfig = RewardConfig()) -> float:
    total = sum(round_binary_score(stat) for stat in outcome.round_stats)
    if config.rb_aggregation == RB_MEAN:
        return total / len(outcome.round_stats)
    return total


def candidate_min_reward(outcome: EpisodeOutcome, config: RewardConfig = RewardConfig()) -> float:
    """Bonus for successful games, larger when fewer candidates survive.

    success_bonus + beta * (1 - (k_end - 1) / (N - 1)) on success, 0 on
    failure. k_end = 1 is the highest-quality win; k_end = N a pure fluke.
    """
    if not outcome.guess_correct:
        return 0.0
    quality = 1.0 - (outcome.k_end - 1) / (outcome.n_objects - 1)
    return config.success_bonus + config.beta * quality


def success_reward(outcome: EpisodeOutcome) -> float:
    return 1.0 if outcome.guess_correct else 0.0


def combined_reward(outcome: EpisodeOutcome, config: RewardConfig = RewardConfig()) -> float:
    total = config.gamma * binary_reward(outcome, config) + candidate_min_reward(outcome, config)
    if config.use_rs:
        total += success_reward(outcome)
    return total
