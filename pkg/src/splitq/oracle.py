"""The answerer: truthful predicate answers with an optional flip-noise knob.

YES/NO answers flip with probability ``noise_rate``; NA never flips. With
noise_rate 0 answering is a pure function and consumes no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .world import Answer, GameInstance, ObjectSpec, Question, truthful_answer

_FLIP = {Answer.YES: Answer.NO, Answer.NO: Answer.YES}


@dataclass(frozen=True)
class OracleConfig:
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.noise_rate <= 1.0):
            raise ValueError(f"noise_rate must be in [0, 1], got {self.noise_rate}")


def answer(
    question: Question,
    obj: ObjectSpec,
    config: OracleConfig = OracleConfig(),
    rng: np.random.Generator | None = None,
) -> Answer:
    """Answer the predicate for one object, flipping YES/NO at noise_rate."""
    truth = truthful_answer(obj, question)
    if config.noise_rate > 0.0 and truth is not Answer.NA:
        if rng is None:
            raise ValueError("rng is required when noise_rate > 0")
        if rng.random() < config.noise_rate:
            return _FLIP[truth]
    return truth


def answer_for_target(
    question: Question,
    game: GameInstance,
    config: OracleConfig = OracleConfig(),
    rng: np.random.Generator | None = None,
) -> Answer:
    """The answer the questioner actually receives each round."""
    return answer(question, game.objects[game.target_id], config, rng)
