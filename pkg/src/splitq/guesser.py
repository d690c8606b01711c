"""Final target prediction from the full object list and the dialogue.

The guess always ranges over ALL objects. The default mode draws uniformly
from the history-consistent set, which makes "lucky" wins (more than one
surviving candidate) exactly as likely as 1/k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .policy import DialogueState, consistent_set
from .world import Answer, GameInstance, Question, ValidationError, truthful_answer

CONSISTENT_UNIFORM = "consistent_uniform"
SOFT_CONSISTENCY = "soft_consistency"


@dataclass(frozen=True)
class GuesserConfig:
    mode: str = CONSISTENT_UNIFORM
    softness: float = 1.0

    def __post_init__(self):
        if self.mode not in (CONSISTENT_UNIFORM, SOFT_CONSISTENCY):
            raise ValidationError(f"unknown guesser mode {self.mode!r}")
        if not np.isfinite(self.softness) or self.softness < 0:
            raise ValidationError(f"softness must be finite and >= 0, got {self.softness}")


def guess(
    game: GameInstance,
    history,
    config: GuesserConfig = GuesserConfig(),
    rng: np.random.Generator | None = None,
) -> int:
    """Predict the target object id from the dialogue history."""
    if rng is None:
        rng = np.random.default_rng(0)
    history = tuple(history)
    if config.mode == CONSISTENT_UNIFORM:
        ids = consistent_set(DialogueState(game.view, history))
        if not ids:  # noisy answers ruled everything out
            ids = tuple(range(game.n_objects))
        return int(ids[rng.integers(len(ids))])
    # SOFT_CONSISTENCY: score = number of history answers the object matches
    scores = np.zeros(game.n_objects)
    for question, ans in history:
        for obj in game.objects:
            if truthful_answer(obj, question) == ans:
                scores[obj.id] += 1.0
    logits = config.softness * (scores - scores.max())
    probs = np.exp(logits)
    probs /= probs.sum()
    u = rng.random()
    return min(int(np.searchsorted(np.cumsum(probs), u, side="right")), game.n_objects - 1)
