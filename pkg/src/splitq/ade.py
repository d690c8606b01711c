"""Candidate bookkeeping for training and evaluation.

Each round, the tracker answers the asked question for every remaining
candidate object, keeps only the candidates whose answer matches the
target's, and records the (k, l) split statistics the reward functions
consume. Tracker state is training/eval bookkeeping only; it is never
shown to the question policy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .world import Answer, GameInstance, Question


class ConsistencyError(RuntimeError):
    """Candidate set emptied although the oracle is noise-free."""


@dataclass(frozen=True)
class RoundStat:
    """Split statistics of one round, computed before elimination.

    ``k`` is the candidate count going into the round; ``l`` the larger of
    the YES and NO counts. NA answers count toward k but never toward l.
    """

    k: int
    l: int
    yes_count: int
    no_count: int
    na_count: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.yes_count + self.no_count + self.na_count != self.k:
            raise ValueError("answer counts must sum to k")
        if self.l != max(self.yes_count, self.no_count):
            raise ValueError("l must equal max(yes_count, no_count)")


@dataclass(frozen=True)
class CandidateTracker:
    candidates: tuple[int, ...]
    rounds: tuple[RoundStat, ...] = ()
    history: tuple[tuple[Question, Answer], ...] = ()


def new_tracker(game: GameInstance) -> CandidateTracker:
    """Fresh tracker: every object is a candidate."""
    return CandidateTracker(tuple(range(game.n_objects)))


def answer_distribution(
    tracker: CandidateTracker,
    question: Question,
    game: GameInstance,
    config: oracle.OracleConfig = oracle.OracleConfig(),
    rng: np.random.Generator | None = None,
) -> dict[int, Answer]:
    """Answer the question for every current candidate object."""
    if not tracker.candidates:
        raise ValueError("tracker has no candidates")
    return {
        i: oracle.answer(question, game.objects[i], config, rng)
        for i in tracker.candidates
    }


def update(
    tracker: CandidateTracker,
    question: Question,
    distribution: dict[int, Answer],
    target_answer: Answer,
    allow_empty: bool = False,
) -> tuple[CandidateTracker, RoundStat]:
    """Keep the candidates that answered like the target.

    The returned RoundStat describes the pre-update distribution. An empty
    result is only legal when the oracle is noisy (``allow_empty``);
    otherwise it means the target itself was evicted, which cannot happen
    with truthful answers.
    """
    if set(distribution) != set(tracker.candidates):
        raise ValueError("distribution must cover exactly the current candidates")
    yes = sum(1 for a in distribution.values() if a is Answer.YES)
    no = sum(1 for a in distribution.values() if a is Answer.NO)
    na = len(distribution) - yes - no
    stat = RoundStat(k=len(tracker.candidates), l=max(yes, no), yes_count=yes, no_count=no, na_count=na)
    kept = tuple(i for i in tracker.candidates if distribution[i] == target_answer)
    if not kept and not allow_empty:
        raise ConsistencyError(
            "candidate set emptied with a noise-free oracle; tracker and oracle disagree"
        )
    new = CandidateTracker(
        candidates=kept,
        rounds=tracker.rounds + (stat,),
        history=tracker.history + ((question, target_answer),),
    )
    return new, stat


def round_binary_score(stat: RoundStat) -> float:
    """How close the round came to splitting the candidates in half.

    1 - |l - k/2| / (k/2): 1.0 for a perfect bisection, 0.0 when every
    candidate answered the same way. A round asked with a single candidate
    left scores 0 by convention (nothing left to split).
    """
    if stat.k == 1:
        return 0.0
    half = stat.k / 2.0
    return 1.0 - abs(stat.l - half) / half
