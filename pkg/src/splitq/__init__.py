"""splitq: a question-asking game simulator and policy-gradient training harness.

The agent plays a find-the-target game over symbolic object worlds. A
candidate tracker scores how evenly each asked question splits the
remaining candidates, and the policy is trained by REINFORCE on a blend of
that split score, a terminal candidate-minimization bonus, and an optional
0/1 success reward.
"""

__version__ = "0.1.0"

from .ade import CandidateTracker, RoundStat, new_tracker, round_binary_score, update
from .guesser import GuesserConfig, guess
from .metrics import EvalReport, evaluate, summarize
from .oracle import OracleConfig, answer, answer_for_target
from .policy import (
    FEATURE_NAMES,
    GREEDY,
    SAMPLE,
    STOP,
    DialogueState,
    PolicyParams,
    action_distribution,
    consistent_set,
    dialogue_state,
    features,
    hand_bisection_params,
    initial_params,
    select_action,
)
from .rewards import (
    EpisodeOutcome,
    RewardConfig,
    binary_reward,
    candidate_min_reward,
    combined_reward,
    success_reward,
)
from .trainer import (
    EpisodeRecord,
    RolloutConfig,
    TrainConfig,
    ablation_suite,
    reinforce_update,
    rollout,
    train,
)
from .world import (
    UNDEFINED,
    Answer,
    AttributeSchema,
    GameInstance,
    ObjectSpec,
    Question,
    WorldSpec,
    enumerate_questions,
    generate_world,
    make_bitworld,
    make_schema,
)
