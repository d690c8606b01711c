"""Evaluation statistics and CSV reporting.

Success rate, question repetition rate, and the singleton-efficiency
triple: T (average rounds until one candidate is left, over games that get
there), R (fraction of games that get there), and T/R (lower is better,
since comparing raw T across models with different R is unfair).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import seeding
from .policy import PolicyParams
from .trainer import EpisodeRecord, EpochLog, RolloutConfig, rollout
from .world import ValidationError, WorldSpec

CSV_COLUMNS = (
    "epoch",
    "mode",
    "n_games",
    "success_rate",
    "repetition_rate",
    "T",
    "R",
    "T_over_R",
    "mean_rb",
    "mean_rc",
    "mean_return",
    "seed",
)


@dataclass(frozen=True)
class EvalReport:
    n_games: int
    success_rate: float
    repetition_rate: float
    T: float | None
    R: float
    T_over_R: float | None
    mean_r_b: float
    mean_r_c: float
    mean_return: float
    mode: str
    seed: int = 0


def first_singleton_round(record: EpisodeRecord) -> int | None:
    """1-based round after whose update one candidate remained, or None."""
    stats = record.round_stats
    for i in range(len(stats)):
        after = stats[i + 1].k if i + 1 < len(stats) else record.k_end
        if after == 1:
            return i + 1
    return None


def count_repeats(record: EpisodeRecord) -> tuple[int, int]:
    """(duplicated questions, total questions) within one game."""
    seen: set = set()
    repeats = 0
    for question in record.questions:
        if question in seen:
            repeats += 1
        seen.add(question)
    return repeats, len(record.questions)


def summarize(records: list[EpisodeRecord], mode: str, seed: int = 0) -> EvalReport:
    """Aggregate a batch of episode records into one report."""
    if not records:
        raise ValidationError("cannot summarize zero records")
    n = len(records)
    singleton_rounds = [r for r in (first_singleton_round(rec) for rec in records) if r is not None]
    reached = len(singleton_rounds)
    repeats = total_q = 0
    for rec in records:
        d, t = count_repeats(rec)
        repeats += d
        total_q += t
    T = sum(singleton_rounds) / reached if reached else None
    R = reached / n
    return EvalReport(
        n_games=n,
        success_rate=sum(rec.guess_correct for rec in records) / n,
        repetition_rate=repeats / total_q if total_q else 0.0,
        T=T,
        R=R,
        T_over_R=(T / R) if reached else None,
        mean_r_b=sum(rec.r_b for rec in records) / n,
        mean_r_c=sum(rec.r_c for rec in records) / n,
        mean_return=sum(rec.total_return for rec in records) / n,
        mode=mode,
        seed=seed,
    )


def run_games(
    params: PolicyParams,
    world_spec: WorldSpec,
    cfg: RolloutConfig,
    n_games: int,
    mode: str,
    master_seed: int,
) -> list[tuple[object, int, EpisodeRecord]]:
    """Roll out n_games fresh evaluation worlds; returns (game, episode_seed, record)."""
    if n_games < 1:
        raise ValidationError(f"n_games must be >= 1, got {n_games}")
    out = []
    for i in range(n_games):
        world_seed = seeding.spawn_seed(master_seed, seeding.STREAM_EVAL_WORLD, i)
        game = world_spec.instantiate(world_seed)
        episode_seed = seeding.spawn_seed(master_seed, seeding.STREAM_EVAL_EPISODE, i)
        rng = seeding.spawn_rng(episode_seed)
        out.append((game, episode_seed, rollout(params, game, cfg, mode, rng)))
    return out


def evaluate(
    params: PolicyParams,
    world_spec: WorldSpec,
    cfg: RolloutConfig,
    n_games: int,
    mode: str,
    master_seed: int,
) -> EvalReport:
    entries = run_games(params, world_spec, cfg, n_games, mode, master_seed)
    return summarize([record for _, _, record in entries], mode=mode, seed=master_seed)


# --- CSV rendering ------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def log_csv_line(epoch: int, report: EvalReport) -> str:
    values = (
        epoch,
        report.mode,
        report.n_games,
        report.success_rate,
        report.repetition_rate,
        report.T,
        report.R,
        report.T_over_R,
        report.mean_r_b,
        report.mean_r_c,
        report.mean_return,
        report.seed,
    )
    return ",".join(_fmt(v) for v in values)


def render_log_csv(log: list[EpochLog], header_comment: str = "") -> str:
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(",".join(CSV_COLUMNS))
    lines.extend(log_csv_line(entry.epoch, entry.report) for entry in log)
    return "\n".join(lines) + "\n"


COMPARE_COLUMNS = (
    "name",
    "n_games",
    "mode",
    "success_rate",
    "repetition_rate",
    "T",
    "R",
    "T_over_R",
    "mean_rb",
    "mean_rc",
    "mean_return",
    "d_success_rate",
    "d_repetition_rate",
    "d_T",
    "d_R",
    "d_T_over_R",
    "d_mean_return",
)


def compare(reports: dict[str, EvalReport], baseline: str | None = None) -> str:
    """CSV comparison table with deltas against the baseline row."""
    if len(reports) < 2:
        raise ValidationError(f"compare needs >= 2 reports, got {len(reports)}")
    baseline = baseline if baseline is not None else next(iter(reports))
    if baseline not in reports:
        raise ValidationError(f"baseline {baseline!r} not among reports")
    base = reports[baseline]

    def delta(a, b):
        return None if a is None or b is None else a - b

    lines = [",".join(COMPARE_COLUMNS)]
    for name, rep in reports.items():
        values = (
            name,
            rep.n_games,
            rep.mode,
            rep.success_rate,
            rep.repetition_rate,
            rep.T,
            rep.R,
            rep.T_over_R,
            rep.mean_r_b,
            rep.mean_r_c,
            rep.mean_return,
            delta(rep.success_rate, base.success_rate),
            delta(rep.repetition_rate, base.repetition_rate),
            delta(rep.T, base.T),
            delta(rep.R, base.R),
            delta(rep.T_over_R, base.T_over_R),
            delta(rep.mean_return, base.mean_return),
        )
        lines.append(",".join(_fmt(v) for v in values))
    return "\n".join(lines) + "\n"
