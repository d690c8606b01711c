"""Command-line entry point: train, eval, ablate, and interactive play.

Exit codes: 0 success, 2 configuration/usage problem, 3 numeric failure
during training. Every artifact embeds the resolved config digest and the
master seed, and reruns with identical configs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, metrics, policy, trainer
from .config import ConfigError, ExperimentConfig, load_config
from .world import Answer, GameInstance, ValidationError, make_bitworld

MANIFEST_FORMAT_VERSION = 1


def _write_manifest(out_dir: Path, command: str, cfg: ExperimentConfig, outputs: list[str]) -> None:
    doc = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "command": command,
        "package_version": __version__,
        "config": cfg.as_dict(),
        "config_digest": cfg.digest(),
        "master_seed": cfg.master_seed,
        "eval_seed": cfg.eval_seed,
        "outputs": sorted(outputs),
    }
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_train(args) -> int:
    cfg = load_config(args.config, args.set)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    train_config = cfg.to_train_config()
    outputs = ["manifest.json", "log.csv", "checkpoint_final.json"]

    def on_epoch(epoch, params, entry):
        if cfg.checkpoint_every and epoch % cfg.checkpoint_every == 0:
            name = f"checkpoint_epoch_{epoch:04d}.json"
            policy.save_checkpoint(
                out_dir / name,
                params,
                training_config_digest=digest,
                rng_seed=cfg.master_seed,
                epoch=epoch,
            )
            outputs.append(name)

    params, log = trainer.train(train_config, on_epoch=on_epoch)
    header = f"config_digest={digest} master_seed={cfg.master_seed}"
    (out_dir / "log.csv").write_text(metrics.render_log_csv(log, header))
    policy.save_checkpoint(
        out_dir / "checkpoint_final.json",
        params,
        training_config_digest=digest,
        rng_seed=cfg.master_seed,
        epoch=cfg.epochs,
    )
    _write_manifest(out_dir, "train", cfg, outputs)
    print(f"trained {cfg.epochs} epochs -> {out_dir}")
    return 0


def cmd_eval(args) -> int:
    cfg = load_config(args.config, args.set)
    params, meta = policy.load_checkpoint(args.checkpoint)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_games = args.games if args.games is not None else cfg.eval_games
    mode = args.mode if args.mode is not None else cfg.eval_mode
    seed = args.seed if args.seed is not None else cfg.eval_seed
    entries = metrics.run_games(
        params, cfg.world_spec(), cfg.rollout_config(), n_games, mode, seed
    )
    report = metrics.summarize([rec for _, _, rec in entries], mode=mode, seed=seed)
    digest = cfg.digest()
    lines = [
        f"# config_digest={digest} master_seed={cfg.master_seed}",
        ",".join(metrics.CSV_COLUMNS),
        metrics.log_csv_line(meta["epoch"], report),
    ]
    (out_dir / "report.csv").write_text("\n".join(lines) + "\n")
    outputs = ["report.csv"]
    if args.replay:
        trainer.write_replay(
            out_dir / "replay.json",
            params,
            cfg.rollout_config(),
            mode,
            entries,
            config_digest=digest,
        )
        outputs.append("replay.json")
    print(f"evaluated {n_games} games ({mode}) -> {out_dir}")
    return 0


def cmd_ablate(args) -> int:
    cfg = load_config(args.config, args.set)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = cfg.to_train_config()
    variants = [("full", base)] + trainer.ablation_suite(base)
    reports: dict[str, metrics.EvalReport] = {}
    outputs = ["manifest.json", "ablation.csv"]
    for name, variant in variants:
        params, _ = trainer.train(variant)
        checkpoint = f"checkpoint_{name}.json"
        policy.save_checkpoint(
            out_dir / checkpoint,
            params,
            training_config_digest=cfg.digest(),
            rng_seed=cfg.master_seed,
            epoch=cfg.epochs,
        )
        outputs.append(checkpoint)
        # All variants are scored on the same evaluation worlds and seeds.
        reports[name] = metrics.evaluate(
            params,
            cfg.world_spec(),
            variant.rollout_config(),
            cfg.eval_games,
            cfg.eval_mode,
            cfg.eval_seed,
        )
    (out_dir / "ablation.csv").write_text(metrics.compare(reports, baseline="full"))
    _write_manifest(out_dir, "ablate", cfg, outputs)
    print(f"ablation table -> {out_dir / 'ablation.csv'}")
    return 0


_ANSWER_WORDS = {
    "y": Answer.YES,
    "yes": Answer.YES,
    "n": Answer.NO,
    "no": Answer.NO,
    "na": Answer.NA,
}


def _prompt_answer(prompt: str) -> Answer | None:
    """Read y/n/na from stdin; None on EOF."""
    while True:
        try:
            raw = input(prompt)
        except EOFError:
            return None
        parsed = _ANSWER_WORDS.get(raw.strip().lower())
        if parsed is not None:
            return parsed
        print("please answer y, n, or na")


def _object_row(game: GameInstance, object_id: int) -> str:
    assignment = game.objects[object_id].assignment
    attrs = "  ".join(f"{name}={assignment[name]}" for name in game.schema.names)
    return f"  object {object_id}: {attrs}"


def cmd_play(args) -> int:
    params, _ = policy.load_checkpoint(args.checkpoint)
    if args.bits is not None:
        game = make_bitworld(args.bits, seed=args.seed)
    else:
        cfg = ExperimentConfig(
            world="generic", n_objects=args.objects, schema=args.schema
        )
        game = cfg.world_spec().instantiate(args.seed)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(99,)))
    print("The objects:")
    for obj in game.objects:
        print(_object_row(game, obj.id))
    print("Pick one secretly. I will ask yes/no questions, then guess.")
    history: list[tuple] = []
    for round_no in range(1, args.rounds + 1):
        state = policy.DialogueState(game.view, tuple(history))
        choice = policy.select_action(params, state, policy.GREEDY, rng)
        if choice.action is policy.STOP:
            print("No more questions.")
            break
        question = choice.action
        answer = _prompt_answer(f"Q{round_no}: is {question.attribute} = {question.value}? [y/n/na] ")
        if answer is None:
            print("\nbye")
            return 0
        history.append((question, answer))
    state = policy.DialogueState(game.view, tuple(history))
    candidates = policy.consistent_set(state) or tuple(range(game.n_objects))
    guess_id = int(candidates[rng.integers(len(candidates))])
    print(f"My guess: object {guess_id}")
    print(_object_row(game, guess_id))
    print(f"Still-consistent candidates: {list(candidates)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitq",
        description="Question-asking game simulator and policy-gradient trainer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train a policy and write checkpoints + log")
    train_p.add_argument("--config", required=True, help="key=value or JSON config file")
    train_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                         help="override a config key (repeatable)")
    train_p.add_argument("--out", required=True, help="output directory")
    train_p.set_defaults(func=cmd_train)

    eval_p = sub.add_parser("eval", help="evaluate a checkpoint on fresh worlds")
    eval_p.add_argument("--config", required=True)
    eval_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    eval_p.add_argument("--out", required=True)
    eval_p.add_argument("--checkpoint", required=True)
    eval_p.add_argument("--games", type=int, default=None)
    eval_p.add_argument("--mode", choices=[policy.GREEDY, policy.SAMPLE], default=None)
    eval_p.add_argument("--seed", type=int, default=None)
    eval_p.add_argument("--replay", action="store_true", help="also write per-game replay JSON")
    eval_p.set_defaults(func=cmd_eval)

    ablate_p = sub.add_parser("ablate", help="train the reward ablations and compare")
    ablate_p.add_argument("--config", required=True)
    ablate_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    ablate_p.add_argument("--out", required=True)
    ablate_p.set_defaults(func=cmd_ablate)

    play_p = sub.add_parser("play", help="interactive game: you answer, the agent asks")
    play_p.add_argument("--checkpoint", required=True)
    play_p.add_argument("--seed", type=int, default=0)
    play_p.add_argument("--bits", type=int, default=None, help="use a bitworld of this size")
    play_p.add_argument("--objects", type=int, default=8)
    play_p.add_argument("--schema", default="", help="custom schema 'name:v1|v2;...'")
    play_p.add_argument("--rounds", type=int, default=5)
    play_p.set_defaults(func=cmd_play)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except trainer.TrainingDivergedError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
