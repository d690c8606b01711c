"""Experiment configuration: flat key=value files with exhaustive validation.

Every key is typed and documented in the registry below; unknown keys are
rejected so a typo cannot silently fall back to a default. JSON documents
with the same keys are accepted as an alternative encoding. The digest of
the fully resolved config is embedded in every output artifact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path

from . import guesser, oracle, policy, rewards, trainer
from .world import AttributeSchema, ValidationError, WorldSpec, make_schema


class ConfigError(ValidationError):
    """Unknown key, bad type, or out-of-range value in an experiment config."""


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("true", "1", "yes", "on"):
        return True
    if value in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (python type, help text). The dataclass below carries the defaults.
CONFIG_KEYS: dict[str, tuple[type, str]] = {
    "world": (str, "world family: generic | bitworld"),
    "n_objects": (int, "objects per generic world"),
    "n_attributes": (int, "attributes in the generated generic schema"),
    "n_values": (int, "values per attribute in the generated generic schema"),
    "n_bits": (int, "bits for bitworld"),
    "schema": (str, "custom schema 'name:v1|v2;name2:u1|u2' (overrides n_attributes/n_values)"),
    "optional_attributes": (str, "comma-separated attributes that may be undefined"),
    "noise_rate": (float, "probability of flipping a YES/NO answer"),
    "oracle_seed": (int, "seed recorded in the oracle config"),
    "guesser_mode": (str, "consistent_uniform | soft_consistency"),
    "softness": (float, "softmax sharpness for soft_consistency"),
    "learning_rate": (float, "SGD step size"),
    "batch_size": (int, "episodes per gradient step"),
    "epochs": (int, "training epochs"),
    "games_per_epoch": (int, "episodes per epoch (multiple of batch_size)"),
    "j_max": (int, "maximum dialogue rounds"),
    "baseline_decay": (float, "moving-average decay of the return baseline"),
    "master_seed": (int, "root seed for all training randomness"),
    "temperature": (float, "policy softmax temperature"),
    "stop_enabled": (bool, "allow the STOP action from round 2 on"),
    "per_round_shaping": (bool, "credit each question with its suffix of split scores"),
    "n_fixed_worlds": (int, "0 = fresh worlds; else cycle a fixed pool (regression mode)"),
    "alpha": (float, "success bonus weight in the candidate-minimization reward"),
    "beta": (float, "quality weight in the candidate-minimization reward"),
    "gamma": (float, "weight of the split reward in the combined return"),
    "use_rs": (bool, "add the 0/1 success reward to the return"),
    "include_alpha_with_rs": (bool, "keep the alpha bonus even when use_rs is on"),
    "rb_aggregation": (str, "sum | mean over per-round split scores"),
    "eval_games": (int, "games per evaluation"),
    "eval_mode": (str, "greedy | sample"),
    "eval_seed": (int, "root seed for evaluation worlds"),
    "checkpoint_every": (int, "checkpoint cadence in epochs (0 = final only)"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    world: str = "generic"
    n_objects: int = 16
    n_attributes: int = 4
    n_values: int = 4
    n_bits: int = 3
    schema: str = ""
    optional_attributes: str = ""
    noise_rate: float = 0.0
    oracle_seed: int = 0
    guesser_mode: str = guesser.CONSISTENT_UNIFORM
    softness: float = 1.0
    learning_rate: float = 0.001
    batch_size: int = 64
    epochs: int = 150
    games_per_epoch: int = 6400
    j_max: int = 5
    baseline_decay: float = 0.99
    master_seed: int = 0
    temperature: float = 1.0
    stop_enabled: bool = True
    per_round_shaping: bool = False
    n_fixed_worlds: int = 0
    alpha: float = 4.0
    beta: float = 0.7
    gamma: float = 0.8
    use_rs: bool = False
    include_alpha_with_rs: bool = False
    rb_aggregation: str = rewards.RB_SUM
    eval_games: int = 2000
    eval_mode: str = policy.GREEDY
    eval_seed: int = 1000
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.eval_mode not in (policy.GREEDY, policy.SAMPLE):
            raise ConfigError(f"eval_mode must be greedy or sample, got {self.eval_mode!r}")
        if self.eval_games < 1:
            raise ConfigError(f"eval_games must be >= 1, got {self.eval_games}")
        if self.checkpoint_every < 0:
            raise ConfigError(f"checkpoint_every must be >= 0, got {self.checkpoint_every}")
        if self.n_fixed_worlds < 0:
            raise ConfigError(f"n_fixed_worlds must be >= 0, got {self.n_fixed_worlds}")
        # Surface bad component values as config errors at load time.
        try:
            self.world_spec()
            self.to_train_config()
        except (ValidationError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    # --- derived component configs -------------------------------------------

    def parsed_schema(self) -> AttributeSchema | None:
        if not self.schema:
            if self.optional_attributes:
                raise ConfigError("optional_attributes requires an explicit schema")
            return None
        return parse_schema_string(self.schema, self.optional_attributes)

    def world_spec(self) -> WorldSpec:
        if self.world == "bitworld":
            return WorldSpec(kind="bitworld", n_bits=self.n_bits)
        if self.world != "generic":
            raise ConfigError(f"world must be generic or bitworld, got {self.world!r}")
        custom = self.parsed_schema()
        if custom is None:
            from .world import generic_schema

            custom = generic_schema(self.n_attributes, self.n_values)
        return WorldSpec(kind="generic", n_objects=self.n_objects, schema=custom)

    def reward_config(self) -> rewards.RewardConfig:
        return rewards.RewardConfig(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            use_rs=self.use_rs,
            include_alpha_with_rs=self.include_alpha_with_rs,
            rb_aggregation=self.rb_aggregation,
        )

    def to_train_config(self) -> trainer.TrainConfig:
        return trainer.TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            games_per_epoch=self.games_per_epoch,
            j_max=self.j_max,
            reward_config=self.reward_config(),
            oracle_config=oracle.OracleConfig(noise_rate=self.noise_rate, seed=self.oracle_seed),
            guesser_config=guesser.GuesserConfig(mode=self.guesser_mode, softness=self.softness),
            world_spec=self.world_spec(),
            baseline_decay=self.baseline_decay,
            master_seed=self.master_seed,
            temperature=self.temperature,
            stop_enabled=self.stop_enabled,
            per_round_shaping=self.per_round_shaping,
            n_fixed_worlds=self.n_fixed_worlds,
        )

    def rollout_config(self) -> trainer.RolloutConfig:
        return self.to_train_config().rollout_config()

    # --- provenance -----------------------------------------------------------

    def canonical_text(self) -> str:
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_schema_string(text: str, optional_csv: str = "") -> AttributeSchema:
    """Parse 'name:v1|v2;name2:u1|u2' into a schema."""
    mapping: dict[str, list[str]] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"schema entry {part!r} is missing ':'")
        name, values = part.split(":", 1)
        mapping[name.strip()] = [v.strip() for v in values.split("|") if v.strip()]
    optional = [a.strip() for a in optional_csv.split(",") if a.strip()]
    try:
        return make_schema(mapping, optional)
    except ValidationError as exc:
        raise ConfigError(f"bad schema string: {exc}") from exc


def _coerce(key: str, raw) -> object:
    if key not in CONFIG_KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    target, _ = CONFIG_KEYS[key]
    if isinstance(raw, str):
        try:
            if target is bool:
                return _parse_bool(raw)
            return target(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    if target is float and isinstance(raw, int) and not isinstance(raw, bool):
        return float(raw)
    if not isinstance(raw, target) or (target is int and isinstance(raw, bool)):
        raise ConfigError(f"key {key!r} expects {target.__name__}, got {type(raw).__name__}")
    return raw


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    values = {key: _coerce(key, raw) for key, raw in mapping.items()}
    return ExperimentConfig(**values)


def parse_key_value_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def load_config(path, overrides: list[str] | None = None) -> ExperimentConfig:
    """Read a key=value or JSON config file and apply --set overrides."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(mapping, dict):
            raise ConfigError(f"config {path} must be a JSON object")
    else:
        mapping = parse_key_value_text(text)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        mapping[key.strip()] = value.strip()
    return config_from_mapping(mapping)
