"""Synthetic object worlds for attribute-guessing games.

A world is an ordered list of objects with categorical attributes plus a
hidden target index. Questions are (attribute, value) equality predicates;
the question space is the enumeration of all such pairs in schema order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

# Sentinel for "this attribute does not apply to this object". Never a
# queryable value and never allowed inside a schema's value list.
UNDEFINED = "<undefined>"

MAX_BITWORLD_BITS = 20

TARGET_UNIFORM_RANDOM = "uniform_random"

WORLD_FORMAT_VERSION = 1


class ValidationError(ValueError):
    """Invalid schema, world parameters, config, or serialized document."""


class SchemaMismatchError(ValidationError):
    """A question refers to an attribute the object does not carry."""


class Answer(IntEnum):
    NO = 0
    YES = 1
    NA = 2


@dataclass(frozen=True)
class Question:
    """An (attribute == value) predicate about a single object."""

    attribute: str
    value: str


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered categorical attributes with ordered value lists.

    ``optional`` names attributes that may be UNDEFINED on generated
    objects; all other attributes always carry one of their listed values.
    """

    attributes: tuple[tuple[str, tuple[str, ...]], ...]
    optional: frozenset[str] = frozenset()

    def __post_init__(self):
        names = [name for name, _ in self.attributes]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate attribute names in schema: {names}")
        for name, values in self.attributes:
            if len(values) < 2:
                raise ValidationError(f"attribute {name!r} needs >= 2 values, got {values}")
            if len(set(values)) != len(values):
                raise ValidationError(f"duplicate values for attribute {name!r}: {values}")
            if UNDEFINED in values:
                raise ValidationError(f"attribute {name!r} lists the reserved UNDEFINED value")
        unknown = self.optional - set(names)
        if unknown:
            raise ValidationError(f"optional flags for unknown attributes: {sorted(unknown)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.attributes)

    def values(self, attribute: str) -> tuple[str, ...]:
        for name, values in self.attributes:
            if name == attribute:
                return values
        raise SchemaMismatchError(f"unknown attribute {attribute!r}")

    def __len__(self) -> int:
        return len(self.attributes)


def make_schema(mapping: Mapping[str, Iterable[str]], optional: Iterable[str] = ()) -> AttributeSchema:
    """Build a schema from a name -> values mapping (insertion order kept)."""
    attrs = tuple((name, tuple(values)) for name, values in mapping.items())
    return AttributeSchema(attrs, frozenset(optional))


def generic_schema(n_attributes: int = 4, n_values: int = 4) -> AttributeSchema:
    """Template schema with attributes attr0..attrA and values v0..vV."""
    if n_attributes < 1 or n_values < 2:
        raise ValidationError(
            f"generic schema needs >= 1 attribute and >= 2 values, got {n_attributes}x{n_values}"
        )
    return AttributeSchema(
        tuple(
            (f"attr{i}", tuple(f"v{j}" for j in range(n_values)))
            for i in range(n_attributes)
        )
    )


@dataclass(frozen=True)
class ObjectSpec:
    """One object: integer id plus one value per schema attribute."""

    id: int
    assignment: dict[str, str]


def truthful_answer(obj: ObjectSpec, question: Question) -> Answer:
    """Noise-free answer to the predicate for one object.

    YES iff the object's value matches, NA when the attribute is UNDEFINED
    on the object, NO otherwise.
    """
    try:
        value = obj.assignment[question.attribute]
    except KeyError:
        raise SchemaMismatchError(
            f"object {obj.id} has no attribute {question.attribute!r}"
        ) from None
    if value == UNDEFINED:
        return Answer.NA
    return Answer.YES if value == question.value else Answer.NO


def enumerate_questions(schema: AttributeSchema) -> tuple[Question, ...]:
    """All (attribute, value) predicates in schema order. UNDEFINED excluded."""
    return tuple(
        Question(name, value) for name, values in schema.attributes for value in values
    )


def validate_question(schema: AttributeSchema, question: Question) -> None:
    if question.value == UNDEFINED or question.value not in schema.values(question.attribute):
        raise ValidationError(
            f"value {question.value!r} not queryable for attribute {question.attribute!r}"
        )


@dataclass(frozen=True)
class WorldView:
    """Public view of a game: schema and objects, no target.

    Carries cached numeric tables used by the policy and guesser; the
    arrays are read-only and derived purely from public information.
    """

    schema: AttributeSchema
    objects: tuple[ObjectSpec, ...]

    @cached_property
    def questions(self) -> tuple[Question, ...]:
        return enumerate_questions(self.schema)

    @cached_property
    def question_index(self) -> dict[Question, int]:
        return {q: i for i, q in enumerate(self.questions)}

    @cached_property
    def answer_codes(self) -> np.ndarray:
        """Truthful Answer codes, shape (n_objects, n_questions), int8."""
        n = len(self.objects)
        codes = np.full((n, len(self.questions)), int(Answer.NO), dtype=np.int8)
        col = 0
        for name, values in self.schema.attributes:
            vals = np.array([obj.assignment[name] for obj in self.objects])
            undef = vals == UNDEFINED
            for value in values:
                column = codes[:, col]
                column[vals == value] = int(Answer.YES)
                column[undef] = int(Answer.NA)
                col += 1
        codes.setflags(write=False)
        return codes

    @cached_property
    def is_yes(self) -> np.ndarray:
        out = self.answer_codes == int(Answer.YES)
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class GameInstance:
    """One game: schema, objects, hidden target, and the generating seed."""

    schema: AttributeSchema
    objects: tuple[ObjectSpec, ...]
    target_id: int
    seed: int

    def __post_init__(self):
        n = len(self.objects)
        if n < 2:
            raise ValidationError(f"a game needs >= 2 objects, got {n}")
        for i, obj in enumerate(self.objects):
            if obj.id != i:
                raise ValidationError(f"object ids must be 0..{n - 1} in order, got {obj.id} at {i}")
            if set(obj.assignment) != set(self.schema.names):
                raise ValidationError(
                    f"object {i} assignment keys {sorted(obj.assignment)} do not match schema"
                )
            for name, value in obj.assignment.items():
                if value != UNDEFINED and value not in self.schema.values(name):
                    raise ValidationError(
                        f"object {i} has unknown value {value!r} for attribute {name!r}"
                    )
        if not (0 <= self.target_id < n):
            raise ValidationError(f"target_id {self.target_id} out of range 0..{n - 1}")
        first = self.objects[0].assignment
        if all(obj.assignment == first for obj in self.objects[1:]):
            raise ValidationError("degenerate game: all objects identical")

    @cached_property
    def view(self) -> WorldView:
        return WorldView(self.schema, self.objects)

    @property
    def n_objects(self) -> int:
        return len(self.objects)


def generate_world(
    seed: int,
    n_objects: int,
    schema: AttributeSchema,
    target_rule: str = TARGET_UNIFORM_RANDOM,
) -> GameInstance:
    """Draw a game instance uniformly at random; pure function of its arguments.

    Attribute values are drawn uniformly per object per attribute (optional
    attributes include UNDEFINED as one extra equally likely choice). Draws
    are repeated wholesale if all objects come out identical, so the result
    always satisfies the non-degeneracy invariant. The target is drawn
    uniformly after the objects.
    """
    if n_objects < 2:
        raise ValidationError(f"n_objects must be >= 2, got {n_objects}")
    if len(schema) == 0:
        raise ValidationError("schema must have at least one attribute")
    if target_rule != TARGET_UNIFORM_RANDOM:
        raise ValidationError(f"unknown target rule {target_rule!r}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    choice_lists = [
        values + (UNDEFINED,) if name in schema.optional else values
        for name, values in schema.attributes
    ]
    while True:
        columns = [
            choices[i] for choices in choice_lists
            for i in rng.integers(len(choices), size=n_objects)
        ]
        # columns is flattened attribute-major; regroup per object
        n_attrs = len(choice_lists)
        names = schema.names
        objects = tuple(
            ObjectSpec(i, {names[a]: columns[a * n_objects + i] for a in range(n_attrs)})
            for i in range(n_objects)
        )
        if any(obj.assignment != objects[0].assignment for obj in objects[1:]):
            break
    target = int(rng.integers(n_objects))
    return GameInstance(schema, objects, target, seed)


def make_bitworld(n_bits: int, seed: int = 0) -> GameInstance:
    """World of 2^n_bits objects indexed by binary attributes.

    Object j's bit_i attribute equals bit i of j, so within any sub-cube
    every free bit question splits the objects exactly in half.
    """
    if not (1 <= n_bits <= MAX_BITWORLD_BITS):
        raise ValidationError(f"n_bits must be in 1..{MAX_BITWORLD_BITS}, got {n_bits}")
    schema = AttributeSchema(
        tuple((f"bit_{i}", ("0", "1")) for i in range(n_bits))
    )
    n = 1 << n_bits
    objects = tuple(
        ObjectSpec(j, {f"bit_{i}": str((j >> i) & 1) for i in range(n_bits)})
        for j in range(n)
    )
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    target = int(rng.integers(n))
    return GameInstance(schema, objects, target, seed)


@dataclass(frozen=True)
class WorldSpec:
    """Declarative recipe for a family of game instances."""

    kind: str = "generic"  # "generic" | "bitworld"
    n_objects: int = 16
    schema: AttributeSchema | None = None
    n_bits: int = 3

    def __post_init__(self):
        if self.kind not in ("generic", "bitworld"):
            raise ValidationError(f"unknown world kind {self.kind!r}")
        if self.kind == "generic" and self.n_objects < 2:
            raise ValidationError(f"n_objects must be >= 2, got {self.n_objects}")
        if self.kind == "bitworld" and not (1 <= self.n_bits <= MAX_BITWORLD_BITS):
            raise ValidationError(f"n_bits must be in 1..{MAX_BITWORLD_BITS}, got {self.n_bits}")

    def resolved_schema(self) -> AttributeSchema:
        if self.kind == "bitworld":
            return AttributeSchema(tuple((f"bit_{i}", ("0", "1")) for i in range(self.n_bits)))
        return self.schema if self.schema is not None else generic_schema()

    def instantiate(self, seed: int) -> GameInstance:
        if self.kind == "bitworld":
            return make_bitworld(self.n_bits, seed=seed)
        return generate_world(seed, self.n_objects, self.resolved_schema())


# --- serialization -----------------------------------------------------------


def schema_to_dict(schema: AttributeSchema) -> dict:
    return {
        "attributes": [[name, list(values)] for name, values in schema.attributes],
        "optional": sorted(schema.optional),
    }


def schema_from_dict(doc: dict) -> AttributeSchema:
    try:
        attrs = tuple((name, tuple(values)) for name, values in doc["attributes"])
        optional = frozenset(doc.get("optional", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed schema document: {exc}") from exc
    return AttributeSchema(attrs, optional)


def game_to_dict(game: GameInstance) -> dict:
    return {
        "format_version": WORLD_FORMAT_VERSION,
        "schema": schema_to_dict(game.schema),
        "objects": [dict(obj.assignment) for obj in game.objects],
        "target_id": game.target_id,
        "seed": game.seed,
    }


def game_from_dict(doc: dict) -> GameInstance:
    version = doc.get("format_version")
    if version != WORLD_FORMAT_VERSION:
        raise ValidationError(f"unsupported world format_version {version!r}")
    schema = schema_from_dict(doc["schema"])
    objects = tuple(ObjectSpec(i, dict(a)) for i, a in enumerate(doc["objects"]))
    return GameInstance(schema, objects, int(doc["target_id"]), int(doc["seed"]))
