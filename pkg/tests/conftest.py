"""Shared builders for small hand-checked worlds."""

import pytest

from splitq.world import AttributeSchema, GameInstance, ObjectSpec, make_schema


@pytest.fixture
def color_schema() -> AttributeSchema:
    return make_schema({"color": ["red", "blue"]})


def build_game(schema: AttributeSchema, assignments: list[dict], target_id: int = 0, seed: int = 0) -> GameInstance:
    objects = tuple(ObjectSpec(i, dict(a)) for i, a in enumerate(assignments))
    return GameInstance(schema, objects, target_id, seed)


@pytest.fixture
def four_color_game() -> GameInstance:
    """Three red objects and one blue; target is the blue one."""
    schema = make_schema({"color": ["red", "blue"]})
    return build_game(
        schema,
        [{"color": "red"}, {"color": "red"}, {"color": "red"}, {"color": "blue"}],
        target_id=3,
    )
