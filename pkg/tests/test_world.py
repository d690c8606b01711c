import dataclasses

import pytest

from splitq.world import (
    UNDEFINED,
    Answer,
    AttributeSchema,
    GameInstance,
    ObjectSpec,
    Question,
    ValidationError,
    WorldSpec,
    enumerate_questions,
    game_from_dict,
    game_to_dict,
    generate_world,
    generic_schema,
    make_bitworld,
    make_schema,
    truthful_answer,
    validate_question,
)

from conftest import build_game


def check_instance(game: GameInstance) -> None:
    """Independent validator for generated instances."""
    n = len(game.objects)
    assert n >= 2
    assert 0 <= game.target_id < n
    assert [o.id for o in game.objects] == list(range(n))
    for obj in game.objects:
        assert set(obj.assignment) == set(game.schema.names)
        for name, value in obj.assignment.items():
            if value != UNDEFINED:
                assert value in game.schema.values(name)
            else:
                assert name in game.schema.optional
    assert any(o.assignment != game.objects[0].assignment for o in game.objects[1:])


class TestSchema:
    def test_duplicate_attribute_names_rejected(self):
        with pytest.raises(ValidationError):
            AttributeSchema((("a", ("x", "y")), ("a", ("u", "v"))))

    def test_duplicate_values_rejected(self):
        with pytest.raises(ValidationError):
            make_schema({"a": ["x", "x"]})

    def test_single_value_rejected(self):
        with pytest.raises(ValidationError):
            make_schema({"a": ["x"]})

    def test_undefined_not_allowed_as_value(self):
        with pytest.raises(ValidationError):
            make_schema({"a": ["x", UNDEFINED]})

    def test_optional_must_name_real_attributes(self):
        with pytest.raises(ValidationError):
            make_schema({"a": ["x", "y"]}, optional=["b"])

    def test_schema_is_immutable(self, color_schema):
        with pytest.raises(dataclasses.FrozenInstanceError):
            color_schema.attributes = ()

    def test_values_lookup(self, color_schema):
        assert color_schema.values("color") == ("red", "blue")
        with pytest.raises(ValidationError):
            color_schema.values("shape")


class TestGenerateWorld:
    def test_two_object_shape(self, color_schema):
        game = generate_world(0, 2, color_schema)
        assert len(game.objects) == 2
        assert all(o.assignment["color"] in ("red", "blue") for o in game.objects)
        assert game.target_id in (0, 1)

    def test_deterministic(self, color_schema):
        a = generate_world(42, 6, color_schema)
        b = generate_world(42, 6, color_schema)
        assert a == b

    def test_different_seeds_differ(self, color_schema):
        games = {
            tuple(o.assignment["color"] for o in generate_world(s, 8, color_schema).objects)
            for s in range(20)
        }
        assert len(games) > 1

    def test_sixteen_objects_all_defined(self):
        # derived check: run the generated instance through the validator
        game = generate_world(7, 16, generic_schema(4, 4))
        check_instance(game)
        for obj in game.objects:
            assert len(obj.assignment) == 4
            assert UNDEFINED not in obj.assignment.values()

    def test_rejects_too_few_objects(self, color_schema):
        with pytest.raises(ValidationError):
            generate_world(0, 1, color_schema)

    def test_rejects_empty_schema(self):
        schema = AttributeSchema(())
        with pytest.raises(ValidationError):
            generate_world(0, 4, schema)

    def test_rejects_unknown_target_rule(self, color_schema):
        with pytest.raises(ValidationError):
            generate_world(0, 4, color_schema, target_rule="first")

    def test_never_degenerate(self, color_schema):
        # 2 objects over a 2-value attribute collide half the time; the
        # resample loop must always deliver a non-degenerate instance.
        for seed in range(200):
            check_instance(generate_world(seed, 2, color_schema))

    def test_optional_attribute_can_be_undefined(self):
        schema = make_schema({"size": ["s", "m", "l"], "color": ["red", "blue"]}, optional=["size"])
        seen_undefined = False
        for seed in range(50):
            game = generate_world(seed, 8, schema)
            check_instance(game)
            for obj in game.objects:
                assert obj.assignment["color"] != UNDEFINED
                seen_undefined |= obj.assignment["size"] == UNDEFINED
        assert seen_undefined


class TestGameInstance:
    def test_degenerate_rejected(self, color_schema):
        with pytest.raises(ValidationError):
            build_game(color_schema, [{"color": "red"}, {"color": "red"}])

    def test_target_out_of_range(self, color_schema):
        with pytest.raises(ValidationError):
            build_game(color_schema, [{"color": "red"}, {"color": "blue"}], target_id=2)

    def test_ids_must_be_in_order(self, color_schema):
        objects = (ObjectSpec(1, {"color": "red"}), ObjectSpec(0, {"color": "blue"}))
        with pytest.raises(ValidationError):
            GameInstance(color_schema, objects, 0, 0)

    def test_missing_attribute_rejected(self, color_schema):
        with pytest.raises(ValidationError):
            build_game(color_schema, [{"color": "red"}, {}])

    def test_unknown_value_rejected(self, color_schema):
        with pytest.raises(ValidationError):
            build_game(color_schema, [{"color": "red"}, {"color": "green"}])


class TestBitworld:
    def test_one_bit_enumeration(self):
        game = make_bitworld(1)
        assert [o.assignment for o in game.objects] == [{"bit_0": "0"}, {"bit_0": "1"}]

    def test_three_bits_split(self):
        game = make_bitworld(3)
        assert len(game.objects) == 8
        answers = [truthful_answer(o, Question("bit_2", "1")) for o in game.objects]
        assert answers.count(Answer.YES) == 4
        assert answers.count(Answer.NO) == 4
        # bit_i of object j is bit i of j's binary representation
        for j, obj in enumerate(game.objects):
            for i in range(3):
                assert obj.assignment[f"bit_{i}"] == str((j >> i) & 1)

    def test_every_subcube_splits_evenly(self):
        # brute force over all 16 objects, all sub-cubes, and all free bits
        bits = 4
        game = make_bitworld(bits)
        for fixed_mask in range(1 << bits):
            fixed = [i for i in range(bits) if fixed_mask >> i & 1]
            free = [i for i in range(bits) if i not in fixed]
            for assignment_bits in range(1 << len(fixed)):
                members = [
                    o for o in game.objects
                    if all(
                        o.assignment[f"bit_{b}"] == str(assignment_bits >> pos & 1)
                        for pos, b in enumerate(fixed)
                    )
                ]
                for b in free:
                    yes = sum(
                        truthful_answer(o, Question(f"bit_{b}", "1")) is Answer.YES
                        for o in members
                    )
                    assert yes * 2 == len(members)

    def test_seed_controls_target(self):
        targets = {make_bitworld(4, seed=s).target_id for s in range(30)}
        assert len(targets) > 1
        assert make_bitworld(4, seed=5) == make_bitworld(4, seed=5)

    @pytest.mark.parametrize("bad", [0, -1, 21])
    def test_bits_out_of_range(self, bad):
        with pytest.raises(ValidationError):
            make_bitworld(bad)


class TestEnumerateQuestions:
    def test_color_enumeration(self, color_schema):
        assert enumerate_questions(color_schema) == (
            Question("color", "red"),
            Question("color", "blue"),
        )

    def test_bitworld_has_four_questions(self):
        assert len(enumerate_questions(make_bitworld(2).schema)) == 4

    def test_enumeration_order(self):
        schema = make_schema({"a": ["x", "y", "z"], "b": ["u", "v"]})
        assert enumerate_questions(schema) == (
            Question("a", "x"),
            Question("a", "y"),
            Question("a", "z"),
            Question("b", "u"),
            Question("b", "v"),
        )

    def test_length_is_total_value_count(self):
        for n_attrs in (1, 2, 5):
            for n_vals in (2, 3, 4):
                schema = generic_schema(n_attrs, n_vals)
                assert len(enumerate_questions(schema)) == n_attrs * n_vals

    def test_validate_question(self, color_schema):
        validate_question(color_schema, Question("color", "red"))
        with pytest.raises(ValidationError):
            validate_question(color_schema, Question("color", "green"))
        with pytest.raises(ValidationError):
            validate_question(color_schema, Question("color", UNDEFINED))


class TestWorldView:
    def test_answer_codes_match_scalar_answers(self):
        # the cached table must agree with the per-object answer rule
        schema = make_schema({"size": ["s", "m"], "color": ["red", "blue"]}, optional=["size"])
        game = generate_world(3, 10, schema)
        view = game.view
        for j, question in enumerate(view.questions):
            for i, obj in enumerate(game.objects):
                assert view.answer_codes[i, j] == int(truthful_answer(obj, question))

    def test_codes_are_read_only(self):
        view = make_bitworld(2).view
        with pytest.raises(ValueError):
            view.answer_codes[0, 0] = 1

    def test_schema_mismatch_raises(self):
        obj = ObjectSpec(0, {"color": "red"})
        with pytest.raises(ValidationError):
            truthful_answer(obj, Question("shape", "round"))


class TestSerialization:
    def test_roundtrip(self):
        game = generate_world(11, 6, generic_schema(3, 3))
        assert game_from_dict(game_to_dict(game)) == game

    def test_roundtrip_bitworld(self):
        game = make_bitworld(3, seed=9)
        assert game_from_dict(game_to_dict(game)) == game

    def test_version_checked(self):
        doc = game_to_dict(make_bitworld(2))
        doc["format_version"] = 99
        with pytest.raises(ValidationError):
            game_from_dict(doc)


class TestWorldSpec:
    def test_generic_spec(self):
        spec = WorldSpec(kind="generic", n_objects=8, schema=generic_schema(2, 3))
        game = spec.instantiate(4)
        assert game.n_objects == 8
        check_instance(game)

    def test_bitworld_spec(self):
        spec = WorldSpec(kind="bitworld", n_bits=2)
        assert spec.instantiate(1).n_objects == 4

    def test_bad_kind(self):
        with pytest.raises(ValidationError):
            WorldSpec(kind="maze")
