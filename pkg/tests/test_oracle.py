import dataclasses

import numpy as np
import pytest

from splitq.oracle import OracleConfig, answer, answer_for_target
from splitq.world import (
    UNDEFINED,
    Answer,
    ObjectSpec,
    Question,
    SchemaMismatchError,
    make_bitworld,
)


def obj(**assignment):
    return ObjectSpec(0, assignment)


class TestAnswer:
    def test_match_is_yes(self):
        assert answer(Question("color", "red"), obj(color="red")) is Answer.YES

    def test_mismatch_is_no(self):
        assert answer(Question("color", "red"), obj(color="blue")) is Answer.NO

    def test_undefined_is_na(self):
        assert answer(Question("size", "big"), obj(size=UNDEFINED)) is Answer.NA

    def test_missing_attribute_raises(self):
        with pytest.raises(SchemaMismatchError):
            answer(Question("shape", "round"), obj(color="red"))

    def test_noise_free_is_pure(self):
        o = obj(color="red", size="big")
        q = Question("size", "big")
        assert all(answer(q, o) is Answer.YES for _ in range(10))

    def test_exactly_one_yes_per_defined_attribute(self):
        game = make_bitworld(3, seed=2)
        for o in game.objects:
            for name, values in game.schema.attributes:
                yeses = sum(answer(Question(name, v), o) is Answer.YES for v in values)
                assert yeses == 1


class TestNoise:
    def test_full_noise_flips_yes_to_no(self):
        cfg = OracleConfig(noise_rate=1.0)
        rng = np.random.default_rng(0)
        assert answer(Question("color", "red"), obj(color="red"), cfg, rng) is Answer.NO
        assert answer(Question("color", "red"), obj(color="blue"), cfg, rng) is Answer.YES

    def test_na_never_flips(self):
        cfg = OracleConfig(noise_rate=1.0)
        rng = np.random.default_rng(0)
        assert answer(Question("size", "big"), obj(size=UNDEFINED), cfg, rng) is Answer.NA

    def test_noise_is_reproducible(self):
        cfg = OracleConfig(noise_rate=0.5)
        q = Question("color", "red")
        seq1 = [answer(q, obj(color="red"), cfg, np.random.default_rng(7)) for _ in range(1)]
        seq2 = [answer(q, obj(color="red"), cfg, np.random.default_rng(7)) for _ in range(1)]
        assert seq1 == seq2

    def test_noise_requires_rng(self):
        with pytest.raises(ValueError):
            answer(Question("color", "red"), obj(color="red"), OracleConfig(noise_rate=0.5))

    def test_noise_rate_validated(self):
        with pytest.raises(ValueError):
            OracleConfig(noise_rate=1.5)
        with pytest.raises(ValueError):
            OracleConfig(noise_rate=-0.1)

    def test_config_immutable(self):
        cfg = OracleConfig()
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.noise_rate = 0.2


class TestAnswerForTarget:
    @pytest.fixture
    def game_target_5(self):
        return dataclasses.replace(make_bitworld(3), target_id=5)

    def test_bit0_of_five_is_one(self, game_target_5):
        assert answer_for_target(Question("bit_0", "1"), game_target_5) is Answer.YES

    def test_bit1_of_five_is_zero(self, game_target_5):
        assert answer_for_target(Question("bit_1", "1"), game_target_5) is Answer.NO

    def test_matches_direct_object_answer(self, game_target_5):
        q = Question("bit_2", "0")
        direct = answer(q, game_target_5.objects[5])
        assert answer_for_target(q, game_target_5) == direct

    def test_full_noise_inverts_truth(self, game_target_5):
        cfg = OracleConfig(noise_rate=1.0)
        got = answer_for_target(Question("bit_0", "1"), game_target_5, cfg, np.random.default_rng(1))
        assert got is Answer.NO
