from collections import defaultdict
from fractions import Fraction

import pytest

from trustcheck.engine import prob as to_test
from trustcheck.engine.semantics import Evaluator
from trustcheck.engine.synthesis import Synthesizer
from trustcheck.errors import ModelError
from trustcheck.logic.parser import parse_formula
from trustcheck.model.asmas import Cognitive, FinitePath
from trustcheck.model.generate import random_model
from trustcheck.model.loader import load_shipped


@pytest.fixture(scope="module")
def fixture():
    model = load_shipped("trust_game")
    synthesizer = Synthesizer(model)
    return {
        "model": model,
        "engine": to_test.ProbEngine(model),
        "cross_type_engine": to_test.ProbEngine(model, strategies=synthesizer, cross_type=True),
    }


def test_path_probability(fixture):
    model, engine = fixture["model"], fixture["engine"]
    assert engine.path_probability("Alice", model.path_from_ids("s0 s1 s3 s8 s15 s24")) == Fraction(9, 80)
    assert engine.path_probability("Alice", model.path_from_ids("s0 s2 s5 s12 s19 s32")) == Fraction(27, 80)
    # Alice prefers Bob to keep after an opportunist investment
    assert engine.path_probability("Alice", model.path_from_ids("s0 s1 s4 s10 s17")) == Fraction(0)
    assert engine.path_probability("Bob", model.path_from_ids("s0 s1 s3 s8 s15 s24")) == Fraction(1, 10)
    assert engine.path_probability("Bob", model.path_from_ids("s0 s2 s5 s12 s19 s32")) == Fraction(3, 5)


def test_cross_type_weighting(fixture):
    model, engine = fixture["model"], fixture["cross_type_engine"]
    assert engine.path_probability("Bob", model.path_from_ids("s0 s1 s3 s8 s15 s24")) == Fraction(1, 10)
    assert engine.path_probability("Bob", model.path_from_ids("s0 s2 s5 s12 s19 s32")) == Fraction(3, 5)
    # an investor believing Alice is active never keeps
    assert engine.path_probability("Bob", model.path_from_ids("s0 s2 s5 s12 s20")) == Fraction(0)
    assert fixture["engine"].path_probability("Bob", model.path_from_ids("s0 s2 s5 s12 s20")) == Fraction(3, 5)


def test_aux_transition(fixture):
    model, engine = fixture["model"], fixture["engine"]
    path = model.path_from_ids("s0 s2")
    assert engine.aux_transition("Alice", path, Cognitive("Bob", "g", frozenset({"investor"})), "s5") == Fraction(1, 2)
    assert engine.aux_transition("Bob", path, Cognitive("Bob", "g", frozenset({"investor"})), "s5") == Fraction(1)
    assert engine.aux_transition("Bob", "s0", Cognitive("Alice", "g", frozenset({"active"})), "s2") == Fraction(2, 3)
    with pytest.raises(ModelError):
        engine.aux_transition("Bob", "s0", Cognitive("Alice", "g", frozenset({"active"})), "s1")


def test_temporal_horizon():
    assert to_test.temporal_horizon(parse_formula("p")) == 0
    assert to_test.temporal_horizon(parse_formula("X X p")) == 2
    assert to_test.temporal_horizon(parse_formula("p U<=2 X q")) == 3
    assert to_test.temporal_horizon(parse_formula("X p & F<=3 q")) == 3
    assert to_test.temporal_horizon(parse_formula("F p")) is None
    assert to_test.is_path_formula(parse_formula("!X p"))
    assert not to_test.is_path_formula(parse_formula("P>=1 [ X p ]"))


def test_prob_path_formula(fixture):
    model = fixture["model"]
    evaluator = Evaluator(model)
    s3 = FinitePath.single("s3")
    assert evaluator.value(s3, parse_formula("P=? [ X richerAliceBob ]", model)) == Fraction(7, 10)
    assert evaluator.value(s3, parse_formula("P=? [ F richerAliceBob ]", model)) == Fraction(7, 10)
    assert evaluator.value(s3, parse_formula("P=? [ G !richerAliceBob ]", model)) == Fraction(3, 10)
    assert evaluator.value(s3, parse_formula("P=? [ F<=1 turnBob ]", model)) == Fraction(3, 10)
    assert evaluator.value(s3, parse_formula("P=? [ X X aAlice=invest ]", model)) == Fraction(3, 10)
    s15 = FinitePath.single("s15")
    assert evaluator.value(s15, parse_formula("P=? [ investorBob U<=1 profitBob ]", model)) == Fraction(1)
    assert evaluator.value(s15, parse_formula("P=? [ !(X aBob=share) ]", model)) == Fraction(0)


@pytest.mark.parametrize("seed", range(20))
def test_mass_conservation(seed):
    model = random_model(seed, 3 + seed % 8, partial=seed % 2 == 1)
    engine = to_test.ProbEngine(model)
    for observer in model.agents:
        mass: dict = defaultdict(Fraction)
        # mass of the prefixes at which a type is available
        enabled: dict = defaultdict(Fraction)
        for path in model.enumerate_paths(4):
            types = model.path_types(observer, path)
            pr = engine.path_probability(observer, path)
            mass[types] += pr
            if len(path) < 4:
                for ttype in {model.classify_transition(observer, path.last, step) for step, _ in model.steps_from(path.last)}:
                    enabled[(types, ttype)] += pr
        assert mass[()] == 1
        for (types, ttype), expected in enabled.items():
            assert mass[types + (ttype,)] == expected, f"{observer} after {[str(t) for t in types]} then {ttype}"
