from fractions import Fraction

import numpy as np
import pytest

from trustcheck.checkers import bounded as to_test
from trustcheck.engine.prob import ProbEngine
from trustcheck.engine.semantics import Evaluator
from trustcheck.engine.synthesis import DeclaredStrategies, HistoryPreferences, Synthesizer, check_direct, run_pipeline
from trustcheck.errors import EvaluationError, FragmentError, ModelError, UndefinedBeliefError
from trustcheck.logic.formula import to_text
from trustcheck.logic.parser import parse_formula
from trustcheck.model.asmas import FinitePath
from trustcheck.model.generate import FormulaSampler, random_model
from trustcheck.model.loader import load_shipped
from trustcheck.settings import Settings


@pytest.fixture(scope="module")
def fixture():
    model = load_shipped("trust_game")
    synthesizer = Synthesizer(model)
    return {
        "model": model,
        "checker": to_test.BoundedChecker(model, HistoryPreferences(model, synthesizer), synthesizer),
    }


@pytest.mark.parametrize(
    "formula,at,expected",
    [
        ("CT{Alice,Bob}>=1 [ X (aBob=share) ]", "s0 s2 s5 s12", True),
        ("DT{Alice,Bob}>=? [ X (aBob=share) ]", "s0 s2 s5 s12", Fraction(1, 2)),
        ("B{Alice}>=? [ X (aBob=share) ]", "s0 s2 s5 s12 s19", Fraction(3, 8)),
        ("B{Bob}>0.7 [ activeAlice ]", "s0 s1 s3 s8", True),
    ],
)
def test_bounded_matches_direct(fixture, formula, at, expected):
    model = fixture["model"]
    f = parse_formula(formula, model)
    path = model.path_from_ids(at)
    assert fixture["checker"].check(f, path) == expected
    assert check_direct(model, f, path) == expected
    if not isinstance(expected, bool):
        return
    assert run_pipeline(model, f, Settings(), path).verdict == expected


def test_local_belief(fixture):
    model = fixture["model"]
    system = to_test.ExpandedSystem(model, ProbEngine(model))
    state = system.embed(model.path_from_ids("s0 s1"))
    assert state.clk == 1
    assert system.reach_prob("Bob", state) == Fraction(1, 3)
    assert system.local_belief("Bob", state) == Fraction(1, 3)
    assert {s.base for s in system.obs_class("Bob", state)} == {"s1", "s2"}
    # Alice knows her own goal
    assert system.local_belief("Alice", state) == Fraction(1)
    assert system.representative(state) == model.path_from_ids("s0 s1")


def test_expand(fixture):
    model = fixture["model"]
    system = to_test.expand(model, parse_formula("CT{Alice,Bob}>=1 [ X (aBob=share) ]", model))
    assert len(system.levels) == 3
    # s0 may stay silent or move to either goal of Alice
    assert sorted(s.base for s in system.level(1)) == ["s0", "s1", "s2"]
    assert system.to_text().startswith("expanded system of trust_game: 3 level(s)")

    with pytest.raises(ModelError):
        system.embed(model.path_from_ids("s1 s3"))


def test_outside_fragment(fixture):
    model = fixture["model"]
    with pytest.raises(FragmentError):
        fixture["checker"].check(parse_formula("P>=1 [ F profitBob ]", model))
    with pytest.raises(FragmentError):
        to_test.expand(model, parse_formula("P>=1 [ G turnBob ]", model))


def _random_path(model, rng: np.random.Generator, length: int) -> FinitePath:
    starts = model.initial_paths()
    path = starts[int(rng.integers(len(starts)))]
    while len(path) < length:
        steps = model.steps_from(path.last)
        step, target = steps[int(rng.integers(len(steps)))]
        path = path.extend(step, target)
    return path


def _outcome(run):
    try:
        return run()
    except (EvaluationError, UndefinedBeliefError) as e:
        return type(e).__name__


@pytest.mark.parametrize("seed", range(25))
def test_bounded_matches_direct_on_random_models(seed):
    model = random_model(300 + seed, 3 + seed % 8, partial=seed % 2 == 0)
    strategies = DeclaredStrategies(model)
    checker = to_test.BoundedChecker(model, strategies=strategies)
    direct = Evaluator(model, strategies=strategies)
    sampler = FormulaSampler(seed)
    rng = np.random.default_rng(seed)
    for _ in range(8):
        f = parse_formula(sampler.state(int(rng.integers(4))), model)
        at = _random_path(model, rng, int(rng.integers(1, 4)))
        assert _outcome(lambda: checker.check(f, at)) == _outcome(lambda: direct.holds(at, f)), f"{to_text(f)} at {at}"
