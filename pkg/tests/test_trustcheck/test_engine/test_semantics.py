import importlib.resources
import json
from fractions import Fraction

import pytest

from trustcheck.engine import semantics as to_test
from trustcheck.engine.prob import ProbEngine
from trustcheck.engine.synthesis import DeclaredStrategies, HistoryPreferences, Synthesizer
from trustcheck.errors import EvaluationError, UnsupportedFormulaError
from trustcheck.logic.formula import Atom, CapabilityOp, IntentionOp, Prob, to_text
from trustcheck.logic.parser import parse_formula
from trustcheck.model.asmas import FinitePath
from trustcheck.model.generate import random_model
from trustcheck.model.loader import load_model_dict, load_shipped


@pytest.fixture(scope="module")
def fixture():
    model = load_shipped("trust_game")
    synthesizer = Synthesizer(model)
    prob = ProbEngine(model, HistoryPreferences(model, synthesizer), synthesizer)
    return {
        "model": model,
        "evaluator": to_test.Evaluator(model, prob, synthesizer),
        "belief_state_evaluator": to_test.Evaluator(model, prob, synthesizer, to_test.EvalMode.belief_state),
    }


def _at(fixture, ids: str) -> FinitePath:
    return fixture["model"].path_from_ids(ids)


def _formula(fixture, text: str):
    return parse_formula(text, fixture["model"])


def test_competence_trust(fixture):
    evaluator, at = fixture["evaluator"], _at(fixture, "s0 s2 s5 s12")
    assert evaluator.holds(at, _formula(fixture, "CT{Alice,Bob}>=1 [ X (aBob=share) ]")) is True
    assert evaluator.evaluate(at, _formula(fixture, "CT{Alice,Bob}>=? [ X (aBob=share) ]")) == Fraction(1)
    # minimizing picks the worst legal intention of Bob
    assert evaluator.evaluate(at, _formula(fixture, "CT{Alice,Bob}<=? [ X (aBob=share) ]")) == Fraction(0)


def test_disposition_trust(fixture):
    evaluator, at = fixture["evaluator"], _at(fixture, "s0 s2 s5 s12")
    assert evaluator.evaluate(at, _formula(fixture, "DT{Alice,Bob}>=? [ X (aBob=share) ]")) == Fraction(1, 2)
    assert evaluator.holds(at, _formula(fixture, "DT{Alice,Bob}>=0.5 [ X (aBob=share) ]")) is True
    assert evaluator.holds(at, _formula(fixture, "DT{Alice,Bob}>0.5 [ X (aBob=share) ]")) is False


def test_belief(fixture):
    evaluator = fixture["evaluator"]
    at = _at(fixture, "s0 s2 s5 s12 s19")
    assert evaluator.value(at, _formula(fixture, "B{Alice}>=? [ X (aBob=share) ]")) == Fraction(3, 8)
    at = _at(fixture, "s0 s1 s3 s8")
    assert evaluator.value(at, _formula(fixture, "B{Bob}=? [ activeAlice ]")) == Fraction(6, 7)
    assert evaluator.holds(at, _formula(fixture, "B{Bob}>0.7 [ activeAlice ]")) is True


def test_belief_state_mode(fixture):
    at = _at(fixture, "s0 s2 s5 s12 s19")
    f = _formula(fixture, "B{Alice}>=? [ X (aBob=share) ]")
    assert fixture["belief_state_evaluator"].value(at, f) == Fraction(3, 8)
    b = fixture["belief_state_evaluator"].belief_state("Alice", at)
    assert b.as_dict() == {"s19": Fraction(3, 8), "s20": Fraction(1, 8), "s22": Fraction(1, 2)}
    with pytest.raises(UnsupportedFormulaError):
        fixture["belief_state_evaluator"].value(at, _formula(fixture, "B{Alice}>=? [ B{Bob}>0 [ profitBob ] ]"))


def test_dependence(fixture):
    evaluator, at = fixture["evaluator"], _at(fixture, "s0 s2 s5 s12")
    # Alice trusts Bob's competence without believing he will share
    assert evaluator.holds(at, _formula(fixture, "ST{Alice,Bob}>=1 [ X (aBob=share) ]")) is True
    assert evaluator.holds(at, _formula(fixture, "WT{Alice,Bob}>= [ X (aBob=share) ]")) is True
    assert evaluator.holds(at, _formula(fixture, "WT{Alice,Bob}<= [ X (aBob=share) ]")) is False


def test_cognitive_operators(fixture):
    evaluator, model = fixture["evaluator"], fixture["model"]
    s0 = FinitePath.single("s0")
    assert evaluator.holds(s0, _formula(fixture, "GOAL{Alice} (activeAlice | passiveAlice)")) is True
    assert evaluator.holds(s0, _formula(fixture, "GOAL{Alice} activeAlice")) is False
    assert evaluator.holds(s0, _formula(fixture, "CAP{Alice} activeAlice")) is True
    assert evaluator.holds(s0, _formula(fixture, "CAP{Alice} (activeAlice & passiveAlice)")) is False
    assert evaluator.holds(s0, _formula(fixture, "CAP{Bob} turnBob")) is False

    investor = _at(fixture, "s0 s2 s5 s12")
    opportunist = _at(fixture, "s0 s2 s6 s14")
    assert evaluator.holds(investor, _formula(fixture, "CAP{Bob} A [ X aBob=share ]")) is True
    assert evaluator.holds(opportunist, _formula(fixture, "CAP{Bob} A [ X aBob=share ]")) is True
    assert evaluator.holds(investor, _formula(fixture, "INTN{Bob} A [ X aBob=share ]")) is True
    assert evaluator.holds(opportunist, _formula(fixture, "INTN{Bob} A [ X aBob=share ]")) is False
    assert evaluator.holds(opportunist, _formula(fixture, "INTN{Bob} E [ X aBob=keep ]")) is True
    assert model.legal_intentions_at("Alice", "s0") == ()


def test_needs_cooperation(fixture):
    evaluator = fixture["evaluator"]
    s0 = FinitePath.single("s0")
    example = _formula(fixture, "ST{Bob,Alice} A [ F profitBob ]")
    assert evaluator.value(s0, _formula(fixture, "P=? [ F profitBob ]")) == Fraction(3, 5)
    assert evaluator.holds(_at(fixture, "s0 s2 s5 s12"), _formula(fixture, "CAP{Bob} A [ F profitBob ]")) is True
    # Alice can stay passive so that no intention of Bob secures his profit
    assert evaluator.holds(s0, _formula(fixture, "CAP{Alice} !CAP{Bob} A [ F profitBob ]")) is True
    # but even active, Alice withholds with probability 1/10
    assert evaluator.holds(s0, _formula(fixture, "CAP{Alice} CAP{Bob} A [ F profitBob ]")) is False
    assert evaluator.holds(s0, example) is False

    data = json.loads(importlib.resources.files("trustcheck.config").joinpath("trust_game.json").read_text())
    for sid in ("s5", "s6"):
        data["catalog"]["Alice"]["active"][sid] = {"invest": 1}
    cooperative = load_model_dict(data)
    assert to_test.Evaluator(cooperative).holds(s0, parse_formula("ST{Bob,Alice} A [ F profitBob ]", cooperative)) is True


def test_undefined_clauses(fixture):
    evaluator = fixture["evaluator"]
    with pytest.raises(EvaluationError):
        evaluator.holds(FinitePath.single("s0"), _formula(fixture, "CT{Alice,Bob}>=1 [ X aBob=share ]"))
    with pytest.raises(UnsupportedFormulaError):
        evaluator.holds(FinitePath.single("s0"), _formula(fixture, "X turnBob"))
    with pytest.raises(UnsupportedFormulaError):
        evaluator.holds(FinitePath.single("s0"), _formula(fixture, "P=? [ X turnBob ]"))


def test_sure_belief_rewrite():
    f = parse_formula("B{a}>=1 [ p ] & CT{a,b}>0.5 [ X q ]")
    rewritten = to_test.sure_belief_rewrite(f)
    assert rewritten.left == Prob(">=", Fraction(1), Atom("p"))
    assert rewritten.right == CapabilityOp("b", Prob(">", Fraction(1, 2), parse_formula("X q")))
    assert to_test.sure_belief_rewrite(parse_formula("DT{a,b}>=1 [ p ]")) == IntentionOp(
        "b", Prob(">=", Fraction(1), Atom("p"))
    )
    assert to_test.qualitative_dependence("a", "b", Atom("p")) == parse_formula("CAP{b} !CAP{a} p & CAP{b} CAP{a} p")


SURE_BELIEF_FORMULAS = [
    "B{A}>=1/2 [ X p ]",
    "B{B}>0 [ F<=2 q ]",
    "B{A}<=1/3 [ p U<=2 q ]",
    "B{B}>=1 [ p ]",
    "B{A}>1/2 [ F<=3 (p & q) ]",
    "B{B}>=1/4 [ F q ]",
    "B{A}>=1/2 [ G p ]",
    "CT{A,B}>=1/2 [ X p ]",
    "CT{A,B}<=1/2 [ F<=2 q ]",
    "CT{B,A}>0 [ X X p ]",
    "CT{A,B}>=1 [ F p ]",
    "CT{B,A}<1 [ X (p | q) ]",
    "DT{A,B}>=1/2 [ X p ]",
    "DT{A,B}<1 [ F<=2 q ]",
    "DT{B,A}>0 [ p U<=1 q ]",
    "DT{A,B}>0 [ G !q ]",
    "!B{A}>0 [ X q ] | p",
    "B{A}>0 [ X B{B}>=1/2 [ X p ] ]",
    "CT{A,B}>=1/2 [ X B{A}>0 [ q ] ]",
    "B{A}>=1/2 [ X p ] & CT{A,B}>=1/2 [ X q ]",
    "DT{A,B}>=1/2 [ X p ] => B{B}>0 [ X q ]",
    "INTN{B} B{A}>0 [ X p ]",
]


@pytest.mark.parametrize("seed", range(50))
def test_sure_beliefs_on_random_models(seed):
    """With full observation, belief is probability and trust is capability or intention."""
    model = random_model(200 + seed, 2 + seed % 11)
    evaluator = to_test.Evaluator(model, strategies=DeclaredStrategies(model))
    formulas = [parse_formula(text, model) for text in SURE_BELIEF_FORMULAS]
    compared = 0
    for path in model.enumerate_paths(4):
        for f in formulas:
            try:
                expected = evaluator.holds(path, f)
            except EvaluationError:
                # trust in an agent without intentions to choose from
                continue
            assert evaluator.holds(path, to_test.sure_belief_rewrite(f)) is expected, f"{to_text(f)} at {path}"
            compared += 1
    assert compared >= len(formulas)
