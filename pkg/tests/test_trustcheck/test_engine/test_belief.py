from fractions import Fraction

import pytest

from trustcheck.engine import belief as to_test
from trustcheck.engine.prob import ProbEngine
from trustcheck.errors import ModelError, UndefinedBeliefError
from trustcheck.model.asmas import TransitionKind, TransitionType
from trustcheck.model.generate import random_model
from trustcheck.model.loader import load_shipped


@pytest.fixture(scope="module")
def fixture():
    model = load_shipped("trust_game")
    return {"model": model, "beliefs": to_test.BeliefEngine(ProbEngine(model))}


def test_belief_after_goal_change(fixture):
    model, beliefs = fixture["model"], fixture["beliefs"]
    assignment = beliefs.beliefs_at("Bob", model.path_from_ids("s0 s1"))
    assert assignment.to_dict() == {"s0 s1": "1/3", "s0 s2": "2/3"}
    assert beliefs.belief(assignment.trace, model.path_from_ids("s0 s2")) == Fraction(2, 3)


def test_belief_after_investment(fixture):
    model, beliefs = fixture["model"], fixture["beliefs"]
    path = model.path_from_ids("s0 s1 s3 s8")
    assignment = beliefs.beliefs_at("Bob", path)
    assert assignment[path] == Fraction(1, 7)
    assert assignment[model.path_from_ids("s0 s2 s5 s12")] == Fraction(6, 7)
    assert len(assignment.support()) == 2


def test_belief_after_intention_change(fixture):
    model, beliefs = fixture["model"], fixture["beliefs"]
    assignment = beliefs.beliefs_at("Alice", model.path_from_ids("s0 s2 s5 s12 s19"))
    assert assignment.to_dict() == {
        "s0 s2 s5 s12 s19": "3/8",
        "s0 s2 s5 s12 s20": "1/8",
        "s0 s2 s6 s14 s21": "0",
        "s0 s2 s6 s14 s22": "1/2",
    }


def test_recursive_matches_direct(fixture):
    """Step-wise updates and conditioning give the same belief on every trace of a path."""
    model, beliefs = fixture["model"], fixture["beliefs"]
    for path in model.enumerate_paths(5):
        for agent in model.agents:
            trace = beliefs.trace_of(agent, path)
            try:
                direct = beliefs.assignment(trace)
            except UndefinedBeliefError:
                with pytest.raises(UndefinedBeliefError):
                    beliefs.recursive_assignment(trace)
                continue
            recursive = beliefs.recursive_assignment(trace)
            assert {p: w for p, w in direct.weights.items() if w > 0} == recursive.weights
            assert sum(direct.weights.values()) == 1


@pytest.mark.parametrize("seed", range(25))
def test_recursive_matches_direct_on_random_models(seed):
    model = random_model(100 + seed, 3 + seed % 4, partial=True)
    beliefs = to_test.BeliefEngine(ProbEngine(model))
    seen = set()
    for path in model.enumerate_paths(6):
        for agent in model.agents:
            trace = beliefs.trace_of(agent, path)
            if trace in seen:
                continue
            seen.add(trace)
            direct = {p: w for p, w in beliefs.assignment(trace).weights.items() if w > 0}
            assert beliefs.recursive_assignment(trace).weights == direct, str(trace)
            assert sum(direct.values()) == 1


@pytest.mark.parametrize("seed", range(10))
def test_belief_states_match_direct_on_random_models(seed):
    """The last belief state is the direct belief summed by last state."""
    model = random_model(100 + seed, 3 + seed % 4, partial=True)
    beliefs = to_test.BeliefEngine(ProbEngine(model))
    for path in model.enumerate_paths(4):
        for agent in model.agents:
            b = beliefs.belief_asmas_initial(agent, model.obs(agent, path.first))
            for i, ttype in enumerate(model.path_types(agent, path)):
                b, _ = beliefs.belief_successor(agent, b, ttype, model.obs(agent, path.states[i + 1]))
            marginal: dict = {}
            for p, w in beliefs.beliefs_at(agent, path).weights.items():
                if w > 0:
                    marginal[p.last] = marginal.get(p.last, 0) + w
            assert b.as_dict() == marginal


def test_undefined_belief(fixture):
    beliefs = fixture["beliefs"]
    with pytest.raises(UndefinedBeliefError):
        beliefs.assignment(to_test.ObservationTrace("Bob", ("nothing|seen",)))


def test_belief_asmas(fixture):
    model, beliefs = fixture["model"], fixture["beliefs"]
    b0 = beliefs.belief_asmas_initial("Bob", model.obs("Bob", "s0"))
    assert b0.as_dict() == {"s0": Fraction(1)}
    b1, p = beliefs.belief_successor(
        "Bob", b0, TransitionType(TransitionKind.other_goal, "Alice"), model.obs("Bob", "s1")
    )
    assert b1.as_dict() == {"s1": Fraction(1, 3), "s2": Fraction(2, 3)}
    assert p == Fraction(1)
    assert str(b1) == "<s1:1/3, s2:2/3>"
    assert beliefs.belief_successor(
        "Bob", b0, TransitionType(TransitionKind.other_goal, "Alice"), model.obs("Bob", "s8")
    ) is None

    exploration = beliefs.explore("Bob", 1)
    assert exploration.states == [b0, b1]
    assert exploration.frontier == [1]
    assert "b1 = <s1:1/3, s2:2/3>" in exploration.to_text()


def test_belief_asmas_levels(fixture):
    model, beliefs = fixture["model"], fixture["beliefs"]
    exploration = beliefs.explore("Bob", 3)
    third, sixth, seventh = Fraction(1, 3), Fraction(1, 7), Fraction(1, 9)
    assert [b.as_dict() for b in exploration.states] == [
        {"s0": Fraction(1)},
        {"s1": third, "s2": 2 * third},
        {"s3": third, "s5": 2 * third},
        {"s4": third, "s6": 2 * third},
        {"s8": sixth, "s12": 6 * sixth},
        {"s7": 7 * seventh, "s11": 2 * seventh},
        {"s10": sixth, "s14": 6 * sixth},
        {"s9": 7 * seventh, "s13": 2 * seventh},
    ]
    assert exploration.frontier == [4, 5, 6, 7]
    edges = {(i, str(t), j): p for i, t, j, p in exploration.edges}
    assert edges[(0, "a(_,_)", 0)] == Fraction(1)
    assert edges[(0, "Alice.g", 1)] == Fraction(1)
    assert edges[(1, "Bob.g.{investor}", 2)] == Fraction(1)
    assert edges[(1, "Bob.g.{opportunist}", 3)] == Fraction(1)
    assert edges[(2, "a(invest,_)", 4)] == Fraction(7, 10)
    assert edges[(3, "a(withhold,_)", 7)] == Fraction(3, 10)

    # every belief state agrees with the conditional belief over paths
    for b, ids in zip(exploration.states[4:], ["s0 s1 s3 s8", "s0 s1 s3 s7", "s0 s1 s4 s10", "s0 s1 s4 s9"]):
        marginal = {}
        for path, w in beliefs.beliefs_at("Bob", model.path_from_ids(ids)).weights.items():
            marginal[path.last] = marginal.get(path.last, 0) + w
        assert marginal == b.as_dict()


def test_default_asmas_depth(fixture):
    beliefs = to_test.BeliefEngine(ProbEngine(fixture["model"]), asmas_depth=2)
    exploration = beliefs.explore("Bob")
    assert exploration.depth == 2
    assert len(exploration.states) == 4
    assert exploration.to_text().startswith("belief ASMAS of Bob to depth 2: 4 belief state(s)")
    assert fixture["beliefs"].asmas_depth == 4


def test_sure_belief_scan(fixture):
    sure, injective = fixture["beliefs"].sure_belief_scan("Bob", 3)
    assert sure is False
    assert injective is False


def test_parse_trace(fixture):
    model = fixture["model"]
    trace = to_test.parse_trace(model, "Bob", "o(s0) Alice.g o(s1)")
    assert trace == to_test.observation_trace(model, "Bob", model.path_from_ids("s0 s1"))

    trace = to_test.parse_trace(model, "Bob", "o(s1) Bob.g.{investor} o(s3) a(invest,_) o(s8)")
    assert trace.types == (
        TransitionType(TransitionKind.own_goal, "Bob", frozenset({"investor"})),
        TransitionType(TransitionKind.action, detail=("invest", "_")),
    )
    assert str(trace.prefix(2)) == f"{model.obs('Bob', 's1')} Bob.g.{{investor}} {model.obs('Bob', 's3')}"

    with pytest.raises(ModelError):
        to_test.parse_trace(model, "Bob", "o(s0) Alice.g")
    with pytest.raises(ModelError):
        to_test.parse_transition_type(model, "Bob", "Alice.g.{active}")
    with pytest.raises(ModelError):
        to_test.parse_transition_type(model, "Bob", "Bob.i")
    with pytest.raises(ModelError):
        to_test.parse_transition_type(model, "Bob", "a(invest)")
