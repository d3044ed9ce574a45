from fractions import Fraction

import pytest

from trustcheck.engine import chain as to_test
from trustcheck.model.loader import load_shipped


@pytest.fixture(scope="module")
def fixture():
    return {"model": load_shipped("trust_game")}


def test_solve_until():
    transitions = {
        "s0": {"s1": Fraction(1, 2), "s2": Fraction(1, 2)},
        "s1": {"s1": Fraction(1)},
        "s2": {"s2": Fraction(1)},
    }
    assert to_test.solve_until(transitions, {"s1"}, {"s0", "s1", "s2"}) == {
        "s0": Fraction(1, 2),
        "s1": Fraction(1),
        "s2": Fraction(0),
    }


def test_solve_until_cycle():
    # geometric retries: from a, half the mass reaches t, a quarter returns to a
    transitions = {
        "a": {"t": Fraction(1, 2), "a": Fraction(1, 4), "x": Fraction(1, 4)},
        "t": {"t": Fraction(1)},
        "x": {"x": Fraction(1)},
    }
    result = to_test.solve_until(transitions, {"t"}, {"a", "t", "x"})
    assert result["a"] == Fraction(2, 3)


def test_solve_until_substochastic():
    transitions = {"a": {"t": Fraction(1, 2)}, "t": {"t": Fraction(1)}}
    assert to_test.solve_until(transitions, {"t"}, {"a"})["a"] == Fraction(1, 2)


def test_induced_chain(fixture):
    chain = to_test.InducedChain(fixture["model"])
    assert chain.reachable(["s5"]) == {"s5", "s11", "s12", "s19", "s20", "s32", "s33"}
    richer = [s for s in fixture["model"].state_ids if "richerAliceBob" in fixture["model"].labels(s)]
    eventually = chain.eventually(richer)
    assert eventually["s3"] == Fraction(7, 10)
    assert eventually["s5"] == Fraction(1, 10)
    # s0 continues by Alice's undeclared goal strategy, uniform over passive and active
    assert eventually["s0"] == Fraction(2, 5)
    globally = chain.globally(set(fixture["model"].state_ids) - set(richer))
    assert globally["s6"] == Fraction(9, 10)
    assert frozenset({"s7"}) in chain.bottom_sccs()
