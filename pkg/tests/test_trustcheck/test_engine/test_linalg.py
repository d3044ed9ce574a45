from fractions import Fraction

import pytest

from trustcheck.engine import linalg as to_test


def test_solve_linear():
    matrix = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    rhs = [Fraction(1), Fraction(2)]
    assert to_test.solve_linear(matrix, rhs) == [Fraction(1, 5), Fraction(3, 5)]
    # pivoting past a zero diagonal entry
    assert to_test.solve_linear([[0, 1], [1, 0]], [3, 4]) == [Fraction(4), Fraction(3)]
    with pytest.raises(ValueError):
        to_test.solve_linear([[1, 2], [2, 4]], [1, 2])


def test_stationary_distribution():
    transitions = {
        "a": {"b": Fraction(1)},
        "b": {"a": Fraction(1, 2), "b": Fraction(1, 2)},
    }
    assert to_test.stationary_distribution(["a", "b"], transitions) == {
        "a": Fraction(1, 3),
        "b": Fraction(2, 3),
    }


def test_basis():
    basis = to_test.Basis(3)
    assert basis.add([Fraction(1), Fraction(0), Fraction(1)])
    assert basis.add([Fraction(0), Fraction(2), Fraction(0)])
    assert not basis.add([Fraction(3), Fraction(4), Fraction(3)])
    assert not basis.add([Fraction(0), Fraction(0), Fraction(0)])
    assert basis.add([Fraction(0), Fraction(0), Fraction(1)])
    assert len(basis) == 3
    assert to_test.dot([Fraction(1), Fraction(2)], [Fraction(3), Fraction(1, 2)]) == Fraction(4)
