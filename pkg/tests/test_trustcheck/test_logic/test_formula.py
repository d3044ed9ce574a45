from fractions import Fraction

from trustcheck.logic import formula as to_test
from trustcheck.logic.parser import parse_formula


def test_to_text():
    assert to_test.to_text(to_test.Atom("aBob=share")) == "aBob=share"
    assert to_test.to_text(to_test.Atom("odd name")) == '"odd name"'
    # keywords are quoted so that they read back as atoms
    assert to_test.to_text(to_test.Atom("X")) == '"X"'
    f = to_test.DispositionTrust("Alice", "Bob", ">=", Fraction(1, 2), to_test.Next(to_test.Atom("p")))
    assert to_test.to_text(f) == "DT{Alice,Bob}>=1/2 [ X p ]"
    assert str(to_test.Prob(to_test.QUERY, None, to_test.Eventually(to_test.Atom("p"), 2))) == "P=? [ F<=2 p ]"


def test_queries():
    f = parse_formula("CT{a,b}>=0.5 [ X p ]")
    assert not to_test.is_query(f)
    query = to_test.as_query(f)
    assert to_test.is_query(query)
    assert query.cmp == ">="
    assert to_test.as_query(to_test.Atom("p")) == to_test.Atom("p")


def test_compare_and_flip():
    half = Fraction(1, 2)
    assert to_test.compare(half, ">=", half)
    assert not to_test.compare(half, ">", half)
    assert to_test.compare(Fraction(1, 3), "<", half)
    for cmp in to_test.COMPARISONS:
        for value in [Fraction(0), Fraction(1, 4), half, Fraction(1)]:
            negated = not to_test.compare(value, cmp, half)
            assert negated == to_test.compare(1 - value, to_test.flip(cmp), 1 - half)
    assert to_test.maximizing(">=") and to_test.maximizing(to_test.QUERY)
    assert not to_test.maximizing("<")


def test_history_free():
    assert to_test.history_free(parse_formula("P>=0.5 [ X p ]"))
    assert not to_test.history_free(parse_formula("p & B{a}>0 [ q ]"))
    assert not to_test.history_free(parse_formula("CAP{a} p"))


def test_expand_derived():
    p, q = to_test.Atom("p"), to_test.Atom("q")
    assert to_test.expand_derived(parse_formula("F<=2 p")) == to_test.Until(to_test.Const(True), p, 2)
    assert to_test.expand_derived(parse_formula("G p")) == to_test.Not(
        to_test.Until(to_test.Const(True), to_test.Not(p))
    )
    assert to_test.expand_derived(parse_formula("E [ p R q ]")) == to_test.Not(
        to_test.ForAll(to_test.Not(to_test.Not(to_test.Until(to_test.Not(p), to_test.Not(q)))))
    )


def test_walk_and_children():
    f = parse_formula("B{a}>=1 [ p & X q ]")
    assert [type(n).__name__ for n in to_test.walk(f)] == ["Belief", "And", "Atom", "Next", "Atom"]
    assert to_test.contains(f, to_test.TEMPORAL)
