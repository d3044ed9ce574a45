from fractions import Fraction

import pytest

from trustcheck.errors import FragmentError
from trustcheck.logic import fragment as to_test
from trustcheck.logic.formula import Atom
from trustcheck.logic.parser import parse_formula


def test_depth():
    assert to_test.depth(parse_formula("p")) == 0
    assert to_test.depth(parse_formula("P>=0.5 [ X X p ]")) == 2
    assert to_test.depth(parse_formula("P>=0.5 [ p U<=3 X q ]")) == 4
    assert to_test.depth(parse_formula("CT{a,b}>=1 [ X p ]")) == 2
    assert to_test.depth(parse_formula("B{a}>=1 [ X p ]")) == 1
    assert to_test.depth(parse_formula("ST{a,b} p")) == 2
    assert to_test.depth(parse_formula("INTN{b} GOAL{a} p")) == 2
    with pytest.raises(FragmentError):
        to_test.depth(parse_formula("P>=0.5 [ F p ]"))


def test_belief_nesting():
    assert to_test.belief_nesting(parse_formula("P>=0.5 [ X p ]")) == 0
    assert to_test.belief_nesting(parse_formula("B{a}>=1 [ X B{b}>=1 [ p ] ]")) == 2
    assert to_test.belief_nesting(parse_formula("CT{a,b}>=1 [ X p ] & B{a}>0 [ q ]")) == 1


def test_classify_fragment():
    bounded = parse_formula("CT{a,b}>=1 [ X p ]")
    assert to_test.classify_fragment(bounded) is to_test.FragmentClass.BPRTL

    nested = parse_formula("B{a}>=1 [ B{b}>=1 [ B{a}>=1 [ p ] ] ]")
    assert to_test.classify_fragment(nested) is to_test.FragmentClass.GENERAL
    assert to_test.classify_fragment(nested, nesting_depth=3) is to_test.FragmentClass.BPRTL

    qualitative = parse_formula("G [ p => P>=1 [ F B{a}>=1 [ p ] ] ]")
    assert to_test.classify_fragment(qualitative) is to_test.FragmentClass.PQRTL1

    unbounded = parse_formula("P>=0.5 [ F p ]")
    assert to_test.classify_fragment(unbounded) is to_test.FragmentClass.GENERAL


def test_match_qualitative_template():
    query = to_test.match_qualitative_template(parse_formula("A [ G [ p => P>0.9 [ F DT{a,b}>=1 [ p ] ] ] ]"))
    assert query == to_test.QualitativeQuery(Atom("p"), ">", Fraction(9, 10), "DT", "a", "b")

    query = to_test.match_qualitative_template(parse_formula("G [ p => P>=1 [ F CT{a,b}>=1 [ p ] ] ]"))
    assert query is not None and query.variant == "CT"

    # belief operand differs from the premise
    assert to_test.match_qualitative_template(parse_formula("G [ p => P>=1 [ F B{a}>=1 [ q ] ] ]")) is None
    # belief bound below one
    assert to_test.match_qualitative_template(parse_formula("G [ p => P>=1 [ F B{a}>=0.5 [ p ] ] ]")) is None
    # premise with a belief is not state-determined
    assert to_test.match_qualitative_template(
        parse_formula("G [ B{b}>0 [ p ] => P>=1 [ F B{a}>=1 [ B{b}>0 [ p ] ] ] ]")
    ) is None


def test_validate_guard():
    assert to_test.validate_guard(parse_formula("B{b}>0.7 [ p ]"), "b") == []
    assert to_test.validate_guard(parse_formula("B{b}>=? [ p ]"), "b") == []
    assert to_test.validate_guard(parse_formula("p & !q"), "b") == []

    assert to_test.validate_guard(parse_formula("B{b}>0.7 [ X p ]"), "b")
    assert to_test.validate_guard(parse_formula("B{a}>0.7 [ p ]"), "b")
    assert to_test.validate_guard(parse_formula("P>0.5 [ X p ]"), "b")
    assert to_test.validate_guard(parse_formula("p & B{b}>=? [ p ]"), "b")
