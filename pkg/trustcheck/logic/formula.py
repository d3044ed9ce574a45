"""Formula AST for the trust logic, its printer and derived-operator rewriting.

One frozen dataclass per operator. Comparison operators are the strings
"<", "<=", ">", ">=", and "=" for the plain "=?" query; a bound of None marks
the query form of a probabilistic, belief or trust operator.
"""

import re
from collections.abc import Callable, Iterator
from dataclasses import dataclass, fields, replace
from fractions import Fraction

COMPARISONS = ("<", "<=", ">", ">=")
QUERY = "="


class Formula:
    def children(self) -> tuple["Formula", ...]:
        return tuple(getattr(self, f.name) for f in fields(self) if isinstance(getattr(self, f.name), Formula))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    bound: int | None = None


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula
    bound: int | None = None


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    arg: Formula


@dataclass(frozen=True)
class Exists(Formula):
    arg: Formula


@dataclass(frozen=True)
class Prob(Formula):
    cmp: str
    bound: Fraction | None
    arg: Formula


@dataclass(frozen=True)
class Belief(Formula):
    agent: str
    cmp: str
    bound: Fraction | None
    arg: Formula


@dataclass(frozen=True)
class CompetenceTrust(Formula):
    truster: str
    trustee: str
    cmp: str
    bound: Fraction | None
    arg: Formula


@dataclass(frozen=True)
class DispositionTrust(Formula):
    truster: str
    trustee: str
    cmp: str
    bound: Fraction | None
    arg: Formula


@dataclass(frozen=True)
class StrongDependence(Formula):
    truster: str
    trustee: str
    cmp: str
    bound: Fraction | None
    arg: Formula


@dataclass(frozen=True)
class QualitativeDependence(Formula):
    """Trustee can make arg true and also false, truster cannot avoid not-arg alone."""

    truster: str
    trustee: str
    arg: Formula


@dataclass(frozen=True)
class WeakDependence(Formula):
    truster: str
    trustee: str
    cmp: str
    arg: Formula


@dataclass(frozen=True)
class GoalOp(Formula):
    agent: str
    arg: Formula


@dataclass(frozen=True)
class IntentionOp(Formula):
    agent: str
    arg: Formula


@dataclass(frozen=True)
class CapabilityOp(Formula):
    agent: str
    arg: Formula


TEMPORAL = (Next, Until, Eventually, Globally, Release)
PATH_QUANTIFIERS = (Prob, ForAll, Exists, Belief, CompetenceTrust, DispositionTrust, StrongDependence, WeakDependence)
QUANTITATIVE = (Prob, Belief, CompetenceTrust, DispositionTrust, StrongDependence)
BELIEF_TRUST = (Belief, CompetenceTrust, DispositionTrust, StrongDependence, QualitativeDependence, WeakDependence)
COGNITIVE = (GoalOp, IntentionOp, CapabilityOp)


def implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def walk(formula: Formula) -> Iterator[Formula]:
    yield formula
    for child in formula.children():
        yield from walk(child)


def is_query(formula: Formula) -> bool:
    return isinstance(formula, QUANTITATIVE) and formula.bound is None  # type: ignore[union-attr]


def contains(formula: Formula, kinds: tuple) -> bool:
    return any(isinstance(node, kinds) for node in walk(formula))


def is_temporal(formula: Formula) -> bool:
    return isinstance(formula, TEMPORAL)


def is_unbounded(formula: Formula) -> bool:
    if isinstance(formula, (Until, Eventually)):
        return formula.bound is None
    return isinstance(formula, (Globally, Release))


def history_free(formula: Formula) -> bool:
    """True when truth at a path depends only on its last state."""
    return not contains(formula, BELIEF_TRUST + COGNITIVE)


def compare(value: Fraction, cmp: str, bound: Fraction) -> bool:
    if cmp == "<":
        return value < bound
    if cmp == "<=":
        return value <= bound
    if cmp == ">":
        return value > bound
    if cmp == ">=":
        return value >= bound
    raise ValueError(f"unknown comparison '{cmp}'")


def maximizing(cmp: str) -> bool:
    """Direction of the optimum in trust clauses; queries take the >= side."""
    return cmp in (">", ">=", QUERY)


def flip(cmp: str) -> str:
    """The relation c such that not (v cmp q) iff (1 - v) c (1 - q)."""
    return {">=": ">", ">": ">=", "<=": "<", "<": "<="}[cmp]


def as_query(formula: Formula) -> Formula:
    """The query form of a quantitative operator, keeping its direction."""
    if not isinstance(formula, QUANTITATIVE):
        return formula
    return replace(formula, bound=None)  # type: ignore[type-var]


def map_children(formula: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Copy of formula with fn applied to each direct subformula."""
    changes = {
        fld.name: fn(getattr(formula, fld.name))
        for fld in fields(formula)  # type: ignore[arg-type]
        if isinstance(getattr(formula, fld.name), Formula)
    }
    return replace(formula, **changes) if changes else formula  # type: ignore[type-var]


# Printing

_PLAIN_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(=[A-Za-z0-9_.\-]+)?$")
_KEYWORDS = {"true", "false", "X", "U", "F", "G", "R", "A", "E", "P", "B", "CT", "DT", "ST", "WT", "GOAL", "INTN", "CAP"}


def format_bound(cmp: str, bound: Fraction | None) -> str:
    if bound is None:
        return "=?" if cmp == QUERY else f"{cmp}?"
    if bound.denominator == 1:
        return f"{cmp}{bound.numerator}"
    return f"{cmp}{bound.numerator}/{bound.denominator}"


def _atom_text(name: str) -> str:
    if _PLAIN_NAME.match(name) and name.partition("=")[0] not in _KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_text(f: Formula) -> str:
    """Fully bracketed concrete syntax; parse_formula(to_text(f)) == f."""
    match f:
        case Atom(name):
            return _atom_text(name)
        case Const(value):
            return "true" if value else "false"
        case Not(arg):
            return f"!{_unary(arg)}"
        case And(left, right):
            return f"({to_text(left)} & {to_text(right)})"
        case Or(left, right):
            return f"({to_text(left)} | {to_text(right)})"
        case Next(arg):
            return f"X {_unary(arg)}"
        case Until(left, right, None):
            return f"({_unary(left)} U {_unary(right)})"
        case Until(left, right, k):
            return f"({_unary(left)} U<={k} {_unary(right)})"
        case Eventually(arg, None):
            return f"F {_unary(arg)}"
        case Eventually(arg, k):
            return f"F<={k} {_unary(arg)}"
        case Globally(arg):
            return f"G {_unary(arg)}"
        case Release(left, right):
            return f"({_unary(left)} R {_unary(right)})"
        case ForAll(arg):
            return f"A [ {to_text(arg)} ]"
        case Exists(arg):
            return f"E [ {to_text(arg)} ]"
        case Prob(cmp, bound, arg):
            return f"P{format_bound(cmp, bound)} [ {to_text(arg)} ]"
        case Belief(agent, cmp, bound, arg):
            return f"B{{{agent}}}{format_bound(cmp, bound)} [ {to_text(arg)} ]"
        case CompetenceTrust(a, b, cmp, bound, arg):
            return f"CT{{{a},{b}}}{format_bound(cmp, bound)} [ {to_text(arg)} ]"
        case DispositionTrust(a, b, cmp, bound, arg):
            return f"DT{{{a},{b}}}{format_bound(cmp, bound)} [ {to_text(arg)} ]"
        case StrongDependence(a, b, cmp, bound, arg):
            return f"ST{{{a},{b}}}{format_bound(cmp, bound)} [ {to_text(arg)} ]"
        case QualitativeDependence(a, b, arg):
            return f"ST{{{a},{b}}} {_unary(arg)}"
        case WeakDependence(a, b, cmp, arg):
            return f"WT{{{a},{b}}}{cmp} [ {to_text(arg)} ]"
        case GoalOp(agent, arg):
            return f"GOAL{{{agent}}} {_unary(arg)}"
        case IntentionOp(agent, arg):
            return f"INTN{{{agent}}} {_unary(arg)}"
        case CapabilityOp(agent, arg):
            return f"CAP{{{agent}}} {_unary(arg)}"
    raise TypeError(f"not a formula: {f!r}")


def _unary(f: Formula) -> str:
    """Operand of a prefix operator: anything that is not itself prefix-safe gets parentheses."""
    text = to_text(f)
    if isinstance(f, (Atom, Const, Not, And, Or, Until, Release, ForAll, Exists, Prob, Belief,
                      CompetenceTrust, DispositionTrust, StrongDependence, WeakDependence)):
        return text
    return f"({text})"


# Derived operators

def expand_derived(f: Formula) -> Formula:
    """Rewrite F, G, R and E into U, X, A and negation."""
    match f:
        case Eventually(arg, bound):
            return Until(Const(True), expand_derived(arg), bound)
        case Globally(arg):
            return Not(Until(Const(True), Not(expand_derived(arg))))
        case Release(left, right):
            return Not(Until(Not(expand_derived(left)), Not(expand_derived(right))))
        case Exists(arg):
            return Not(ForAll(Not(expand_derived(arg))))
    return map_children(f, expand_derived)
