"""Fragment analysis: depth, nesting, fragment classification and guard checks."""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ..errors import FragmentError
from .formula import (
    BELIEF_TRUST,
    COGNITIVE,
    PATH_QUANTIFIERS,
    TEMPORAL,
    And,
    Atom,
    Belief,
    CompetenceTrust,
    Const,
    DispositionTrust,
    Eventually,
    Exists,
    ForAll,
    Formula,
    Globally,
    Next,
    Not,
    Or,
    Prob,
    QualitativeDependence,
    Release,
    StrongDependence,
    Until,
    WeakDependence,
    history_free,
    is_query,
    to_text,
    walk,
)


class FragmentClass(str, Enum):
    BPRTL = "BPRTL"
    PQRTL1 = "PQRTL1"
    GENERAL = "GENERAL"


def depth(f: Formula) -> int:
    """Longest path suffix a formula can inspect; undefined for unbounded temporal operators."""
    match f:
        case Atom() | Const():
            return 0
        case Not(arg):
            return depth(arg)
        case And(left, right) | Or(left, right):
            return max(depth(left), depth(right))
        case Next(arg):
            return depth(arg) + 1
        case Until(left, right, bound) if bound is not None:
            return max(depth(left), depth(right)) + bound
        case Eventually(arg, bound) if bound is not None:
            return depth(arg) + bound
        case Until() | Eventually() | Globally() | Release():
            raise FragmentError(f"unbounded temporal operator in {to_text(f)}")
        case ForAll(arg) | Exists(arg) | Prob(arg=arg) | Belief(arg=arg):
            return depth(arg)
        case CompetenceTrust(arg=arg) | DispositionTrust(arg=arg) | StrongDependence(arg=arg):
            return depth(arg) + 1
        case WeakDependence(arg=arg):
            return depth(arg) + 1
        case QualitativeDependence(arg=arg):
            # two nested capability operators
            return depth(arg) + 2
    if isinstance(f, COGNITIVE):
        return depth(f.arg) + 1  # type: ignore[attr-defined]
    raise TypeError(f"not a formula: {f!r}")


def belief_nesting(f: Formula) -> int:
    own = 1 if isinstance(f, BELIEF_TRUST) else 0
    return own + max((belief_nesting(c) for c in f.children()), default=0)


def _bounded_temporal(f: Formula) -> bool:
    match f:
        case Next():
            return True
        case Until(bound=bound) | Eventually(bound=bound):
            return bound is not None
    return False


def _is_state(f: Formula) -> bool:
    if isinstance(f, TEMPORAL):
        return False
    if isinstance(f, PATH_QUANTIFIERS):
        return _is_path_argument(f.arg)  # type: ignore[attr-defined]
    return all(_is_state(c) for c in f.children())


def _is_path_argument(f: Formula) -> bool:
    while isinstance(f, Not):
        f = f.arg
    if isinstance(f, TEMPORAL):
        return _bounded_temporal(f) and all(_is_state(c) for c in f.children())
    return _is_state(f)


def is_bounded(f: Formula, nesting_depth: int = 2) -> bool:
    return _is_state(f) and belief_nesting(f) <= nesting_depth


@dataclass(frozen=True)
class QualitativeQuery:
    """G [ psi => P cmp q [ F T>=1 [ psi ] ] ] with T a belief or a >=1 trust operator."""

    psi: Formula
    cmp: str
    bound: Fraction
    variant: str  # "B", "DT" or "CT"
    observer: str
    trustee: str | None = None


def match_qualitative_template(f: Formula) -> QualitativeQuery | None:
    if isinstance(f, ForAll):
        f = f.arg
    match f:
        case Globally(Or(Not(psi), Prob(cmp, bound, Eventually(inner, None)))) if bound is not None:
            pass
        case _:
            return None
    if not history_free(psi) or any(isinstance(n, TEMPORAL) for n in walk(psi)):
        return None
    match inner:
        case Belief(agent, ">=", b, arg) if b == 1 and arg == psi:
            return QualitativeQuery(psi, cmp, bound, "B", agent)
        case DispositionTrust(a, trustee, ">=", b, arg) if b == 1 and arg == psi:
            return QualitativeQuery(psi, cmp, bound, "DT", a, trustee)
        case CompetenceTrust(a, trustee, ">=", b, arg) if b == 1 and arg == psi:
            return QualitativeQuery(psi, cmp, bound, "CT", a, trustee)
    return None


def classify_fragment(f: Formula, nesting_depth: int = 2) -> FragmentClass:
    if is_bounded(f, nesting_depth):
        return FragmentClass.BPRTL
    if match_qualitative_template(f) is not None:
        return FragmentClass.PQRTL1
    return FragmentClass.GENERAL


def _owner_operator(f: Formula, owner: str) -> bool:
    if isinstance(f, Belief):
        return f.agent == owner
    if isinstance(f, BELIEF_TRUST):
        return f.truster == owner  # type: ignore[attr-defined]
    return False


def validate_guard(guard: Formula, owner: str) -> list[str]:
    """Violations of the guard language of owner; an empty list means the guard is fine."""
    violations: list[str] = []

    def visit(f: Formula, inside_owner: bool, at_root: bool):
        if is_query(f) and not at_root:
            violations.append(f"quantitative subformula below the root: {to_text(f)}")
        if isinstance(f, TEMPORAL):
            where = "guard belief" if inside_owner else "guard"
            violations.append(f"temporal operator inside {where}: {to_text(f)}")
        modal = isinstance(f, PATH_QUANTIFIERS + COGNITIVE + (QualitativeDependence,))
        if modal and not inside_owner and not _owner_operator(f, owner):
            violations.append(f"modal operator outside a belief of {owner}: {to_text(f)}")
        nested = inside_owner or _owner_operator(f, owner)
        for child in f.children():
            visit(child, nested, False)

    visit(guard, False, True)
    return violations
