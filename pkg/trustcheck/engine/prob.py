"""Exact path measures.

Per-observer path probabilities through the auxiliary transition function,
and probabilities of path formulas over continuations in the
induced Markov chain.
"""

import logging
from collections.abc import Callable, Hashable
from fractions import Fraction
from typing import Protocol, TypeVar

from ..errors import EvaluationError, ModelError, UnsupportedFormulaError
from ..logic.formula import (
    TEMPORAL,
    And,
    Const,
    Eventually,
    Formula,
    Globally,
    Next,
    Not,
    Or,
    Release,
    Until,
    history_free,
    to_text,
)
from ..model.asmas import Asmas, Cognitive, FinitePath, GoalSet, Step, Temporal
from ..model.rational import ONE, ZERO, uniform
from .chain import InducedChain

log = logging.getLogger("trustcheck")

Node = TypeVar("Node", bound=Hashable)


class Preferences(Protocol):
    def goal(self, owner: str, other: str, path: FinitePath) -> dict[GoalSet, Fraction]: ...

    def intention(self, owner: str, other: str, path: FinitePath) -> dict[str, Fraction]: ...


class Strategies(Protocol):
    def goal_distribution(self, agent: str, path: FinitePath) -> dict[GoalSet, Fraction]: ...

    def intention_distribution(self, agent: str, path: FinitePath) -> dict[str, Fraction]: ...


class StatePreferences:
    """State-defined preferences; undeclared entries are uniform over the legal options."""

    def __init__(self, model: Asmas):
        self.model = model

    def goal(self, owner: str, other: str, path: FinitePath) -> dict[GoalSet, Fraction]:
        sid = path.last
        declared = self.model.goal_preferences.get((owner, other), {}).get(sid)
        if declared is not None:
            return declared
        legal = self.model.legal_goals_at(other, sid)
        return uniform(legal) if legal else {}

    def intention(self, owner: str, other: str, path: FinitePath) -> dict[str, Fraction]:
        sid = path.last
        declared = self.model.intention_preferences.get((owner, other), {}).get(sid)
        if declared is not None:
            return declared
        legal = self.model.legal_intentions_at(other, sid)
        return uniform(legal) if legal else {}


def is_path_formula(f: Formula) -> bool:
    """True when f has a temporal operator outside any state-level operator."""
    if isinstance(f, TEMPORAL):
        return True
    if isinstance(f, (Not, And, Or)):
        return any(is_path_formula(c) for c in f.children())
    return False


def temporal_horizon(f: Formula) -> int | None:
    """Number of steps a path formula looks ahead, None when unbounded."""
    if not is_path_formula(f):
        return 0
    match f:
        case Not(arg):
            return temporal_horizon(arg)
        case And(left, right) | Or(left, right):
            hl, hr = temporal_horizon(left), temporal_horizon(right)
            return None if hl is None or hr is None else max(hl, hr)
        case Next(arg):
            h = temporal_horizon(arg)
            return None if h is None else h + 1
        case Until(left, right, bound) if bound is not None:
            hl, hr = temporal_horizon(left), temporal_horizon(right)
            return None if hl is None or hr is None else bound + max(hl, hr)
        case Eventually(arg, bound) if bound is not None:
            h = temporal_horizon(arg)
            return None if h is None else bound + h
    return None


def _holds_on(sequence: list, i: int, psi: Formula, state_holds: Callable) -> bool:
    if not is_path_formula(psi):
        return state_holds(sequence[i], psi)
    match psi:
        case Not(arg):
            return not _holds_on(sequence, i, arg, state_holds)
        case And(left, right):
            return _holds_on(sequence, i, left, state_holds) and _holds_on(sequence, i, right, state_holds)
        case Or(left, right):
            return _holds_on(sequence, i, left, state_holds) or _holds_on(sequence, i, right, state_holds)
        case Next(arg):
            return _holds_on(sequence, i + 1, arg, state_holds)
        case Until(left, right, k):
            for j in range(i, i + k + 1):
                if _holds_on(sequence, j, right, state_holds):
                    return True
                if not _holds_on(sequence, j, left, state_holds):
                    return False
            return False
        case Eventually(arg, k):
            return any(_holds_on(sequence, j, arg, state_holds) for j in range(i, i + k + 1))
    raise UnsupportedFormulaError(f"cannot evaluate {to_text(psi)} on a finite continuation")


def bounded_probability(
    node: Node,
    psi: Formula,
    moves: Callable[[Node], list[tuple[Fraction, Node]]],
    state_holds: Callable[[Node, Formula], bool],
) -> Fraction:
    """Measure of continuations of node satisfying a bounded path formula.

    Continuations are enumerated to the formula's horizon; nodes carry
    whatever history state_holds needs.
    """
    horizon = temporal_horizon(psi)
    if horizon is None:
        raise UnsupportedFormulaError(f"{to_text(psi)} is not bounded")
    total = ZERO
    stack: list[tuple[Fraction, list]] = [(ONE, [node])]
    while stack:
        prob, sequence = stack.pop()
        if len(sequence) > horizon:
            if _holds_on(sequence, 0, psi, state_holds):
                total += prob
            continue
        for p, successor in moves(sequence[-1]):
            stack.append((prob * p, sequence + [successor]))
    return total


class ProbEngine:
    """Probability spaces of a model: per-observer path measures and the induced chain."""

    def __init__(
        self,
        model: Asmas,
        preferences: Preferences | None = None,
        strategies: Strategies | None = None,
        cross_type: bool | None = None,
    ):
        self.model = model
        self.preferences = preferences if preferences is not None else StatePreferences(model)
        self.strategies = strategies
        self.cross_type = model.cross_type_weighting if cross_type is None else cross_type
        self.chain = InducedChain(model)
        self._operand_cache: dict = {}

    def with_preferences(self, preferences: Preferences) -> "ProbEngine":
        return ProbEngine(self.model, preferences, self.strategies, self.cross_type)

    def aux_transition(self, observer: str, source: FinitePath | str, step: Step, target: str) -> Fraction:
        """Probability, in observer's space, of taking step from the end of source to target."""
        path = FinitePath.single(source) if isinstance(source, str) else source
        sid = path.last
        if not self.model.is_valid_step(sid, step, target):
            raise ModelError(f"step {step.label()} from {sid} to {target} is undefined")
        if isinstance(step, Temporal):
            delta = self.model.induced_joint_action(sid).get(step.action, ZERO)
            return delta * self.model.temporal_transitions(sid)[step.action][target]
        assert isinstance(step, Cognitive)
        if step.agent == observer:
            if self.cross_type and step.kind == "i":
                if self.strategies is None:
                    raise EvaluationError("cross-type weighting needs cognitive strategies")
                return self.strategies.intention_distribution(observer, path).get(step.value, ZERO)  # type: ignore[arg-type]
            return ONE
        if step.kind == "g":
            return self.preferences.goal(observer, step.agent, path).get(step.value, ZERO)  # type: ignore[arg-type]
        return self.preferences.intention(observer, step.agent, path).get(step.value, ZERO)  # type: ignore[arg-type]

    def path_probability(self, observer: str, path: FinitePath) -> Fraction:
        if not self.model.is_valid_path(path):
            raise ModelError(f"invalid path {path}")
        prob = self.model.initial.get(path.first, ZERO)
        for i, step in enumerate(path.steps):
            if prob == 0:
                break
            prob *= self.aux_transition(observer, path.prefix(i + 1), step, path.states[i + 1])
        return prob

    # Continuations

    def continuations(self, path: FinitePath) -> list[tuple[Fraction, FinitePath]]:
        return [(p, path.extend(step, target)) for step, target, p in self.model.moves(path.last)]

    def prob_path_formula(
        self, path: FinitePath, psi: Formula, state_holds: Callable[[FinitePath, Formula], bool]
    ) -> Fraction:
        """Probability that a continuation of path in the induced chain satisfies psi."""
        if temporal_horizon(psi) is not None:
            return bounded_probability(path, psi, self.continuations, state_holds)
        return self._unbounded(path, psi, state_holds)

    def _unbounded(self, path: FinitePath, psi: Formula, state_holds: Callable) -> Fraction:
        match psi:
            case Not(arg):
                return ONE - self._unbounded(path, arg, state_holds)
            case Next(arg):
                return sum(
                    (p * self.prob_path_formula(nxt, arg, state_holds) for p, nxt in self.continuations(path)),
                    ZERO,
                )
            case Until(left, right, None):
                return self._until(left, right, state_holds)[path.last]
            case Eventually(arg, None):
                return self._until(Const(True), arg, state_holds)[path.last]
            case Globally(arg):
                return ONE - self._until(Const(True), Not(arg), state_holds)[path.last]
            case Release(left, right):
                return ONE - self._until(Not(left), Not(right), state_holds)[path.last]
        raise UnsupportedFormulaError(f"unbounded path formula {to_text(psi)} is not supported here")

    def _until(self, left: Formula, right: Formula, state_holds: Callable) -> dict[str, Fraction]:
        for operand in (left, right):
            if is_path_formula(operand) or not history_free(operand):
                raise UnsupportedFormulaError(
                    f"unbounded until needs history-free state operands, got {to_text(operand)}"
                )
        key = (left, right)
        if key not in self._operand_cache:
            states = self.model.state_ids
            safe = [s for s in states if state_holds(FinitePath.single(s), left)]
            target = [s for s in states if state_holds(FinitePath.single(s), right)]
            self._operand_cache[key] = self.chain.until(safe, target)
        return self._operand_cache[key]
