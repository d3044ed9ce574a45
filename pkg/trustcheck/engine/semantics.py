"""Satisfaction of trust-logic state formulas on finite paths.

The future of a path is its continuation in the induced chain: temporal moves,
or the cognitive stage of a state without any. Other cognitive steps only
happen where a formula's own operators introduce them.
Beliefs are expectations over the observation class of the current path or,
in belief-state mode, over the last belief state.

Clauses are written against nodes. Here a node is a FinitePath; the bounded
checker evaluates the same clauses over expanded states by overriding the
node hooks.
"""

import logging
from collections.abc import Callable, Hashable
from enum import Enum
from fractions import Fraction

from ..errors import EvaluationError, UnsupportedFormulaError
from ..logic.formula import (
    And,
    Atom,
    Belief,
    CapabilityOp,
    CompetenceTrust,
    Const,
    DispositionTrust,
    Exists,
    ForAll,
    Formula,
    GoalOp,
    IntentionOp,
    Not,
    Or,
    Prob,
    QualitativeDependence,
    StrongDependence,
    WeakDependence,
    compare,
    history_free,
    is_query,
    map_children,
    maximizing,
    to_text,
)
from ..model.asmas import Asmas, Cognitive, FinitePath, Step
from ..model.rational import ONE, ZERO
from .belief import BeliefEngine, BeliefState
from .prob import ProbEngine, Strategies, is_path_formula

log = logging.getLogger("trustcheck")


class EvalMode(str, Enum):
    path = "path"
    belief_state = "belief-state"


Verdict = bool | Fraction
Node = Hashable
PerNode = Callable[[Node], Fraction]


class Evaluator:
    def __init__(
        self,
        model: Asmas,
        prob: ProbEngine | None = None,
        strategies: Strategies | None = None,
        mode: EvalMode = EvalMode.path,
    ):
        self.model = model
        self.prob = prob if prob is not None else ProbEngine(model, strategies=strategies)
        self.strategies = strategies if strategies is not None else self.prob.strategies
        self.beliefs = BeliefEngine(self.prob)
        self.mode = mode
        self._memo: dict[tuple[Node, Formula], bool] = {}
        self._value_memo: dict[tuple[Node, Formula], Fraction] = {}

    # Entry points

    def evaluate(self, node: Node, f: Formula) -> Verdict:
        """Boolean verdict, or the value of a query formula."""
        if is_query(f):
            return self.value(node, f)
        return self.holds(node, f)

    def holds(self, node: Node, f: Formula) -> bool:
        key = (node, f)
        if key not in self._memo:
            self._memo[key] = self._holds(node, f)
        return self._memo[key]

    def value(self, node: Node, f: Formula) -> Fraction:
        """Probability or expectation of a quantitative operator, its bound ignored."""
        key = (node, f)
        if key not in self._value_memo:
            self._value_memo[key] = self._value(node, f)
        return self._value_memo[key]

    def probability(self, node: Node, psi: Formula) -> Fraction:
        return self.prob.prob_path_formula(node, psi, self.holds)  # type: ignore[arg-type]

    # Node hooks

    def last(self, node: Node) -> str:
        return node.last  # type: ignore[attr-defined]

    def history(self, node: Node) -> FinitePath:
        """A path of the model ending in node, used for strategies and preferences."""
        return node  # type: ignore[return-value]

    def extend(self, node: Node, step: Step, target: str) -> Node:
        return node.extend(step, target)  # type: ignore[attr-defined]

    def belief_weights(self, observer: str, node: Node) -> list[tuple[Node, Fraction]]:
        return list(self.beliefs.beliefs_at(observer, node).weights.items())  # type: ignore[arg-type]

    # Clauses

    def _holds(self, node: Node, f: Formula) -> bool:
        if is_query(f):
            raise UnsupportedFormulaError(f"query {to_text(f)} used as a truth value")
        match f:
            case Atom(name):
                return name in self.model.labels(self.last(node))
            case Const(value):
                return value
            case Not(arg):
                return not self.holds(node, arg)
            case And(left, right):
                return self.holds(node, left) and self.holds(node, right)
            case Or(left, right):
                return self.holds(node, left) or self.holds(node, right)
            case ForAll(arg):
                return self.probability(node, arg) == ONE
            case Exists(arg):
                return self.probability(node, arg) > ZERO
            case (
                Prob(cmp=cmp, bound=bound)
                | Belief(cmp=cmp, bound=bound)
                | CompetenceTrust(cmp=cmp, bound=bound)
                | DispositionTrust(cmp=cmp, bound=bound)
            ):
                return compare(self.value(node, f), cmp, bound)
            case StrongDependence(truster, trustee, cmp, bound, arg):
                believed = self.holds(node, Belief(truster, cmp, bound, arg))
                competent = self.holds(node, CompetenceTrust(truster, trustee, cmp, bound, arg))
                return believed != competent
            case QualitativeDependence(truster, trustee, arg):
                return self.holds(node, qualitative_dependence(truster, trustee, arg))
            case WeakDependence(truster, trustee, cmp, arg):
                return self._weak_dependence(node, truster, trustee, cmp, arg)
            case GoalOp(agent, arg):
                return all(self.holds(nxt, arg) for nxt in self._possible(node, agent, "g"))
            case IntentionOp(agent, arg):
                return all(self.holds(nxt, arg) for nxt in self._possible(node, agent, "i"))
            case CapabilityOp(agent, arg):
                return any(self.holds(nxt, arg) for nxt in self._legal(node, agent))
        if is_path_formula(f):
            raise UnsupportedFormulaError(f"path formula {to_text(f)} used as a state formula")
        raise UnsupportedFormulaError(f"cannot evaluate {to_text(f)}")

    def _value(self, node: Node, f: Formula) -> Fraction:
        match f:
            case Prob(arg=arg):
                return self.probability(node, arg)
            case Belief(agent, _, _, arg):
                return self._trust_expectation(agent, node, lambda n: self.probability(n, arg), arg)
            case CompetenceTrust(truster, trustee, cmp, _, arg):
                return self._trust_expectation(truster, node, self._competence(trustee, cmp, arg), arg)
            case DispositionTrust(truster, trustee, cmp, _, arg):
                return self._trust_expectation(truster, node, self._disposition(trustee, cmp, arg), arg)
        raise UnsupportedFormulaError(f"{to_text(f)} has no quantitative value")

    # Expectations over beliefs

    def _expectation(self, observer: str, node: Node, per_node: PerNode) -> Fraction:
        return sum((w * per_node(n) for n, w in self.belief_weights(observer, node) if w > 0), ZERO)

    def belief_state(self, observer: str, path: FinitePath) -> BeliefState:
        """Last belief state reached by following the observations of path."""
        b = self.beliefs.belief_asmas_initial(observer, self.model.obs(observer, path.first))
        for i, ttype in enumerate(self.model.path_types(observer, path)):
            successor = self.beliefs.belief_successor(observer, b, ttype, self.model.obs(observer, path.states[i + 1]))
            if successor is None:
                raise EvaluationError(f"path {path} is impossible for {observer}")
            b = successor[0]
        return b

    def _state_expectation(self, observer: str, path: FinitePath, per_node: PerNode) -> Fraction:
        b = self.belief_state(observer, path)
        return sum((w * per_node(FinitePath.single(s)) for s, w in b.entries), ZERO)

    def _trust_expectation(self, truster: str, node: Node, per_node: PerNode, arg: Formula) -> Fraction:
        if self.mode is EvalMode.belief_state:
            if not history_free(arg):
                raise UnsupportedFormulaError(
                    f"belief-state mode needs state-determined operands, got {to_text(arg)}"
                )
            return self._state_expectation(truster, self.history(node), per_node)
        return self._expectation(truster, node, per_node)

    # Trust

    def intention_options(self, node: Node, agent: str) -> list[Node]:
        """Node extended by each legal way of agent adopting an intention."""
        return [self.extend(node, step, t) for step, t in self.model.intention_options(self.last(node), agent)]

    def intention_change(self, node: Node, agent: str, intention: str) -> Node:
        sid = self.last(node)
        target = self.model.intention_change(sid, agent, intention)
        if target is None:
            raise EvaluationError(f"intention {intention} of {agent} has no cognitive edge at {sid}")
        return self.extend(node, Cognitive(agent, "i", intention), target)

    def _competence(self, trustee: str, cmp: str, arg: Formula) -> PerNode:
        optimum = max if maximizing(cmp) else min

        def per_node(n: Node) -> Fraction:
            options = self.intention_options(n, trustee)
            if not options:
                raise EvaluationError(f"no legal intention of {trustee} at {self.last(n)}")
            return optimum(self.probability(nxt, arg) for nxt in options)

        return per_node

    def _disposition(self, trustee: str, cmp: str, arg: Formula) -> PerNode:
        pessimum = min if maximizing(cmp) else max

        def per_node(n: Node) -> Fraction:
            support = [x for x, w in self._intention_strategy(trustee, n).items() if w > 0]
            if not support:
                raise EvaluationError(
                    f"intention strategy of {trustee} at {self.history(n)} has empty support"
                )
            return pessimum(self.probability(self.intention_change(n, trustee, x), arg) for x in support)

        return per_node

    def _weak_dependence(self, node: Node, truster: str, trustee: str, cmp: str, arg: Formula) -> bool:
        def trustee_side(n: Node) -> Fraction:
            preference = self.prob.preferences.intention(truster, trustee, self.history(n))
            if not preference:
                return self.probability(n, arg)
            return sum(
                (w * self.probability(self.intention_change(n, trustee, x), arg) for x, w in preference.items() if w > 0),
                ZERO,
            )

        optimum = max if maximizing(cmp) else min

        def own_side(n: Node) -> Fraction:
            options = self.intention_options(n, truster)
            if not options:
                return self.probability(n, arg)
            return optimum(self.probability(nxt, arg) for nxt in options)

        lhs = self._trust_expectation(truster, node, trustee_side, arg)
        rhs = self._trust_expectation(truster, node, own_side, arg)
        return compare(lhs, cmp, rhs)

    # Cognitive operators

    def _goal_strategy(self, agent: str, node: Node) -> dict:
        if self.strategies is None:
            raise EvaluationError(f"no cognitive strategy for {agent}")
        return self.strategies.goal_distribution(agent, self.history(node))

    def _intention_strategy(self, agent: str, node: Node) -> dict:
        if self.strategies is None:
            raise EvaluationError(f"no cognitive strategy for {agent}")
        return self.strategies.intention_distribution(agent, self.history(node))

    def _possible(self, node: Node, agent: str, kind: str) -> list[Node]:
        """Nodes extended by each strategy-supported change; an agent without options stays."""
        sid = self.last(node)
        if kind == "g":
            options = [x for x, w in self._goal_strategy(agent, node).items() if w > 0]
            changes = [(x, self.model.goal_change(sid, agent, x)) for x in options]
        else:
            options = [x for x, w in self._intention_strategy(agent, node).items() if w > 0]
            changes = [(x, self.model.intention_change(sid, agent, x)) for x in options]
        if not changes:
            return [node]
        out = []
        for x, target in changes:
            if target is None:
                raise EvaluationError(f"cognitive change {x} of {agent} has no edge at {sid}")
            out.append(self.extend(node, Cognitive(agent, kind, x), target))
        return out

    def _legal(self, node: Node, agent: str) -> list[Node]:
        return self.intention_options(node, agent) or [node]


def qualitative_dependence(truster: str, trustee: str, arg: Formula) -> Formula:
    """C_trustee (not C_truster arg) and C_trustee C_truster arg."""
    return And(
        CapabilityOp(trustee, Not(CapabilityOp(truster, arg))),
        CapabilityOp(trustee, CapabilityOp(truster, arg)),
    )


def sure_belief_rewrite(f: Formula) -> Formula:
    """Belief and trust replaced by their full-observation equivalents.

    B cmp q [psi] becomes P cmp q [psi], CT becomes CAP of the trustee over P
    and DT becomes INTN of the trustee over P.
    """
    match f:
        case Belief(_, cmp, bound, arg):
            return Prob(cmp, bound, sure_belief_rewrite(arg))
        case CompetenceTrust(_, trustee, cmp, bound, arg):
            return CapabilityOp(trustee, Prob(cmp, bound, sure_belief_rewrite(arg)))
        case DispositionTrust(_, trustee, cmp, bound, arg):
            return IntentionOp(trustee, Prob(cmp, bound, sure_belief_rewrite(arg)))
    return map_children(f, sure_belief_rewrite)
