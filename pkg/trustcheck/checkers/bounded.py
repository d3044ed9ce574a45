"""Checking bounded formulas on the expanded system.

An expanded state pairs a model state with the joint observation history
that led to it. Beliefs then become local: the belief of an agent in an
expanded state is its reachability probability divided by the total over
the same-level states the agent cannot tell apart.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from ..engine.prob import Preferences, ProbEngine, Strategies, bounded_probability, temporal_horizon
from ..engine.semantics import Evaluator, Verdict
from ..errors import FragmentError, ModelError, UndefinedBeliefError, UnsupportedFormulaError
from ..logic.formula import Formula, is_query, to_text
from ..logic.fragment import FragmentClass, classify_fragment, depth
from ..model.asmas import Asmas, FinitePath, Step, TransitionType
from ..model.rational import ZERO, format_fraction

log = logging.getLogger("trustcheck")


@dataclass(frozen=True)
class ObservationRecord:
    """Joint observation of a state, with each agent's type of the step into it."""

    observations: tuple[str, ...]
    types: tuple[TransitionType, ...] | None = None

    def __str__(self) -> str:
        obs = "(" + ", ".join(self.observations) + ")"
        if self.types is None:
            return obs
        return "[" + ", ".join(str(t) for t in self.types) + "] " + obs


@dataclass(frozen=True)
class ExpandedState:
    base: str
    history: tuple[ObservationRecord, ...]

    @property
    def clk(self) -> int:
        return len(self.history) - 1

    def __str__(self) -> str:
        return f"{self.base}@{self.clk}"


class ExpandedSystem:
    """Levels of expanded states, materialized on demand.

    Level k holds the embeddings of all valid paths with k + 1 states from
    the initial support. Every level-(k+1) state keeps its predecessors so
    that reachability probabilities follow by one pass over the levels.
    """

    def __init__(self, model: Asmas, prob: ProbEngine):
        self.model = model
        self.prob = prob
        self.levels: list[list[ExpandedState]] = []
        self.predecessors: dict[ExpandedState, list[tuple[ExpandedState, Step]]] = {}
        self._representatives: dict[ExpandedState, FinitePath] = {}
        self._reach: dict[tuple[str, ExpandedState], Fraction] = {}
        self._classes: dict[tuple[str, int], dict[tuple, list[ExpandedState]]] = {}

    # Construction

    def record(self, sid: str, source: str | None = None, step: Step | None = None) -> ObservationRecord:
        observations = tuple(self.model.obs(a, sid) for a in self.model.agents)
        if source is None or step is None:
            return ObservationRecord(observations)
        types = tuple(self.model.classify_transition(a, source, step) for a in self.model.agents)
        return ObservationRecord(observations, types)

    def initial(self) -> list[ExpandedState]:
        if not self.levels:
            level = []
            for s, p in sorted(self.model.initial.items()):
                if p > 0:
                    state = ExpandedState(s, (self.record(s),))
                    self._representatives[state] = FinitePath.single(s)
                    level.append(state)
            self.levels.append(level)
        return self.levels[0]

    def successor(self, state: ExpandedState, step: Step, target: str) -> ExpandedState:
        if not self.model.is_valid_step(state.base, step, target):
            raise ModelError(f"step {step.label()} from {state.base} to {target} is undefined")
        nxt = ExpandedState(target, state.history + (self.record(target, state.base, step),))
        if nxt not in self._representatives:
            self._representatives[nxt] = self.representative(state).extend(step, target)
        return nxt

    def level(self, k: int) -> list[ExpandedState]:
        self.initial()
        while len(self.levels) <= k:
            current = self.levels[-1]
            seen: dict[ExpandedState, None] = {}
            for state in current:
                for step, target in self.model.steps_from(state.base):
                    nxt = self.successor(state, step, target)
                    self.predecessors.setdefault(nxt, []).append((state, step))
                    seen[nxt] = None
            self.levels.append(list(seen))
            log.debug(f" expanded level {len(self.levels) - 1} with {len(seen)} state(s)")
        return self.levels[k]

    def embed(self, path: FinitePath) -> ExpandedState:
        """The expanded state a path of the model corresponds to."""
        if not self.model.is_valid_path(path):
            raise ModelError(f"invalid path {path}")
        if self.model.initial.get(path.first, ZERO) == 0:
            raise ModelError(f"path {path} does not start in the initial support")
        state = next(s for s in self.initial() if s.base == path.first)
        for i, step in enumerate(path.steps):
            state = self.successor(state, step, path.states[i + 1])
        return state

    def representative(self, state: ExpandedState) -> FinitePath:
        """A path of the model embedded as state."""
        if state not in self._representatives:
            raise ModelError(f"expanded state {state} was not reached from the initial level")
        return self._representatives[state]

    # Probabilities

    def reach_prob(self, observer: str, state: ExpandedState) -> Fraction:
        """Probability, in observer's space, of the paths embedded as state."""
        key = (observer, state)
        if key in self._reach:
            return self._reach[key]
        if state.clk == 0:
            value = self.model.initial.get(state.base, ZERO)
        else:
            self.level(state.clk)
            value = ZERO
            for pred, step in self.predecessors.get(state, []):
                mass = self.reach_prob(observer, pred)
                if mass == 0:
                    continue
                value += mass * self.prob.aux_transition(observer, self.representative(pred), step, state.base)
        self._reach[key] = value
        return value

    def projection(self, observer: str, state: ExpandedState) -> tuple:
        i = self.model.agent_index(observer)
        return tuple(
            (r.observations[i], r.types[i] if r.types is not None else None) for r in state.history
        )

    def obs_class(self, observer: str, state: ExpandedState) -> list[ExpandedState]:
        """Same-level states whose history the observer cannot tell apart from state's."""
        key = (observer, state.clk)
        if key not in self._classes:
            groups: dict[tuple, list[ExpandedState]] = defaultdict(list)
            for s in self.level(state.clk):
                groups[self.projection(observer, s)].append(s)
            self._classes[key] = groups
        return self._classes[key].get(self.projection(observer, state), [])

    def local_belief(self, observer: str, state: ExpandedState) -> Fraction:
        members = self.obs_class(observer, state)
        total = sum((self.reach_prob(observer, s) for s in members), ZERO)
        if total == 0:
            raise UndefinedBeliefError(
                f"observation history of {observer} at {self.representative(state)} has probability zero"
            )
        return self.reach_prob(observer, state) / total

    # Reporting

    def size(self) -> int:
        return sum(len(level) for level in self.levels)

    def to_text(self, observer: str | None = None) -> str:
        lines = [f"expanded system of {self.model.name}: {len(self.levels)} level(s), {self.size()} state(s)"]
        for k, level in enumerate(self.levels):
            lines.append(f"level {k}: {len(level)} state(s)")
            for s in level:
                entry = f"  {s.base} via {self.representative(s)} | " + " ".join(str(r) for r in s.history)
                if observer is not None:
                    entry += f" | rP_{observer}={format_fraction(self.reach_prob(observer, s))}"
                lines.append(entry)
        return "\n".join(lines) + "\n"


class BoundedChecker(Evaluator):
    """Satisfaction labelling over expanded states.

    The clauses are those of the direct evaluator; beliefs come from local
    belief values and path formulas are evaluated on expanded continuations.
    """

    def __init__(
        self,
        model: Asmas,
        preferences: Preferences | None = None,
        strategies: Strategies | None = None,
        nesting_depth: int = 2,
    ):
        super().__init__(model, ProbEngine(model, preferences, strategies), strategies)
        self.nesting_depth = nesting_depth
        self.system = ExpandedSystem(model, self.prob)

    # Node hooks

    def last(self, node) -> str:
        return node.base

    def history(self, node) -> FinitePath:
        return self.system.representative(node)

    def extend(self, node, step: Step, target: str) -> ExpandedState:
        return self.system.successor(node, step, target)

    def belief_weights(self, observer: str, node) -> list[tuple[ExpandedState, Fraction]]:
        return [(s, self.system.local_belief(observer, s)) for s in self.system.obs_class(observer, node)]

    def probability(self, node, psi: Formula) -> Fraction:
        if temporal_horizon(psi) is None:
            raise FragmentError(f"unbounded path formula {to_text(psi)} is outside the bounded fragment")
        return bounded_probability(node, psi, self._moves, self.holds)

    def _moves(self, node: ExpandedState) -> list[tuple[Fraction, ExpandedState]]:
        return [
            (p, self.system.successor(node, step, target))
            for step, target, p in self.model.moves(node.base)
        ]

    # Entry points

    def sat(self, node: ExpandedState, f: Formula) -> bool:
        return self.holds(node, f)

    def check(self, formula: Formula, at: FinitePath | None = None) -> Verdict:
        """Verdict of formula on every initial expanded state, or at the embedding of a path."""
        if classify_fragment(formula, self.nesting_depth) is not FragmentClass.BPRTL:
            raise FragmentError(f"{to_text(formula)} is not in the bounded fragment")
        log.debug(f" bounded check of {to_text(formula)} with depth {depth(formula)}")
        starts = [self.system.embed(at)] if at is not None else self.system.initial()
        if is_query(formula):
            if len(starts) != 1:
                raise UnsupportedFormulaError("a query needs a single start; pass a context path")
            return self.value(starts[0], formula)
        return all(self.sat(s, formula) for s in starts)

    def expand(self, levels: int) -> ExpandedSystem:
        self.system.level(levels)
        return self.system


def expand(model: Asmas, formula: Formula, prob: ProbEngine | None = None, nesting_depth: int = 2) -> ExpandedSystem:
    """Expanded system materialized to the depth of a bounded formula."""
    if classify_fragment(formula, nesting_depth) is not FragmentClass.BPRTL:
        raise FragmentError(f"{to_text(formula)} is not in the bounded fragment")
    system = ExpandedSystem(model, prob or ProbEngine(model))
    system.level(depth(formula))
    return system
