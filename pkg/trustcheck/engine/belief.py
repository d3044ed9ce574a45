"""Beliefs of an agent over the paths consistent with its observations.

The direct definition conditions the observer's path measure on the
observation class of a trace; the recursive update and the belief ASMAS
reach the same numbers step by step.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ModelError, UndefinedBeliefError
from ..model.asmas import Asmas, FinitePath, TransitionKind, TransitionType, parse_goal_set_key
from ..model.rational import ONE, ZERO, format_fraction
from .prob import ProbEngine, StatePreferences

log = logging.getLogger("trustcheck")


@dataclass(frozen=True)
class ObservationTrace:
    observer: str
    observations: tuple[str, ...]
    types: tuple[TransitionType, ...] = ()

    def __post_init__(self):
        if len(self.types) != len(self.observations) - 1:
            raise ValueError("an observation trace has one transition type between observations")

    def __len__(self) -> int:
        return len(self.observations)

    def __str__(self) -> str:
        parts = [self.observations[0]]
        for t, o in zip(self.types, self.observations[1:]):
            parts += [str(t), o]
        return " ".join(parts)

    def extend(self, ttype: TransitionType, observation: str) -> "ObservationTrace":
        return ObservationTrace(self.observer, self.observations + (observation,), self.types + (ttype,))

    def prefix(self, length: int) -> "ObservationTrace":
        return ObservationTrace(self.observer, self.observations[:length], self.types[: length - 1])


def observation_trace(model: Asmas, observer: str, path: FinitePath) -> ObservationTrace:
    return ObservationTrace(
        observer,
        tuple(model.obs(observer, s) for s in path.states),
        model.path_types(observer, path),
    )


@dataclass(frozen=True)
class BeliefAssignment:
    trace: ObservationTrace
    weights: dict[FinitePath, Fraction] = field(hash=False)

    def __getitem__(self, path: FinitePath) -> Fraction:
        return self.weights.get(path, ZERO)

    def support(self) -> list[FinitePath]:
        return [p for p, w in self.weights.items() if w > 0]

    def to_dict(self) -> dict[str, str]:
        return {str(p): format_fraction(w) for p, w in self.weights.items()}


@dataclass(frozen=True)
class BeliefState:
    """Distribution over states, stored sorted so that equal beliefs compare equal."""

    entries: tuple[tuple[str, Fraction], ...]

    @classmethod
    def of(cls, weights: dict[str, Fraction]) -> "BeliefState":
        return cls(tuple(sorted((s, w) for s, w in weights.items() if w > 0)))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.entries)

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.entries)

    def __str__(self) -> str:
        return "<" + ", ".join(f"{s}:{format_fraction(w)}" for s, w in self.entries) + ">"


@dataclass
class BeliefExploration:
    observer: str
    depth: int
    states: list[BeliefState]
    edges: list[tuple[int, TransitionType, int, Fraction]]
    frontier: list[int]

    def to_text(self) -> str:
        lines = [f"belief ASMAS of {self.observer} to depth {self.depth}: {len(self.states)} belief state(s)"]
        lines += [f"  b{i} = {b}" for i, b in enumerate(self.states)]
        lines += [f"  b{i} -{t}-> b{j} : {format_fraction(p)}" for i, t, j, p in self.edges]
        if self.frontier:
            lines.append("  frontier (not expanded): " + " ".join(f"b{i}" for i in self.frontier))
        return "\n".join(lines) + "\n"


def _normalized(weights: dict, trace: ObservationTrace) -> dict:
    total = sum(weights.values(), ZERO)
    if total == 0:
        raise UndefinedBeliefError(f"observation trace '{trace}' of {trace.observer} has probability zero")
    return {k: w / total for k, w in weights.items()}


class BeliefEngine:
    def __init__(self, prob: ProbEngine, asmas_depth: int = 4):
        self.prob = prob
        self.asmas_depth = asmas_depth
        self.model = prob.model
        # belief ASMAS semantics: state-defined preferences, own steps weigh 1
        self.state_prob = ProbEngine(self.model, StatePreferences(self.model), cross_type=False)
        self._classes: dict[ObservationTrace, list[FinitePath]] = {}
        self._assignments: dict[ObservationTrace, BeliefAssignment] = {}

    # Path classes

    def obs_class(self, trace: ObservationTrace) -> list[FinitePath]:
        """Valid initialized paths producing exactly this trace for its observer."""
        if trace in self._classes:
            return self._classes[trace]
        model, observer = self.model, trace.observer
        paths = [
            FinitePath.single(s)
            for s, p in sorted(model.initial.items())
            if p > 0 and model.obs(observer, s) == trace.observations[0]
        ]
        for ttype, observation in zip(trace.types, trace.observations[1:]):
            extended = []
            for path in paths:
                for target, step in model.enumerate_successors(observer, path.last, ttype):
                    if model.obs(observer, target) == observation:
                        extended.append(path.extend(step, target))
            paths = extended
        self._classes[trace] = paths
        return paths

    def trace_of(self, observer: str, path: FinitePath) -> ObservationTrace:
        return observation_trace(self.model, observer, path)

    def assignment(self, trace: ObservationTrace) -> BeliefAssignment:
        """Direct definition: path measure conditioned on the observation class."""
        if trace not in self._assignments:
            weights = {p: self.prob.path_probability(trace.observer, p) for p in self.obs_class(trace)}
            self._assignments[trace] = BeliefAssignment(trace, _normalized(weights, trace))
            log.debug(f" belief class of size {len(weights)} for {trace.observer}")
        return self._assignments[trace]

    def belief(self, trace: ObservationTrace, path: FinitePath) -> Fraction:
        return self.assignment(trace)[path]

    def beliefs_at(self, observer: str, path: FinitePath) -> BeliefAssignment:
        return self.assignment(self.trace_of(observer, path))

    # Recursive update

    def initial_assignment(self, observer: str, observation: str) -> BeliefAssignment:
        trace = ObservationTrace(observer, (observation,))
        weights = {
            FinitePath.single(s): p
            for s, p in sorted(self.model.initial.items())
            if p > 0 and self.model.obs(observer, s) == observation
        }
        return BeliefAssignment(trace, _normalized(weights, trace))

    def belief_update_step(
        self, prior: BeliefAssignment, observation: str, ttype: TransitionType
    ) -> BeliefAssignment:
        observer = prior.trace.observer
        trace = prior.trace.extend(ttype, observation)
        weights: dict[FinitePath, Fraction] = {}
        for path, w in prior.weights.items():
            if w == 0:
                continue
            for target, step in self.model.enumerate_successors(observer, path.last, ttype):
                if self.model.obs(observer, target) != observation:
                    continue
                factor = self.prob.aux_transition(observer, path, step, target)
                if factor > 0:
                    weights[path.extend(step, target)] = w * factor
        return BeliefAssignment(trace, _normalized(weights, trace))

    def recursive_assignment(self, trace: ObservationTrace) -> BeliefAssignment:
        current = self.initial_assignment(trace.observer, trace.observations[0])
        for ttype, observation in zip(trace.types, trace.observations[1:]):
            current = self.belief_update_step(current, observation, ttype)
        return current

    # Belief ASMAS

    def belief_asmas_initial(self, observer: str, observation: str) -> BeliefState:
        weights = {
            s: p for s, p in self.model.initial.items() if p > 0 and self.model.obs(observer, s) == observation
        }
        if not weights:
            raise UndefinedBeliefError(f"observation '{observation}' of {observer} is not initial")
        total = sum(weights.values(), ZERO)
        return BeliefState.of({s: p / total for s, p in weights.items()})

    def _state_moves(self, observer: str, b: BeliefState, ttype: TransitionType) -> dict[str, dict[str, Fraction]]:
        """Unnormalized successor weights of b under ttype, grouped by observation."""
        grouped: dict[str, dict[str, Fraction]] = defaultdict(dict)
        for s, w in b.entries:
            for target, step in self.model.enumerate_successors(observer, s, ttype):
                factor = self.state_prob.aux_transition(observer, s, step, target)
                if factor == 0:
                    continue
                o = self.model.obs(observer, target)
                grouped[o][target] = grouped[o].get(target, ZERO) + w * factor
        return grouped

    def belief_successor(
        self, observer: str, b: BeliefState, ttype: TransitionType, observation: str
    ) -> tuple[BeliefState, Fraction] | None:
        """Successor belief after ttype and observation with its probability, None if impossible."""
        weights = self._state_moves(observer, b, ttype).get(observation)
        if not weights:
            return None
        total = sum(weights.values(), ZERO)
        return BeliefState.of({s: w / total for s, w in weights.items()}), total

    def kinds_at(self, observer: str, b: BeliefState) -> list[TransitionType]:
        kinds = {
            self.model.classify_transition(observer, s, step)
            for s in b.support
            for step, _ in self.model.steps_from(s)
        }
        return sorted(kinds, key=_type_sort_key)

    def explore(self, observer: str, depth: int | None = None) -> BeliefExploration:
        """Breadth-first belief ASMAS from every initial observation, to a depth bound.

        The bound defaults to the engine's asmas_depth.
        """
        depth = self.asmas_depth if depth is None else depth
        initial_obs = sorted({self.model.obs(observer, s) for s, p in self.model.initial.items() if p > 0})
        states: list[BeliefState] = []
        index: dict[BeliefState, int] = {}

        def intern(b: BeliefState) -> int:
            if b not in index:
                index[b] = len(states)
                states.append(b)
            return index[b]

        layer = [intern(self.belief_asmas_initial(observer, o)) for o in initial_obs]
        edges = []
        seen = set(layer)
        for _ in range(depth):
            next_layer = []
            for i in layer:
                b = states[i]
                for ttype in self.kinds_at(observer, b):
                    for o, weights in sorted(self._state_moves(observer, b, ttype).items()):
                        total = sum(weights.values(), ZERO)
                        j = intern(BeliefState.of({s: w / total for s, w in weights.items()}))
                        edges.append((i, ttype, j, total))
                        if j not in seen:
                            seen.add(j)
                            next_layer.append(j)
            layer = next_layer
        log.debug(f" explored {len(states)} belief state(s) of {observer} to depth {depth}")
        return BeliefExploration(observer, depth, states, edges, layer)

    # Sure beliefs

    def sure_belief_scan(self, observer: str, max_length: int) -> tuple[bool, bool]:
        """(every belief is 0 or 1 on paths up to max_length, observation function is injective)."""
        symbols = [self.model.obs(observer, s) for s in self.model.state_ids]
        injective = len(set(symbols)) == len(symbols)
        sure = True
        for path in self.model.enumerate_paths(max_length):
            try:
                value = self.beliefs_at(observer, path)[path]
            except UndefinedBeliefError:
                continue
            if value not in (ZERO, ONE):
                sure = False
                break
        return sure, injective


def _type_sort_key(t: TransitionType) -> tuple:
    order = list(TransitionKind).index(t.kind)
    return (order, t.agent or "", str(t))


def parse_transition_type(model: Asmas, observer: str, token: str) -> TransitionType:
    """Inverse of str(TransitionType): a(x,y), A.g, A.i, A.g.{x,y} or A.i.x."""
    if token.startswith("a(") and token.endswith(")"):
        action = tuple(part.strip() for part in token[2:-1].split(","))
        if len(action) != len(model.agents):
            raise ModelError(f"joint action {token} needs one action per agent")
        return TransitionType(TransitionKind.action, detail=action)
    agent, _, rest = token.partition(".")
    letter, _, detail = rest.partition(".")
    if agent not in model.agents or letter not in ("g", "i"):
        raise ModelError(f"cannot read transition type '{token}'")
    if agent != observer:
        if detail:
            raise ModelError(f"{observer} does not see which {letter} {agent} picks: '{token}'")
        kind = TransitionKind.other_goal if letter == "g" else TransitionKind.other_intention
        return TransitionType(kind, agent)
    if not detail:
        raise ModelError(f"own step '{token}' of {observer} needs its value")
    if letter == "g":
        return TransitionType(TransitionKind.own_goal, agent, parse_goal_set_key(detail.strip("{}")))
    return TransitionType(TransitionKind.own_intention, agent, detail)


def parse_trace(model: Asmas, observer: str, text: str) -> ObservationTrace:
    """Observation trace from alternating observation and type tokens.

    An observation is either written out or given as o(<state>), the
    observer's observation of that state.
    """
    tokens = text.split()
    if len(tokens) % 2 == 0:
        raise ModelError("a trace alternates observations and transition types, starting and ending with an observation")

    def observation(token: str) -> str:
        if token.startswith("o(") and token.endswith(")"):
            return model.obs(observer, model.state(token[2:-1]).id)
        return token

    return ObservationTrace(
        observer,
        tuple(observation(t) for t in tokens[0::2]),
        tuple(parse_transition_type(model, observer, t) for t in tokens[1::2]),
    )
