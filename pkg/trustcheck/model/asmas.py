import itertools
import logging
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from ..errors import ModelError
from .rational import ONE, ZERO, uniform

log = logging.getLogger("trustcheck")

# Reserved silent action and silent intention
SILENT = "_"
SINK_STATE = "__sink__"

GoalSet = frozenset[str]
JointAction = tuple[str, ...]


def format_goal_set(goals: GoalSet) -> str:
    return "{" + ",".join(sorted(goals)) + "}"


def goal_set_key(goals: GoalSet) -> str:
    """Key used for goal sets in model files: sorted names joined by commas."""
    return ",".join(sorted(goals))


def parse_goal_set_key(key: str) -> GoalSet:
    return frozenset(g.strip() for g in key.split(",") if g.strip())


@dataclass(frozen=True)
class GlobalState:
    id: str
    locals: dict[str, str]
    env: str | None
    goals: dict[str, GoalSet]
    intention: dict[str, str]
    labels: frozenset[str] = frozenset()

    def component_signature(self) -> tuple:
        return (
            tuple(sorted(self.locals.items())),
            self.env,
            tuple(sorted((a, tuple(sorted(g))) for a, g in self.goals.items())),
            tuple(sorted(self.intention.items())),
        )


@dataclass(frozen=True)
class Temporal:
    action: JointAction

    def label(self) -> str:
        return "a(" + ",".join(self.action) + ")"


@dataclass(frozen=True)
class Cognitive:
    agent: str
    kind: str  # "g" or "i"
    value: GoalSet | str

    def label(self) -> str:
        if self.kind == "g":
            return f"{self.agent}.g.{format_goal_set(self.value)}"  # type: ignore[arg-type]
        return f"{self.agent}.i.{self.value}"


Step = Temporal | Cognitive


def step_sort_key(step: Step) -> tuple:
    return (0 if isinstance(step, Temporal) else 1, step.label())


@dataclass(frozen=True)
class CognitiveEdge:
    source: str
    target: str
    agent: str
    kind: str
    value: GoalSet | str

    @property
    def step(self) -> Cognitive:
        return Cognitive(self.agent, self.kind, self.value)


class TransitionKind(str, Enum):
    action = "action"
    own_goal = "own-goal"
    own_intention = "own-intention"
    other_goal = "other-goal"
    other_intention = "other-intention"


@dataclass(frozen=True)
class TransitionType:
    kind: TransitionKind
    agent: str | None = None
    detail: JointAction | GoalSet | str | None = None

    def __str__(self) -> str:
        if self.kind is TransitionKind.action:
            return Temporal(self.detail).label()  # type: ignore[arg-type]
        letter = "g" if self.kind.value.endswith("goal") else "i"
        if self.kind in (TransitionKind.own_goal, TransitionKind.own_intention):
            return Cognitive(self.agent, letter, self.detail).label()  # type: ignore[arg-type]
        return f"{self.agent}.{letter}"


@dataclass(frozen=True)
class FinitePath:
    states: tuple[str, ...]
    steps: tuple[Step, ...] = ()

    def __post_init__(self):
        if not self.states or len(self.steps) != len(self.states) - 1:
            raise ModelError(
                f"path needs one step between each pair of states, got {len(self.states)} states and {len(self.steps)} steps"
            )

    @classmethod
    def single(cls, state: str) -> "FinitePath":
        return cls((state,))

    def __len__(self) -> int:
        return len(self.states)

    def __str__(self) -> str:
        return " ".join(self.states)

    @property
    def last(self) -> str:
        return self.states[-1]

    @property
    def first(self) -> str:
        return self.states[0]

    def extend(self, step: Step, state: str) -> "FinitePath":
        return FinitePath(self.states + (state,), self.steps + (step,))

    def prefix(self, length: int) -> "FinitePath":
        return FinitePath(self.states[:length], self.steps[: length - 1])


@dataclass(frozen=True)
class GuardMechanism:
    """Guard formulas per agent, keyed by pro-attitude.

    goal[A][x] guards goal set x, intention[A][(i, y)] guards intention i under
    goal set y; cross_goal/cross_intention hold A's guards over another agent B.
    """

    goal: dict = field(default_factory=dict)
    intention: dict = field(default_factory=dict)
    cross_goal: dict = field(default_factory=dict)
    cross_intention: dict = field(default_factory=dict)

    def has_goal_guards(self, agent: str) -> bool:
        return bool(self.goal.get(agent))

    def has_intention_guards(self, agent: str) -> bool:
        return bool(self.intention.get(agent))


@dataclass
class Asmas:
    name: str
    agents: tuple[str, ...]
    states: dict[str, GlobalState]
    initial: dict[str, Fraction]
    transitions: dict[str, dict[JointAction, dict[str, Fraction]]]
    cognitive_edges: tuple[CognitiveEdge, ...]
    legal_goals: dict[str, dict[str, frozenset[GoalSet]]]
    legal_intentions: dict[str, dict[str, frozenset[str]]]
    observation_components: dict[str, tuple[str, ...]]
    goal_preferences: dict[tuple[str, str], dict[str, dict[GoalSet, Fraction]]]
    intention_preferences: dict[tuple[str, str], dict[str, dict[str, Fraction]]]
    catalog: dict[str, dict[str, dict[str, dict[str, Fraction]]]]
    goals: dict[str, tuple[str, ...]]
    intentions: dict[str, tuple[str, ...]]
    actions: dict[str, tuple[str, ...]]
    propositions: frozenset[str] = frozenset()
    guards: GuardMechanism | None = None
    goal_strategies: dict[str, dict[str, dict[GoalSet, Fraction]]] = field(
        default_factory=dict
    )
    intention_strategies: dict[str, dict[str, dict[str, Fraction]]] = field(
        default_factory=dict
    )
    intention_of_goals: dict[str, dict[str, str]] = field(default_factory=dict)
    enabled: dict[str, tuple[str, ...]] = field(default_factory=dict)
    strict_deterministic: bool = False
    cross_type_weighting: bool = False
    sink_completion: str = "self_loop"

    # Derived indices, excluded from structural equality
    completed: tuple[str, ...] = field(init=False, compare=False, repr=False)
    _all_states: dict[str, GlobalState] = field(
        init=False, compare=False, repr=False
    )
    _temporal: dict = field(init=False, compare=False, repr=False)
    _cognitive: dict = field(init=False, compare=False, repr=False)
    _labels: dict = field(init=False, compare=False, repr=False)
    _obs: dict = field(init=False, compare=False, repr=False)
    _by_signature: dict = field(init=False, compare=False, repr=False)
    _moves: dict = field(init=False, compare=False, repr=False)
    _temporal_moves: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.agents:
            raise ModelError("a model needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise ModelError("agent names must be unique")
        self._all_states = dict(sorted(self.states.items()))
        self._temporal = {s: dict(self.transitions.get(s, {})) for s in self._all_states}
        self._complete_sinks()
        self._cognitive = {s: [] for s in self._all_states}
        for edge in self.cognitive_edges:
            if edge.source not in self._all_states or edge.target not in self._all_states:
                raise ModelError(
                    f"cognitive edge {edge.source} -> {edge.target} names an unknown state"
                )
            self._cognitive[edge.source].append((edge.step, edge.target))
        for sid in self._cognitive:
            self._cognitive[sid].sort(key=lambda e: (e[1], e[0].label()))
        self._labels = {sid: self._compile_labels(st) for sid, st in self._all_states.items()}
        self._obs = {
            agent: {sid: self._observe(agent, st) for sid, st in self._all_states.items()}
            for agent in self.agents
        }
        self._by_signature = {}
        for sid, st in self._all_states.items():
            self._by_signature.setdefault(st.component_signature(), []).append(sid)
        self._moves = {}
        self._temporal_moves = {}

    def _complete_sinks(self):
        completed = []
        for sid in list(self._all_states):
            if self._temporal[sid]:
                continue
            completed.append(sid)
            if self.sink_completion == "sink_state":
                self._temporal[sid] = {self.silent_joint: {SINK_STATE: ONE}}
            else:
                self._temporal[sid] = {self.silent_joint: {sid: ONE}}
        if self.sink_completion == "sink_state" and completed:
            self._all_states[SINK_STATE] = GlobalState(
                id=SINK_STATE,
                locals={a: SILENT for a in self.agents},
                env=None,
                goals={a: frozenset() for a in self.agents},
                intention={a: SILENT for a in self.agents},
                labels=frozenset({"sink"}),
            )
            self._temporal[SINK_STATE] = {self.silent_joint: {SINK_STATE: ONE}}
            completed.append(SINK_STATE)
        self.completed = tuple(completed)
        if completed:
            log.debug(f" completed {len(completed)} state(s) without temporal transitions")

    def _compile_labels(self, st: GlobalState) -> frozenset[str]:
        compiled = set(st.labels)
        for agent in self.agents:
            compiled.add(f"a{agent}={st.locals.get(agent, SILENT)}")
            for goal in st.goals.get(agent, ()):
                compiled.add(f"goal{agent}={goal}")
            compiled.add(f"intn{agent}={st.intention.get(agent, SILENT)}")
        if st.env is not None:
            compiled.add(f"env={st.env}")
        return frozenset(compiled)

    def _observe(self, agent: str, st: GlobalState) -> str:
        if st.id == SINK_STATE:
            return SINK_STATE
        parts = []
        for component in self.observation_components[agent]:
            if component == "env":
                parts.append(st.env if st.env is not None else "-")
            elif component == "id":
                parts.append(st.id)
            else:
                what, _, owner = component.partition(":")
                if what == "local":
                    parts.append(st.locals.get(owner, SILENT))
                elif what == "goals":
                    parts.append(format_goal_set(st.goals.get(owner, frozenset())))
                elif what == "intention":
                    parts.append(st.intention.get(owner, SILENT))
                elif what == "label":
                    parts.append("1" if owner in st.labels else "0")
                else:
                    raise ModelError(f"unknown observation component '{component}'")
        return "|".join(parts)

    # Basic queries

    @property
    def silent_joint(self) -> JointAction:
        return tuple(SILENT for _ in self.agents)

    @property
    def state_ids(self) -> tuple[str, ...]:
        return tuple(self._all_states)

    @property
    def all_propositions(self) -> frozenset[str]:
        return frozenset().union(self.propositions, *self._labels.values())

    def state(self, sid: str) -> GlobalState:
        try:
            return self._all_states[sid]
        except KeyError:
            raise ModelError(f"unknown state '{sid}'")

    def labels(self, sid: str) -> frozenset[str]:
        return self._labels[sid]

    def obs(self, agent: str, sid: str) -> str:
        return self._obs[agent][sid]

    def agent_index(self, agent: str) -> int:
        return self.agents.index(agent)

    def others(self, agent: str) -> tuple[str, ...]:
        return tuple(a for a in self.agents if a != agent)

    def legal_goals_at(self, agent: str, sid: str) -> tuple[GoalSet, ...]:
        options = self.legal_goals.get(agent, {}).get(sid, frozenset())
        return tuple(sorted(options, key=goal_set_key))

    def legal_intentions_at(self, agent: str, sid: str) -> tuple[str, ...]:
        return tuple(sorted(self.legal_intentions.get(agent, {}).get(sid, frozenset())))

    def find_state(self, signature: tuple) -> str | None:
        found = self._by_signature.get(signature, [])
        if len(found) > 1:
            raise ModelError(f"states {found} share all components")
        return found[0] if found else None

    # Temporal dynamics

    def temporal_transitions(self, sid: str) -> dict[JointAction, dict[str, Fraction]]:
        return self._temporal[sid]

    def action_strategy(self, agent: str, sid: str) -> dict[str, Fraction]:
        """Local action distribution implementing the agent's current intention."""
        intention = self.state(sid).intention.get(agent, SILENT)
        if intention == SILENT:
            return {SILENT: ONE}
        entries = self.catalog.get(agent, {}).get(intention)
        if entries is None:
            raise ModelError(
                f"intention '{intention}' of agent {agent} unmapped in catalog"
            )
        dist = entries.get(sid) or entries.get(self.obs(agent, sid)) or entries.get("*")
        return dict(dist) if dist else {SILENT: ONE}

    def induced_joint_action(self, sid: str) -> dict[JointAction, Fraction]:
        if sid in self.completed:
            return {self.silent_joint: ONE}
        per_agent = [sorted(self.action_strategy(a, sid).items()) for a in self.agents]
        joint: dict[JointAction, Fraction] = {}
        for combo in itertools.product(*per_agent):
            prob = ONE
            for _, p in combo:
                prob *= p
            if prob > 0:
                action = tuple(a for a, _ in combo)
                joint[action] = joint.get(action, ZERO) + prob
        return dict(sorted(joint.items()))

    def temporal_moves(self, sid: str) -> list[tuple[JointAction, str, Fraction]]:
        """Positive-probability temporal moves under the induced joint action."""
        if sid not in self._temporal_moves:
            out = []
            temporal = self._temporal[sid]
            for action, pa in self.induced_joint_action(sid).items():
                for target, pt in temporal.get(action, {}).items():
                    if pa * pt > 0:
                        out.append((action, target, pa * pt))
            out.sort(key=lambda m: (m[1], m[0]))
            self._temporal_moves[sid] = out
        return self._temporal_moves[sid]

    def moves(self, sid: str) -> list[tuple[Step, str, Fraction]]:
        """Positive-probability moves of the induced chain.

        A state without temporal transitions continues by its cognitive stage
        when it has one; otherwise the chain moves temporally, sink completion
        included.
        """
        if sid not in self._moves:
            stage = self.cognitive_stage(sid)
            if stage:
                self._moves[sid] = list(stage)
            else:
                self._moves[sid] = [(Temporal(a), t, p) for a, t, p in self.temporal_moves(sid)]
        return self._moves[sid]

    def chain_row(self, sid: str) -> dict[str, Fraction]:
        row: dict[str, Fraction] = {}
        for _, target, p in self.moves(sid):
            row[target] = row.get(target, ZERO) + p
        return row

    # Cognitive dynamics

    def cognitive_successors(
        self, sid: str, agent: str | None = None, kind: str | None = None
    ) -> list[tuple[Cognitive, str]]:
        return [
            (step, target)
            for step, target in self._cognitive[sid]
            if (agent is None or step.agent == agent) and (kind is None or step.kind == kind)
        ]

    def goal_change(self, sid: str, agent: str, goals: GoalSet) -> str | None:
        for step, target in self.cognitive_successors(sid, agent, "g"):
            if step.value == goals:
                return target
        return None

    def intention_change(self, sid: str, agent: str, intention: str) -> str | None:
        for step, target in self.cognitive_successors(sid, agent, "i"):
            if step.value == intention:
                return target
        return None

    def cognitive_stage(self, sid: str) -> list[tuple[Cognitive, str, Fraction]]:
        """Cognitive moves continuing a state that has no temporal transitions.

        The first agent in agent order with an enabled goal change, then
        intention change, moves by its declared strategy, uniform over its
        legal options where none is declared.
        """
        if sid not in self.completed or sid == SINK_STATE:
            return []
        enabled = self.enabled.get(sid)
        for agent in self.agents:
            for kind in ("g", "i"):
                if enabled is not None and f"{agent}.{kind}" not in enabled:
                    continue
                if kind == "g":
                    declared = self.goal_strategies.get(agent, {}).get(sid)
                    legal: tuple = self.legal_goals_at(agent, sid)
                    change = self.goal_change
                else:
                    declared = self.intention_strategies.get(agent, {}).get(sid)
                    legal = self.legal_intentions_at(agent, sid)
                    change = self.intention_change
                dist = declared if declared is not None else (uniform(legal) if legal else {})
                out = []
                for value, p in dist.items():
                    if p <= 0:
                        continue
                    target = change(sid, agent, value)
                    if target is None:
                        raise ModelError(f"cognitive change {value} of {agent} has no edge at {sid}")
                    out.append((Cognitive(agent, kind, value), target, p))
                if out:
                    return sorted(out, key=lambda m: (m[1], m[0].label()))
        return []

    def intention_options(self, sid: str, agent: str) -> list[tuple[Cognitive, str]]:
        """Changes by which agent takes on each intention it can legally adopt at sid.

        An agent whose intention is determined by its goals adopts intentions
        through its legal goal changes.
        """
        legal = self.legal_intentions_at(agent, sid)
        if legal:
            changes = [(Cognitive(agent, "i", x), self.intention_change(sid, agent, x)) for x in legal]
        elif agent in self.intention_of_goals:
            changes = [(Cognitive(agent, "g", x), self.goal_change(sid, agent, x)) for x in self.legal_goals_at(agent, sid)]
        else:
            return []
        out = []
        for step, target in changes:
            if target is None:
                raise ModelError(f"cognitive change {step.label()} has no edge at {sid}")
            out.append((step, target))
        return out

    def expected_target_signature(self, sid: str, step: Cognitive) -> tuple:
        """Components of A.g(s,x) or A.i(s,x): source with one component replaced."""
        st = self.state(sid)
        goals = dict(st.goals)
        intention = dict(st.intention)
        if step.kind == "g":
            goals[step.agent] = step.value  # type: ignore[assignment]
            mapped = self.intention_of_goals.get(step.agent, {}).get(
                goal_set_key(step.value)  # type: ignore[arg-type]
            )
            if mapped is not None:
                intention[step.agent] = mapped
        else:
            intention[step.agent] = step.value  # type: ignore[assignment]
        return GlobalState(st.id, st.locals, st.env, goals, intention).component_signature()

    # Paths

    def steps_from(self, sid: str) -> list[tuple[Step, str]]:
        """Every one-step successor, temporal then cognitive, in deterministic order."""
        out: list[tuple[Step, str]] = []
        for action, dist in sorted(self._temporal[sid].items()):
            for target, p in sorted(dist.items()):
                if p > 0:
                    out.append((Temporal(action), target))
        out.extend(self._cognitive[sid])
        return out

    def is_valid_step(self, sid: str, step: Step, target: str) -> bool:
        if isinstance(step, Temporal):
            return self._temporal[sid].get(step.action, {}).get(target, ZERO) > 0
        return (step, target) in self._cognitive[sid]

    def is_valid_path(self, path: FinitePath) -> bool:
        if any(s not in self._all_states for s in path.states):
            return False
        return all(
            self.is_valid_step(path.states[i], path.steps[i], path.states[i + 1])
            for i in range(len(path.steps))
        )

    def path_from_ids(self, ids: list[str] | str) -> FinitePath:
        """Build a path from state ids, inferring the unique step between neighbours."""
        if isinstance(ids, str):
            ids = ids.split()
        if not ids:
            raise ModelError("empty path")
        for sid in ids:
            self.state(sid)
        steps = []
        for source, target in zip(ids, ids[1:]):
            candidates = [step for step, t in self.steps_from(source) if t == target]
            if not candidates:
                raise ModelError(f"no transition from {source} to {target}")
            if len(candidates) > 1:
                labels = ", ".join(c.label() for c in candidates)
                raise ModelError(f"ambiguous step from {source} to {target}: {labels}")
            steps.append(candidates[0])
        return FinitePath(tuple(ids), tuple(steps))

    def initial_paths(self) -> list[FinitePath]:
        return [FinitePath.single(s) for s, p in sorted(self.initial.items()) if p > 0]

    def enumerate_paths(
        self, max_length: int, starts: list[str] | None = None
    ) -> Iterator[FinitePath]:
        """All valid paths with at most max_length states, depth first."""
        roots = sorted(starts) if starts is not None else [
            s for s, p in sorted(self.initial.items()) if p > 0
        ]
        stack = [FinitePath.single(s) for s in reversed(roots)]
        while stack:
            path = stack.pop()
            yield path
            if len(path) < max_length:
                for step, target in reversed(self.steps_from(path.last)):
                    stack.append(path.extend(step, target))

    # Transition types

    def classify_transition(self, observer: str, sid: str, step: Step) -> TransitionType:
        if isinstance(step, Temporal):
            if step.action not in self._temporal[sid]:
                raise ModelError(f"joint action {step.action} undefined at {sid}")
            return TransitionType(TransitionKind.action, detail=step.action)
        if not any(s == step for s, _ in self._cognitive[sid]):
            raise ModelError(f"cognitive step {step.label()} invalid at {sid}")
        if step.agent == observer:
            kind = TransitionKind.own_goal if step.kind == "g" else TransitionKind.own_intention
            return TransitionType(kind, step.agent, step.value)
        kind = TransitionKind.other_goal if step.kind == "g" else TransitionKind.other_intention
        return TransitionType(kind, step.agent)

    def enumerate_successors(
        self, observer: str, sid: str, ttype: TransitionType
    ) -> list[tuple[str, Step]]:
        out = [
            (target, step)
            for step, target in self.steps_from(sid)
            if self.classify_transition(observer, sid, step) == ttype
        ]
        return sorted(set(out), key=lambda e: (e[0], step_sort_key(e[1])))

    def path_types(self, observer: str, path: FinitePath) -> tuple[TransitionType, ...]:
        return tuple(
            self.classify_transition(observer, path.states[i], path.steps[i])
            for i in range(len(path.steps))
        )
