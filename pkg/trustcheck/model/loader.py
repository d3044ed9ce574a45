import importlib.resources
import json
import logging
import os
from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from ..errors import ModelError, ValidationFailed
from ..logic.formula import to_text
from ..logic.parser import parse_formula
from ..settings import Settings
from .asmas import (
    Asmas,
    Cognitive,
    CognitiveEdge,
    GlobalState,
    GuardMechanism,
    goal_set_key,
    parse_goal_set_key,
)
from .rational import format_fraction, parse_probability
from .validate import validate_model

log = logging.getLogger("trustcheck")

SHIPPED_MODELS = ("trust_game",)


def _check_probability(value):
    try:
        parse_probability(value)
    except ModelError as e:
        raise ValueError(str(e))
    return value


# Integers or "num/den" strings, floats are rejected
Probability = Annotated[int | str, BeforeValidator(_check_probability)]
Distribution = dict[str, Probability]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class StateEntry(_Section):
    id: str
    locals: dict[str, str] = {}
    env: str | None = None
    goals: dict[str, list[str]] = {}
    intention: dict[str, str] = {}
    labels: list[str] = []


class TransitionEntry(_Section):
    source: str = Field(alias="from")
    action: list[str]
    to: Distribution


class CognitiveEdgeEntry(_Section):
    source: str = Field(alias="from")
    to: str
    agent: str
    goals: list[str] | None = None
    intention: str | None = None

    @model_validator(mode="after")
    def _one_kind(self):
        if (self.goals is None) == (self.intention is None):
            raise ValueError("a cognitive edge changes either goals or an intention")
        return self


class PreferenceEntry(_Section):
    owner: str
    over: str
    states: list[str]
    distribution: Distribution


class StrategyEntry(_Section):
    agent: str
    kind: Literal["goal", "intention"]
    states: list[str]
    distribution: Distribution


class GuardEntry(_Section):
    agent: str
    over: str | None = None
    goals: list[str] | None = None
    intention: str | None = None
    formula: str

    @model_validator(mode="after")
    def _guarded_attitude(self):
        if self.goals is None:
            raise ValueError("a guard names the goal set it guards or is conditioned on")
        return self


class ModeFlags(_Section):
    strict_deterministic: bool = False
    cross_type_weighting: bool = False
    sink_completion: Literal["self_loop", "sink_state"] = "self_loop"


class ModelDocument(_Section):
    format: Literal[1]
    name: str
    agents: list[str] = Field(min_length=1)
    propositions: list[str] = []
    goals: dict[str, list[str]] = {}
    intentions: dict[str, list[str]] = {}
    actions: dict[str, list[str]] = {}
    intention_of_goals: dict[str, dict[str, str]] = {}
    catalog: dict[str, dict[str, dict[str, Distribution]]] = {}
    states: list[StateEntry] = Field(min_length=1)
    initial: Distribution
    transitions: list[TransitionEntry] = []
    cognitive_edges: list[CognitiveEdgeEntry] | Literal["all-legal"] = []
    observations: dict[str, list[str]]
    legal_goals: dict[str, dict[str, list[list[str]]]] = {}
    legal_intentions: dict[str, dict[str, list[str]]] = {}
    goal_preferences: list[PreferenceEntry] = []
    intention_preferences: list[PreferenceEntry] = []
    cognitive_strategies: list[StrategyEntry] = []
    guards: list[GuardEntry] = []
    enabled: dict[str, list[str]] = {}
    modes: ModeFlags = ModeFlags()


def _fractions(dist: dict) -> dict:
    return {k: parse_probability(v) for k, v in dist.items()}


def _goal_fractions(dist: dict) -> dict:
    return {parse_goal_set_key(k): parse_probability(v) for k, v in dist.items()}


def build_model(doc: ModelDocument, settings: Settings | None = None) -> Asmas:
    """Turn a schema-checked document into an Asmas (sink completion included)."""
    agents = tuple(doc.agents)
    for agent in doc.observations:
        if agent not in agents:
            raise ModelError(f"section observations: unknown agent '{agent}'")
    missing = [a for a in agents if a not in doc.observations]
    if missing:
        raise ModelError(f"section observations: no observation components for {missing}")

    states = {}
    for entry in doc.states:
        if entry.id in states:
            raise ModelError(f"section states: duplicate state id '{entry.id}'")
        states[entry.id] = GlobalState(
            id=entry.id,
            locals={a: entry.locals.get(a, "_") for a in agents},
            env=entry.env,
            goals={a: frozenset(entry.goals.get(a, [])) for a in agents},
            intention={a: entry.intention.get(a, "_") for a in agents},
            labels=frozenset(entry.labels),
        )

    transitions: dict = {}
    for t in doc.transitions:
        by_action = transitions.setdefault(t.source, {})
        action = tuple(t.action)
        if action in by_action:
            raise ModelError(f"section transitions: ({t.source},{','.join(action)}) declared twice")
        by_action[action] = _fractions(t.to)

    goal_prefs: dict = {}
    for p in doc.goal_preferences:
        for sid in p.states:
            goal_prefs.setdefault((p.owner, p.over), {})[sid] = _goal_fractions(p.distribution)
    intention_prefs: dict = {}
    for p in doc.intention_preferences:
        for sid in p.states:
            intention_prefs.setdefault((p.owner, p.over), {})[sid] = _fractions(p.distribution)

    goal_strategies: dict = {}
    intention_strategies: dict = {}
    for s in doc.cognitive_strategies:
        for sid in s.states:
            if s.kind == "goal":
                goal_strategies.setdefault(s.agent, {})[sid] = _goal_fractions(s.distribution)
            else:
                intention_strategies.setdefault(s.agent, {})[sid] = _fractions(s.distribution)

    legal_goals = {
        agent: {sid: frozenset(frozenset(x) for x in options) for sid, options in by_state.items()}
        for agent, by_state in doc.legal_goals.items()
    }
    legal_intentions = {
        agent: {sid: frozenset(options) for sid, options in by_state.items()}
        for agent, by_state in doc.legal_intentions.items()
    }

    modes = doc.modes
    sink_completion = modes.sink_completion
    strict = modes.strict_deterministic
    cross_type = modes.cross_type_weighting
    if settings is not None:
        strict = strict or settings.strict_deterministic
        cross_type = cross_type or settings.cross_type_weighting
        if "sink_completion" not in modes.model_fields_set:
            sink_completion = settings.sink_completion

    fields = dict(
        name=doc.name,
        agents=agents,
        states=states,
        initial=_fractions(doc.initial),
        transitions=transitions,
        legal_goals=legal_goals,
        legal_intentions=legal_intentions,
        observation_components={a: tuple(c) for a, c in doc.observations.items()},
        goal_preferences=goal_prefs,
        intention_preferences=intention_prefs,
        catalog={
            agent: {
                intention: {key: _fractions(dist) for key, dist in by_key.items()}
                for intention, by_key in by_intention.items()
            }
            for agent, by_intention in doc.catalog.items()
        },
        goals={a: tuple(doc.goals.get(a, [])) for a in agents},
        intentions={a: tuple(doc.intentions.get(a, [])) for a in agents},
        actions={a: tuple(doc.actions.get(a, [])) for a in agents},
        propositions=frozenset(doc.propositions),
        goal_strategies=goal_strategies,
        intention_strategies=intention_strategies,
        intention_of_goals={a: dict(m) for a, m in doc.intention_of_goals.items()},
        enabled={sid: tuple(kinds) for sid, kinds in doc.enabled.items()},
        strict_deterministic=strict,
        cross_type_weighting=cross_type,
        sink_completion=sink_completion,
    )

    if doc.cognitive_edges == "all-legal":
        skeleton = Asmas(cognitive_edges=(), **fields)
        edges = _generate_edges(skeleton)
    else:
        edges = tuple(
            CognitiveEdge(
                source=e.source,
                target=e.to,
                agent=e.agent,
                kind="g" if e.goals is not None else "i",
                value=frozenset(e.goals) if e.goals is not None else e.intention,  # type: ignore[arg-type]
            )
            for e in doc.cognitive_edges
        )
        _derive_legal_sets(edges, legal_goals, legal_intentions)

    model = Asmas(cognitive_edges=edges, **fields)
    if doc.guards:
        model.guards = _build_guards(doc.guards, model)
    return model


def _generate_edges(skeleton: Asmas) -> tuple[CognitiveEdge, ...]:
    edges = []
    for agent in skeleton.agents:
        for sid in skeleton.state_ids:
            changes = [Cognitive(agent, "g", x) for x in skeleton.legal_goals_at(agent, sid)]
            changes += [Cognitive(agent, "i", x) for x in skeleton.legal_intentions_at(agent, sid)]
            for step in changes:
                target = skeleton.find_state(skeleton.expected_target_signature(sid, step))
                if target is None:
                    raise ModelError(
                        f"section cognitive_edges: no state for {step.label()} from {sid}"
                    )
                edges.append(CognitiveEdge(sid, target, agent, step.kind, step.value))
    return tuple(edges)


def _derive_legal_sets(edges, legal_goals: dict, legal_intentions: dict):
    """Agents without a declared legal section get their legal sets from their edges."""
    goal_agents = {e.agent for e in edges if e.kind == "g"} - set(legal_goals)
    intention_agents = {e.agent for e in edges if e.kind == "i"} - set(legal_intentions)
    for e in edges:
        if e.kind == "g" and e.agent in goal_agents:
            by_state = legal_goals.setdefault(e.agent, {})
            by_state[e.source] = by_state.get(e.source, frozenset()) | {e.value}
        elif e.kind == "i" and e.agent in intention_agents:
            by_state = legal_intentions.setdefault(e.agent, {})
            by_state[e.source] = by_state.get(e.source, frozenset()) | {e.value}


def _build_guards(entries: list[GuardEntry], model: Asmas) -> GuardMechanism:
    guards = GuardMechanism()
    for g in entries:
        formula = parse_formula(g.formula, model)
        goals = frozenset(g.goals or [])
        if g.over is None:
            owner_key = g.agent
            goal_table, intention_table = guards.goal, guards.intention
        else:
            owner_key = (g.agent, g.over)
            goal_table, intention_table = guards.cross_goal, guards.cross_intention
        if g.intention is None:
            goal_table.setdefault(owner_key, {})[goals] = formula
        else:
            intention_table.setdefault(owner_key, {})[(g.intention, goals)] = formula
    return guards


def load_model_dict(
    data: dict, settings: Settings | None = None, validate: bool = True, source: str = "<dict>"
) -> Asmas:
    try:
        doc = ModelDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        section = ".".join(str(part) for part in first["loc"])
        raise ModelError(f"{source}: section {section}: {first['msg']}")
    model = build_model(doc, settings)
    if validate:
        report = validate_model(model)
        if not report.clean:
            raise ValidationFailed(report)
        log.debug(f" loaded {model.name} with {len(model.state_ids)} states")
    return model


def load_model(
    path: str, settings: Settings | None = None, validate: bool = True
) -> Asmas:
    """Read, schema-check, sink-complete and validate a model file."""
    if not os.path.exists(path) and path in SHIPPED_MODELS:
        return load_shipped(path, settings, validate)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ModelError(f"{path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise ModelError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
    return load_model_dict(data, settings, validate, source=path)


def load_shipped(name: str, settings: Settings | None = None, validate: bool = True) -> Asmas:
    model_path = importlib.resources.files("trustcheck.config").joinpath(f"{name}.json")
    assert isinstance(model_path, os.PathLike)
    with open(model_path, encoding="utf-8") as f:
        data = json.load(f)
    return load_model_dict(data, settings, validate, source=f"{name}.json")


def dump_model(model: Asmas) -> dict:
    """Canonical document for a model; load_model_dict(dump_model(m)) == m."""
    doc: dict = {
        "format": 1,
        "name": model.name,
        "agents": list(model.agents),
        "propositions": sorted(model.propositions),
        "goals": {a: list(g) for a, g in model.goals.items() if g},
        "intentions": {a: list(i) for a, i in model.intentions.items() if i},
        "actions": {a: list(x) for a, x in model.actions.items() if x},
        "intention_of_goals": model.intention_of_goals,
        "catalog": {
            agent: {
                intention: {key: _dump_dist(dist) for key, dist in by_key.items()}
                for intention, by_key in by_intention.items()
            }
            for agent, by_intention in model.catalog.items()
        },
        "states": [
            {
                "id": st.id,
                "locals": st.locals,
                "env": st.env,
                "goals": {a: sorted(g) for a, g in st.goals.items() if g},
                "intention": st.intention,
                "labels": sorted(st.labels),
            }
            for st in model.states.values()
        ],
        "initial": _dump_dist(model.initial),
        "transitions": [
            {"from": sid, "action": list(action), "to": _dump_dist(dist)}
            for sid, by_action in model.transitions.items()
            for action, dist in by_action.items()
        ],
        "cognitive_edges": [
            {"from": e.source, "to": e.target, "agent": e.agent}
            | ({"goals": sorted(e.value)} if e.kind == "g" else {"intention": e.value})
            for e in model.cognitive_edges
        ],
        "observations": {a: list(c) for a, c in model.observation_components.items()},
        "legal_goals": {
            agent: {sid: sorted(sorted(x) for x in options) for sid, options in by_state.items()}
            for agent, by_state in model.legal_goals.items()
        },
        "legal_intentions": {
            agent: {sid: sorted(options) for sid, options in by_state.items()}
            for agent, by_state in model.legal_intentions.items()
        },
        "goal_preferences": [
            {"owner": o, "over": b, "states": [sid], "distribution": _dump_goal_dist(dist)}
            for (o, b), by_state in model.goal_preferences.items()
            for sid, dist in by_state.items()
        ],
        "intention_preferences": [
            {"owner": o, "over": b, "states": [sid], "distribution": _dump_dist(dist)}
            for (o, b), by_state in model.intention_preferences.items()
            for sid, dist in by_state.items()
        ],
        "cognitive_strategies": [
            {"agent": a, "kind": "goal", "states": [sid], "distribution": _dump_goal_dist(dist)}
            for a, by_state in model.goal_strategies.items()
            for sid, dist in by_state.items()
        ]
        + [
            {"agent": a, "kind": "intention", "states": [sid], "distribution": _dump_dist(dist)}
            for a, by_state in model.intention_strategies.items()
            for sid, dist in by_state.items()
        ],
        "guards": _dump_guards(model),
        "enabled": {sid: list(kinds) for sid, kinds in model.enabled.items()},
        "modes": {
            "strict_deterministic": model.strict_deterministic,
            "cross_type_weighting": model.cross_type_weighting,
            "sink_completion": model.sink_completion,
        },
    }
    return doc


def _dump_dist(dist: dict) -> dict:
    return {k: format_fraction(v) for k, v in dist.items()}


def _dump_goal_dist(dist: dict) -> dict:
    return {goal_set_key(k): format_fraction(v) for k, v in dist.items()}


def _dump_guards(model: Asmas) -> list:
    if model.guards is None:
        return []
    out = []
    tables = [
        (model.guards.goal, model.guards.intention, False),
        (model.guards.cross_goal, model.guards.cross_intention, True),
    ]
    for goal_table, intention_table, cross in tables:
        for owner_key, by_goals in goal_table.items():
            for goals, formula in by_goals.items():
                out.append(_guard_entry(owner_key, cross, sorted(goals), None, to_text(formula)))
        for owner_key, by_key in intention_table.items():
            for (intention, goals), formula in by_key.items():
                out.append(_guard_entry(owner_key, cross, sorted(goals), intention, to_text(formula)))
    return out


def _guard_entry(owner_key, cross: bool, goals: list, intention: str | None, text: str) -> dict:
    entry = {"agent": owner_key[0] if cross else owner_key}
    if cross:
        entry["over"] = owner_key[1]
    entry["goals"] = goals
    if intention is not None:
        entry["intention"] = intention
    entry["formula"] = text
    return entry
