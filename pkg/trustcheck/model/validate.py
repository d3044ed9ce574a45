import logging
from collections import defaultdict
from dataclasses import dataclass, field

from ..errors import ModelError
from ..logic.formula import to_text
from ..logic.fragment import validate_guard
from .asmas import SILENT, Asmas, format_goal_set, goal_set_key
from .rational import ONE, ZERO, format_fraction, is_distribution

log = logging.getLogger("trustcheck")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str):
        self.violations.append(Violation(code, message))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_text(self) -> str:
        lines = [f"violations: {len(self.violations)}"]
        lines += [f"  {v}" for v in self.violations]
        lines.append(f"notes: {len(self.notes)}")
        lines += [f"  {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def validate_model(model: Asmas) -> ValidationReport:
    """Collect every consistency violation of a loaded model, never raising."""
    report = ValidationReport()
    _check_initial(model, report)
    _check_states(model, report)
    _check_transitions(model, report)
    _check_catalog(model, report)
    _check_cognitive_edges(model, report)
    _check_preferences(model, report)
    _check_strategies(model, report)
    _check_uniformity(model, report)
    _check_guards(model, report)
    for sid in model.completed:
        if model.sink_completion == "self_loop":
            report.notes.append(f"seriality: {sid} completed with a silent self-loop")
        else:
            report.notes.append(f"seriality: {sid} routed to the sink state")
    log.debug(
        f" validation of {model.name}: {len(report.violations)} violation(s), {len(report.notes)} note(s)"
    )
    return report


def _check_initial(model: Asmas, report: ValidationReport):
    if not is_distribution(model.initial):
        total = sum(model.initial.values(), ZERO)
        report.add("initial", f"initial distribution sums to {format_fraction(total)}")
    for sid in model.initial:
        if sid not in model.states:
            report.add("initial", f"initial state {sid} is not declared")


def _check_states(model: Asmas, report: ValidationReport):
    for sid, st in model.states.items():
        for agent in model.agents:
            goals = st.goals.get(agent, frozenset())
            unknown = goals - set(model.goals.get(agent, ()))
            if unknown:
                report.add("universe", f"{sid}: goals {sorted(unknown)} of {agent} outside the goal universe")
            intention = st.intention.get(agent, SILENT)
            if intention != SILENT and intention not in model.intentions.get(agent, ()):
                report.add("universe", f"{sid}: intention {intention} of {agent} outside the intention universe")
        undeclared = st.labels - model.propositions
        if undeclared:
            report.add("labels", f"{sid}: labels {sorted(undeclared)} not declared as propositions")


def _check_transitions(model: Asmas, report: ValidationReport):
    for sid, by_action in model.transitions.items():
        if sid not in model.states:
            report.add("transition", f"transitions declared for unknown state {sid}")
            continue
        for action, dist in by_action.items():
            where = f"({sid},{','.join(action)})"
            if len(action) != len(model.agents):
                report.add("arity", f"joint action {where} has arity {len(action)}, expected {len(model.agents)}")
                continue
            for agent, local in zip(model.agents, action):
                if local != SILENT and local not in model.actions.get(agent, ()):
                    report.add("action", f"{where}: action {local} not in the actions of {agent}")
            total = sum(dist.values(), ZERO)
            if total < ONE:
                report.add("normalization", f"substochastic distribution at {where}")
            elif total > ONE:
                report.add("normalization", f"distribution at {where} sums to {format_fraction(total)}")
            for target in dist:
                if target not in model.states:
                    report.add("transition", f"{where} leads to unknown state {target}")


def _check_catalog(model: Asmas, report: ValidationReport):
    for agent, by_intention in model.catalog.items():
        for intention, by_key in by_intention.items():
            if intention not in model.intentions.get(agent, ()):
                report.add("catalog", f"catalog entry for unknown intention {intention} of {agent}")
            for key, dist in by_key.items():
                where = f"{agent}/{intention}/{key}"
                if not is_distribution(dist):
                    report.add("normalization", f"catalog strategy {where} does not sum to 1")
                for action in dist:
                    if action != SILENT and action not in model.actions.get(agent, ()):
                        report.add("catalog", f"catalog strategy {where} uses unknown action {action}")
                if model.strict_deterministic and len([p for p in dist.values() if p > 0]) > 1:
                    report.add("deterministic", f"catalog strategy {where} is not Dirac in strict mode")
    for sid in model.state_ids:
        if sid in model.completed:
            continue
        try:
            joint = model.induced_joint_action(sid)
        except ModelError as e:
            report.add("catalog", f"{sid}: {e}")
            continue
        for action in joint:
            if action not in model.temporal_transitions(sid):
                report.add("catalog", f"{sid}: induced joint action ({','.join(action)}) has no transition")


def _check_cognitive_edges(model: Asmas, report: ValidationReport):
    seen = set()
    for edge in model.cognitive_edges:
        label = f"{edge.source} -{edge.step.label()}-> {edge.target}"
        key = (edge.source, edge.agent, edge.kind, edge.value)
        if key in seen:
            report.add("edge", f"duplicate cognitive edge {label}")
        seen.add(key)
        if edge.agent not in model.agents:
            report.add("edge", f"{label}: unknown agent")
            continue
        expected = model.expected_target_signature(edge.source, edge.step)
        if model.state(edge.target).component_signature() != expected:
            report.add("edge", f"{label}: target differs from source in more than the changed component")
        if edge.kind == "g":
            if edge.value not in model.legal_goals.get(edge.agent, {}).get(edge.source, frozenset()):
                report.add("edge", f"{label}: goal set not legal at {edge.source}")
        elif edge.value not in model.legal_intentions.get(edge.agent, {}).get(edge.source, frozenset()):
            report.add("edge", f"{label}: intention not legal at {edge.source}")
    for agent, by_state in model.legal_goals.items():
        for sid, options in by_state.items():
            for goals in options:
                if model.goal_change(sid, agent, goals) is None:
                    report.add("edge", f"{sid}: legal goal set {format_goal_set(goals)} of {agent} has no edge")
    for agent, by_state in model.legal_intentions.items():
        for sid, options in by_state.items():
            for intention in options:
                if model.intention_change(sid, agent, intention) is None:
                    report.add("edge", f"{sid}: legal intention {intention} of {agent} has no edge")


def _check_preferences(model: Asmas, report: ValidationReport):
    for (owner, other), by_state in model.goal_preferences.items():
        for sid, dist in by_state.items():
            where = f"goal preference of {owner} over {other} at {sid}"
            if not is_distribution(dist):
                report.add("normalization", f"{where} does not sum to 1")
            legal = set(model.legal_goals_at(other, sid))
            outside = [goal_set_key(x) for x, p in dist.items() if p > 0 and x not in legal]
            if outside:
                report.add("preference", f"{where} supports illegal goal sets {outside}")
    for (owner, other), by_state in model.intention_preferences.items():
        for sid, dist in by_state.items():
            where = f"intention preference of {owner} over {other} at {sid}"
            if not is_distribution(dist):
                report.add("normalization", f"{where} does not sum to 1")
            legal = set(model.legal_intentions_at(other, sid))
            outside = [x for x, p in dist.items() if p > 0 and x not in legal]
            if outside:
                report.add("preference", f"{where} supports illegal intentions {outside}")
    for owner in model.agents:
        for other in model.others(owner):
            for sid in model.state_ids:
                if model.legal_goals_at(other, sid) and sid not in model.goal_preferences.get((owner, other), {}):
                    report.notes.append(f"preference: goal preference of {owner} over {other} at {sid} defaults to uniform")
                if model.legal_intentions_at(other, sid) and sid not in model.intention_preferences.get((owner, other), {}):
                    report.notes.append(f"preference: intention preference of {owner} over {other} at {sid} defaults to uniform")


def _check_strategies(model: Asmas, report: ValidationReport):
    for agent, by_state in model.goal_strategies.items():
        for sid, dist in by_state.items():
            if not is_distribution(dist):
                report.add("normalization", f"goal strategy of {agent} at {sid} does not sum to 1")
            if any(p > 0 and x not in model.legal_goals_at(agent, sid) for x, p in dist.items()):
                report.add("strategy", f"goal strategy of {agent} at {sid} supports an illegal goal set")
    for agent, by_state in model.intention_strategies.items():
        for sid, dist in by_state.items():
            if not is_distribution(dist):
                report.add("normalization", f"intention strategy of {agent} at {sid} does not sum to 1")
            if any(p > 0 and x not in model.legal_intentions_at(agent, sid) for x, p in dist.items()):
                report.add("strategy", f"intention strategy of {agent} at {sid} supports an illegal intention")


def _check_uniformity(model: Asmas, report: ValidationReport):
    """Observation-equal states must agree on what every agent can do or prefer."""
    for observer in model.agents:
        classes = defaultdict(list)
        for sid in model.state_ids:
            classes[model.obs(observer, sid)].append(sid)
        for members in classes.values():
            first = members[0]
            for other in members[1:]:
                pair = f"({first},{other})"
                if set(model.temporal_transitions(first)) != set(model.temporal_transitions(other)):
                    report.add("uniformity-1", f"obs_{observer} equal on {pair} but joint actions differ")
                for agent in model.agents:
                    if model.legal_goals_at(agent, first) != model.legal_goals_at(agent, other):
                        report.add("uniformity-1", f"obs_{observer} equal on {pair} but legal goals of {agent} differ")
                    if model.legal_intentions_at(agent, first) != model.legal_intentions_at(agent, other):
                        report.add("uniformity-1", f"obs_{observer} equal on {pair} but legal intentions of {agent} differ")
                for owner in model.others(observer):
                    goal_prefs = model.goal_preferences.get((owner, observer), {})
                    intention_prefs = model.intention_preferences.get((owner, observer), {})
                    if goal_prefs.get(first) != goal_prefs.get(other):
                        report.add("uniformity-2", f"obs_{observer} equal on {pair} but goal preferences of {owner} differ")
                    if intention_prefs.get(first) != intention_prefs.get(other):
                        report.add("uniformity-2", f"obs_{observer} equal on {pair} but intention preferences of {owner} differ")


def _check_guards(model: Asmas, report: ValidationReport):
    if model.guards is None:
        return
    g = model.guards
    tables = [
        (owner, goals, None, formula)
        for owner, by_goals in g.goal.items()
        for goals, formula in by_goals.items()
    ]
    tables += [
        (owner, goals, intention, formula)
        for owner, by_key in g.intention.items()
        for (intention, goals), formula in by_key.items()
    ]
    tables += [
        (owner, goals, None, formula)
        for (owner, _), by_goals in g.cross_goal.items()
        for goals, formula in by_goals.items()
    ]
    tables += [
        (owner, goals, intention, formula)
        for (owner, _), by_key in g.cross_intention.items()
        for (intention, goals), formula in by_key.items()
    ]
    for owner, goals, intention, formula in tables:
        where = f"guard of {owner} on {format_goal_set(goals)}" + (f"/{intention}" if intention else "")
        if owner not in model.agents:
            report.add("guard", f"{where}: unknown agent")
            continue
        for problem in validate_guard(formula, owner):
            report.add("guard", f"{where}: {problem}")
    for (owner, other) in list(g.cross_goal) + list(g.cross_intention):
        if other not in model.agents or other == owner:
            report.add("guard", f"cross guard of {owner} over {other}: not another agent")
    for owner, by_key in g.intention.items():
        for (intention, goals) in by_key:
            if intention not in model.intentions.get(owner, ()):
                report.add("guard", f"intention guard of {owner} names unknown intention {intention}: {to_text(by_key[(intention, goals)])}")
