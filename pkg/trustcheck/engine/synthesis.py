"""Pro-attitude synthesis.

Cognitive strategies are instantiated from guard formulas: every legal goal
set or intention is weighted by the evaluation of its guard on the current
path and the weights are normalized. Guards are evaluated with the
state-defined preferences; the history-dependent preferences obtained from
the cross-agent guards are only used for the final check.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..checkers.bounded import BoundedChecker
from ..errors import FragmentError, SynthesisError, UndefinedBeliefError, UnsupportedFormulaError
from ..logic.formula import Formula, is_query, to_text
from ..logic.fragment import FragmentClass, classify_fragment, depth
from ..model.asmas import Asmas, FinitePath, GoalSet, format_goal_set
from ..model.rational import ONE, ZERO, format_distribution, normalize, uniform
from ..settings import Settings
from .belief import ObservationTrace, observation_trace
from .prob import ProbEngine, StatePreferences
from .semantics import EvalMode, Evaluator, Verdict

log = logging.getLogger("trustcheck")


class DeclaredStrategies:
    """Cognitive strategies given in the model file, uniform where undeclared."""

    def __init__(self, model: Asmas):
        self.model = model

    def goal_distribution(self, agent: str, path: FinitePath) -> dict[GoalSet, Fraction]:
        declared = self.model.goal_strategies.get(agent, {}).get(path.last)
        if declared is not None:
            return declared
        legal = self.model.legal_goals_at(agent, path.last)
        return uniform(legal) if legal else {}

    def intention_distribution(self, agent: str, path: FinitePath) -> dict[str, Fraction]:
        declared = self.model.intention_strategies.get(agent, {}).get(path.last)
        if declared is not None:
            return declared
        legal = self.model.legal_intentions_at(agent, path.last)
        return uniform(legal) if legal else {}


@dataclass
class SynthesisEntry:
    agent: str
    kind: str
    trace: ObservationTrace
    path: FinitePath
    distribution: dict

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "kind": "goal" if self.kind == "g" else "intention",
            "trace": str(self.trace),
            "path": str(self.path),
            "distribution": _format_dist(self.distribution),
        }


@dataclass
class SynthesisTable:
    horizon: int
    entries: list[SynthesisEntry] = field(default_factory=list)
    undefined: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"synthesized strategies up to paths of {self.horizon} state(s): {len(self.entries)} entr(ies)"]
        for e in self.entries:
            kind = "goal" if e.kind == "g" else "intention"
            lines.append(f"  {e.agent} {kind} at {e.path}: {_format_dist(e.distribution)}")
        if self.undefined:
            lines.append(f"  skipped {len(self.undefined)} observation class(es) of probability zero")
        return "\n".join(lines) + "\n"


def _format_dist(dist: dict) -> str:
    return format_distribution(
        {format_goal_set(k) if isinstance(k, frozenset) else k: v for k, v in dist.items()}
    )


class Synthesizer:
    """Instantiated cognitive strategies, memoized per observation trace."""

    def __init__(self, model: Asmas):
        self.model = model
        self.declared = DeclaredStrategies(model)
        prob = ProbEngine(model, StatePreferences(model), strategies=self)
        self.evaluator = Evaluator(model, prob, strategies=self)
        self._memo: dict[tuple[str, str, ObservationTrace], dict] = {}
        self._active: set[tuple[str, str, ObservationTrace]] = set()
        self._representatives: dict[tuple[str, str, ObservationTrace], FinitePath] = {}

    # Guards

    def eval_guard(self, guard: Formula | None, path: FinitePath, legal: bool = True) -> Fraction:
        """Evaluation function of one guard: its query value, or 0/1 for a Boolean guard."""
        if not legal or guard is None:
            return ZERO
        if is_query(guard):
            return self.evaluator.value(path, guard)
        return ONE if self.evaluator.holds(path, guard) else ZERO

    def goal_guard(self, agent: str, goals: GoalSet, path: FinitePath) -> Fraction:
        guards = self.model.guards.goal.get(agent, {}) if self.model.guards else {}
        return self.eval_guard(guards.get(goals), path, goals in self.model.legal_goals_at(agent, path.last))

    def intention_guard(self, agent: str, intention: str, path: FinitePath) -> Fraction:
        guards = self.model.guards.intention.get(agent, {}) if self.model.guards else {}
        current = self.model.state(path.last).goals.get(agent, frozenset())
        legal = intention in self.model.legal_intentions_at(agent, path.last)
        return self.eval_guard(guards.get((intention, current)), path, legal)

    # Strategies

    def goal_distribution(self, agent: str, path: FinitePath) -> dict[GoalSet, Fraction]:
        if self.model.guards is None or not self.model.guards.has_goal_guards(agent):
            return self.declared.goal_distribution(agent, path)
        legal = self.model.legal_goals_at(agent, path.last)
        return self._instantiate(agent, "g", path, {x: (lambda x=x: self.goal_guard(agent, x, path)) for x in legal})

    def intention_distribution(self, agent: str, path: FinitePath) -> dict[str, Fraction]:
        if self.model.guards is None or not self.model.guards.has_intention_guards(agent):
            return self.declared.intention_distribution(agent, path)
        legal = self.model.legal_intentions_at(agent, path.last)
        return self._instantiate(
            agent, "i", path, {x: (lambda x=x: self.intention_guard(agent, x, path)) for x in legal}
        )

    def instantiate_strategy(self, agent: str, path: FinitePath) -> tuple[dict, dict]:
        return self.goal_distribution(agent, path), self.intention_distribution(agent, path)

    def _instantiate(self, agent: str, kind: str, path: FinitePath, weights: dict) -> dict:
        if not weights:
            return {}
        key = (agent, kind, observation_trace(self.model, agent, path))
        if key in self._memo:
            return self._memo[key]
        if key in self._active:
            raise SynthesisError(f"cyclic pro-attitude synthesis for {agent} at {path}")
        self._active.add(key)
        try:
            evaluated = {x: weight() for x, weight in weights.items()}
        finally:
            self._active.discard(key)
        if sum(evaluated.values(), ZERO) == 0:
            what = "goal" if kind == "g" else "intention"
            raise SynthesisError(f"no enabled pro-attitude: every {what} guard of {agent} is 0 at {path}")
        self._memo[key] = normalize(evaluated)
        self._representatives[key] = path
        return self._memo[key]

    def synthesize(self, horizon: int, starts: list[str] | None = None) -> SynthesisTable:
        """Instantiate every strategy needed on paths of at most horizon states."""
        table = SynthesisTable(horizon)
        for path in self.model.enumerate_paths(horizon, starts):
            for agent in self.model.agents:
                for kind, legal in (
                    ("g", self.model.legal_goals_at(agent, path.last)),
                    ("i", self.model.legal_intentions_at(agent, path.last)),
                ):
                    if not legal:
                        continue
                    try:
                        if kind == "g":
                            self.goal_distribution(agent, path)
                        else:
                            self.intention_distribution(agent, path)
                    except UndefinedBeliefError:
                        table.undefined.append(f"{agent} at {path}")
        for key, path in self._representatives.items():
            table.entries.append(SynthesisEntry(*key, path, self._memo[key]))
        log.debug(f" synthesized {len(table.entries)} strategy entr(ies) up to length {horizon}")
        return table

    def check_uniformity(self, horizon: int) -> list[str]:
        """Paths where a synthesized strategy differs from the one of its observation class."""
        problems = []
        for path in self.model.enumerate_paths(horizon):
            for agent in self.model.agents:
                trace = observation_trace(self.model, agent, path)
                for kind in ("g", "i"):
                    stored = self._memo.get((agent, kind, trace))
                    if stored is None:
                        continue
                    fresh = self.goal_distribution(agent, path) if kind == "g" else self.intention_distribution(agent, path)
                    if fresh != stored:
                        problems.append(f"{agent} {kind} at {path}")
        return problems


class HistoryPreferences(StatePreferences):
    """State preferences reweighted by the owner's cross-agent guards on the current path."""

    def __init__(self, model: Asmas, synthesizer: Synthesizer):
        super().__init__(model)
        self.synthesizer = synthesizer
        self._memo: dict = {}

    def goal(self, owner: str, other: str, path: FinitePath) -> dict[GoalSet, Fraction]:
        base = super().goal(owner, other, path)
        table = self.model.guards.cross_goal.get((owner, other)) if self.model.guards else None
        if not table or not base:
            return base
        legal = self.model.legal_goals_at(other, path.last)
        return self._update(
            ("g", owner, other, path), base, lambda x: self.synthesizer.eval_guard(table.get(x), path, x in legal)
        )

    def intention(self, owner: str, other: str, path: FinitePath) -> dict[str, Fraction]:
        base = super().intention(owner, other, path)
        table = self.model.guards.cross_intention.get((owner, other)) if self.model.guards else None
        if not table or not base:
            return base
        legal = self.model.legal_intentions_at(other, path.last)
        current = self.model.state(path.last).goals.get(other, frozenset())
        return self._update(
            ("i", owner, other, path),
            base,
            lambda x: self.synthesizer.eval_guard(table.get((x, current)), path, x in legal),
        )

    def _update(self, key: tuple, base: dict, evaluate) -> dict:
        if key not in self._memo:
            weights = {x: w * evaluate(x) for x, w in base.items()}
            if sum(weights.values(), ZERO) == 0:
                raise SynthesisError(
                    f"preference update degenerate: {key[1]} over {key[2]} at {key[3]} weighs every option 0"
                )
            self._memo[key] = normalize(weights)
        return self._memo[key]

    def update_preferences(self, owner: str, other: str, path: FinitePath) -> tuple[dict, dict]:
        return self.goal(owner, other, path), self.intention(owner, other, path)


@dataclass
class PipelineResult:
    formula: Formula
    fragment: FragmentClass
    horizon: int
    verdict: Verdict
    engine: str
    synthesis: SynthesisTable
    preferences: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def preference_rows(model: Asmas, preferences: HistoryPreferences, horizon: int) -> list[dict]:
    """Updated preferences on every path up to horizon, for agent pairs with cross guards."""
    if model.guards is None:
        return []
    pairs = sorted(set(model.guards.cross_goal) | set(model.guards.cross_intention))
    rows = []
    for path in model.enumerate_paths(horizon):
        for owner, other in pairs:
            try:
                goal, intention = preferences.update_preferences(owner, other, path)
            except UndefinedBeliefError:
                continue
            if goal or intention:
                rows.append(
                    {
                        "owner": owner,
                        "over": other,
                        "path": str(path),
                        "goal": _format_dist(goal),
                        "intention": _format_dist(intention),
                    }
                )
    return rows


def pipeline_horizon(formula: Formula, at: FinitePath | None = None) -> int:
    """Longest path the synthesis has to cover: the context plus the formula's depth."""
    start = len(at) if at is not None else 1
    return start + depth(formula)


def run_pipeline(
    model: Asmas, formula: Formula, settings: Settings | None = None, at: FinitePath | None = None
) -> PipelineResult:
    """Synthesize strategies, update preferences, then check with the bounded checker."""
    settings = settings or Settings()
    fragment = classify_fragment(formula, settings.belief_nesting_depth)
    if fragment is not FragmentClass.BPRTL:
        raise FragmentError(
            f"{to_text(formula)} is not in the bounded fragment; checking the full logic is undecidable "
            "and pipeline synthesis needs a bounded formula"
        )
    horizon = pipeline_horizon(formula, at)
    synthesizer = Synthesizer(model)
    table = synthesizer.synthesize(horizon)
    preferences = HistoryPreferences(model, synthesizer)
    checker = BoundedChecker(model, preferences, synthesizer, settings.belief_nesting_depth)
    verdict = checker.check(formula, at)
    warnings = []
    if table.undefined:
        warnings.append(f"synthesis skipped {len(table.undefined)} observation class(es) of probability zero")
    log.info(f" pipeline checked {to_text(formula)} with synthesis horizon {horizon}")
    return PipelineResult(
        formula,
        fragment,
        horizon,
        verdict,
        "bounded",
        table,
        preference_rows(model, preferences, horizon),
        warnings,
    )


def check_direct(
    model: Asmas, formula: Formula, at: FinitePath | None = None, mode: EvalMode = EvalMode.path
) -> Verdict:
    """Direct evaluation with synthesized strategies and updated preferences, no expansion."""
    synthesizer = Synthesizer(model)
    preferences = HistoryPreferences(model, synthesizer)
    evaluator = Evaluator(model, ProbEngine(model, preferences, strategies=synthesizer), synthesizer, mode)
    starts = [at] if at is not None else model.initial_paths()
    if is_query(formula):
        if len(starts) != 1:
            raise UnsupportedFormulaError("a query needs a single start; pass a context path")
        return evaluator.value(starts[0], formula)
    return all(evaluator.holds(p, formula) for p in starts)
