"""Seeded simulation of a model with online beliefs.

Between two temporal steps every agent may change its goals once and then
its intention once, in agent order, as drawn from its cognitive strategy.
States may restrict this with enabled-type annotations: "temporal",
"<agent>.g" and "<agent>.i".
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import UndefinedBeliefError
from ..model.asmas import Asmas, Cognitive, FinitePath, Step, Temporal
from ..model.rational import ZERO, format_distribution
from .belief import BeliefAssignment, BeliefEngine
from .prob import Preferences, ProbEngine, Strategies

log = logging.getLogger("trustcheck")


@dataclass
class SimulationStep:
    index: int
    step: str
    state: str
    beliefs: dict[str, str] = field(default_factory=dict)


@dataclass
class SimulationTrace:
    seed: int
    path: FinitePath
    steps: list[SimulationStep]

    def to_text(self) -> str:
        lines = [f"simulation with seed {self.seed}: {self.path}"]
        for s in self.steps:
            beliefs = " ".join(f"{a}{b}" for a, b in s.beliefs.items())
            lines.append(f"  {s.index:>3} {s.step:<24} {s.state:<8} {beliefs}".rstrip())
        return "\n".join(lines) + "\n"

    def to_rows(self) -> list[dict]:
        return [
            {"index": s.index, "step": s.step, "state": s.state, **{f"belief_{a}": b for a, b in s.beliefs.items()}}
            for s in self.steps
        ]


def state_marginal(assignment: BeliefAssignment) -> dict[str, Fraction]:
    marginal: dict[str, Fraction] = {}
    for path, w in assignment.weights.items():
        if w > 0:
            marginal[path.last] = marginal.get(path.last, ZERO) + w
    return dict(sorted(marginal.items()))


class Simulator:
    def __init__(
        self,
        model: Asmas,
        strategies: Strategies,
        preferences: Preferences | None = None,
        seed: int = 0,
    ):
        self.model = model
        self.strategies = strategies
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.beliefs = BeliefEngine(ProbEngine(model, preferences, strategies))

    def _draw(self, options: list, weights: list[Fraction]):
        p = np.array([float(w) for w in weights])
        return options[int(self.rng.choice(len(options), p=p / p.sum()))]

    def _enabled(self, sid: str, kind: str) -> bool:
        kinds = self.model.enabled.get(sid)
        return kinds is None or kind in kinds

    def _cognitive_steps(self, path: FinitePath) -> list[tuple[Step, str]]:
        """Goal then intention change of each agent, drawn from its strategy."""
        out = []
        for agent in self.model.agents:
            for kind in ("g", "i"):
                sid = path.last
                if not self._enabled(sid, f"{agent}.{kind}"):
                    continue
                if kind == "g":
                    dist = self.strategies.goal_distribution(agent, path)
                else:
                    dist = self.strategies.intention_distribution(agent, path)
                if not dist:
                    continue
                options = list(dist)
                value = self._draw(options, [dist[x] for x in options])
                if kind == "g":
                    target = self.model.goal_change(sid, agent, value)
                else:
                    target = self.model.intention_change(sid, agent, value)
                if target is None:
                    continue
                step = Cognitive(agent, kind, value)
                path = path.extend(step, target)
                out.append((step, target))
        return out

    def _temporal_step(self, sid: str) -> tuple[Step, str] | None:
        if not self._enabled(sid, "temporal"):
            return None
        moves = self.model.temporal_moves(sid)
        if not moves:
            return None
        action, target, _ = self._draw(moves, [p for _, _, p in moves])
        return Temporal(action), target

    def sample_path(self, rounds: int) -> FinitePath:
        initial = sorted((s, p) for s, p in self.model.initial.items() if p > 0)
        path = FinitePath.single(self._draw([s for s, _ in initial], [p for _, p in initial]))
        for _ in range(rounds):
            for step, target in self._cognitive_steps(path):
                path = path.extend(step, target)
            move = self._temporal_step(path.last)
            if move is not None:
                path = path.extend(*move)
        return path

    def run(self, rounds: int) -> SimulationTrace:
        """One simulated path with each agent's belief over the current state after every step."""
        path = self.sample_path(rounds)
        assignments: dict[str, BeliefAssignment | None] = {
            a: self.beliefs.initial_assignment(a, self.model.obs(a, path.first)) for a in self.model.agents
        }
        steps = [SimulationStep(0, "init", path.first, self._describe(assignments))]
        for i, step in enumerate(path.steps):
            target = path.states[i + 1]
            for agent, prior in assignments.items():
                if prior is None:
                    continue
                ttype = self.model.classify_transition(agent, path.states[i], step)
                try:
                    assignments[agent] = self.beliefs.belief_update_step(prior, self.model.obs(agent, target), ttype)
                except UndefinedBeliefError:
                    assignments[agent] = None
            steps.append(SimulationStep(i + 1, step.label(), target, self._describe(assignments)))
        log.debug(f" simulated {len(path) - 1} step(s) with seed {self.seed}")
        return SimulationTrace(self.seed, path, steps)

    def _describe(self, assignments: dict[str, BeliefAssignment | None]) -> dict[str, str]:
        return {
            a: format_distribution(state_marginal(b)) if b is not None else "undefined"
            for a, b in assignments.items()
        }

    def frequencies(self, runs: int, rounds: int) -> Counter:
        """Relative counts of sampled paths over many runs."""
        return Counter(str(self.sample_path(rounds)) for _ in range(runs))
