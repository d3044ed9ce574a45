"""Qualitative belief and trust properties in polynomial time.

Handles G [ psi => P cmp q [ F B{A}>=1 [ psi ] ] ] and its CT/DT >= 1
variants for an absorbing psi. Two copies of the model run side by side
with equal observations for A: the first copy is the real run, the second
a shadow run that A cannot rule out and on which psi fails. A's belief in
psi never reaches 1 when the pair settles in a strongly connected region
that both copies cannot leave and whose copies produce every observation
word with the same probability.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from ..engine.chain import InducedChain, solve_until
from ..engine.linalg import ONE, ZERO, stationary_distribution
from ..engine.prob import Strategies
from ..engine.semantics import Evaluator
from ..errors import EvaluationError, FragmentError, UnsupportedFormulaError
from ..logic.formula import Formula, compare, flip, to_text
from ..logic.fragment import QualitativeQuery, match_qualitative_template
from ..model.asmas import Asmas, FinitePath
from ..model.rational import format_fraction
from .tzeng import StochasticAutomaton, tzeng_equivalent

log = logging.getLogger("trustcheck")

Pair = tuple[str, str]

SEEDING_WARNING = (
    "qualitative check seeds every reachable (state, shadow) pair and takes the largest "
    "reachability per psi-state"
)


@dataclass
class ProductSystem:
    observer: str
    states: list[Pair]
    initial: list[Pair]
    # (source, symbol) -> {target: (first-copy weight, second-copy weight)}
    edges: dict[tuple[Pair, tuple], dict[Pair, tuple[Fraction, Fraction]]]

    def symbols(self) -> tuple:
        return tuple(sorted({symbol for _, symbol in self.edges}, key=repr))

    def copy_rows(self, copy: int) -> dict[Pair, dict[Pair, Fraction]]:
        rows: dict[Pair, dict[Pair, Fraction]] = {q: {} for q in self.states}
        for (q, _), targets in self.edges.items():
            for t, weights in targets.items():
                rows[q][t] = rows[q].get(t, ZERO) + weights[copy - 1]
        return rows

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.states)
        for (q, _), targets in self.edges.items():
            graph.add_edges_from((q, t) for t in targets)
        return graph


@dataclass
class SccComponent:
    states: frozenset[Pair]
    closed_first: bool
    closed_second: bool
    formula_specific: bool
    internal_equivalent: bool

    @property
    def double_closed(self) -> bool:
        return self.closed_first and self.closed_second

    @property
    def qualifying(self) -> bool:
        return self.formula_specific and self.double_closed and self.internal_equivalent

    def to_text(self) -> str:
        members = " ".join(f"({s},{t})" for s, t in sorted(self.states))
        flags = [
            name
            for name, on in (
                ("double-closed", self.double_closed),
                ("internal-equivalent", self.internal_equivalent),
                ("formula-specific", self.formula_specific),
            )
            if on
        ]
        return f"{{{members}}} " + (",".join(flags) if flags else "-")


@dataclass
class QualitativeResult:
    query: QualitativeQuery
    verdict: bool
    reach: dict[str, Fraction]
    components: list[SccComponent]
    product_size: int
    counterexample: str | None = None
    warnings: list[str] = field(default_factory=list)

    def sccs_text(self) -> str:
        lines = [f"product of {self.product_size} pair(s), {len(self.components)} component(s)"]
        lines += [f"  D{i} {c.to_text()}" for i, c in enumerate(self.components)]
        lines += [f"  p({s}) = {format_fraction(p)}" for s, p in sorted(self.reach.items())]
        return "\n".join(lines) + "\n"


def state_labelling(model: Asmas, psi: Formula) -> dict[str, bool]:
    evaluator = Evaluator(model)
    return {s: evaluator.holds(FinitePath.single(s), psi) for s in model.state_ids}


def check_precondition(model: Asmas, psi: Formula) -> bool:
    """True when no temporal move of the induced chain leaves the psi states."""
    holds = state_labelling(model, psi)
    return all(holds[t] for s in model.state_ids if holds[s] for _, t, _ in model.moves(s))


def shadow_states(
    model: Asmas, query: QualitativeQuery, holds: dict[str, bool], strategies: Strategies | None = None
) -> set[str]:
    """States at which a shadow run refutes the belief or trust operator of the query."""
    if query.variant == "B":
        return {s for s, h in holds.items() if not h}
    trustee = query.trustee
    assert trustee is not None
    if query.variant == "DT" and strategies is None:
        raise UnsupportedFormulaError("disposition trust needs cognitive strategies")
    out = set()
    for s in model.state_ids:
        if query.variant == "CT":
            targets = [t for _, t in model.intention_options(s, trustee)]
        else:
            dist = strategies.intention_distribution(trustee, FinitePath.single(s))  # type: ignore[union-attr]
            targets = [_changed(model, s, trustee, x) for x, w in dist.items() if w > 0]
        outcomes = [holds[t] for t in targets]
        if not outcomes:
            refuted = not holds[s]
        elif query.variant == "CT":
            refuted = not any(outcomes)
        else:
            refuted = not all(outcomes)
        if refuted:
            out.add(s)
    return out


def _changed(model: Asmas, sid: str, agent: str, intention: str) -> str:
    target = model.intention_change(sid, agent, intention)
    if target is None:
        raise EvaluationError(f"intention {intention} of {agent} has no cognitive edge at {sid}")
    return target


def build_product(model: Asmas, observer: str, allowed: set[str]) -> ProductSystem:
    """Pairs (s, t) with equal observations for observer and t among the allowed shadow states."""
    obs = model.obs
    initial = [
        (s, t)
        for s, ps in sorted(model.initial.items())
        for t, pt in sorted(model.initial.items())
        if ps > 0 and pt > 0 and t in allowed and obs(observer, s) == obs(observer, t)
    ]
    edges: dict[tuple[Pair, tuple], dict[Pair, tuple[Fraction, Fraction]]] = {}
    seen = set(initial)
    queue = deque(initial)
    while queue:
        s, t = queue.popleft()
        first = _by_symbol(model, observer, s)
        second = _by_symbol(model, observer, t)
        for symbol, moves1 in first.items():
            moves2 = second.get(symbol)
            if not moves2:
                continue
            z1 = sum((p for _, p in moves1), ZERO)
            z2 = sum((p for _, p in moves2), ZERO)
            for s2, p1 in moves1:
                for t2, p2 in moves2:
                    if t2 not in allowed:
                        continue
                    pair = (s2, t2)
                    assert obs(observer, s2) == obs(observer, t2)
                    targets = edges.setdefault(((s, t), symbol), {})
                    a1, a2 = targets.get(pair, (ZERO, ZERO))
                    targets[pair] = (a1 + p1 * p2 / z2, a2 + p2 * p1 / z1)
                    if pair not in seen:
                        seen.add(pair)
                        queue.append(pair)
    states = sorted(seen)
    log.debug(f" product for {observer}: {len(states)} pair(s) from {len(initial)} initial")
    return ProductSystem(observer, states, initial, edges)


def _by_symbol(model: Asmas, observer: str, sid: str) -> dict[tuple, list[tuple[str, Fraction]]]:
    grouped: dict[tuple, list[tuple[str, Fraction]]] = defaultdict(list)
    for step, target, p in model.moves(sid):
        symbol = str(model.classify_transition(observer, sid, step))
        grouped[(symbol, model.obs(observer, target))].append((target, p))
    return grouped


def _restricted(rows: dict, members: frozenset) -> dict:
    return {q: {t: p for t, p in rows[q].items() if t in members} for q in members}


def _automaton(product: ProductSystem, members: frozenset, copy: int, initial: dict) -> StochasticAutomaton:
    weights: dict[tuple, dict] = {}
    for (q, symbol), targets in product.edges.items():
        if q not in members:
            continue
        row = {t: w[copy - 1] for t, w in targets.items() if t in members and w[copy - 1] > 0}
        if row:
            weights[(q, symbol)] = row
    return StochasticAutomaton(tuple(sorted(members)), product.symbols(), weights, initial)


def classify_sccs(product: ProductSystem, holds: dict[str, bool]) -> list[SccComponent]:
    graph = product.graph()
    rows = {1: product.copy_rows(1), 2: product.copy_rows(2)}
    components = []
    for scc in sorted((frozenset(c) for c in nx.strongly_connected_components(graph)), key=sorted):
        if len(scc) == 1 and not graph.has_edge(next(iter(scc)), next(iter(scc))):
            continue
        closed = {
            k: all(sum((p for t, p in rows[k][q].items() if t in scc), ZERO) == ONE for q in scc) for k in (1, 2)
        }
        specific = any(holds[s] for s, _ in scc)
        equivalent = False
        if closed[1] and closed[2]:
            order = sorted(scc)
            pi1 = stationary_distribution(order, _restricted(rows[1], scc))
            pi2 = stationary_distribution(order, _restricted(rows[2], scc))
            equivalent = tzeng_equivalent(
                _automaton(product, scc, 1, pi1), _automaton(product, scc, 2, pi2)
            )
        components.append(SccComponent(scc, closed[1], closed[2], specific, equivalent))
    log.debug(
        f" {len(components)} component(s), {sum(c.qualifying for c in components)} qualifying"
    )
    return components


def check_qualitative(
    model: Asmas, formula: Formula, strategies: Strategies | None = None
) -> QualitativeResult:
    query = match_qualitative_template(formula)
    if query is None:
        raise FragmentError(f"{to_text(formula)} does not match the qualitative template")
    if not check_precondition(model, query.psi):
        raise UnsupportedFormulaError(f"{to_text(query.psi)} is not absorbing: a move leaves its states")
    holds = state_labelling(model, query.psi)
    allowed = shadow_states(model, query, holds, strategies)
    product = build_product(model, query.observer, allowed)
    components = classify_sccs(product, holds)
    target = {q for c in components if c.qualifying for q in c.states}
    reach_pairs = solve_until(product.copy_rows(1), target, product.states) if target else {}

    reachable = InducedChain(model).reachable([s for s, p in model.initial.items() if p > 0])
    reach: dict[str, Fraction] = {}
    for s in sorted(reachable):
        if holds[s]:
            reach[s] = max((reach_pairs.get(q, ZERO) for q in product.states if q[0] == s), default=ZERO)
    counterexample = next(
        (s for s, p in reach.items() if compare(p, flip(query.cmp), ONE - query.bound)), None
    )
    log.debug(f" qualitative verdict {counterexample is None} on {len(reach)} psi-state(s)")
    return QualitativeResult(
        query,
        counterexample is None,
        reach,
        components,
        len(product.states),
        counterexample,
        [SEEDING_WARNING],
    )

