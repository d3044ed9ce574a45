import logging
from collections.abc import Collection, Hashable, Mapping
from fractions import Fraction

import networkx as nx

from ..model.asmas import Asmas
from .linalg import ONE, ZERO, solve_linear

log = logging.getLogger("trustcheck")

_LOST = ("__lost__",)


def transition_graph(transitions: Mapping[Hashable, Mapping[Hashable, Fraction]]) -> nx.DiGraph:
    graph = nx.DiGraph()
    for s, row in transitions.items():
        graph.add_node(s)
        for t, p in row.items():
            if p > 0:
                graph.add_edge(s, t)
    return graph


def solve_until(
    transitions: Mapping[Hashable, Mapping[Hashable, Fraction]],
    target: Collection[Hashable],
    safe: Collection[Hashable],
) -> dict:
    """Probability of reaching target through safe states, for every state.

    Rows may be substochastic; missing mass is lost. States with probability
    0 or 1 are found on the graph, the rest by exact elimination.
    """
    target = set(target)
    safe = set(safe)
    states = set(transitions) | target | {t for row in transitions.values() for t in row}
    graph = nx.DiGraph()
    graph.add_nodes_from(states)
    graph.add_node(_LOST)
    for s in states - target:
        if s not in safe:
            continue
        row = transitions.get(s, {})
        for t, p in row.items():
            if p > 0:
                graph.add_edge(s, t)
        if sum(row.values(), ZERO) < ONE:
            graph.add_edge(s, _LOST)

    reaches = set(target)
    for t in target:
        reaches |= nx.ancestors(graph, t)
    prob0 = states - reaches
    fails = set(prob0) | {_LOST}
    escapes = set(fails)
    for f in fails:
        escapes |= nx.ancestors(graph, f)
    prob1 = (reaches - escapes) | target
    maybe = sorted(reaches - prob1, key=repr)
    log.debug(
        f" until: {len(prob1)} state(s) with probability 1, {len(prob0)} with 0, solving {len(maybe)}"
    )

    result = {s: ONE for s in prob1}
    result.update({s: ZERO for s in prob0})
    if maybe:
        index = {s: i for i, s in enumerate(maybe)}
        matrix = [[ZERO] * len(maybe) for _ in maybe]
        rhs = [ZERO] * len(maybe)
        for s, i in index.items():
            matrix[i][i] += ONE
            for t, p in transitions.get(s, {}).items():
                if t in index:
                    matrix[i][index[t]] -= p
                elif t in prob1:
                    rhs[i] += p
        for s, value in zip(maybe, solve_linear(matrix, rhs)):
            result[s] = value
    return result


class InducedChain:
    """Markov chain of the model's moves, cognitive stages included."""

    def __init__(self, model: Asmas):
        self.model = model
        self.transitions = {s: model.chain_row(s) for s in model.state_ids}

    def graph(self) -> nx.DiGraph:
        return transition_graph(self.transitions)

    def reachable(self, sources: Collection[str]) -> set[str]:
        graph = self.graph()
        out = set(sources)
        for s in sources:
            out |= nx.descendants(graph, s)
        return out

    def until(self, safe: Collection[str], target: Collection[str]) -> dict[str, Fraction]:
        return solve_until(self.transitions, target, safe)

    def eventually(self, target: Collection[str]) -> dict[str, Fraction]:
        return solve_until(self.transitions, target, self.model.state_ids)

    def globally(self, invariant: Collection[str]) -> dict[str, Fraction]:
        leave = set(self.model.state_ids) - set(invariant)
        reach = self.eventually(leave)
        return {s: ONE - p for s, p in reach.items()}

    def bottom_sccs(self) -> list[frozenset[str]]:
        condensed = nx.condensation(self.graph())
        return [
            frozenset(condensed.nodes[c]["members"])
            for c in condensed.nodes
            if condensed.out_degree(c) == 0
        ]
