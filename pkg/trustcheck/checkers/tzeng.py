"""Probabilistic equivalence of stochastic automata.

Two automata are equivalent when every word has the same acceptance
probability in both. The reachable part of the joint vector space
(initial vectors pushed through words) has dimension at most the total
number of states, so a breadth-first search that only keeps linearly
independent vectors decides equivalence in polynomial time.
"""

import logging
from collections import deque
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from ..engine.linalg import ONE, ZERO, Basis, dot

log = logging.getLogger("trustcheck")

Symbol = Hashable


@dataclass
class StochasticAutomaton:
    """States, alphabet, weights alpha(q, a, q') and an initial distribution; every state accepts."""

    states: tuple
    alphabet: tuple
    weights: dict[tuple, dict] = field(default_factory=dict)
    initial: dict = field(default_factory=dict)

    def row(self, q, a) -> dict:
        return self.weights.get((q, a), {})

    def is_stochastic(self) -> bool:
        if sum(self.initial.values(), ZERO) != ONE:
            return False
        for q in self.states:
            total = sum((p for a in self.alphabet for p in self.row(q, a).values()), ZERO)
            if total != ONE:
                return False
        return True

    def step(self, vector: dict, a) -> dict:
        out: dict = {}
        for q, v in vector.items():
            if v == 0:
                continue
            for target, p in self.row(q, a).items():
                out[target] = out.get(target, ZERO) + v * p
        return out

    def word_probability(self, word: Sequence) -> Fraction:
        vector = dict(self.initial)
        for a in word:
            vector = self.step(vector, a)
        return sum(vector.values(), ZERO)

    def renamed(self, mapping: dict) -> "StochasticAutomaton":
        return StochasticAutomaton(
            tuple(mapping[q] for q in self.states),
            self.alphabet,
            {(mapping[q], a): {mapping[t]: p for t, p in row.items()} for (q, a), row in self.weights.items()},
            {mapping[q]: p for q, p in self.initial.items()},
        )


def _joint_vector(sa1: StochasticAutomaton, v1: dict, sa2: StochasticAutomaton, v2: dict) -> list[Fraction]:
    return [v1.get(q, ZERO) for q in sa1.states] + [v2.get(q, ZERO) for q in sa2.states]


def find_distinguishing_word(sa1: StochasticAutomaton, sa2: StochasticAutomaton) -> tuple | None:
    """A word with different acceptance probabilities, None when the automata are equivalent."""
    alphabet = tuple(dict.fromkeys(sa1.alphabet + sa2.alphabet))
    eta = [ONE] * len(sa1.states) + [-ONE] * len(sa2.states)
    basis = Basis(len(eta))
    queue: deque[tuple[tuple, dict, dict]] = deque([((), dict(sa1.initial), dict(sa2.initial))])
    while queue:
        word, v1, v2 = queue.popleft()
        joint = _joint_vector(sa1, v1, sa2, v2)
        if not basis.add(joint):
            continue
        if dot(eta, joint) != 0:
            log.debug(f" automata differ on a word of length {len(word)}")
            return word
        for a in alphabet:
            queue.append((word + (a,), sa1.step(v1, a), sa2.step(v2, a)))
    log.debug(f" automata equivalent, spanning basis of size {len(basis)}")
    return None


def tzeng_equivalent(sa1: StochasticAutomaton, sa2: StochasticAutomaton) -> bool:
    return find_distinguishing_word(sa1, sa2) is None
