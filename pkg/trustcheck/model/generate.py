"""Seeded random models and formulas for cross-checking the engines.

Models come out as documents in the model-file format and are loaded
through the same schema as files on disk. They are not meant to pass
validation: cognitive edges lead to arbitrary states, which is all the
belief and trust semantics need.
"""

import logging
from fractions import Fraction

import numpy as np

from .asmas import Asmas
from .loader import load_model_dict
from .rational import format_fraction

log = logging.getLogger("trustcheck")

AGENTS = ("A", "B")
PROPOSITIONS = ("p", "q")
GOALS = ("g0", "g1")
INTENTIONS = ("i0", "i1")

FULL_OBSERVATION = {a: ["id"] for a in AGENTS}
PARTIAL_OBSERVATION = {"A": ["label:p", "goals:A"], "B": ["label:q", "intention:B"]}

BOUNDS = ("0", "1/3", "1/2", "1")
COMPARISONS = (">=", ">", "<=", "<")


def _distribution(rng: np.random.Generator, keys: list[str], max_support: int = 2) -> dict[str, str]:
    size = int(rng.integers(1, min(max_support, len(keys)) + 1))
    chosen = sorted(rng.choice(keys, size=size, replace=False).tolist())
    weights = rng.integers(1, 4, size=size)
    total = int(weights.sum())
    return {k: format_fraction(Fraction(int(w), total)) for k, w in zip(chosen, weights)}


def random_document(
    seed: int,
    size: int,
    *,
    partial: bool = False,
    temporal: float = 0.8,
    cognitive: float = 0.15,
) -> dict:
    """A model document with silent temporal moves and random cognitive edges.

    Each agent's two goal changes (and two intention changes) at a state lead
    to distinct states, so an agent seeing state ids never confuses them.
    """
    if size < 2:
        raise ValueError("random models need at least two states")
    rng = np.random.default_rng(seed)
    ids = [f"s{i}" for i in range(size)]
    states = []
    for sid in ids:
        states.append(
            {
                "id": sid,
                "labels": [p for p in PROPOSITIONS if rng.random() < 0.5],
                "goals": {a: [GOALS[int(rng.integers(2))]] for a in AGENTS},
                "intention": {a: INTENTIONS[int(rng.integers(2))] for a in AGENTS},
            }
        )
    initial = {"s0": "1"} if rng.random() < 0.5 else _distribution(rng, ids[:3])
    transitions = [
        {"from": sid, "action": ["_", "_"], "to": _distribution(rng, ids)}
        for sid in ids
        if rng.random() < temporal
    ]
    edges = []
    for sid in ids:
        for agent in AGENTS:
            for kind, values in (("goals", GOALS), ("intention", INTENTIONS)):
                if rng.random() >= cognitive:
                    continue
                targets = rng.choice(size, size=len(values), replace=False)
                for value, t in zip(values, targets):
                    edges.append(
                        {
                            "from": sid,
                            "to": ids[int(t)],
                            "agent": agent,
                            kind: [value] if kind == "goals" else value,
                        }
                    )
    return {
        "format": 1,
        "name": f"random-{seed}",
        "agents": list(AGENTS),
        "propositions": list(PROPOSITIONS),
        "goals": {a: list(GOALS) for a in AGENTS},
        "intentions": {a: list(INTENTIONS) for a in AGENTS},
        "catalog": {a: {i: {"*": {"_": 1}} for i in INTENTIONS} for a in AGENTS},
        "states": states,
        "initial": initial,
        "transitions": transitions,
        "cognitive_edges": edges,
        "observations": PARTIAL_OBSERVATION if partial else FULL_OBSERVATION,
    }


def random_model(seed: int, size: int, **kwargs) -> Asmas:
    model = load_model_dict(random_document(seed, size, **kwargs), validate=False, source=f"random-{seed}")
    log.debug(f" generated {model.name} with {size} states and {len(model.cognitive_edges)} cognitive edge(s)")
    return model


class FormulaSampler:
    """Random bounded state formulas over the generated vocabulary.

    depth bounds the path suffix a formula inspects; beliefs bounds the
    nesting of belief and trust operators.
    """

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def _pick(self, options):
        return options[int(self.rng.integers(len(options)))]

    def _bound(self) -> str:
        return f"{self._pick(COMPARISONS)}{self._pick(BOUNDS)}"

    def _atom(self) -> str:
        return self._pick(("p", "q", "!p", "(p | q)"))

    def state(self, depth: int, beliefs: int = 2) -> str:
        choices = ["atom", "not", "and", "prob"]
        if beliefs > 0:
            choices += ["belief", "belief"]
            if depth > 0:
                choices += ["trust"]
        match self._pick(choices):
            case "atom":
                return self._atom()
            case "not":
                return f"!{self.state(depth, beliefs)}"
            case "and":
                return f"({self.state(depth, beliefs)} & {self._atom()})"
            case "prob":
                return f"P{self._bound()} [ {self.path(depth, beliefs)} ]"
            case "belief":
                return f"B{{{self._pick(AGENTS)}}}{self._bound()} [ {self.path(depth, beliefs - 1)} ]"
        truster, trustee = self._pick((("A", "B"), ("B", "A")))
        op = self._pick(("CT", "DT"))
        return f"{op}{{{truster},{trustee}}}{self._bound()} [ {self.path(depth - 1, beliefs - 1)} ]"

    def path(self, depth: int, beliefs: int) -> str:
        if depth == 0:
            return self.state(0, beliefs)
        match self._pick(("next", "eventually", "until", "state")):
            case "next":
                return f"X {self.state(depth - 1, beliefs)}"
            case "eventually":
                k = int(self.rng.integers(1, depth + 1))
                return f"F<={k} {self.state(depth - k, beliefs)}"
            case "until":
                k = int(self.rng.integers(1, depth + 1))
                return f"{self._atom()} U<={k} {self.state(depth - k, beliefs)}"
        return self.state(depth, beliefs)


def shadow_document(length: int, revealing: bool, coin: str = "1/2") -> dict:
    """Two chains behind a coin flip, one labelled p and one not.

    Ann sees nothing but label r, which only the end of the p chain carries
    when revealing. Without it the p chain has a permanent shadow in the
    other chain and Ann never becomes sure of p.
    """
    if length < 1:
        raise ValueError("chains need at least one state")
    good = [f"a{i}" for i in range(1, length + 1)]
    bad = [f"b{i}" for i in range(1, length + 1)]
    states = [{"id": "s0"}, {"id": "s1", "labels": ["q"]}]
    states += [{"id": a, "labels": ["p"]} for a in good[:-1]]
    states.append({"id": good[-1], "labels": ["p", "r"] if revealing else ["p"]})
    states += [{"id": b} for b in bad]
    transitions = [
        {"from": "s0", "action": ["_"], "to": {"s1": 1}},
        {"from": "s1", "action": ["_"], "to": {good[0]: coin, bad[0]: format_fraction(1 - Fraction(coin))}},
    ]
    for chain in (good, bad):
        for source, target in zip(chain, chain[1:] + chain[-1:]):
            transitions.append({"from": source, "action": ["_"], "to": {target: 1}})
    return {
        "format": 1,
        "name": f"shadow-{2 * length + 2}{'-revealing' if revealing else ''}",
        "agents": ["Ann"],
        "propositions": ["p", "q", "r"],
        "states": states,
        "initial": {"s0": 1},
        "transitions": transitions,
        "observations": {"Ann": ["label:r"]},
    }


def shadow_model(length: int, revealing: bool, coin: str = "1/2") -> Asmas:
    return load_model_dict(shadow_document(length, revealing, coin), validate=False)
