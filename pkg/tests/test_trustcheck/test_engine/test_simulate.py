import pytest

from trustcheck.engine import simulate as to_test
from trustcheck.engine.synthesis import HistoryPreferences, Synthesizer
from trustcheck.model.loader import load_shipped


@pytest.fixture(scope="module")
def fixture():
    model = load_shipped("trust_game")
    synthesizer = Synthesizer(model)
    return {"model": model, "synthesizer": synthesizer, "preferences": HistoryPreferences(model, synthesizer)}


def _simulator(fixture, seed: int) -> to_test.Simulator:
    return to_test.Simulator(fixture["model"], fixture["synthesizer"], fixture["preferences"], seed)


def test_seeded_paths(fixture):
    first = _simulator(fixture, 7).sample_path(3)
    second = _simulator(fixture, 7).sample_path(3)
    assert first == second
    assert first.first == "s0"
    assert len(first) > 3


def test_run(fixture):
    trace = _simulator(fixture, 3).run(3)
    assert trace.steps[0].step == "init"
    assert trace.steps[0].state == "s0"
    assert trace.steps[0].beliefs == {"Alice": "<s0:1>", "Bob": "<s0:1>"}
    assert len(trace.steps) == len(trace.path)
    assert [row["state"] for row in trace.to_rows()] == list(trace.path.states)
    assert trace.to_text().startswith("simulation with seed 3: s0")


def test_frequencies(fixture):
    counts = _simulator(fixture, 11).frequencies(20, 3)
    assert sum(counts.values()) == 20
    for path in counts:
        states = path.split()
        # an investor that saw Alice invest always intends to share
        if "s8" in states:
            assert "s15" in states
        if "s12" in states:
            assert "s19" in states
