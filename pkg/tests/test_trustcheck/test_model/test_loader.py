import copy
import importlib.resources
import json
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

from trustcheck.errors import ModelError, ValidationFailed
from trustcheck.model import loader as to_test
from trustcheck.settings import Settings


@pytest.fixture(scope="module")
def fixture():
    f"""Fixture for all tests within {__file__}.

    Holds the raw trust game document and a temporary directory with
    - trust_game.json: the document written back to disk
    - broken.json: a file that is not json
    """
    with open(importlib.resources.files("trustcheck.config").joinpath("trust_game.json")) as f:
        document = json.load(f)
    tmp = tempfile.TemporaryDirectory()
    tmp_path = Path(tmp.name)
    with open(tmp_path / "trust_game.json", "w") as f:
        json.dump(document, f)
    with open(tmp_path / "broken.json", "w") as f:
        f.write('{"format": 1,\n "name": }')
    yield {"document": document, "tmp_path": tmp_path}
    tmp.cleanup()


def test_load_shipped():
    model = to_test.load_model("trust_game")
    assert model.name == "trust_game"
    assert model.agents == ("Alice", "Bob")
    assert len(model.states) == 39
    assert model.initial == {"s0": Fraction(1)}
    assert model.guards is not None
    assert model.guards.has_intention_guards("Bob")
    assert not model.guards.has_goal_guards("Alice")


def test_load_model_file(fixture):
    model = to_test.load_model(str(fixture["tmp_path"] / "trust_game.json"))
    assert model == to_test.load_shipped("trust_game")


def test_load_model_errors(fixture):
    with pytest.raises(ModelError) as e:
        to_test.load_model(str(fixture["tmp_path"] / "broken.json"))
    assert "line 2" in str(e.value)
    with pytest.raises(ModelError):
        to_test.load_model(str(fixture["tmp_path"] / "missing.json"))


def test_all_legal_edges():
    model = to_test.load_shipped("trust_game")
    # Alice's two goals at s0, Bob's two goals at s1 and s2, Bob's two intentions at four states
    assert len(model.cognitive_edges) == 2 + 4 + 8
    for edge in model.cognitive_edges:
        assert model.state(edge.target).component_signature() == model.expected_target_signature(
            edge.source, edge.step
        )


def test_schema_violations(fixture):
    data = copy.deepcopy(fixture["document"])
    data["initial"] = {"s0": 0.5}
    with pytest.raises(ModelError) as e:
        to_test.load_model_dict(data)
    assert "initial" in str(e.value)

    data = copy.deepcopy(fixture["document"])
    data["unknown_section"] = {}
    with pytest.raises(ModelError):
        to_test.load_model_dict(data)

    data = copy.deepcopy(fixture["document"])
    data["observations"].pop("Bob")
    with pytest.raises(ModelError) as e:
        to_test.load_model_dict(data)
    assert "Bob" in str(e.value)


def test_validation_failure(fixture):
    data = copy.deepcopy(fixture["document"])
    data["initial"] = {"s0": "1/2"}
    with pytest.raises(ValidationFailed) as e:
        to_test.load_model_dict(data)
    assert "initial" in e.value.report.codes()

    model = to_test.load_model_dict(data, validate=False)
    assert model.initial == {"s0": Fraction(1, 2)}


def test_mode_flags(fixture):
    data = copy.deepcopy(fixture["document"])
    data["modes"] = {"sink_completion": "self_loop"}
    model = to_test.load_model_dict(data, Settings(sink_completion="sink_state", cross_type_weighting=True))
    assert model.sink_completion == "self_loop"
    assert model.cross_type_weighting is True


def test_dump_model_round_trip():
    model = to_test.load_shipped("trust_game")
    dumped = to_test.dump_model(model)
    assert isinstance(dumped["cognitive_edges"], list)
    assert json.loads(json.dumps(dumped)) == dumped
    assert to_test.load_model_dict(dumped) == model
