import json

from typer.testing import CliRunner

from trustcheck.cli import app

runner = CliRunner()

AT = "s0 s2 s5 s12"


def test_check_true():
    result = runner.invoke(app, ["check", "trust_game", "CT{Alice,Bob}>=1 [ X (aBob=share) ]", "--at", AT])
    assert result.exit_code == 0
    assert result.output.startswith("true\t")
    assert "[bounded]" in result.output


def test_check_false():
    result = runner.invoke(app, ["check", "trust_game", "B{Bob}>0.9 [ activeAlice ]", "--at", "s0 s1 s3 s8"])
    assert result.exit_code == 1
    assert result.output.startswith("false\t")


def test_check_value():
    result = runner.invoke(
        app, ["check", "trust_game", "DT{Alice,Bob}>=0.5 [ X (aBob=share) ]", "--at", AT, "--value", "--json"]
    )
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["command"] == "check"
    assert report["model"] == "trust_game"
    assert report["results"][0]["value"] == "1/2"


def test_check_direct_engine():
    result = runner.invoke(
        app, ["check", "trust_game", "DT{Alice,Bob}>=0.5 [ X (aBob=share) ]", "--at", AT, "-e", "direct"]
    )
    assert result.exit_code == 0
    assert "[direct]" in result.output


def test_bad_formula():
    result = runner.invoke(app, ["check", "trust_game", "p $ q"])
    assert result.exit_code == 2
    assert "error: FormulaSyntaxError" in result.output


def test_validate():
    result = runner.invoke(app, ["validate", "trust_game"])
    assert result.exit_code == 0
    assert result.output.startswith("true\tmodel is valid")


def test_belief():
    result = runner.invoke(app, ["belief", "trust_game", "--agent", "Bob", "--trace", "o(s0) Alice.g o(s1)"])
    assert result.exit_code == 0
    assert "{s0 s1: 1/3, s0 s2: 2/3}" in result.output

    result = runner.invoke(app, ["belief", "trust_game", "--agent", "Bob"])
    assert result.exit_code == 2


def test_belief_asmas():
    result = runner.invoke(app, ["belief", "trust_game", "--agent", "Bob", "--asmas"])
    assert result.exit_code == 0
    assert "belief ASMAS of Bob to depth 4" in result.output

    result = runner.invoke(app, ["belief", "trust_game", "--agent", "Bob", "--asmas", "--depth", "1"])
    assert result.exit_code == 0
    assert "b1 = <s1:1/3, s2:2/3>" in result.output
    assert "frontier (not expanded): b1" in result.output
