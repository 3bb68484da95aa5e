import io
import json

import pytest

from frontend import parse
from sinpa_cli import EXIT_INPUT_ERROR, main


@pytest.fixture
def sentence_file(tmp_path):
    def write(text: str):
        path = tmp_path / "sentence.spa"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def test_decide_sat(sentence_file, capsys):
    assert main(["decide", sentence_file("exists x. x < sin(x)")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "SAT"
    assert "Witness: x = -2" in out


def test_decide_unsat(sentence_file, capsys):
    assert main(["decide", sentence_file("exists x. 1 < sin(x)")]) == 1
    assert capsys.readouterr().out.splitlines()[0] == "UNSAT"


def test_decide_unknown_on_tiny_budget(sentence_file, capsys):
    assert main(["decide", "--budget", "1", sentence_file("exists x. 9/10 < sin(x)")]) == 2
    out = capsys.readouterr().out
    assert out.startswith("UNKNOWN")
    assert "Note: box budget 1 exhausted" in out


def test_decide_json_with_trace(sentence_file, capsys):
    assert main(["decide", "--json", "--trace", sentence_file("exists x. x < sin(x)")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "SAT"
    assert payload["witness"] == {"x": -2}
    assert payload["certified_box"] is None
    assert [stage["name"] for stage in payload["trace"]["stages"]][-1] == "proxy-search"
    assert payload["trace"]["stages"][0]["formula"] is not None


def test_decide_json_fields(sentence_file, capsys):
    assert main(["decide", "--json", sentence_file("exists x. 0 < sin(1/2*x)")]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert {"verdict", "witness", "certified_box", "period_N", "schanuel_conditional", "stage_stats"} <= set(payload)
    assert payload["period_N"] == 2
    assert payload["schanuel_conditional"] is False
    assert len(payload["stage_stats"]) == 5
    assert payload["stage_stats"][-1]["name"] == "proxy-search"
    (interval,) = payload["certified_box"]
    assert float(interval["lo"]) < float(interval["hi"])
    assert payload["trace"] is None


def test_decide_json_unsat_has_null_witness(sentence_file, capsys):
    assert main(["decide", "--json", sentence_file("exists x, y. sin(x) = sin(y) and x != y")]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "UNSAT"
    assert payload["witness"] is None
    assert payload["certified_box"] is None
    assert payload["schanuel_conditional"] is True


def test_decide_text_trace(sentence_file, capsys):
    main(["decide", "--trace", "--schedule", "widest", sentence_file("exists x. 0 < sin(x)")])
    out = capsys.readouterr().out
    assert "--- Trace ---" in out
    assert "divisibility:" in out


def test_decide_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO("exists x. 1 < sin(x)"))
    assert main(["decide", "-"]) == 1


def test_print_canonical_form(sentence_file, capsys):
    text = "exists x. not (x <= 2) and div(2, x/2)"
    assert main(["print", sentence_file(text)]) == 0
    printed = capsys.readouterr().out.strip()
    assert parse(printed) == parse(text)


def test_missing_file(tmp_path, capsys):
    assert main(["decide", str(tmp_path / "absent.spa")]) == EXIT_INPUT_ERROR
    assert "Cannot read" in capsys.readouterr().err


def test_parse_error_is_reported_with_position(sentence_file, capsys):
    assert main(["decide", sentence_file("exists x. y < 1")]) == EXIT_INPUT_ERROR
    assert capsys.readouterr().err.startswith("1:11: ")


def test_universal_sentence_is_an_input_error(sentence_file, capsys):
    assert main(["decide", sentence_file("forall x. 0 < sin(x) + 2")]) == EXIT_INPUT_ERROR


def test_unknown_schedule_is_rejected_by_argparse(sentence_file):
    with pytest.raises(SystemExit):
        main(["decide", "--schedule", "random", sentence_file("exists x. 0 < sin(x)")])
