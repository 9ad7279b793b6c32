import json

from parsetutor.cli import main

from . import corpus

G3 = str(corpus.GRAMMAR_DIR / "g3.cfg")
EXPR = str(corpus.GRAMMAR_DIR / "g_expr.cfg")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", G3)
    assert code == 0
    assert "FIRST[S] = {a, d}" in out
    assert "reduce states: [1, 4, 5, 6]" in out
    assert "action[4, a] = r3" in out


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", G3, "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["slrTable"]["states"] == 7
    assert data["llTable"]["conflictFree"] is True


def test_genstring_ll(capsys):
    code, out, _ = run(capsys, "genstring", EXPR, "--kind", "ll",
                       "--cell", "Tp:)")
    assert code == 0
    assert out.strip() == "id * ( id )"


def test_genstring_slr_shift_and_reduce(capsys):
    code, out, _ = run(capsys, "genstring", G3, "--kind", "slr", "--cell", "3:d")
    assert (code, out.strip()) == (0, "a d d")
    code, out, _ = run(capsys, "genstring", G3, "--kind", "slr", "--cell", "4:a")
    assert (code, out.strip()) == (0, "d a d")


def test_genstring_verbose_prints_trace(capsys):
    code, out, _ = run(capsys, "genstring", G3, "--kind", "slr",
                       "--cell", "3:d", "--verbose")
    assert code == 0
    assert "outcome: accept" in out


def test_genstring_bad_cell_is_usage_error(capsys):
    code, _, err = run(capsys, "genstring", G3, "--kind", "slr", "--cell", "3d")
    assert code == 1
    assert "ROW:COL" in err


def test_genstring_empty_cell_is_internal(capsys):
    code, _, err = run(capsys, "genstring", G3, "--kind", "slr", "--cell", "0:$")
    assert code == 3


def test_parse_accept_and_reject(capsys):
    code, out, _ = run(capsys, "parse", G3, "--input", "d a d")
    assert code == 0 and "outcome: accept" in out
    code, out, _ = run(capsys, "parse", G3, "--input", "d")
    assert code == 0 and "outcome: reject" in out


def test_parse_ll_json(capsys):
    code, out, _ = run(capsys, "parse", EXPR, "--kind", "ll",
                       "--input", "id + id", "--format", "json")
    assert code == 0
    assert json.loads(out)["outcome"] == "accept"


def test_parse_with_table_overrides(tmp_path, capsys):
    spec = {"kind": "slr",
            "overrides": [{"row": 4, "col": "a", "entry": ""}]}
    path = tmp_path / "table.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "parse", G3, "--input", "d a d",
                       "--table", str(path))
    assert code == 0
    assert "outcome: reject" in out


def test_missing_grammar_file(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent.cfg")
    assert code == 2


def test_bad_grammar_file(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no arrow")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "grammar error" in err


def test_usage_error(capsys):
    assert run(capsys, "nope")[0] == 1
    assert run(capsys, "genstring", G3, "--kind", "ll")[0] == 1


def test_quiz_noninteractive(tmp_path, capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("q\n"))
    code, out, _ = run(capsys, "quiz", G3, "--topics", "FirstSet",
                       "--seed", "1", "--count", "1")
    assert code == 0
    assert "score:" in out
