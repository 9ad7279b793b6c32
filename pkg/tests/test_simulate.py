import pytest

from parsetutor.grammar import GrammarError, parse_grammar
from parsetutor.pipeline import analyze
from parsetutor.simulate import (cell_exercised, ll_parse, lr_parse,
                                 render_trace_text)

from . import oracles


def test_ll_accepts_and_records_cells(expr_an):
    g = expr_an.grammar
    tr = ll_parse(expr_an.ll_table, g, ["id", "+", "id"])
    assert tr.accepted
    assert tr.reason is None
    assert ("E", "id") in tr.cells_exercised
    assert ("Ep", "+") in tr.cells_exercised
    assert ("Ep", "$") in tr.cells_exercised
    assert cell_exercised(tr, ("Ep", "+"))
    assert not cell_exercised(tr, ("F", "("))


def test_ll_rejects_on_empty_cell(expr_an):
    tr = ll_parse(expr_an.ll_table, expr_an.grammar, ["+", "id"])
    assert not tr.accepted
    assert tr.reason == "empty cell"
    assert tr.reject_step == len(tr.steps) - 1
    # the failing consult is still recorded as exercised
    assert ("E", "+") in tr.cells_exercised


def test_ll_rejects_on_terminal_mismatch(expr_an):
    # missing the closing parenthesis: ')' on the stack meets '$'
    tr = ll_parse(expr_an.ll_table, expr_an.grammar, ["(", "id"])
    assert not tr.accepted
    assert "terminal mismatch" in tr.reason


def test_ll_rejects_on_leftover_input(expr_an):
    g2 = parse_grammar("S -> a\n")
    an = analyze(g2)
    tr = ll_parse(an.ll_table, g2, ["a", "a"])
    assert not tr.accepted


def test_ll_rejects_on_conflict_cell(g4_an):
    tr = ll_parse(g4_an.ll_table, g4_an.grammar, ["0"])
    assert not tr.accepted
    assert tr.reason == "conflict"


def test_ll_nontermination_capped(expr_an):
    # user-mutated cell that expands E to itself forever
    g = expr_an.grammar
    e = g.symbol("E")
    looping = g.productions[0].__class__(0, e, (e,))
    table = expr_an.ll_table.with_cell(e, g.symbol("id"), (looping,))
    tr = ll_parse(table, g, ["id"])
    assert not tr.accepted
    assert tr.reason == "nontermination"


def test_ll_unknown_token_raises(expr_an):
    with pytest.raises(GrammarError):
        ll_parse(expr_an.ll_table, expr_an.grammar, ["bogus"])
    with pytest.raises(GrammarError):
        ll_parse(expr_an.ll_table, expr_an.grammar, ["E"])


def test_lr_accepts_and_records_cells(g3_an):
    tr = lr_parse(g3_an.slr_table, g3_an.grammar, ["d", "a", "d"])
    assert tr.accepted
    assert (4, "a") in tr.cells_exercised      # reduce C -> d under a
    assert (0, "C") in tr.cells_exercised      # goto consultations too
    assert (1, "$") in tr.cells_exercised      # accept cell


def test_lr_stack_rendering_compact(g3_an):
    tr = lr_parse(g3_an.slr_table, g3_an.grammar, ["a", "d", "d"])
    assert "".join(tr.steps[0].stack) == "0"
    assert "".join(tr.steps[2].stack) == "0a3d4"
    assert tr.accepted


def test_lr_rejects_on_empty_cell(g3_an):
    tr = lr_parse(g3_an.slr_table, g3_an.grammar, ["d"])
    assert not tr.accepted
    assert tr.reason == "empty cell"
    assert (2, "$") in tr.cells_exercised


def test_lr_conflict_cell_rejects(g3_an):
    from parsetutor.analysis import Action
    g = g3_an.augmented
    both = (Action("shift", state=4), Action("shift", state=3))
    table = g3_an.slr_table.with_action_cell(0, g.symbol("d"), both)
    tr = lr_parse(table, g3_an.grammar, ["d", "d"])
    assert not tr.accepted
    assert tr.reason == "conflict"


def test_lr_stack_underflow_on_bad_reduce(g3_an):
    from parsetutor.analysis import Action
    g = g3_an.augmented
    bad = (Action("reduce", production=g.productions[1]),)  # S -> C C
    table = g3_an.slr_table.with_action_cell(0, g.symbol("d"), bad)
    tr = lr_parse(table, g3_an.grammar, ["d", "d"])
    assert not tr.accepted
    assert "stack underflow" in tr.reason


def test_lr_accepts_with_augmented_or_original_symbols(g3_an):
    for src in (g3_an.grammar, g3_an.augmented):
        assert lr_parse(g3_an.slr_table, src, ["a", "a", "d", "d"]).accepted


def test_trace_json_shape(g3_an):
    tr = lr_parse(g3_an.slr_table, g3_an.grammar, ["d", "d"])
    data = tr.to_json()
    assert data["outcome"] == "accept"
    assert data["rejectStep"] is None
    assert data["steps"][0] == {"stack": "0", "remaining": "d d $",
                                "action": "shift 4", "cell": [0, "d"]}
    assert [0, "C"] in data["cellsExercised"]


def test_render_trace_text(expr_an):
    tr = ll_parse(expr_an.ll_table, expr_an.grammar, ["id"])
    text = render_trace_text(tr)
    assert "stack" in text.splitlines()[0]
    assert text.splitlines()[-1] == "outcome: accept"


def test_parsers_agree_with_recognizer_on_paper_grammars(expr_an, g2_an, g3_an):
    for an in (expr_an, g2_an, g3_an):
        g = an.grammar
        accepts = oracles.make_recognizer(g)
        for s in oracles.all_strings_upto(g, 4):
            expected = accepts(s)
            assert ll_parse(an.ll_table, g, list(s)).accepted == expected, s
            assert lr_parse(an.slr_table, g, list(s)).accepted == expected, s
