"""Command-line toolbox: analyze, genstring, parse, quiz, serve.

Exit codes: 0 ok, 1 usage, 2 grammar error, 3 internal failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import first_follow_json
from .generate import (GenerationError, gen_ll_string, gen_lr_reduce_string,
                       gen_lr_shift_string)
from .grammar import GrammarError, parse_grammar
from .pipeline import Analyses, analyze
from .quiz import Topic
from .session import (HINT_PROB_DEFAULT, SessionError, create_session,
                      submit_answer)
from .simulate import ll_parse, lr_parse, render_trace_text

EXIT_OK, EXIT_USAGE, EXIT_GRAMMAR, EXIT_INTERNAL = 0, 1, 2, 3


def _load(path: str) -> Analyses:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise GrammarError(str(e))
    return analyze(parse_grammar(text))


def _parse_cell(spec: str) -> tuple[str, str]:
    if ":" not in spec:
        raise ValueError(f"cell must be ROW:COL, got {spec!r}")
    row, col = spec.split(":", 1)
    return row, col


def cmd_analyze(args) -> int:
    a = _load(args.grammar)
    if args.format == "json":
        print(json.dumps(a.to_json(), indent=2, sort_keys=True))
        return EXIT_OK
    g = a.grammar
    print("grammar:")
    for p in g.productions:
        print(f"  {p.index}) {p}")
    for w in a.warnings:
        print(f"warning: {w}")
    ffj = first_follow_json(a.ff)
    print("first:")
    for nt, syms in ffj["first"].items():
        print(f"  FIRST[{nt}] = {{{', '.join(syms)}}}")
    print("follow:")
    for nt, syms in ffj["follow"].items():
        print(f"  FOLLOW[{nt}] = {{{', '.join(syms)}}}")
    print(f"ll table ({'conflict-free' if a.ll_table.conflict_free else 'CONFLICTS'}):")
    for cell in a.ll_table.to_json()["cells"]:
        print(f"  [{cell['row']}, {cell['col']}] = {'; '.join(cell['entries'])}")
    print("item sets:")
    for st in a.dfa.states:
        items = "; ".join(str(it) for it in st.sorted_items())
        print(f"  I{st.id}: {items}")
    print(f"reduce states: {sorted(a.dfa.reduce_states)}")
    print(f"slr table ({'conflict-free' if a.slr_table.conflict_free else 'CONFLICTS'}):")
    for cell in a.slr_table.to_json()["action"]:
        print(f"  action[{cell['row']}, {cell['col']}] = {'; '.join(cell['entries'])}")
    for cell in a.slr_table.to_json()["goto"]:
        print(f"  goto[{cell['row']}, {cell['col']}] = {cell['to']}")
    return EXIT_OK


def cmd_genstring(args) -> int:
    a = _load(args.grammar)
    row, col = _parse_cell(args.cell)
    try:
        if args.kind == "ll":
            result = gen_ll_string(a.grammar, a.graph, (row, col),
                                   table=a.ll_table, tmap=a.terminal_only)
            trace = ll_parse(a.ll_table, a.grammar, result.tokens)
        else:
            state = int(row)
            sym = a.augmented.end if col == "$" else a.augmented.symbol(col)
            if sym.is_nonterminal or \
                    (a.slr_table.action_entries(state, sym)
                     and a.slr_table.action_entries(state, sym)[0].kind == "shift"):
                result = gen_lr_shift_string(a.augmented, a.slr_table, a.dfa,
                                             (state, col), tmap=a.terminal_only_aug)
            else:
                result = gen_lr_reduce_string(a.augmented, a.slr_table, a.dfa,
                                              (state, col), tmap=a.terminal_only_aug)
            trace = lr_parse(a.slr_table, a.augmented, result.tokens)
    except GenerationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    print(" ".join(result.tokens))
    if args.verbose:
        print(render_trace_text(trace))
    return EXIT_OK


def _apply_table_overrides(a: Analyses, path: str):
    """User table file: {"kind": "ll"|"slr", "overrides":
    [{"row": .., "col": .., "entry": ..}]}; an empty entry clears the cell."""
    spec = json.loads(Path(path).read_text())
    kind = spec.get("kind", "slr")
    if kind == "ll":
        table = a.ll_table
        g = a.grammar
        for ov in spec.get("overrides", []):
            nt = g.symbol(ov["row"])
            t = g.end if ov["col"] == "$" else g.symbol(ov["col"])
            entry = ov.get("entry", "")
            prods = tuple(p for p in g.productions if str(p) == entry) if entry else ()
            table = table.with_cell(nt, t, prods)
        return kind, table
    from .quiz import _parse_action
    table = a.slr_table
    g = a.augmented
    for ov in spec.get("overrides", []):
        t = g.end if ov["col"] == "$" else g.symbol(ov["col"])
        table = table.with_action_cell(int(ov["row"]), t,
                                       _parse_action(a, ov.get("entry", "")))
    return kind, table


def cmd_parse(args) -> int:
    a = _load(args.grammar)
    tokens = args.input.split()
    kind = args.kind
    if args.table != "correct":
        kind, table = _apply_table_overrides(a, args.table)
    elif kind == "ll":
        table = a.ll_table
    else:
        table = a.slr_table
    if kind == "ll":
        trace = ll_parse(table, a.grammar, tokens)
    else:
        trace = lr_parse(table, a.augmented, tokens)
    if args.format == "json":
        print(json.dumps(trace.to_json(), indent=2, sort_keys=True))
    else:
        print(render_trace_text(trace))
    # a reject is a successful run; only errors change the exit code
    return EXIT_OK


def cmd_quiz(args) -> int:
    text = Path(args.grammar).read_text()
    topics = [Topic(t) for t in args.topics.split(",")] if args.topics else None
    try:
        session = create_session(text, topics, seed=args.seed,
                                 hint_prob=args.hint_prob,
                                 max_per_topic=args.count)
    except SessionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GRAMMAR
    print(f"session {session.id} — answer with option labels, e.g. 'a c'; "
          f"'q' quits.")
    while not session.complete and session.current is not None:
        item = session.current
        q = item.question
        print()
        if item.is_hint:
            print(f"[hint] {q.prompt}")
            if item.payload:
                print(f"  input string: {item.payload['string']}")
        else:
            print(f"[{q.topic.value}] {q.prompt}")
        for o in q.options:
            print(f"  ({o.label}) {o.content}")
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if line.lower() == "q":
            break
        evaluation, actions = submit_answer(session, q.id, set(line.split()))
        if evaluation["correctOverall"]:
            print("correct.")
        else:
            print("not quite.")
        for a in actions:
            if a.kind == "Reveal":
                print(f"the correct answer was: {', '.join(a.reveal)}")
    s = session.score
    print(f"\nscore: {s['firstTry']} first try, {s['afterHint']} after hints, "
          f"{s['total']} total")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(args.store_dir, hint_prob=args.hint_prob)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parsetutor")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="dump FIRST/FOLLOW, tables, item sets, DFA")
    p.add_argument("grammar")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("genstring", help="witness string for a table cell")
    p.add_argument("grammar")
    p.add_argument("--cell", required=True, help="ROW:COL, e.g. \"T':)\" or 3:d")
    p.add_argument("--kind", choices=["ll", "slr"], required=True)
    p.add_argument("--verbose", action="store_true", help="also print the trace")
    p.set_defaults(func=cmd_genstring)

    p = sub.add_parser("parse", help="trace a parse of an input string")
    p.add_argument("grammar")
    p.add_argument("--input", required=True, help="space-separated tokens")
    p.add_argument("--kind", choices=["ll", "slr"], default="slr")
    p.add_argument("--table", default="correct",
                   help="'correct' or a JSON overrides file")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("quiz", help="interactive terminal session")
    p.add_argument("grammar")
    p.add_argument("--topics", default="", help="comma-separated topic names")
    p.add_argument("--seed", type=int, default=_env_int("SEED"))
    p.add_argument("--count", type=int, default=None,
                   help="questions per topic (default: all targets)")
    p.add_argument("--hint-prob", type=float,
                   default=_env_float("HINT_PROB", HINT_PROB_DEFAULT))
    p.set_defaults(func=cmd_quiz)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=_env_int("PORT", 8000))
    p.add_argument("--store-dir", default=os.environ.get("STORE_DIR", "./store"))
    p.add_argument("--hint-prob", type=float,
                   default=_env_float("HINT_PROB", HINT_PROB_DEFAULT))
    p.set_defaults(func=cmd_serve)
    return parser


def _env_int(name: str, default: int | None = None) -> int | None:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw else default


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except GrammarError as e:
        print(f"grammar error: {e}", file=sys.stderr)
        return EXIT_GRAMMAR
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
