"""Shared grammar fixtures: the four bundled example grammars plus a
deterministic batch of small random grammars.

Random grammars are filtered so that they are clean (no unreachable or
unproductive symbols), have a nonempty language within length 6, and,
whenever a table is conflict free, every nonempty cell of that table is
exercised by at least one accepted string of length <= 8.  The filter is
independent of the witness generator: coverage is established by running
the parsers over the enumerated language.
"""
from __future__ import annotations

import random
from pathlib import Path

from parsetutor.grammar import Grammar, parse_grammar, validate
from parsetutor.pipeline import Analyses, analyze
from parsetutor.simulate import ll_parse, lr_parse

from . import oracles

GRAMMAR_DIR = Path(__file__).resolve().parent.parent / "grammars"

CORPUS_SEED = 20260826
CORPUS_SIZE = 10


def load(name: str) -> Grammar:
    return parse_grammar((GRAMMAR_DIR / name).read_text())


def expr_grammar() -> Grammar:
    return load("g_expr.cfg")


def g2_grammar() -> Grammar:
    return load("g2.cfg")


def g3_grammar() -> Grammar:
    return load("g3.cfg")


def g4_grammar() -> Grammar:
    return load("g4.cfg")


def paper_grammars() -> list[Grammar]:
    return [expr_grammar(), g2_grammar(), g3_grammar(), g4_grammar()]


def _random_grammar(rng: random.Random) -> Grammar | None:
    nts = ["S", "A", "B", "C"][: rng.randint(2, 4)]
    terms = ["x", "y", "z"][: rng.randint(2, 3)]
    rules: dict[str, list[list[str]]] = {}
    for nt in nts:
        # distinct leading terminals keep most candidates conflict free
        leads = rng.sample(terms, rng.randint(1, min(2, len(terms))))
        # first alternative is all-terminal so the nonterminal is productive
        alts = [[leads[0]] + [rng.choice(terms) for _ in range(rng.randint(0, 1))]]
        for lead in leads[1:]:
            alts.append([lead] + [rng.choice(terms) if rng.random() < 0.5
                                  else rng.choice(nts)
                                  for _ in range(rng.randint(0, 2))])
        if rng.random() < 0.3:
            alts.append([])
        rules[nt] = alts
    while True:
        reach = {nts[0]}
        frontier = [nts[0]]
        while frontier:
            for sym in [s for rhs in rules[frontier.pop()] for s in rhs]:
                if sym in rules and sym not in reach:
                    reach.add(sym)
                    frontier.append(sym)
        missing = [nt for nt in nts if nt not in reach]
        if not missing:
            break
        host = rng.choice(sorted(reach))
        alt = rng.choice([a for a in rules[host] if a])
        # insert after the leading symbol so first sets stay disjoint
        alt.insert(rng.randrange(1, len(alt) + 1), missing[0])
    lines = []
    for nt in nts:
        alts = sorted({" ".join(rhs) or "eps" for rhs in rules[nt]})
        lines.append(f"{nt} -> " + " | ".join(alts))
    try:
        return parse_grammar("\n".join(lines))
    except Exception:
        return None


def _ll_cells_covered(an: Analyses, lang: set[tuple[str, ...]]) -> bool:
    wanted = {(nt.name, t.name) for (nt, t), ps in an.ll_table.cells.items() if ps}
    hit: set[tuple[str, str]] = set()
    for s in lang:
        tr = ll_parse(an.ll_table, an.grammar, list(s))
        if tr.accepted:
            hit |= tr.cells_exercised
    return wanted <= hit


def _slr_cells_covered(an: Analyses, lang: set[tuple[str, ...]]) -> bool:
    wanted = {(st, t.name) for (st, t), acts in an.slr_table.action.items() if acts}
    wanted |= {(st, nt.name) for (st, nt), dest in an.slr_table.goto.items()
               if dest is not None}
    hit: set[tuple[int, str]] = set()
    for s in lang:
        tr = lr_parse(an.slr_table, an.grammar, list(s))
        if tr.accepted:
            hit |= tr.cells_exercised
    return wanted <= hit


def _suitable(g: Grammar) -> Analyses | None:
    if validate(g):
        return None
    try:
        an = analyze(g)
    except Exception:
        return None
    if len(an.dfa.states) > 40:
        return None
    lang = oracles.language_upto(g, 6)
    if not lang or lang == {()}:
        return None
    if not (an.ll_table.conflict_free or an.slr_table.conflict_free):
        return None
    if an.ll_table.conflict_free and not _ll_cells_covered(an, lang):
        return None
    if an.slr_table.conflict_free and not _slr_cells_covered(an, lang):
        return None
    return an


_RANDOM_CACHE: list[Grammar] | None = None


def random_grammars() -> list[Grammar]:
    """Deterministic filtered batch of CORPUS_SIZE small grammars."""
    global _RANDOM_CACHE
    if _RANDOM_CACHE is None:
        rng = random.Random(CORPUS_SEED)
        out: list[Grammar] = []
        seen_texts: set[str] = set()
        attempts = 0
        while len(out) < CORPUS_SIZE and attempts < 4000:
            attempts += 1
            g = _random_grammar(rng)
            if g is None or g.to_text() in seen_texts:
                continue
            if _suitable(g) is not None:
                seen_texts.add(g.to_text())
                out.append(g)
        if len(out) < CORPUS_SIZE:
            raise RuntimeError(f"corpus generation stalled: {len(out)} grammars")
        _RANDOM_CACHE = out
    return _RANDOM_CACHE


def corpus() -> list[Grammar]:
    return paper_grammars() + random_grammars()
