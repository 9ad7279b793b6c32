"""Independent brute-force oracles used to check the analyses.

These deliberately avoid the library's own fixpoint/table machinery:
FIRST/FOLLOW come from bounded derivation enumeration, membership from a
memoized recursive recognizer, and shortest terminal strings from a
breadth-first search over leftmost derivations.
"""
from __future__ import annotations

from itertools import product

from parsetutor.grammar import Grammar, Symbol


def sentential_forms(g: Grammar, root: tuple[Symbol, ...], depth: int,
                     max_form_len: int = 16) -> set[tuple[Symbol, ...]]:
    """All sentential forms reachable from root in at most `depth`
    derivation steps (any-position expansion), length-bounded."""
    forms = {root}
    frontier = {root}
    for _ in range(depth):
        nxt: set[tuple[Symbol, ...]] = set()
        for form in frontier:
            for i, s in enumerate(form):
                if not s.is_nonterminal:
                    continue
                for p in g.productions_for(s):
                    new = form[:i] + p.rhs + form[i + 1:]
                    if len(new) <= max_form_len and new not in forms:
                        nxt.add(new)
        forms |= nxt
        frontier = nxt
        if not frontier:
            break
    return forms


def first_oracle(g: Grammar, depth: int = 8) -> dict[Symbol, set[Symbol]]:
    """t in FIRST(A) iff some form derivable from A starts with t;
    epsilon iff A derives the empty form."""
    out: dict[Symbol, set[Symbol]] = {}
    for nt in g.nonterminals:
        first: set[Symbol] = set()
        for form in sentential_forms(g, (nt,), depth):
            if not form:
                first.add(g.epsilon)
            elif form[0].is_terminal:
                first.add(form[0])
        out[nt] = first
    return out


def follow_oracle(g: Grammar, depth: int = 8) -> dict[Symbol, set[Symbol]]:
    """t in FOLLOW(A) iff some sentential form from S$ has t directly
    after A."""
    out: dict[Symbol, set[Symbol]] = {nt: set() for nt in g.nonterminals}
    for form in sentential_forms(g, (g.start, g.end), depth):
        for a, b in zip(form, form[1:]):
            if a.is_nonterminal and (b.is_terminal or b is g.end):
                out[a].add(b)
    return out


def make_recognizer(g: Grammar):
    """Memoized recursive CFG recognizer over token-name tuples.

    A repetition of (symbol, substring) along one derivation path can
    always be cut out, so the in-progress guard loses no derivations.
    """
    memo: dict[tuple, bool] = {}
    in_progress: set[tuple] = set()

    def seq_derives(seq: tuple[Symbol, ...], s: tuple[str, ...]) -> bool:
        if not seq:
            return not s
        if len(seq) == 1:
            return sym_derives(seq[0], s)
        head, rest = seq[0], seq[1:]
        return any(sym_derives(head, s[:i]) and seq_derives(rest, s[i:])
                   for i in range(len(s) + 1))

    def sym_derives(sym: Symbol, s: tuple[str, ...]) -> bool:
        if sym.is_terminal:
            return s == (sym.name,)
        key = (sym, s)
        if key in memo:
            return memo[key]
        if key in in_progress:
            return False
        in_progress.add(key)
        result = any(seq_derives(p.rhs, s) for p in g.productions_for(sym))
        in_progress.discard(key)
        memo[key] = result
        return result

    def accepts(tokens: list[str] | tuple[str, ...]) -> bool:
        return sym_derives(g.start, tuple(tokens))

    return accepts


def language_upto(g: Grammar, max_len: int) -> set[tuple[str, ...]]:
    """Every terminal string of length <= max_len in L(g), by testing all
    candidate strings with the recognizer."""
    accepts = make_recognizer(g)
    names = [t.name for t in g.terminals]
    out: set[tuple[str, ...]] = set()
    for n in range(max_len + 1):
        for combo in product(names, repeat=n):
            if accepts(combo):
                out.add(combo)
    return out


def all_strings_upto(g: Grammar, max_len: int):
    names = [t.name for t in g.terminals]
    for n in range(max_len + 1):
        yield from product(names, repeat=n)


def shortest_terminal_oracle(g: Grammar, max_len: int = 8,
                             max_depth: int = 24) -> dict[Symbol, int]:
    """Minimal terminal-string token count derivable from each symbol, by
    BFS over leftmost derivations; absent means underivable within bounds."""
    out: dict[Symbol, int] = {t: 1 for t in g.terminals}
    for nt in g.nonterminals:
        best: int | None = None
        frontier = {(nt,)}
        seen = {(nt,)}
        for _ in range(max_depth):
            nxt: set[tuple[Symbol, ...]] = set()
            for form in frontier:
                idx = next((i for i, s in enumerate(form) if s.is_nonterminal), None)
                if idx is None:
                    if best is None or len(form) < best:
                        best = len(form)
                    continue
                for p in g.productions_for(form[idx]):
                    new = form[:idx] + p.rhs + form[idx + 1:]
                    if sum(1 for s in new if s.is_terminal) <= max_len \
                            and len(new) <= 2 * max_len and new not in seen:
                        seen.add(new)
                        nxt.add(new)
            frontier = nxt
            if not frontier:
                break
        if best is not None:
            out[nt] = best
    return out
