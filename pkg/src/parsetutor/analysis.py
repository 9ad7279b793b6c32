"""FIRST/FOLLOW sets, LL(1) table, LR(0) item sets, viable-prefix DFA, SLR table."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .grammar import Grammar, GrammarError, Production, Symbol


@dataclass(frozen=True)
class FirstFollow:
    grammar: Grammar
    first: dict[Symbol, frozenset[Symbol]]
    follow: dict[Symbol, frozenset[Symbol]]
    nullable: frozenset[Symbol]

    def first_of(self, seq: Iterable[Symbol]) -> frozenset[Symbol]:
        """FIRST of a symbol sequence, epsilon included iff the whole
        sequence is nullable."""
        g = self.grammar
        out: set[Symbol] = set()
        for s in seq:
            if s.is_terminal:
                out.add(s)
                return frozenset(out)
            out |= self.first[s] - {g.epsilon}
            if s not in self.nullable:
                return frozenset(out)
        out.add(g.epsilon)
        return frozenset(out)


def compute_first_follow(g: Grammar) -> FirstFollow:
    eps = g.epsilon
    nullable: set[Symbol] = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                nullable.add(p.lhs)
                changed = True

    first: dict[Symbol, set[Symbol]] = {nt: set() for nt in g.nonterminals}
    for nt in nullable:
        first[nt].add(eps)
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            target = first[p.lhs]
            before = len(target)
            for s in p.rhs:
                if s.is_terminal:
                    target.add(s)
                    break
                target |= first[s] - {eps}
                if s not in nullable:
                    break
            if len(target) != before:
                changed = True

    follow: dict[Symbol, set[Symbol]] = {nt: set() for nt in g.nonterminals}
    follow[g.start].add(g.end)
    ff_tmp = FirstFollow(g, {k: frozenset(v) for k, v in first.items()},
                         {}, frozenset(nullable))
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            for i, s in enumerate(p.rhs):
                if not s.is_nonterminal:
                    continue
                tail = p.rhs[i + 1:]
                tail_first = ff_tmp.first_of(tail)
                before = len(follow[s])
                follow[s] |= tail_first - {eps}
                if eps in tail_first:
                    follow[s] |= follow[p.lhs]
                if len(follow[s]) != before:
                    changed = True

    return FirstFollow(g, {k: frozenset(v) for k, v in first.items()},
                       {k: frozenset(v) for k, v in follow.items()},
                       frozenset(nullable))


@dataclass
class LLTable:
    grammar: Grammar
    cells: dict[tuple[Symbol, Symbol], tuple[Production, ...]]

    @property
    def rows(self) -> list[Symbol]:
        return self.grammar.nonterminals

    @property
    def cols(self) -> list[Symbol]:
        return self.grammar.terminals + [self.grammar.end]

    def entries(self, nt: Symbol, t: Symbol) -> tuple[Production, ...]:
        return self.cells.get((nt, t), ())

    @property
    def conflict_free(self) -> bool:
        return all(len(v) <= 1 for v in self.cells.values())

    def conflicts(self) -> list[tuple[Symbol, Symbol]]:
        return sorted(((nt, t) for (nt, t), v in self.cells.items() if len(v) > 1),
                      key=lambda c: (c[0].id, c[1].id))

    def with_cell(self, nt: Symbol, t: Symbol,
                  entries: tuple[Production, ...]) -> "LLTable":
        """Copy of this table with one cell replaced (a user-filled table)."""
        cells = dict(self.cells)
        if entries:
            cells[(nt, t)] = entries
        else:
            cells.pop((nt, t), None)
        return LLTable(self.grammar, cells)

    def to_json(self) -> dict:
        cells = []
        for (nt, t), prods in sorted(self.cells.items(),
                                     key=lambda kv: (kv[0][0].id, kv[0][1].id)):
            cells.append({"row": nt.name, "col": t.name,
                          "entries": [str(p) for p in prods]})
        return {"kind": "ll", "rows": [s.name for s in self.rows],
                "cols": [s.name for s in self.cols], "cells": cells,
                "conflictFree": self.conflict_free}


def build_ll_table(g: Grammar, ff: FirstFollow) -> LLTable:
    """Cell [A, a] holds A -> alpha iff a in FIRST(alpha), or
    epsilon in FIRST(alpha) and a in FOLLOW(A)."""
    eps = g.epsilon
    cells: dict[tuple[Symbol, Symbol], list[Production]] = {}
    for p in g.productions:
        fs = ff.first_of(p.rhs)
        lookaheads = set(fs - {eps})
        if eps in fs:
            lookaheads |= ff.follow[p.lhs]
        for a in sorted(lookaheads, key=lambda s: s.id):
            cells.setdefault((p.lhs, a), []).append(p)
    return LLTable(g, {k: tuple(v) for k, v in cells.items()})


@dataclass(frozen=True, order=True)
class LR0Item:
    production: Production
    dot: int

    @property
    def complete(self) -> bool:
        return self.dot == len(self.production.rhs)

    @property
    def next_symbol(self) -> Symbol | None:
        rhs = self.production.rhs
        return rhs[self.dot] if self.dot < len(rhs) else None

    def advanced(self) -> "LR0Item":
        return LR0Item(self.production, self.dot + 1)

    def __str__(self) -> str:
        parts = [s.name for s in self.production.rhs]
        parts.insert(self.dot, ".")
        return f"{self.production.lhs.name} -> {' '.join(parts)}"


@dataclass(frozen=True)
class ItemSet:
    id: int
    items: frozenset[LR0Item]

    def sorted_items(self) -> list[LR0Item]:
        return sorted(self.items, key=lambda it: (it.production.index, it.dot))


def closure(g: Grammar, items: Iterable[LR0Item]) -> frozenset[LR0Item]:
    out = set(items)
    frontier = list(out)
    while frontier:
        item = frontier.pop()
        nxt = item.next_symbol
        if nxt is None or not nxt.is_nonterminal:
            continue
        for p in g.productions_for(nxt):
            fresh = LR0Item(p, 0)
            if fresh not in out:
                out.add(fresh)
                frontier.append(fresh)
    return frozenset(out)


def goto_set(g: Grammar, items: Iterable[LR0Item], x: Symbol) -> frozenset[LR0Item]:
    kernel = [it.advanced() for it in items if it.next_symbol == x]
    if not kernel:
        return frozenset()
    return closure(g, kernel)


@dataclass
class ViablePrefixDFA:
    grammar: Grammar
    states: list[ItemSet]
    transitions: dict[tuple[int, Symbol], int]
    reduce_states: frozenset[int]

    def successors(self, state: int) -> list[tuple[Symbol, int]]:
        out = [(sym, dst) for (src, sym), dst in self.transitions.items()
               if src == state]
        return sorted(out, key=lambda e: e[0].id)

    def to_json(self) -> dict:
        states = []
        for st in self.states:
            states.append({"id": st.id, "items": [str(it) for it in st.sorted_items()]})
        transitions = [{"from": src, "symbol": sym.name, "to": dst}
                       for (src, sym), dst in sorted(self.transitions.items(),
                                                     key=lambda kv: (kv[0][0], kv[0][1].id))]
        return {"states": states, "transitions": transitions,
                "reduceStates": sorted(self.reduce_states)}


def canonical_collection(g: Grammar) -> ViablePrefixDFA:
    """Worklist construction from closure of the augmented start item.

    States are numbered in BFS discovery order; outgoing symbols are tried
    in first-appearance (symbol id) order, which reproduces conventional
    state numbering on the reference grammars.
    """
    if not g.augmented:
        raise GrammarError("canonical collection requires an augmented grammar")
    start_items = closure(g, [LR0Item(g.productions[0], 0)])
    states: list[ItemSet] = [ItemSet(0, start_items)]
    index: dict[frozenset[LR0Item], int] = {start_items: 0}
    transitions: dict[tuple[int, Symbol], int] = {}
    queue = deque([0])
    symbols = [s for s in g.symbols if s.is_terminal or s.is_nonterminal]
    while queue:
        sid = queue.popleft()
        items = states[sid].items
        for x in symbols:
            nxt = goto_set(g, items, x)
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(states)
                states.append(ItemSet(len(states), nxt))
                queue.append(index[nxt])
            transitions[(sid, x)] = index[nxt]
    reduce_states = frozenset(st.id for st in states
                              if any(it.complete for it in st.items))
    return ViablePrefixDFA(g, states, transitions, reduce_states)


@dataclass(frozen=True)
class Action:
    kind: str  # "shift" | "reduce" | "accept"
    state: int | None = None
    production: Production | None = None

    def __str__(self) -> str:
        if self.kind == "shift":
            return f"s{self.state}"
        if self.kind == "reduce":
            return f"r{self.production.index}"
        return "acc"


@dataclass
class SLRTable:
    grammar: Grammar  # augmented
    n_states: int
    action: dict[tuple[int, Symbol], tuple[Action, ...]]
    goto: dict[tuple[int, Symbol], int]

    @property
    def terminal_cols(self) -> list[Symbol]:
        return self.grammar.terminals + [self.grammar.end]

    def action_entries(self, state: int, t: Symbol) -> tuple[Action, ...]:
        return self.action.get((state, t), ())

    def goto_entry(self, state: int, nt: Symbol) -> int | None:
        return self.goto.get((state, nt))

    @property
    def conflict_free(self) -> bool:
        return all(len(v) <= 1 for v in self.action.values())

    def conflicts(self) -> list[tuple[int, Symbol]]:
        return sorted(((s, t) for (s, t), v in self.action.items() if len(v) > 1),
                      key=lambda c: (c[0], c[1].id))

    def with_action_cell(self, state: int, t: Symbol,
                         entries: tuple[Action, ...]) -> "SLRTable":
        action = dict(self.action)
        if entries:
            action[(state, t)] = entries
        else:
            action.pop((state, t), None)
        return SLRTable(self.grammar, self.n_states, action, self.goto)

    def to_json(self) -> dict:
        action = [{"row": s, "col": t.name, "entries": [str(a) for a in acts]}
                  for (s, t), acts in sorted(self.action.items(),
                                             key=lambda kv: (kv[0][0], kv[0][1].id))]
        goto = [{"row": s, "col": nt.name, "to": dst}
                for (s, nt), dst in sorted(self.goto.items(),
                                           key=lambda kv: (kv[0][0], kv[0][1].id))]
        return {"kind": "slr", "states": self.n_states, "action": action,
                "goto": goto, "conflictFree": self.conflict_free}


def build_slr_table(g: Grammar, dfa: ViablePrefixDFA, ff: FirstFollow) -> SLRTable:
    """Shifts from DFA transitions; reduce A -> alpha under FOLLOW(A);
    accept for the completed augmented start item under $."""
    if not g.augmented:
        raise GrammarError("SLR table requires an augmented grammar")
    action: dict[tuple[int, Symbol], list[Action]] = {}
    goto: dict[tuple[int, Symbol], int] = {}
    for (src, sym), dst in dfa.transitions.items():
        if sym.is_terminal:
            action.setdefault((src, sym), []).append(Action("shift", state=dst))
        else:
            goto[(src, sym)] = dst
    start_prod = g.productions[0]
    for st in dfa.states:
        for item in st.sorted_items():
            if not item.complete:
                continue
            if item.production is start_prod:
                action.setdefault((st.id, g.end), []).append(Action("accept"))
            else:
                for t in sorted(ff.follow[item.production.lhs], key=lambda s: s.id):
                    action.setdefault((st.id, t), []).append(
                        Action("reduce", production=item.production))
    return SLRTable(g, len(dfa.states), {k: tuple(v) for k, v in action.items()}, goto)


def first_follow_json(ff: FirstFollow) -> dict:
    def names(syms: frozenset[Symbol]) -> list[str]:
        return sorted(s.name for s in syms)
    return {
        "first": {nt.name: names(ff.first[nt])
                  for nt in sorted(ff.first, key=lambda s: s.id)},
        "follow": {nt.name: names(ff.follow[nt])
                   for nt in sorted(ff.follow, key=lambda s: s.id)},
        "nullable": sorted(nt.name for nt in ff.nullable),
    }
