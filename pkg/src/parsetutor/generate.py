"""Generation of input strings that exercise a chosen parse-table cell.

LL cells: shortest paths over a symbol graph plus terminal-only expansion.
LR shift entries: viable-prefix DFA traversal with a reduce-preferring loop.
LR reduce entries: guessed stack with before/after state sets refined by
table lookups, then the shift procedure.

Every returned string is verified by simulation before being handed out.
When the heuristic construction fails verification (the procedures are
heuristic; degenerate cells exist), a bounded derivation search supplies a
witness instead.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .analysis import Action, LLTable, SLRTable, ViablePrefixDFA
from .grammar import Grammar, Production, Symbol, terminal_only_strings
from .simulate import ll_parse, lr_parse


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class SymbolGraph:
    """Vertices are grammar symbols; an edge lhs -> r exists for every RHS
    symbol r of some lhs-production, labeled with the shortest such rule."""
    grammar: Grammar
    edges: dict[tuple[Symbol, Symbol], Production]

    def neighbors(self, src: Symbol) -> list[tuple[Symbol, Production]]:
        out = [(dst, p) for (u, dst), p in self.edges.items() if u == src]
        return sorted(out, key=lambda e: (e[1].index, e[0].id))


def build_symbol_graph(g: Grammar) -> SymbolGraph:
    edges: dict[tuple[Symbol, Symbol], Production] = {}
    for p in g.productions:
        for r in p.rhs:
            key = (p.lhs, r)
            old = edges.get(key)
            if old is None or (len(p.rhs), p.index) < (len(old.rhs), old.index):
                edges[key] = p
    return SymbolGraph(g, edges)


@dataclass
class GenResult:
    tokens: list[str]
    log: list[tuple[str, str, tuple[str, ...]]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return " ".join(self.tokens)


def _graph_path(graph: SymbolGraph, src: Symbol,
                dst: Symbol) -> list[tuple[Symbol, Production]] | None:
    """BFS shortest path; deterministic because neighbors are explored in
    (production index, symbol id) order.  Returns the edge list."""
    if src == dst:
        return []
    parent: dict[Symbol, tuple[Symbol, Production]] = {}
    queue = [src]
    seen = {src}
    while queue:
        nxt: list[Symbol] = []
        for u in queue:
            for v, p in graph.neighbors(u):
                if v in seen:
                    continue
                seen.add(v)
                parent[v] = (u, p)
                if v == dst:
                    path = []
                    node = dst
                    while node != src:
                        u2, p2 = parent[node]
                        path.append((node, p2))
                        node = u2
                    path.reverse()
                    return path
                nxt.append(v)
        queue = nxt
    return None


def _apply_path(working: list[Symbol], focus: int,
                path: list[tuple[Symbol, Production]]) -> tuple[list[Symbol], int]:
    """Rewrite the working string along a graph path: each edge's labeled
    production replaces the focused occurrence of its LHS, and the focus
    moves to the first occurrence of the edge target in the new RHS."""
    for target, prod in path:
        assert working[focus] == prod.lhs
        working = working[:focus] + list(prod.rhs) + working[focus + 1:]
        focus += prod.rhs.index(target)
    return working, focus


def _terminalize(working: list[Symbol], keep: int | None,
                 tmap: dict[Symbol, tuple[Symbol, ...]]) -> list[Symbol] | None:
    out: list[Symbol] = []
    for i, s in enumerate(working):
        if i == keep:
            out.append(s)
        elif s.is_terminal:
            out.append(s)
        else:
            rep = tmap.get(s)
            if rep is None:
                return None  # unproductive
            out.extend(rep)
    return out


def derivable_strings(g: Grammar, max_len: int,
                      max_forms: int = 200_000) -> list[tuple[str, ...]]:
    """All terminal strings of token length <= max_len derivable from the
    start symbol, in (length, lexicographic-by-symbol-id) order.  Bounded
    leftmost-derivation search with minimum-yield pruning."""
    tmap = terminal_only_strings(g)
    min_yield = {s: len(v) for s, v in tmap.items()}
    results: set[tuple[Symbol, ...]] = set()
    seen: set[tuple[Symbol, ...]] = set()
    start = (g.start,)
    heap: list[tuple[int, tuple[int, ...], tuple[Symbol, ...]]] = []

    def push(form: tuple[Symbol, ...]) -> None:
        if form in seen or len(seen) > max_forms:
            return
        bound = 0
        for s in form:
            if s not in min_yield:
                return  # unproductive symbol: dead form
            bound += min_yield[s] if s.is_nonterminal else 1
        if bound > max_len:
            return
        seen.add(form)
        heapq.heappush(heap, (bound, tuple(s.id for s in form), form))

    push(start)
    while heap:
        _, _, form = heapq.heappop(heap)
        idx = next((i for i, s in enumerate(form) if s.is_nonterminal), None)
        if idx is None:
            results.add(form)
            continue
        for p in g.productions_for(form[idx]):
            push(form[:idx] + p.rhs + form[idx + 1:])
    ordered = sorted(results, key=lambda f: (len(f), tuple(s.id for s in f)))
    return [tuple(s.name for s in f) for f in ordered]


_ENUM_CACHE: dict[tuple[str, bool, int], list[tuple[str, ...]]] = {}


def _derivable_cached(g: Grammar, max_len: int) -> list[tuple[str, ...]]:
    key = (g.to_text(), g.augmented, max_len)
    if key not in _ENUM_CACHE:
        _ENUM_CACHE[key] = derivable_strings(g, max_len)
    return _ENUM_CACHE[key]


def _search_witness(g: Grammar, parse, table, cell,
                    max_len: int = 8) -> list[str] | None:
    for tokens in _derivable_cached(g, max_len):
        trace = parse(table, g, list(tokens))
        if trace.accepted and cell in trace.cells_exercised:
            return list(tokens)
    return None


def gen_ll_string(g: Grammar, graph: SymbolGraph, cell: tuple[str, str], *,
                  table: LLTable, tmap: dict[Symbol, tuple[Symbol, ...]] | None = None,
                  ) -> GenResult:
    """Terminal string accepted by the correct LL table whose parse consults
    cell (N, t).  Two-phase shortest-path construction, then mandatory
    verification by simulation; a bounded derivation search backs up the
    heuristic when the two-phase string misses the cell."""
    if not table.conflict_free:
        raise GenerationError("LL table has conflicts; string generation refused")
    if tmap is None:
        tmap = terminal_only_strings(g)
    n_name, t_name = cell
    N = g.symbol(n_name)
    t = g.end if t_name == g.end.name else g.symbol(t_name)
    if not N.is_nonterminal:
        raise GenerationError(f"cell row {n_name!r} is not a nonterminal")
    if not table.entries(N, t):
        raise GenerationError(f"cell ({n_name}, {t_name}) is empty in the correct table")
    cell_key = (N.name, t.name)

    tokens = _two_phase_ll(g, graph, N, t, tmap)
    if tokens is not None:
        trace = ll_parse(table, g, tokens)
        if trace.accepted and cell_key in trace.cells_exercised:
            return GenResult(tokens)
    found = _search_witness(g, ll_parse, table, cell_key)
    if found is None:
        raise GenerationError(f"no accepted string exercises cell ({n_name}, {t_name})")
    return GenResult(found, meta={"fallback": True})


def _two_phase_ll(g: Grammar, graph: SymbolGraph, N: Symbol, t: Symbol,
                  tmap: dict[Symbol, tuple[Symbol, ...]]) -> list[str] | None:
    path1 = _graph_path(graph, g.start, N)
    if path1 is None:
        return None
    working, focus = _apply_path([g.start], 0, path1)
    working2 = _terminalize(working, focus, tmap)
    if working2 is None:
        return None
    focus = working2.index(N)  # symbols before focus are now all terminals
    # phase 2 is skipped when t is the end marker or already the next
    # terminal forced after N
    after = working2[focus + 1:]
    forced = after[0] if after else None
    if t is g.end or (forced is not None and forced == t):
        rep = tmap.get(N)
        if rep is None:
            return None
        final = working2[:focus] + list(rep) + working2[focus + 1:]
    else:
        path2 = _graph_path(graph, N, t)
        if path2 is None:
            return None
        expanded, _ = _apply_path(working2, focus, path2)
        final = _terminalize(expanded, None, tmap)
        if final is None:
            return None
    return [s.name for s in final]


# --- LR generation -----------------------------------------------------------


def _dfa_path(dfa: ViablePrefixDFA, src: int,
              dst_set: set[int]) -> tuple[int, list[tuple[Symbol, int]]] | None:
    """Shortest path from src to the nearest state in dst_set, ties broken
    by smaller destination state id.  Returns (destination, edges)."""
    if src in dst_set:
        return src, []
    dist = {src: 0}
    parent: dict[int, tuple[int, Symbol]] = {}
    frontier = [src]
    best: tuple[int, int] | None = None
    d = 0
    while frontier and best is None:
        d += 1
        nxt: list[int] = []
        for u in sorted(frontier):
            for sym, v in dfa.successors(u):
                if v in dist:
                    continue
                dist[v] = d
                parent[v] = (u, sym)
                nxt.append(v)
                if v in dst_set and (best is None or v < best[1]):
                    best = (d, v)
        frontier = nxt
    if best is None:
        return None
    node = best[1]
    path: list[tuple[Symbol, int]] = []
    while node != src:
        u, sym = parent[node]
        path.append((sym, node))
        node = u
    path.reverse()
    return best[1], path


def _yield_of(sym: Symbol, tmap: dict[Symbol, tuple[Symbol, ...]]) -> list[str] | None:
    rep = tmap.get(sym)
    if rep is None:
        return None
    return [s.name for s in rep]


class _LRRun:
    """Shared continuation loop for shift- and reduce-entry generation.

    Maintains the paper's configuration triple: the alternating
    state/symbol stack, the partial input string, and the set X of symbols
    that may come next (narrowed across deferred reduce choices, cleared on
    each shift)."""

    def __init__(self, g: Grammar, table: SLRTable, dfa: ViablePrefixDFA,
                 tmap: dict[Symbol, tuple[Symbol, ...]]):
        self.g = g
        self.table = table
        self.dfa = dfa
        self.tmap = tmap
        self.stack: list[object] = [0]
        self.pstr: list[str] = []
        self.log: list[tuple[str, str, tuple[str, ...]]] = []
        self.used: dict[tuple[int, str, str], int] = {}
        self.budget = 50 * len(dfa.states) * (len(g.terminals) + 1)

    def stack_str(self) -> str:
        if self.stack and self.stack[-1] == "accept":
            return "accept"
        return "".join(str(x) for x in self.stack)

    def snapshot(self, x: set[Symbol] | None) -> None:
        names = tuple(sorted((s.name for s in x), key=lambda n: (n == "$", n))) \
            if x else ()
        self.log.append((self.stack_str(), "".join(self.pstr), names))

    def push_dfa_path(self, path: list[tuple[Symbol, int]]) -> bool:
        for sym, state in path:
            y = _yield_of(sym, self.tmap)
            if y is None:
                return False
            self.stack.extend([sym, state])
            self.pstr.extend(y)
        return True

    def walk_to_reduce_state(self) -> bool:
        top = self.stack[-1]
        found = _dfa_path(self.dfa, top, set(self.dfa.reduce_states))
        if found is None:
            return False
        _, path = found
        return self.push_dfa_path(path)

    def _row(self, state: int) -> dict[Symbol, Action]:
        row: dict[Symbol, Action] = {}
        for t in self.table.terminal_cols:
            acts = self.table.action_entries(state, t)
            if len(acts) > 1:
                raise GenerationError("conflicted table")
            if acts:
                row[t] = acts[0]
        return row

    def run(self) -> bool:
        """Loop until accept appears on top of the stack.  Returns False on
        dead ends or budget exhaustion."""
        g = self.g
        x_set: set[Symbol] | None = None
        while self.budget > 0:
            self.budget -= 1
            state = self.stack[-1]
            row = self._row(state)
            allowed = {t: a for t, a in row.items()
                       if x_set is None or t in x_set}
            if not allowed:
                return False
            if any(a.kind == "accept" for a in allowed.values()):
                self.pstr.append(g.end.name)
                self.snapshot(None)
                self.stack.append("accept")
                self.snapshot(None)
                return True
            reduce_cols = {t for t, a in allowed.items() if a.kind == "reduce"}
            if reduce_cols:
                # prefer reduce over shift; defer the symbol choice and
                # narrow X to the columns that force a reduction
                self.snapshot(set(allowed))
                x_set = reduce_cols
                prods = sorted({allowed[t].production for t in reduce_cols},
                               key=lambda p: p.index)
                prod = prods[0]
                if 2 * len(prod.rhs) >= len(self.stack):
                    return False
                del self.stack[len(self.stack) - 2 * len(prod.rhs):]
                below = self.stack[-1]
                dst = self.table.goto_entry(below, prod.lhs)
                if dst is None:
                    return False
                self.stack.extend([prod.lhs, dst])
                continue
            # shifts only: move toward the state whose items need the fewest
            # remaining symbols; avoid repeating a choice at the same state
            self.snapshot(set(allowed))
            candidates = []
            for t, a in allowed.items():
                target = self.dfa.states[a.state]
                closeness = min(len(it.production.rhs) - it.dot
                                for it in target.items)
                uses = self.used.get((state, "shift", t.name), 0)
                candidates.append((uses, closeness, a.state, t.id, t, a))
            candidates.sort(key=lambda c: c[:4])
            _, _, _, _, t, a = candidates[0]
            self.used[(state, "shift", t.name)] = \
                self.used.get((state, "shift", t.name), 0) + 1
            self.stack.extend([t, a.state])
            self.pstr.append(t.name)
            x_set = None
        return False


def _resolve_lr_cell(g: Grammar, table: SLRTable,
                     cell: tuple[int, str]) -> tuple[int, Symbol]:
    state, name = cell
    if not (0 <= state < table.n_states):
        raise GenerationError(f"no such state: {state}")
    sym = g.end if name == g.end.name else g.symbol(name)
    return state, sym


def gen_lr_shift_string(g: Grammar, table: SLRTable, dfa: ViablePrefixDFA,
                        cell: tuple[int, str], *,
                        tmap: dict[Symbol, tuple[Symbol, ...]] | None = None,
                        ) -> GenResult:
    """Witness for a shift cell of the action sub-table or any goto cell."""
    if not table.conflict_free:
        raise GenerationError("SLR table has conflicts; string generation refused")
    if tmap is None:
        tmap = terminal_only_strings(g)
    state, alpha = _resolve_lr_cell(g, table, cell)
    if alpha.is_terminal:
        acts = table.action_entries(state, alpha)
        if not acts or acts[0].kind != "shift":
            raise GenerationError(f"cell ({state}, {alpha.name}) is not a shift entry")
    elif alpha.is_nonterminal:
        if table.goto_entry(state, alpha) is None:
            raise GenerationError(f"goto cell ({state}, {alpha.name}) is empty")
    else:
        raise GenerationError(f"cell column {alpha.name!r} cannot be shifted")
    cell_key = (state, alpha.name)

    run = _LRRun(g, table, dfa, tmap)
    found = _dfa_path(dfa, 0, {state})
    ok = found is not None and run.push_dfa_path(found[1])
    if ok:
        s_alpha = dfa.transitions.get((state, alpha))
        y = _yield_of(alpha, tmap)
        if s_alpha is None or y is None:
            ok = False
        else:
            run.stack.extend([alpha, s_alpha])
            run.pstr.extend(y)
            ok = run.walk_to_reduce_state() and run.run()
    if ok:
        tokens = [t for t in run.pstr if t != g.end.name]
        trace = lr_parse(table, g, tokens)
        if trace.accepted and cell_key in trace.cells_exercised:
            return GenResult(tokens, log=run.log)
    witness = _search_witness(g, lr_parse, table, cell_key)
    if witness is None:
        raise GenerationError(f"no accepted string exercises cell {cell_key}")
    return GenResult(witness, meta={"fallback": True})


def gen_lr_reduce_string(g: Grammar, table: SLRTable, dfa: ViablePrefixDFA,
                         cell: tuple[int, str], *,
                         tmap: dict[Symbol, tuple[Symbol, ...]] | None = None,
                         ) -> GenResult:
    """Witness for a reduce (or accept) cell of the action sub-table."""
    if not table.conflict_free:
        raise GenerationError("SLR table has conflicts; string generation refused")
    if tmap is None:
        tmap = terminal_only_strings(g)
    state, alpha = _resolve_lr_cell(g, table, cell)
    acts = table.action_entries(state, alpha)
    if not acts:
        raise GenerationError(f"cell ({state}, {alpha.name}) is empty")
    cell_key = (state, alpha.name)
    if acts[0].kind == "accept":
        # every accepted string exercises the accept cell
        witness = _search_witness(g, lr_parse, table, cell_key)
        if witness is None:
            raise GenerationError("grammar accepts no string")
        return GenResult(witness, meta={"accept_cell": True})
    if acts[0].kind != "reduce":
        raise GenerationError(f"cell ({state}, {alpha.name}) is not a reduce entry")

    meta: dict = {}
    setup = _reduce_setup(g, table, dfa, tmap, acts[0].production, alpha,
                          frozenset({acts[0].production}), meta)
    if setup is not None:
        stack, pstr, hand_off = setup
        run = _LRRun(g, table, dfa, tmap)
        run.stack = stack
        run.pstr = pstr
        ok = True
        if hand_off is not None:
            s_a, t = hand_off
            shift = table.action_entries(s_a, t)[0]
            y = _yield_of(t, tmap)
            if y is None:
                ok = False
            else:
                run.stack.extend([t, shift.state])
                run.pstr.extend(y)
                ok = run.walk_to_reduce_state()
        if ok and (hand_off is None or run.run()):
            tokens = [t for t in run.pstr if t != g.end.name]
            trace = lr_parse(table, g, tokens)
            if trace.accepted and cell_key in trace.cells_exercised:
                return GenResult(tokens, log=run.log, meta=meta)
    witness = _search_witness(g, lr_parse, table, cell_key)
    if witness is None:
        raise GenerationError(f"no accepted string exercises cell {cell_key}")
    meta["fallback"] = True
    return GenResult(witness, meta=meta)


def _reduce_setup(g: Grammar, table: SLRTable, dfa: ViablePrefixDFA,
                  tmap: dict[Symbol, tuple[Symbol, ...]],
                  prod: Production, t: Symbol,
                  used_prods: frozenset[Production],
                  meta: dict) -> tuple[list[object], list[str], tuple[int, Symbol] | None] | None:
    """Stage 1 of reduce-entry generation: pick the stack context around the
    reduction N -> sigma so that the next input symbol t can make progress.

    Returns (stack, partial string, hand-off) where hand-off names a shift
    cell for stage 2, or None when the accept entry already terminates the
    string.  The outermost call records the before/after state sets and the
    refinement steps in meta.
    """
    N = prod.lhs
    partners: dict[int, list[int]] = {}
    for (s_b, nt), s_a in table.goto.items():
        if nt == N:
            partners.setdefault(s_a, []).append(s_b)
    s_b_set = sorted({b for bs in partners.values() for b in bs})
    s_a_set = sorted(partners)
    if "S_B" not in meta:
        meta["S_B"] = list(s_b_set)
        meta["S_A"] = list(s_a_set)
    # rule 1: drop after-states whose action on t is empty, with their partners
    removed = [s_a for s_a in s_a_set if not table.action_entries(s_a, t)]
    s_a_set = [s for s in s_a_set if s not in removed]
    if "removed_sa" not in meta:
        meta["removed_sa"] = list(removed)
        meta["removed_sb"] = sorted(b for s_a in removed for b in partners[s_a])
    if not s_a_set:
        return None  # unreachable as a reduce context
    sigma_yield: list[str] = []
    for sym in prod.rhs:
        y = _yield_of(sym, tmap)
        if y is None:
            return None
        sigma_yield.extend(y)

    def base_stack(s_b: int, s_a: int) -> tuple[list[object], list[str]] | None:
        found = _dfa_path(dfa, 0, {s_b})
        if found is None:
            return None
        run = _LRRun(g, table, dfa, tmap)
        if not run.push_dfa_path(found[1]):
            return None
        run.stack.extend([N, s_a])
        run.pstr.extend(sigma_yield)
        return run.stack, run.pstr

    # rule 2: an after-state with a shift on t turns this into a shift problem
    shift_sas = [s_a for s_a in s_a_set
                 if table.action_entries(s_a, t)[0].kind == "shift"]
    if shift_sas:
        s_a = shift_sas[0]
        s_b = sorted(partners[s_a])[0]
        if "chosen_sa" not in meta:
            meta["chosen_sa"] = s_a
            meta["chosen_sb"] = s_b
        base = base_stack(s_b, s_a)
        if base is None:
            return None
        stack, pstr = base
        return stack, pstr, (s_a, t)
    # accept entry: the string is already complete
    accept_sas = [s_a for s_a in s_a_set
                  if table.action_entries(s_a, t)[0].kind == "accept"]
    if accept_sas:
        s_a = accept_sas[0]
        s_b = sorted(partners[s_a])[0]
        if "chosen_sa" not in meta:
            meta["chosen_sa"] = s_a
            meta["chosen_sb"] = s_b
        base = base_stack(s_b, s_a)
        if base is None:
            return None
        stack, pstr = base
        return stack, pstr, None
    # rule 3: only reduce entries remain; recurse, marking used productions
    # to stay off unit-production cycles
    for s_a in s_a_set:
        inner = table.action_entries(s_a, t)[0].production
        if inner in used_prods:
            continue
        inner_meta: dict = dict(meta)  # keep outermost refinement data
        setup = _reduce_setup(g, table, dfa, tmap, inner, t,
                              used_prods | {inner}, inner_meta)
        if setup is not None:
            return setup
    return None
