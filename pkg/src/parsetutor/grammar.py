"""Context-free grammar representation, parsing, validation, preprocessing."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

EPSILON_NAME = "eps"
END_NAME = "$"


class SymbolKind(Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"
    EPSILON = "epsilon"
    END = "end"


@dataclass(frozen=True, eq=False)
class Symbol:
    id: int
    name: str
    kind: SymbolKind

    # identity by name and kind: a symbol keeps its meaning across a grammar
    # and its augmented counterpart even though interning ids shift
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.name == other.name and self.kind is other.kind

    def __hash__(self) -> int:
        return hash((self.name, self.kind))

    @property
    def is_terminal(self) -> bool:
        return self.kind is SymbolKind.TERMINAL

    @property
    def is_nonterminal(self) -> bool:
        return self.kind is SymbolKind.NONTERMINAL

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Production:
    index: int
    lhs: Symbol
    rhs: tuple[Symbol, ...]

    def __str__(self) -> str:
        rhs = " ".join(s.name for s in self.rhs) if self.rhs else EPSILON_NAME
        return f"{self.lhs.name} -> {rhs}"


class GrammarError(Exception):
    """Raised for malformed grammar text or ill-formed construction."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Grammar:
    """Immutable grammar: interned symbols, ordered productions, start symbol.

    A token is a nonterminal iff it appears on some production's LHS; all
    other tokens are terminals.  Symbols are interned in first-appearance
    order (LHS before its RHS), with epsilon and the end marker appended
    last so that ids survive a serialize/re-parse round trip.
    """

    def __init__(self, rules: list[tuple[str, list[str]]], start: str | None = None,
                 augmented: bool = False):
        if not rules:
            raise GrammarError("grammar has no productions")
        lhs_names = {lhs for lhs, _ in rules}
        order: list[str] = []
        seen: set[str] = set()
        for lhs, rhs in rules:
            for name in [lhs, *rhs]:
                if name not in seen:
                    seen.add(name)
                    order.append(name)
        self.symbols: list[Symbol] = []
        self._by_name: dict[str, Symbol] = {}
        for name in order:
            kind = SymbolKind.NONTERMINAL if name in lhs_names else SymbolKind.TERMINAL
            self._intern(name, kind)
        self.epsilon = self._intern(EPSILON_NAME, SymbolKind.EPSILON)
        self.end = self._intern(END_NAME, SymbolKind.END)
        self.productions: list[Production] = []
        seen_rules: set[tuple[str, tuple[str, ...]]] = set()
        for i, (lhs, rhs) in enumerate(rules):
            key = (lhs, tuple(rhs))
            if key in seen_rules:
                raise GrammarError(f"duplicate production: {lhs} -> {' '.join(rhs) or EPSILON_NAME}")
            seen_rules.add(key)
            self.productions.append(Production(
                i, self._by_name[lhs], tuple(self._by_name[s] for s in rhs)))
        start_name = start if start is not None else rules[0][0]
        if start_name not in lhs_names:
            raise GrammarError(f"start symbol {start_name!r} has no production")
        self.start = self._by_name[start_name]
        self.augmented = augmented
        self._prods_for: dict[Symbol, list[Production]] = {}
        for p in self.productions:
            self._prods_for.setdefault(p.lhs, []).append(p)

    def _intern(self, name: str, kind: SymbolKind) -> Symbol:
        if name in self._by_name:
            return self._by_name[name]
        sym = Symbol(len(self.symbols), name, kind)
        self.symbols.append(sym)
        self._by_name[name] = sym
        return sym

    @property
    def nonterminals(self) -> list[Symbol]:
        return [s for s in self.symbols if s.is_nonterminal]

    @property
    def terminals(self) -> list[Symbol]:
        return [s for s in self.symbols if s.is_terminal]

    def symbol(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise GrammarError(f"unknown symbol {name!r}") from None

    def has_symbol(self, name: str) -> bool:
        return name in self._by_name

    def productions_for(self, nt: Symbol) -> list[Production]:
        return self._prods_for.get(nt, [])

    def to_text(self) -> str:
        """Serialize to the grammar file format, preserving production order.

        Only consecutive productions with the same LHS are merged into one
        alternation line, so production indices survive a round trip.
        """
        lines: list[tuple[str, list[str]]] = []
        for p in self.productions:
            rhs = " ".join(s.name for s in p.rhs) if p.rhs else EPSILON_NAME
            if lines and lines[-1][0] == p.lhs.name:
                lines[-1][1].append(rhs)
            else:
                lines.append((p.lhs.name, [rhs]))
        return "\n".join(f"{lhs} -> {' | '.join(alts)}" for lhs, alts in lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grammar):
            return NotImplemented
        return (self.symbols == other.symbols
                and self.productions == other.productions
                and self.start == other.start
                and self.augmented == other.augmented)

    def __repr__(self) -> str:
        return f"Grammar(start={self.start.name}, productions={len(self.productions)})"


def parse_grammar(text: str) -> Grammar:
    """Parse grammar text: one 'LHS -> alt1 | alt2' group per line.

    Tokens are whitespace-separated, 'eps' denotes the empty right-hand
    side, '#' starts a comment line, and '$' is reserved for the end marker.
    """
    rules: list[tuple[str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            raise GrammarError("expected 'LHS -> RHS'", line=lineno, column=1)
        lhs_part, rhs_part = line.split("->", 1)
        lhs = lhs_part.strip()
        if not lhs or len(lhs.split()) != 1:
            raise GrammarError(f"bad LHS {lhs_part.strip()!r}", line=lineno, column=1)
        if lhs in (EPSILON_NAME, END_NAME):
            raise GrammarError(f"{lhs!r} is reserved", line=lineno, column=1)
        for alt in rhs_part.split("|"):
            tokens = alt.split()
            if not tokens:
                raise GrammarError("empty alternative", line=lineno,
                                   column=line.index("->") + 3)
            if END_NAME in tokens:
                raise GrammarError(f"{END_NAME!r} is reserved for the end marker",
                                   line=lineno)
            if tokens == [EPSILON_NAME]:
                tokens = []
            elif EPSILON_NAME in tokens:
                raise GrammarError(f"{EPSILON_NAME!r} may not appear inside a non-empty RHS",
                                   line=lineno)
            rules.append((lhs, tokens))
    if not rules:
        raise GrammarError("empty grammar file")
    return Grammar(rules)


def augment(g: Grammar) -> Grammar:
    """Return a new grammar with fresh start S' and production 0 = S' -> S."""
    if g.augmented:
        raise GrammarError("grammar is already augmented")
    fresh = g.start.name + "'"
    while g.has_symbol(fresh):
        fresh += "'"
    rules = [(fresh, [g.start.name])]
    rules.extend((p.lhs.name, [s.name for s in p.rhs]) for p in g.productions)
    return Grammar(rules, start=fresh, augmented=True)


def terminal_only_strings(g: Grammar) -> dict[Symbol, tuple[Symbol, ...]]:
    """Shortest all-terminal string derivable from each symbol.

    A terminal maps to itself; a nonterminal maps to a minimum-token-count
    terminal string, computed by iterating to a fixpoint over productions.
    Ties break toward the lower production index.  Unproductive nonterminals
    are absent from the map.
    """
    best: dict[Symbol, tuple[Symbol, ...]] = {t: (t,) for t in g.terminals}
    rank: dict[Symbol, tuple[int, int]] = {t: (1, -1) for t in g.terminals}
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if not all(s in best for s in p.rhs):
                continue
            candidate: tuple[Symbol, ...] = tuple(t for s in p.rhs for t in best[s])
            cand_rank = (len(candidate), p.index)
            if p.lhs not in best or cand_rank < rank[p.lhs]:
                best[p.lhs] = candidate
                rank[p.lhs] = cand_rank
                changed = True
    return best


def validate(g: Grammar) -> list[str]:
    """Diagnostics: unreachable nonterminals, unproductive nonterminals,
    duplicate RHS alternatives.  Returns warnings, never raises."""
    warnings: list[str] = []
    reachable = {g.start}
    frontier = [g.start]
    while frontier:
        nt = frontier.pop()
        for p in g.productions_for(nt):
            for s in p.rhs:
                if s.is_nonterminal and s not in reachable:
                    reachable.add(s)
                    frontier.append(s)
    productive = set(terminal_only_strings(g))
    for nt in g.nonterminals:
        if nt not in reachable:
            warnings.append(f"unreachable nonterminal: {nt.name}")
    for nt in g.nonterminals:
        if nt not in productive:
            warnings.append(f"unproductive nonterminal: {nt.name}")
    seen: set[tuple[Symbol, tuple[Symbol, ...]]] = set()
    for p in g.productions:
        key = (p.lhs, p.rhs)
        if key in seen:
            warnings.append(f"duplicate alternative: {p}")
        seen.add(key)
    return warnings
