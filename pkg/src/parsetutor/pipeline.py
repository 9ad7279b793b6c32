"""Bundle of all analyses derived from one grammar, computed once per session."""
from __future__ import annotations

from dataclasses import dataclass

from .analysis import (FirstFollow, LLTable, SLRTable, ViablePrefixDFA,
                       build_ll_table, build_slr_table, canonical_collection,
                       compute_first_follow, first_follow_json)
from .generate import SymbolGraph, build_symbol_graph
from .grammar import Grammar, Symbol, augment, terminal_only_strings, validate


@dataclass
class Analyses:
    grammar: Grammar
    augmented: Grammar
    ff: FirstFollow            # over the original grammar (drives the LL table)
    ff_aug: FirstFollow        # over the augmented grammar (drives the SLR table)
    terminal_only: dict[Symbol, tuple[Symbol, ...]]
    terminal_only_aug: dict[Symbol, tuple[Symbol, ...]]
    ll_table: LLTable
    dfa: ViablePrefixDFA
    slr_table: SLRTable
    graph: SymbolGraph
    warnings: list[str]

    def to_json(self) -> dict:
        return {
            "grammar": self.grammar.to_text(),
            "warnings": self.warnings,
            "firstFollow": first_follow_json(self.ff),
            "llTable": self.ll_table.to_json(),
            "itemSets": self.dfa.to_json(),
            "slrTable": self.slr_table.to_json(),
        }


def analyze(g: Grammar) -> Analyses:
    ff = compute_first_follow(g)
    g_aug = augment(g)
    ff_aug = compute_first_follow(g_aug)
    dfa = canonical_collection(g_aug)
    return Analyses(
        grammar=g,
        augmented=g_aug,
        ff=ff,
        ff_aug=ff_aug,
        terminal_only=terminal_only_strings(g),
        terminal_only_aug=terminal_only_strings(g_aug),
        ll_table=build_ll_table(g, ff),
        dfa=dfa,
        slr_table=build_slr_table(g_aug, dfa, ff_aug),
        graph=build_symbol_graph(g),
        warnings=validate(g),
    )
