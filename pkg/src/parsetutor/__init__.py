"""Interactive parsing tutor: grammar analyses, LL/SLR simulation,
witness-string generation, and MCQ-based tutoring."""

from .grammar import (Grammar, GrammarError, Production, Symbol, augment,
                      parse_grammar, terminal_only_strings, validate)
from .analysis import (FirstFollow, LLTable, LR0Item, ItemSet, SLRTable,
                       ViablePrefixDFA, build_ll_table, build_slr_table,
                       canonical_collection, closure, compute_first_follow,
                       goto_set)
from .generate import (GenerationError, SymbolGraph, build_symbol_graph,
                       gen_ll_string, gen_lr_reduce_string, gen_lr_shift_string)
from .pipeline import Analyses, analyze
from .simulate import ParseTrace, cell_exercised, ll_parse, lr_parse
from .quiz import (Evaluation, HintQuestion, Question, Topic, TopicExhausted,
                   evaluate_answer, generate_hint_mcq, generate_hint_string,
                   generate_options, generate_question, next_step)
from .session import (Session, SessionError, StaleQuestionError, Store,
                      create_session, submit_answer)

__all__ = [name for name in dir() if not name.startswith("_")]
