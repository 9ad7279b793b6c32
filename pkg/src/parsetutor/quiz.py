"""Topic-wise MCQ generation, answer evaluation, and hint production."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .analysis import Action
from .generate import (GenerationError, _derivable_cached, gen_ll_string,
                       gen_lr_reduce_string, gen_lr_shift_string)
from .grammar import Production, Symbol
from .pipeline import Analyses
from .simulate import ParseTrace, ll_parse, lr_parse


class Topic(str, Enum):
    FIRST_SET = "FirstSet"
    FOLLOW_SET = "FollowSet"
    LL_TABLE = "LLTable"
    LL_MOVES = "LLMoves"
    LR0_ITEM_SETS = "LR0ItemSets"
    SLR_TABLE = "SLRTable"
    SLR_MOVES = "SLRMoves"


ALL_TOPICS = list(Topic)


class TopicExhausted(Exception):
    pass


@dataclass
class Option:
    label: str
    content: str


@dataclass
class Question:
    id: str
    topic: Topic
    prompt: str
    context: dict | None
    options: list[Option]
    correct: frozenset[str]
    multi_select: bool
    target: tuple = ()  # what the question is about, for hints

    def option_by_label(self, label: str) -> Option:
        for o in self.options:
            if o.label == label:
                return o
        raise KeyError(label)

    def to_json(self, reveal: bool = False) -> dict:
        out = {
            "id": self.id,
            "topic": self.topic.value,
            "prompt": self.prompt,
            "context": self.context,
            "options": [{"label": o.label, "content": o.content} for o in self.options],
            "multiSelect": self.multi_select,
        }
        if reveal:
            out["correct"] = sorted(self.correct)
        return out


@dataclass
class Evaluation:
    selected: frozenset[str]
    missing_correct: frozenset[str]
    selected_incorrect: frozenset[str]

    @property
    def correct_overall(self) -> bool:
        return not self.missing_correct and not self.selected_incorrect

    def to_json(self) -> dict:
        return {
            "selected": sorted(self.selected),
            "missingCorrect": sorted(self.missing_correct),
            "selectedIncorrect": sorted(self.selected_incorrect),
            "correctOverall": self.correct_overall,
        }


@dataclass
class HintQuestion:
    kind: str  # "HintMCQ" | "HintString"
    parent: str
    focus: str
    question: Question
    payload: dict | None = None

    def to_json(self, reveal: bool = False) -> dict:
        out = {"kind": self.kind, "parent": self.parent, "focus": self.focus,
               "question": self.question.to_json(reveal=reveal)}
        if self.payload is not None:
            out["payload"] = self.payload
        return out


@dataclass
class TutorAction:
    kind: str  # "Hint" | "Repeat" | "Advance" | "Reveal"
    hint: HintQuestion | None = None
    reveal: list[str] | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.hint is not None:
            out["hint"] = self.hint.to_json()
        if self.reveal is not None:
            out["reveal"] = self.reveal
        return out


LABELS = "abcdefghij"

FIRST_RULES = [
    "If X is a terminal, then FIRST(X) is {X}.",
    "If X is a nonterminal and X -> Y1 Y2 ... Yk is a production, place a in "
    "FIRST(X) if a is in FIRST(Yi) and epsilon is in FIRST(Y1) ... FIRST(Yi-1); "
    "if epsilon is in every FIRST(Yj), add epsilon to FIRST(X).",
    "If X -> eps is a production, then add eps to FIRST(X).",
    "No valid rule for this symbol.",
]

FOLLOW_RULES = [
    "The end marker $ is in FOLLOW of the start symbol.",
    "For a production A -> alpha B beta, everything in FIRST(beta) except eps "
    "is in FOLLOW(B).",
    "For a production A -> alpha B, or A -> alpha B beta where FIRST(beta) "
    "contains eps, everything in FOLLOW(A) is in FOLLOW(B).",
    "No valid rule for this symbol.",
]

LL_CELL_RULES = [
    "The production is B -> alpha and the column terminal b is in FIRST(alpha).",
    "The production is B -> alpha, eps is in FIRST(alpha), and the column "
    "terminal b is in FOLLOW(B).",
    "No valid rule for this production.",
]

SLR_CELL_RULES = [
    "Shift: the viable-prefix DFA has a transition from this state on the "
    "column terminal.",
    "Reduce A -> alpha: the state contains the complete item A -> alpha . and "
    "the column terminal is in FOLLOW(A).",
    "Accept: the state contains the completed start item and the column is $.",
    "No valid rule for this entry.",
]


def _first_rule_index(analyses: Analyses, x: Symbol, member: str) -> int:
    """Index into FIRST_RULES justifying member's presence in FIRST(x)."""
    g = analyses.grammar
    sym = g.epsilon if member == g.epsilon.name else g.symbol(member)
    if x.is_terminal:
        return 0 if sym == x else 3
    if sym not in analyses.ff.first[x]:
        return 3
    if sym is g.epsilon and any(not p.rhs for p in g.productions_for(x)):
        return 2
    return 1


def _follow_rule_index(analyses: Analyses, b: Symbol, member: str) -> int:
    g = analyses.grammar
    sym = g.end if member == g.end.name else g.symbol(member)
    if sym not in analyses.ff.follow[b]:
        return 3
    if sym is g.end and b == g.start:
        return 0
    for p in g.productions:
        for i, s in enumerate(p.rhs):
            if s != b:
                continue
            beta = p.rhs[i + 1:]
            if sym in analyses.ff.first_of(beta):
                return 1
    return 2


def _ll_cell_rule_index(analyses: Analyses, cell: tuple[Symbol, Symbol],
                        prod: Production) -> int:
    g = analyses.grammar
    nt, t = cell
    if prod.lhs != nt:
        return 2
    fs = analyses.ff.first_of(prod.rhs)
    if t in fs:
        return 0
    if g.epsilon in fs and t in analyses.ff.follow[nt]:
        return 1
    return 2


def _slr_cell_rule_index(analyses: Analyses, cell: tuple[int, Symbol],
                         action_text: str) -> int:
    state, t = cell
    correct = analyses.slr_table.action_entries(state, t)
    if not any(str(a) == action_text for a in correct):
        return 3
    act = next(a for a in correct if str(a) == action_text)
    return {"shift": 0, "reduce": 1, "accept": 2}[act.kind]


def generate_options(correct: list[str], pool: list[str], rng: random.Random,
                     k: int = 4) -> tuple[list[Option], frozenset[str]]:
    """Options = correct items plus distractors drawn from similar-problem
    solutions, topped up with single-term mutations; shuffled, labeled."""
    if k < len(correct) + 1:
        k = len(correct) + 1
    contents = list(dict.fromkeys(correct))
    distractors = [p for p in dict.fromkeys(pool) if p not in contents]
    rng.shuffle(distractors)
    while len(contents) < k and distractors:
        contents.append(distractors.pop())
    if len(contents) < k:
        for c in list(contents):
            mutated = _mutate(c, rng)
            if mutated and mutated not in contents:
                contents.append(mutated)
            if len(contents) >= k:
                break
    rng.shuffle(contents)
    options = [Option(LABELS[i], c) for i, c in enumerate(contents)]
    correct_labels = frozenset(o.label for o in options if o.content in correct)
    return options, correct_labels


def _mutate(item: str, rng: random.Random) -> str | None:
    tokens = item.split()
    if len(tokens) > 1:
        drop = rng.randrange(len(tokens))
        out = tokens[:drop] + tokens[drop + 1:]
        if "->" in out:
            return " ".join(out)
        return " ".join(tokens + [tokens[-1]])
    return None


def _targets(analyses: Analyses, topic: Topic) -> list[tuple]:
    g = analyses.grammar
    if topic in (Topic.FIRST_SET, Topic.FOLLOW_SET):
        return [(nt.name,) for nt in g.nonterminals]
    if topic == Topic.LL_TABLE:
        return [(nt.name, t.name) for (nt, t) in
                sorted(analyses.ll_table.cells, key=lambda c: (c[0].id, c[1].id))]
    if topic == Topic.SLR_TABLE:
        return [(s, t.name) for (s, t) in
                sorted(analyses.slr_table.action, key=lambda c: (c[0], c[1].id))]
    if topic == Topic.LR0_ITEM_SETS:
        return [(st.id,) for st in analyses.dfa.states]
    if topic in (Topic.LL_MOVES, Topic.SLR_MOVES):
        trace = _moves_trace(analyses, topic)
        if trace is None:
            return []
        steps = [i for i, s in enumerate(trace.steps[:-1])]
        return [(i,) for i in steps]
    raise ValueError(topic)


def _moves_input(analyses: Analyses, topic: Topic) -> list[str] | None:
    """Deterministic exercise input for the move topics: the shortest
    accepted string of a couple of tokens, preferring longer over trivial."""
    g = analyses.grammar if topic == Topic.LL_MOVES else analyses.augmented
    table = analyses.ll_table if topic == Topic.LL_MOVES else analyses.slr_table
    parse = ll_parse if topic == Topic.LL_MOVES else lr_parse
    if not table.conflict_free:
        return None
    candidates = _derivable_cached(g, 6)
    best: list[str] | None = None
    for tokens in candidates:
        if parse(table, g, list(tokens)).accepted:
            best = list(tokens)
            if len(best) >= 2:
                return best
    return best


def _moves_trace(analyses: Analyses, topic: Topic) -> ParseTrace | None:
    tokens = _moves_input(analyses, topic)
    if tokens is None:
        return None
    if topic == Topic.LL_MOVES:
        return ll_parse(analyses.ll_table, analyses.grammar, tokens)
    return lr_parse(analyses.slr_table, analyses.augmented, tokens)


def generate_question(analyses: Analyses, topic: Topic, rng: random.Random,
                      asked: set[tuple] | None = None,
                      target: tuple | None = None,
                      k: int = 4) -> Question:
    """Primary MCQ for the topic.  Raises TopicExhausted once every target
    has been asked."""
    g = analyses.grammar
    asked = asked or set()
    if target is None:
        remaining = [t for t in _targets(analyses, topic) if t not in asked]
        if not remaining:
            raise TopicExhausted(topic.value)
        target = remaining[rng.randrange(len(remaining))]
    qid = f"{topic.value}:{':'.join(str(x) for x in target)}"

    if topic == Topic.FIRST_SET:
        nt = g.symbol(target[0])
        correct = sorted(s.name for s in analyses.ff.first[nt])
        pool = sorted({s.name for other in g.nonterminals
                       for s in analyses.ff.first[other] | analyses.ff.follow[other]})
        options, labels = generate_options(correct, pool, rng, k)
        return Question(qid, topic,
                        f"Which symbols should be included in FIRST[{nt.name}]?",
                        None, options, labels, True, target)
    if topic == Topic.FOLLOW_SET:
        nt = g.symbol(target[0])
        correct = sorted(s.name for s in analyses.ff.follow[nt])
        pool = sorted({s.name for other in g.nonterminals
                       for s in analyses.ff.first[other] | analyses.ff.follow[other]})
        options, labels = generate_options(correct, pool, rng, k)
        return Question(qid, topic,
                        f"Which symbols should be included in FOLLOW[{nt.name}]?",
                        None, options, labels, True, target)
    if topic == Topic.LL_TABLE:
        nt, t = g.symbol(target[0]), (g.end if target[1] == "$" else g.symbol(target[1]))
        correct = [str(p) for p in analyses.ll_table.entries(nt, t)]
        pool = [str(p) for p in g.productions]
        options, labels = generate_options(correct, pool, rng, k)
        return Question(
            qid, topic,
            f"Which grammar rule(s) should be included in the cell "
            f"[{nt.name}, {t.name}] of the LL parsing table?",
            {"table": analyses.ll_table.to_json()},
            options, labels, True, target)
    if topic == Topic.SLR_TABLE:
        state, t = target[0], (analyses.augmented.end if target[1] == "$"
                               else analyses.augmented.symbol(target[1]))
        correct = [str(a) for a in analyses.slr_table.action_entries(state, t)]
        pool = sorted({str(a) for acts in analyses.slr_table.action.values()
                       for a in acts})
        options, labels = generate_options(correct, pool, rng, k)
        return Question(
            qid, topic,
            f"Which action(s) belong in cell [{state}, {t.name}] of the SLR "
            f"parsing table?",
            {"table": analyses.slr_table.to_json()},
            options, labels, True, target)
    if topic == Topic.LR0_ITEM_SETS:
        st = analyses.dfa.states[target[0]]
        correct = [str(it) for it in st.sorted_items()]
        pool = sorted({str(it) for other in analyses.dfa.states
                       for it in other.items})
        options, labels = generate_options(correct, pool, rng,
                                           max(k, len(correct) + 1))
        return Question(
            qid, topic,
            f"Which LR(0) items belong to item set I{st.id}?",
            {"dfa": analyses.dfa.to_json()},
            options, labels, True, target)
    if topic in (Topic.LL_MOVES, Topic.SLR_MOVES):
        trace = _moves_trace(analyses, topic)
        if trace is None:
            raise TopicExhausted(topic.value)
        step = target[0]
        correct = [trace.steps[step].action]
        pool = sorted({s.action for s in trace.steps})
        options, labels = generate_options(correct, pool, rng, k)
        prefix = [s for s in trace.steps[:step]]
        kind = "LL" if topic == Topic.LL_MOVES else "SLR"
        return Question(
            qid, topic,
            f"{kind} parsing of the shown input: what is the parser action at "
            f"step {step + 1}?",
            {"trace": ParseTrace(prefix, "pending").to_json(),
             "input": " ".join(trace.steps[0].remaining)},
            options, labels, False, target)
    raise ValueError(topic)


def evaluate_answer(q: Question, selected: set[str]) -> Evaluation:
    labels = {o.label for o in q.options}
    unknown = set(selected) - labels
    if unknown:
        raise KeyError(f"unknown option label(s): {sorted(unknown)}")
    sel = frozenset(selected)
    return Evaluation(sel, frozenset(q.correct - sel), frozenset(sel - q.correct))


def generate_hint_mcq(q: Question, focus: str, analyses: Analyses,
                      rng: random.Random) -> HintQuestion:
    """Single-correct MCQ asking which rule justifies the focus choice."""
    g = analyses.grammar
    if q.topic == Topic.FIRST_SET:
        rules, idx = FIRST_RULES, _first_rule_index(analyses, g.symbol(q.target[0]), focus)
        prompt = (f"According to which of the following rules is the symbol "
                  f"{focus!r} a part of FIRST[{q.target[0]}]?")
    elif q.topic == Topic.FOLLOW_SET:
        rules, idx = FOLLOW_RULES, _follow_rule_index(analyses, g.symbol(q.target[0]), focus)
        prompt = (f"According to which of the following rules is the symbol "
                  f"{focus!r} a part of FOLLOW[{q.target[0]}]?")
    elif q.topic == Topic.LL_TABLE:
        nt = g.symbol(q.target[0])
        t = g.end if q.target[1] == "$" else g.symbol(q.target[1])
        prod = _parse_production(g, focus)
        rules = LL_CELL_RULES
        idx = 2 if prod is None else _ll_cell_rule_index(analyses, (nt, t), prod)
        prompt = (f"According to which of the following rules is the production "
                  f"{focus!r} in cell [{nt.name}, {t.name}]?")
    elif q.topic == Topic.SLR_TABLE:
        t = (analyses.augmented.end if q.target[1] == "$"
             else analyses.augmented.symbol(q.target[1]))
        rules = SLR_CELL_RULES
        idx = _slr_cell_rule_index(analyses, (q.target[0], t), focus)
        prompt = (f"According to which of the following rules is the action "
                  f"{focus!r} in cell [{q.target[0]}, {t.name}]?")
    elif q.topic in (Topic.LL_MOVES, Topic.SLR_MOVES):
        # trace-step hint: show the trace up to the step and ask for the move
        trace = _moves_trace(analyses, q.topic)
        step = q.target[0]
        correct = trace.steps[step].action
        pool = sorted({s.action for s in trace.steps})
        options, labels = generate_options([correct], pool, rng, 4)
        hq = Question(f"hint:{q.id}:{focus}", q.topic,
                      "Given the configuration shown, which move does the "
                      "parser make next?",
                      {"trace": ParseTrace(list(trace.steps[:step]), "pending").to_json()},
                      options, labels, False, q.target)
        return HintQuestion("HintMCQ", q.id, focus, hq)
    elif q.topic == Topic.LR0_ITEM_SETS:
        st = analyses.dfa.states[q.target[0]]
        member = any(str(it) == focus for it in st.items)
        rules = ["The item is in the closure of the kernel items of this set.",
                 "No valid rule: the item does not belong to this set."]
        idx = 0 if member else 1
        prompt = (f"According to which of the following is the item {focus!r} "
                  f"part of item set I{st.id}?")
    else:
        raise ValueError(q.topic)
    options = [Option(LABELS[i], r) for i, r in enumerate(rules)]
    hq = Question(f"hint:{q.id}:{focus}", q.topic, prompt, None, options,
                  frozenset({options[idx].label}), False, q.target)
    return HintQuestion("HintMCQ", q.id, focus, hq)


def _parse_production(g, text: str) -> Production | None:
    for p in g.productions:
        if str(p) == text:
            return p
    return None


def _parse_action(analyses: Analyses, text: str) -> tuple[Action, ...]:
    if not text or text == "empty":
        return ()
    if text == "acc":
        return (Action("accept"),)
    if text.startswith("s"):
        return (Action("shift", state=int(text[1:])),)
    if text.startswith("r"):
        return (Action("reduce", production=analyses.augmented.productions[int(text[1:])]),)
    raise ValueError(f"bad action {text!r}")


def generate_hint_string(q: Question, user_choice: str, analyses: Analyses,
                         rng: random.Random) -> HintQuestion | None:
    """Hint built from an auto-generated input whose parse fails on the
    user-filled table.  Returns None when no failing witness exists (caller
    falls back to a rule-based hint)."""
    g = analyses.grammar
    if q.topic == Topic.LL_TABLE:
        if not analyses.ll_table.conflict_free:
            return None
        nt = g.symbol(q.target[0])
        t = g.end if q.target[1] == "$" else g.symbol(q.target[1])
        prod = _parse_production(g, user_choice)
        user_table = analyses.ll_table.with_cell(
            nt, t, (prod,) if prod is not None else ())
        try:
            gen = gen_ll_string(g, analyses.graph, (nt.name, t.name),
                                table=analyses.ll_table, tmap=analyses.terminal_only)
        except GenerationError:
            return None
        tokens = gen.tokens
        user_trace = ll_parse(user_table, g, tokens)
        if user_trace.accepted:
            tokens = _failing_witness(g, ll_parse, analyses.ll_table, user_table,
                                      (nt.name, t.name))
            if tokens is None:
                return None
            user_trace = ll_parse(user_table, g, tokens)
        correct_text = [str(p) for p in analyses.ll_table.entries(nt, t)]
        pool = [o.content for o in q.options if o.content != user_choice]
        mode = "LL"
        cell_name = f"[{nt.name}, {t.name}]"
    elif q.topic == Topic.SLR_TABLE:
        if not analyses.slr_table.conflict_free:
            return None
        g_aug = analyses.augmented
        state = q.target[0]
        t = g_aug.end if q.target[1] == "$" else g_aug.symbol(q.target[1])
        user_table = analyses.slr_table.with_action_cell(
            state, t, _parse_action(analyses, user_choice))
        correct_entry = analyses.slr_table.action_entries(state, t)[0]
        try:
            if correct_entry.kind == "shift":
                gen = gen_lr_shift_string(g_aug, analyses.slr_table, analyses.dfa,
                                          (state, t.name), tmap=analyses.terminal_only_aug)
            else:
                gen = gen_lr_reduce_string(g_aug, analyses.slr_table, analyses.dfa,
                                           (state, t.name), tmap=analyses.terminal_only_aug)
        except GenerationError:
            return None
        tokens = gen.tokens
        user_trace = lr_parse(user_table, g_aug, tokens)
        if user_trace.accepted:
            tokens = _failing_witness(g_aug, lr_parse, analyses.slr_table,
                                      user_table, (state, t.name))
            if tokens is None:
                return None
            user_trace = lr_parse(user_table, g_aug, tokens)
        correct_text = [str(a) for a in analyses.slr_table.action_entries(state, t)]
        pool = [o.content for o in q.options if o.content != user_choice]
        mode = "SLR"
        cell_name = f"[{state}, {t.name}]"
    else:
        return None
    string = " ".join(tokens)
    options, labels = generate_options(correct_text, pool, rng, 4)
    hq = Question(f"hint:{q.id}:{user_choice}", q.topic,
                  f"{mode} parsing on input '{string}' with your parse table is "
                  f"failing. Can you fix the error in cell {cell_name} by "
                  f"selecting the correct choice?",
                  {"trace": user_trace.to_json(), "input": string},
                  options, labels, False, q.target)
    return HintQuestion("HintString", q.id, user_choice, hq,
                        payload={"string": string, "trace": user_trace.to_json()})


def _failing_witness(g, parse, correct_table, user_table, cell,
                     max_len: int = 8) -> list[str] | None:
    """Accepted strings exercising the cell, searched for one the mutated
    table rejects."""
    for tokens in _derivable_cached(g, max_len):
        trace = parse(correct_table, g, list(tokens))
        if not trace.accepted or cell not in trace.cells_exercised:
            continue
        if not parse(user_table, g, list(tokens)).accepted:
            return list(tokens)
    return None


def make_hint(q: Question, focus: str, analyses: Analyses,
              rng: random.Random) -> HintQuestion:
    """Hint for one incorrect (or probed) choice: a failing-string hint for
    table cells when possible, otherwise a rule MCQ."""
    if q.topic in (Topic.LL_TABLE, Topic.SLR_TABLE):
        correct_content = {q.option_by_label(l).content for l in q.correct}
        if focus not in correct_content:
            hint = generate_hint_string(q, focus, analyses, rng)
            if hint is not None:
                return hint
    return generate_hint_mcq(q, focus, analyses, rng)


def next_step(q: Question, ev: Evaluation, analyses: Analyses,
              rng: random.Random, hint_prob: float = 0.15,
              hint_rounds_used: int = 0, hint_cap: int = 2) -> list[TutorAction]:
    """Tutor policy after an evaluation: hints for each wrong choice then a
    repeat, or (rarely) a probe hint then advance; the hint cap ends with a
    reveal."""
    if ev.correct_overall:
        actions: list[TutorAction] = []
        if q.correct and rng.random() < hint_prob:
            probe = sorted(ev.selected & q.correct)
            focus = q.option_by_label(probe[rng.randrange(len(probe))]).content \
                if probe else q.option_by_label(sorted(q.correct)[0]).content
            actions.append(TutorAction("Hint", hint=make_hint(q, focus, analyses, rng)))
        actions.append(TutorAction("Advance"))
        return actions
    if hint_rounds_used >= hint_cap:
        return [TutorAction("Reveal", reveal=sorted(q.correct)),
                TutorAction("Advance")]
    actions = []
    for label in sorted(ev.selected_incorrect) + sorted(ev.missing_correct):
        focus = q.option_by_label(label).content
        actions.append(TutorAction("Hint", hint=make_hint(q, focus, analyses, rng)))
    actions.append(TutorAction("Repeat"))
    return actions
