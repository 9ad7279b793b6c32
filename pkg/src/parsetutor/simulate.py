"""Step-by-step LL and SLR parsing over correct or user-filled tables."""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import LLTable, SLRTable
from .grammar import Grammar, GrammarError, Symbol

Cell = tuple[str | int, str]


@dataclass(frozen=True)
class TraceStep:
    stack: tuple[str, ...]
    remaining: tuple[str, ...]
    action: str
    cell: Cell | None = None


@dataclass
class ParseTrace:
    steps: list[TraceStep]
    outcome: str  # "accept" | "reject"
    reason: str | None = None
    reject_step: int | None = None
    cells_exercised: set[Cell] = field(default_factory=set)

    @property
    def accepted(self) -> bool:
        return self.outcome == "accept"

    def to_json(self) -> dict:
        return {
            "steps": [{"stack": "".join(s.stack),
                       "remaining": " ".join(s.remaining),
                       "action": s.action,
                       "cell": list(s.cell) if s.cell else None}
                      for s in self.steps],
            "outcome": self.outcome,
            "reason": self.reason,
            "rejectStep": self.reject_step,
            "cellsExercised": sorted([list(c) for c in self.cells_exercised],
                                     key=lambda c: (str(c[0]), str(c[1]))),
        }


def render_trace_text(trace: ParseTrace) -> str:
    rows = [(("".join(s.stack)), " ".join(s.remaining) or "$", s.action)
            for s in trace.steps]
    w0 = max([len(r[0]) for r in rows] + [5])
    w1 = max([len(r[1]) for r in rows] + [5])
    lines = [f"{'stack':<{w0}}  {'input':<{w1}}  action"]
    for r in rows:
        lines.append(f"{r[0]:<{w0}}  {r[1]:<{w1}}  {r[2]}")
    lines.append(f"outcome: {trace.outcome}"
                 + (f" ({trace.reason})" if trace.reason else ""))
    return "\n".join(lines)


def _check_tokens(g: Grammar, tokens: list[str]) -> list[Symbol]:
    syms = []
    for t in tokens:
        s = g.symbol(t)
        if not s.is_terminal:
            raise GrammarError(f"input token {t!r} is not a terminal")
        syms.append(s)
    return syms


def ll_parse(table: LLTable, g: Grammar, tokens: list[str]) -> ParseTrace:
    """Predictive parse; consults table[A][a] for nonterminal A on top of
    the stack and lookahead a.  Rejects are values, never exceptions.

    User-mutated tables can induce epsilon cycles, so expansion steps are
    capped; exceeding the cap rejects with reason 'nontermination'.
    """
    input_syms = _check_tokens(g, tokens) + [g.end]
    stack: list[Symbol] = [g.end, g.start]
    pos = 0
    steps: list[TraceStep] = []
    cells: set[Cell] = set()
    cap = 10 * (len(tokens) + 2) * len(g.productions)
    expansions = 0

    def snap(action: str, cell: Cell | None = None) -> None:
        steps.append(TraceStep(tuple(s.name for s in stack),
                               tuple(s.name for s in input_syms[pos:]),
                               action, cell))

    def reject(reason: str, cell: Cell | None = None) -> ParseTrace:
        snap(f"reject: {reason}", cell)
        return ParseTrace(steps, "reject", reason, len(steps) - 1, cells)

    while True:
        top = stack[-1]
        la = input_syms[pos]
        if top is g.end:
            if la is g.end:
                snap("accept")
                return ParseTrace(steps, "accept", cells_exercised=cells)
            return reject("input remains after stack emptied")
        if top.is_terminal:
            if top == la:
                snap(f"match {top.name}")
                stack.pop()
                pos += 1
                continue
            return reject(f"terminal mismatch: expected {top.name}, saw {la.name}")
        cell: Cell = (top.name, la.name)
        cells.add(cell)
        entries = table.entries(top, la)
        if not entries:
            return reject("empty cell", cell)
        if len(entries) > 1:
            return reject("conflict", cell)
        prod = entries[0]
        expansions += 1
        if expansions > cap:
            return reject("nontermination", cell)
        snap(f"expand {prod}", cell)
        stack.pop()
        stack.extend(reversed(prod.rhs))


def lr_parse(table: SLRTable, g: Grammar, tokens: list[str]) -> ParseTrace:
    """Shift/reduce parse over action/goto.  The stack alternates states and
    symbols and is rendered in the compact '0a3d4' style.  Both action and
    goto consultations are recorded as exercised cells."""
    input_syms = _check_tokens(g, tokens) + [g.end]
    stack: list[object] = [0]  # state, sym, state, sym, ...
    pos = 0
    steps: list[TraceStep] = []
    cells: set[Cell] = set()

    def render_stack() -> tuple[str, ...]:
        return tuple(str(x) for x in stack)

    def snap(action: str, cell: Cell | None = None) -> None:
        steps.append(TraceStep(render_stack(),
                               tuple(s.name for s in input_syms[pos:]),
                               action, cell))

    def reject(reason: str, cell: Cell | None = None) -> ParseTrace:
        snap(f"reject: {reason}", cell)
        return ParseTrace(steps, "reject", reason, len(steps) - 1, cells)

    while True:
        state = stack[-1]
        la = input_syms[pos]
        cell: Cell = (state, la.name)
        cells.add(cell)
        entries = table.action_entries(state, la)
        if not entries:
            return reject("empty cell", cell)
        if len(entries) > 1:
            return reject("conflict", cell)
        act = entries[0]
        if act.kind == "shift":
            snap(f"shift {act.state}", cell)
            stack.extend([la, act.state])
            pos += 1
        elif act.kind == "accept":
            snap("accept", cell)
            return ParseTrace(steps, "accept", cells_exercised=cells)
        else:
            prod = act.production
            if 2 * len(prod.rhs) >= len(stack):
                return reject(f"stack underflow reducing by {prod}", cell)
            snap(f"reduce {prod}", cell)
            del stack[len(stack) - 2 * len(prod.rhs):]
            below = stack[-1]
            goto_cell: Cell = (below, prod.lhs.name)
            cells.add(goto_cell)
            dst = table.goto_entry(below, prod.lhs)
            if dst is None:
                return reject("empty goto cell", goto_cell)
            stack.extend([prod.lhs, dst])


def cell_exercised(trace: ParseTrace, cell: Cell) -> bool:
    return cell in trace.cells_exercised
