"""Tutoring session lifecycle, scoring, and JSON-file persistence."""
from __future__ import annotations

import hashlib
import json
import random
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .grammar import GrammarError, parse_grammar
from .pipeline import Analyses, analyze
from .quiz import (HintQuestion, Option, Question, Topic, TopicExhausted,
                   TutorAction, evaluate_answer, generate_question, next_step)

HINT_CAP = 2
HINT_PROB_DEFAULT = 0.15


class SessionError(Exception):
    pass


class StaleQuestionError(SessionError):
    pass


@dataclass
class QueueItem:
    question: Question
    is_hint: bool = False
    parent: str | None = None
    attempts: int = 0
    hint_rounds: int = 0
    payload: dict | None = None
    hint_kind: str | None = None


@dataclass
class Session:
    id: str
    grammar_source: str
    topics: list[Topic]
    seed: int
    hint_prob: float
    analyses: Analyses
    rng: random.Random
    topic_index: int = 0
    asked: dict[str, set[tuple]] = field(default_factory=dict)
    queue: list[QueueItem] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)
    score: dict[str, int] = field(default_factory=lambda: {
        "firstTry": 0, "afterHint": 0, "total": 0})
    complete: bool = False
    max_per_topic: int | None = None

    @property
    def hint_string_enabled(self) -> bool:
        return (self.analyses.ll_table.conflict_free
                and self.analyses.slr_table.conflict_free)

    @property
    def current(self) -> QueueItem | None:
        return self.queue[0] if self.queue else None

    def progress_json(self) -> dict:
        return {
            "id": self.id,
            "topics": [t.value for t in self.topics],
            "score": dict(self.score),
            "complete": self.complete,
            "asked": {t: len(v) for t, v in self.asked.items()},
            "hintStringEnabled": self.hint_string_enabled,
        }

    def to_json(self) -> dict:
        current = self.current
        return {
            **self.progress_json(),
            "seed": self.seed,
            "currentQuestion": current.question.to_json() if current else None,
        }


def create_session(grammar_source: str, topics: list[Topic] | None = None,
                   seed: int | None = None,
                   hint_prob: float = HINT_PROB_DEFAULT,
                   max_per_topic: int | None = None,
                   session_id: str | None = None) -> Session:
    try:
        g = parse_grammar(grammar_source)
    except GrammarError as e:
        raise SessionError(f"grammar error: {e}") from e
    analyses = analyze(g)
    if seed is None:
        seed = random.SystemRandom().randrange(2 ** 31)
    session = Session(
        id=session_id or uuid.uuid4().hex[:12],
        grammar_source=grammar_source,
        topics=list(topics) if topics else list(Topic),
        seed=seed,
        hint_prob=hint_prob,
        analyses=analyses,
        rng=random.Random(seed),
        max_per_topic=max_per_topic,
    )
    _advance(session)
    return session


def _advance(session: Session) -> None:
    """Generate the next primary question from the topic plan, skipping
    exhausted topics; mark the session complete when none remain."""
    while session.topic_index < len(session.topics):
        topic = session.topics[session.topic_index]
        asked = session.asked.setdefault(topic.value, set())
        if session.max_per_topic is not None and len(asked) >= session.max_per_topic:
            session.topic_index += 1
            continue
        try:
            q = generate_question(session.analyses, topic, session.rng, asked)
        except TopicExhausted:
            session.topic_index += 1
            continue
        asked.add(q.target)
        session.queue.append(QueueItem(q))
        return
    session.complete = True


def submit_answer(session: Session, question_id: str,
                  selected: set[str]) -> tuple[dict, list[TutorAction]]:
    """Evaluate an answer to the current question and apply the tutor policy.
    Returns the evaluation (as JSON) and the resulting actions."""
    item = session.current
    if item is None:
        raise SessionError("session is complete")
    if item.question.id != question_id:
        raise StaleQuestionError(
            f"current question is {item.question.id!r}, not {question_id!r}")
    ev = evaluate_answer(item.question, selected)
    item.attempts += 1
    session.history.append({
        "questionId": question_id,
        "isHint": item.is_hint,
        "selected": sorted(selected),
        "evaluation": ev.to_json(),
        "time": time.time(),
    })
    if item.is_hint:
        actions = _handle_hint_answer(session, item, ev)
    else:
        actions = _handle_primary_answer(session, item, ev)
    session.history[-1]["actions"] = [a.kind for a in actions]
    return ev.to_json(), actions


def _handle_primary_answer(session: Session, item: QueueItem,
                           ev) -> list[TutorAction]:
    actions = next_step(item.question, ev, session.analyses, session.rng,
                        hint_prob=session.hint_prob,
                        hint_rounds_used=item.hint_rounds,
                        hint_cap=HINT_CAP)
    if ev.correct_overall:
        session.score["total"] += 1
        if item.hint_rounds == 0 and item.attempts == 1:
            session.score["firstTry"] += 1
        else:
            session.score["afterHint"] += 1
        session.queue.pop(0)
        _enqueue_hints(session, actions, at=0)
        _advance(session)
        return actions
    if any(a.kind == "Reveal" for a in actions):
        session.score["total"] += 1
        session.queue.pop(0)
        _advance(session)
        return actions
    # hints for each wrong choice, then the primary question repeats
    session.queue.pop(0)
    hints = _enqueue_hints(session, actions, at=0)
    item.hint_rounds += 1
    session.queue.insert(hints, item)
    return actions


def _handle_hint_answer(session: Session, item: QueueItem,
                        ev) -> list[TutorAction]:
    if ev.correct_overall:
        session.queue.pop(0)
        return [TutorAction("Advance")]
    if item.attempts >= HINT_CAP:
        session.queue.pop(0)
        return [TutorAction("Reveal", reveal=sorted(item.question.correct)),
                TutorAction("Advance")]
    return [TutorAction("Repeat")]


def _enqueue_hints(session: Session, actions: list[TutorAction], at: int) -> int:
    n = 0
    for a in actions:
        if a.kind == "Hint" and a.hint is not None:
            session.queue.insert(at + n, QueueItem(
                a.hint.question, is_hint=True, parent=a.hint.parent,
                payload=a.hint.payload, hint_kind=a.hint.kind))
            n += 1
    return n


# --- persistence -------------------------------------------------------------


def _question_to_dict(q: Question) -> dict:
    return {**q.to_json(reveal=True), "target": list(q.target)}


def _question_from_dict(d: dict) -> Question:
    return Question(
        id=d["id"], topic=Topic(d["topic"]), prompt=d["prompt"],
        context=d["context"],
        options=[Option(o["label"], o["content"]) for o in d["options"]],
        correct=frozenset(d["correct"]), multi_select=d["multiSelect"],
        target=tuple(d["target"]))


def _rng_state_to_json(state) -> list:
    version, internal, gauss = state
    return [version, list(internal), gauss]


def _rng_state_from_json(data) -> tuple:
    version, internal, gauss = data
    return (version, tuple(internal), gauss)


def session_to_record(session: Session) -> dict:
    return {
        "id": session.id,
        "grammarSource": session.grammar_source,
        "topics": [t.value for t in session.topics],
        "seed": session.seed,
        "hintProb": session.hint_prob,
        "maxPerTopic": session.max_per_topic,
        "topicIndex": session.topic_index,
        "asked": {t: sorted([list(x) for x in v]) for t, v in session.asked.items()},
        "queue": [{
            "question": _question_to_dict(it.question),
            "isHint": it.is_hint,
            "parent": it.parent,
            "attempts": it.attempts,
            "hintRounds": it.hint_rounds,
            "payload": it.payload,
            "hintKind": it.hint_kind,
        } for it in session.queue],
        "history": session.history,
        "score": dict(session.score),
        "complete": session.complete,
        "rngState": _rng_state_to_json(session.rng.getstate()),
        "savedAt": time.time(),
    }


def session_from_record(record: dict) -> Session:
    g = parse_grammar(record["grammarSource"])
    session = Session(
        id=record["id"],
        grammar_source=record["grammarSource"],
        topics=[Topic(t) for t in record["topics"]],
        seed=record["seed"],
        hint_prob=record["hintProb"],
        analyses=analyze(g),
        rng=random.Random(),
        topic_index=record["topicIndex"],
        asked={t: {tuple(x) for x in v} for t, v in record["asked"].items()},
        queue=[QueueItem(
            question=_question_from_dict(it["question"]),
            is_hint=it["isHint"], parent=it["parent"],
            attempts=it["attempts"], hint_rounds=it["hintRounds"],
            payload=it["payload"], hint_kind=it["hintKind"],
        ) for it in record["queue"]],
        history=record["history"],
        score=dict(record["score"]),
        complete=record["complete"],
        max_per_topic=record["maxPerTopic"],
    )
    session.rng.setstate(_rng_state_from_json(record["rngState"]))
    return session


class Store:
    """Directory of JSON session records, one file per session id, with a
    content checksum verified on load."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        if not session_id.replace("-", "").isalnum():
            raise SessionError(f"bad session id: {session_id!r}")
        return self.root / f"{session_id}.json"

    def save(self, session: Session) -> dict:
        record = session_to_record(session)
        payload = json.dumps(record, sort_keys=True)
        wrapped = {"record": record,
                   "checksum": hashlib.sha256(payload.encode()).hexdigest()}
        self._path(session.id).write_text(json.dumps(wrapped, indent=1))
        return record

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        if not path.exists():
            raise SessionError(f"no such session: {session_id}")
        wrapped = json.loads(path.read_text())
        payload = json.dumps(wrapped["record"], sort_keys=True)
        if hashlib.sha256(payload.encode()).hexdigest() != wrapped["checksum"]:
            raise SessionError(f"corrupt session record: {session_id}")
        return session_from_record(wrapped["record"])

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()
