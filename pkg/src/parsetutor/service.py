"""HTTP API exposing grammars, sessions, questions, answers, and progress."""
from __future__ import annotations

import hashlib
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .grammar import GrammarError, parse_grammar, validate
from .quiz import Topic
from .session import (HINT_PROB_DEFAULT, SessionError, StaleQuestionError,
                      Store, create_session, submit_answer)


class GrammarIn(BaseModel):
    source: str


class SessionIn(BaseModel):
    grammarId: str
    topics: list[str] = Field(default_factory=list)
    seed: int | None = None
    maxPerTopic: int | None = None


class AnswerIn(BaseModel):
    questionId: str
    selected: list[str] = Field(default_factory=list)


def create_app(store_dir: str | Path, hint_prob: float = HINT_PROB_DEFAULT) -> FastAPI:
    store = Store(store_dir)
    grammar_dir = Path(store_dir) / "grammars"
    grammar_dir.mkdir(parents=True, exist_ok=True)
    locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
    app = FastAPI(title="parsing tutor")

    def load_grammar_source(grammar_id: str) -> str:
        path = grammar_dir / f"{grammar_id}.cfg"
        if not grammar_id.isalnum() or not path.exists():
            raise HTTPException(404, f"no such grammar: {grammar_id}")
        return path.read_text()

    @app.post("/grammars", status_code=201)
    def post_grammar(body: GrammarIn) -> dict:
        try:
            g = parse_grammar(body.source)
        except GrammarError as e:
            raise HTTPException(400, f"grammar error: {e}")
        gid = hashlib.sha256(body.source.encode()).hexdigest()[:12]
        (grammar_dir / f"{gid}.cfg").write_text(body.source)
        return {"id": gid, "warnings": validate(g)}

    @app.post("/sessions", status_code=201)
    def post_session(body: SessionIn) -> dict:
        source = load_grammar_source(body.grammarId)
        try:
            topics = [Topic(t) for t in body.topics] if body.topics else None
        except ValueError as e:
            raise HTTPException(400, f"unknown topic: {e}")
        try:
            session = create_session(source, topics, seed=body.seed,
                                     hint_prob=hint_prob,
                                     max_per_topic=body.maxPerTopic)
        except SessionError as e:
            raise HTTPException(400, str(e))
        store.save(session)
        return session.to_json()

    def with_session(session_id: str):
        if not store.exists(session_id):
            raise HTTPException(404, f"no such session: {session_id}")
        return store.load(session_id)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return with_session(session_id).to_json()

    @app.get("/sessions/{session_id}/question")
    def get_question(session_id: str) -> dict:
        session = with_session(session_id)
        item = session.current
        if item is None:
            return {"complete": True, "question": None}
        return {"complete": False, "question": item.question.to_json(),
                "isHint": item.is_hint, "hintKind": item.hint_kind,
                "payload": item.payload}

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerIn) -> dict:
        # per-session exclusive access: concurrent answers to one session
        # serialize here, so the observable ordering is total
        with locks[session_id]:
            session = with_session(session_id)
            try:
                evaluation, actions = submit_answer(
                    session, body.questionId, set(body.selected))
            except StaleQuestionError as e:
                raise HTTPException(409, str(e))
            except (SessionError, KeyError) as e:
                raise HTTPException(400, str(e))
            store.save(session)
        item = session.current
        return {
            "evaluation": evaluation,
            "actions": [a.to_json() for a in actions],
            "next": item.question.to_json() if item else None,
            "nextIsHint": item.is_hint if item else False,
            "nextPayload": item.payload if item else None,
            "progress": session.progress_json(),
        }

    @app.get("/sessions/{session_id}/progress")
    def get_progress(session_id: str) -> dict:
        return with_session(session_id).progress_json()

    return app
