import json

import pytest

from parsetutor.quiz import Topic
from parsetutor.session import (Session, SessionError, StaleQuestionError,
                                Store, create_session, session_from_record,
                                session_to_record, submit_answer)

from . import corpus

G3 = corpus.GRAMMAR_DIR / "g3.cfg"
G4 = corpus.GRAMMAR_DIR / "g4.cfg"


def g3_text():
    return G3.read_text()


def answer_correctly(session):
    item = session.current
    return submit_answer(session, item.question.id,
                         set(item.question.correct))


def test_create_session_seeds_first_question():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=7, hint_prob=0.0)
    assert s.current is not None
    assert s.current.question.topic is Topic.FIRST_SET
    assert not s.complete
    assert s.score == {"firstTry": 0, "afterHint": 0, "total": 0}


def test_create_session_rejects_bad_grammar():
    with pytest.raises(SessionError):
        create_session("not a grammar")


def test_same_seed_gives_identical_question_stream():
    a = create_session(g3_text(), seed=42, hint_prob=0.0, session_id="a")
    b = create_session(g3_text(), seed=42, hint_prob=0.0, session_id="b")
    for _ in range(6):
        qa, qb = a.current.question, b.current.question
        assert json.dumps(qa.to_json(reveal=True), sort_keys=True) == \
               json.dumps(qb.to_json(reveal=True), sort_keys=True)
        answer_correctly(a)
        answer_correctly(b)


def test_first_try_scoring():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0)
    answer_correctly(s)
    assert s.score == {"firstTry": 1, "afterHint": 0, "total": 1}


def test_wrong_answer_enqueues_hints_then_repeats():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0)
    primary = s.current.question
    ev, actions = submit_answer(s, primary.id, set())
    assert not ev["correctOverall"]
    kinds = [a.kind for a in actions]
    assert kinds[-1] == "Repeat" and "Hint" in kinds
    # hint questions come first, the primary question is requeued after them
    assert s.current.is_hint
    assert s.queue[-1].question.id == primary.id
    hint_count = kinds.count("Hint")
    assert sum(1 for it in s.queue if it.is_hint) == hint_count


def test_after_hint_scoring():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0)
    primary = s.current.question
    submit_answer(s, primary.id, set())
    while s.current.is_hint:
        answer_correctly(s)
    assert s.current.question.id == primary.id
    submit_answer(s, primary.id, set(primary.correct))
    assert s.score == {"firstTry": 0, "afterHint": 1, "total": 1}


def test_hint_answered_wrong_twice_is_revealed():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0)
    submit_answer(s, s.current.question.id, set())
    hint = s.current
    assert hint.is_hint
    wrong = next(o.label for o in hint.question.options
                 if o.label not in hint.question.correct)
    _, actions = submit_answer(s, hint.question.id, {wrong})
    assert [a.kind for a in actions] == ["Repeat"]
    _, actions = submit_answer(s, hint.question.id, {wrong})
    assert [a.kind for a in actions] == ["Reveal", "Advance"]
    assert s.current is not hint


def test_primary_reveal_after_hint_cap():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0,
                       max_per_topic=1)
    primary = s.current.question
    for round_no in range(2):
        submit_answer(s, primary.id, set())
        while s.current is not None and s.current.is_hint:
            answer_correctly(s)
    _, actions = submit_answer(s, primary.id, set())
    assert [a.kind for a in actions] == ["Reveal", "Advance"]
    assert s.score["total"] == 1 and s.score["firstTry"] == 0


def test_stale_question_rejected():
    s = create_session(g3_text(), seed=1, hint_prob=0.0)
    with pytest.raises(StaleQuestionError):
        submit_answer(s, "FirstSet:nope", set())


def test_answer_after_completion_rejected():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0,
                       max_per_topic=1)
    answer_correctly(s)
    assert s.complete
    with pytest.raises(SessionError):
        submit_answer(s, "anything", set())


def test_session_covers_all_topics_to_completion():
    s = create_session(g3_text(), seed=3, hint_prob=0.0, max_per_topic=2)
    seen = set()
    for _ in range(200):
        if s.complete:
            break
        seen.add(s.current.question.topic)
        answer_correctly(s)
    assert s.complete
    assert seen == set(Topic)
    assert s.score["total"] == s.score["firstTry"]


def test_conflicted_grammar_skips_moves_topics():
    s = create_session(G4.read_text(), seed=3, hint_prob=0.0, max_per_topic=1)
    seen = set()
    for _ in range(100):
        if s.complete:
            break
        seen.add(s.current.question.topic)
        answer_correctly(s)
    assert s.complete
    assert Topic.LL_MOVES not in seen
    assert Topic.FIRST_SET in seen and Topic.SLR_TABLE in seen


def test_progress_json_shape():
    s = create_session(g3_text(), [Topic.FIRST_SET], seed=1, hint_prob=0.0)
    data = s.progress_json()
    assert data["id"] == s.id
    assert data["topics"] == ["FirstSet"]
    assert data["complete"] is False
    assert data["hintStringEnabled"] is True


def test_record_round_trip_preserves_state():
    s = create_session(g3_text(), seed=9, hint_prob=0.0)
    answer_correctly(s)
    submit_answer(s, s.current.question.id, set())  # leave hints pending
    record = session_to_record(s)
    restored = session_from_record(json.loads(json.dumps(record)))
    assert session_to_record(restored)["queue"] == record["queue"]
    assert restored.score == s.score
    assert restored.asked == s.asked
    # restored rng continues the same stream
    assert restored.rng.random() == s.rng.random()


def test_store_round_trip(tmp_path):
    store = Store(tmp_path)
    s = create_session(g3_text(), seed=9, hint_prob=0.0, session_id="abc123")
    store.save(s)
    assert store.exists("abc123")
    loaded = store.load("abc123")
    assert loaded.id == s.id
    assert loaded.current.question.id == s.current.question.id


def test_store_detects_corruption(tmp_path):
    store = Store(tmp_path)
    s = create_session(g3_text(), seed=9, session_id="abc123")
    store.save(s)
    path = tmp_path / "abc123.json"
    data = json.loads(path.read_text())
    data["record"]["score"]["firstTry"] = 99
    path.write_text(json.dumps(data))
    with pytest.raises(SessionError):
        store.load("abc123")


def test_store_rejects_path_traversal(tmp_path):
    store = Store(tmp_path)
    with pytest.raises(SessionError):
        store.load("../etc/passwd")


def test_store_missing_session(tmp_path):
    store = Store(tmp_path)
    assert not store.exists("nope1")
    with pytest.raises(SessionError):
        store.load("nope1")
