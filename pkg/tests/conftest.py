from __future__ import annotations

import pytest

from parsetutor.pipeline import analyze

from . import corpus


@pytest.fixture(scope="session")
def expr_an():
    return analyze(corpus.expr_grammar())


@pytest.fixture(scope="session")
def g2_an():
    return analyze(corpus.g2_grammar())


@pytest.fixture(scope="session")
def g3_an():
    return analyze(corpus.g3_grammar())


@pytest.fixture(scope="session")
def g4_an():
    return analyze(corpus.g4_grammar())


@pytest.fixture(scope="session")
def corpus_grammars():
    return corpus.corpus()


@pytest.fixture(scope="session")
def corpus_analyses(corpus_grammars):
    return [analyze(g) for g in corpus_grammars]
