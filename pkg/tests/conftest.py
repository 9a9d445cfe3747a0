from pathlib import Path

import pytest

from scylla.ingest import parse_conllu
from scylla.lexicon import load_lexicon
from scylla.providers import load_dictionary, load_provider

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sports_lexicon():
    return load_lexicon(FIXTURES / "sports.lex")


def _sentence(name: str):
    return parse_conllu((FIXTURES / "conllu" / name).read_text("utf-8"))[0]


@pytest.fixture(scope="session")
def sentence1():
    """O jogador de basquete converteu a bandeja."""
    return _sentence("sentence1.conllu")


@pytest.fixture(scope="session")
def sentence2():
    """O garçom colocou as tijelas na bandeja."""
    return _sentence("sentence2.conllu")


@pytest.fixture(scope="session")
def sentence3():
    """O ponta é o jogador que menos tempo tem para pensar na armação de uma jogada."""
    return _sentence("sentence3_ponta.conllu")


@pytest.fixture(scope="session")
def sentence_levantamento():
    return _sentence("levantamento.conllu")


@pytest.fixture(scope="session")
def sentence_tempo():
    return _sentence("tempo.conllu")


@pytest.fixture(scope="session")
def sentence_two_clauses():
    return _sentence("two_clauses.conllu")


@pytest.fixture()
def mock_provider():
    return load_provider(FIXTURES / "providers" / "mock_nmt.json")


@pytest.fixture()
def dictionary():
    return load_dictionary(FIXTURES / "providers" / "dictionary.json")
