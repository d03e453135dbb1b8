from importlib import resources
from pathlib import Path

import pytest

from mundart.corpus import Token, make_sentence, parse_conllu
from mundart.engine import registry

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def mini_corpus():
    text = resources.files("mundart").joinpath("data/mini_de.conllu").read_text("utf-8")
    return parse_conllu(text)


@pytest.fixture(scope="session")
def rules():
    return registry()


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


def tok(index, form, lemma=None, upos="X", feats=None, head=0, deprel="dep",
        slot="O", space_after=True, xpos=None):
    """Shorthand token constructor for hand-built test sentences."""
    return Token(index=index, form=form, lemma=lemma if lemma is not None else form.lower(),
                 upos=upos, xpos=xpos, feats=feats or {}, head=head,
                 deprel=deprel, slot=slot, space_after=space_after,
                 provenance=index)


def sent(tokens, sent_id="t1", dataset="test", intent="none"):
    return make_sentence(sent_id, dataset, intent, tokens)
