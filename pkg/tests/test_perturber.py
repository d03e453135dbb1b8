import pytest

from mundart import DialectPerturber, MemorizingBaseline
from mundart.engine import apply_all, apply_rule, get_rule


def test_get_params_roundtrip():
    p = DialectPerturber(rules=["schwa_elision"])
    assert p.get_params() == {"rules": ["schwa_elision"]}
    p.set_params(rules=None)
    assert p.rules is None


def test_fit_validates_rule_names():
    with pytest.raises(KeyError):
        DialectPerturber(rules=["not_a_rule"]).fit()


def test_transform_single_rule(mini_corpus):
    p = DialectPerturber(rules=["schwa_elision"]).fit()
    out = p.transform(mini_corpus)
    expected = [apply_rule(get_rule("schwa_elision"), s).sentence
                for s in mini_corpus]
    assert out == expected


def test_transform_all_rules_composes(mini_corpus, rules):
    p = DialectPerturber().fit()
    out = p.transform(mini_corpus)
    expected = [apply_all(rules, s).sentence for s in mini_corpus]
    assert out == expected


def test_fit_transform_mixin(mini_corpus):
    out = DialectPerturber(rules=["es_contraction"]).fit_transform(mini_corpus)
    assert any("ist's" in s.text for s in out)


def test_transform_requires_fit(mini_corpus):
    with pytest.raises(RuntimeError, match="not fitted"):
        DialectPerturber().transform(mini_corpus)


def test_input_validation(mini_corpus):
    p = DialectPerturber().fit()
    with pytest.raises(TypeError, match="Sentence"):
        p.transform(["not a sentence"])


def test_sklearn_clone_compatible():
    from sklearn.base import clone
    p = DialectPerturber(rules=["name_order"])
    q = clone(p)
    assert q.get_params() == p.get_params()


def test_memorizing_baseline_replays_gold(mini_corpus):
    model = MemorizingBaseline().fit(mini_corpus)
    preds = model.predict(mini_corpus)
    for sentence, (intent, slots) in zip(mini_corpus, preds):
        assert intent == sentence.intent
        assert slots == sentence.bio()


def test_memorizing_baseline_pads_and_truncates(mini_corpus, rules):
    model = MemorizingBaseline().fit(mini_corpus)
    perturbed = [apply_all(rules, s).sentence for s in mini_corpus]
    for sentence, (intent, slots) in zip(perturbed, model.predict(perturbed)):
        assert len(slots) == len(sentence)
        assert intent == sentence.intent
