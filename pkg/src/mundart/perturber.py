"""scikit-learn style wrapper around the rule engine.

The perturber is transform-shaped: sentences in, perturbed sentences out.
Wrapping it as an estimator (get_params/set_params, fit returning self,
stateless transform) lets it sit inside sklearn pipelines next to
feature extraction or model steps.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import Sentence
from .engine import PerturbationResult, apply_all, apply_rule, get_rule, registry


def check_sentences(X) -> list[Sentence]:
    sentences = list(X)
    for i, s in enumerate(sentences):
        if not isinstance(s, Sentence):
            raise TypeError(f"element {i} is {type(s).__name__}, expected Sentence")
    return sentences


class DialectPerturber(BaseEstimator, TransformerMixin):
    """Applies a chain of German colloquial perturbation rules.

    Parameters
    ----------
    rules : list of rule names or None
        Rules to apply, in the registry's fixed order.  None means the
        full catalog.
    """

    def __init__(self, rules=None):
        self.rules = rules

    def fit(self, X=None, y=None):
        if self.rules is None:
            self.rules_ = list(registry())
        else:
            selected = {name: get_rule(name) for name in self.rules}
            self.rules_ = [r for r in registry() if r.name in selected]
        return self

    def _check_fitted(self):
        if not hasattr(self, "rules_"):
            raise RuntimeError("perturber is not fitted; call fit() first")

    def transform(self, X) -> list[Sentence]:
        self._check_fitted()
        return [r.sentence for r in self.apply(X)]

    def apply(self, X) -> list[PerturbationResult]:
        """Like transform, but returns the full per-sentence results."""
        self._check_fitted()
        sentences = check_sentences(X)
        if len(self.rules_) == 1:
            return [apply_rule(self.rules_[0], s) for s in sentences]
        return [apply_all(self.rules_, s) for s in sentences]
