"""A trivial memorizing predictor for end-to-end dry runs.

It memorizes each intact sentence's intent and slot sequence by sent_id and
replays the labels by token position.  It is deliberately brittle against
reordering and insertion, which makes perturbation effects visible without
any model dependency.
"""
from __future__ import annotations

from typing import Sequence

from .corpus import Sentence


class MemorizingBaseline:
    """fit() on the intact corpus, predict() on any variant of it."""

    def __init__(self):
        self.memory_ = None

    def fit(self, sentences: Sequence[Sentence], y=None):
        self.memory_ = {s.sent_id: (s.intent, list(s.bio())) for s in sentences}
        return self

    def predict(self, sentences: Sequence[Sentence]) -> list[tuple[str, list[str]]]:
        if self.memory_ is None:
            raise RuntimeError("predictor is not fitted")
        out = []
        for sentence in sentences:
            if sentence.sent_id not in self.memory_:
                raise KeyError(f"unseen sentence {sentence.sent_id}")
            intent, slots = self.memory_[sentence.sent_id]
            labels = [slots[i] if i < len(slots) else "O"
                      for i in range(len(sentence))]
            out.append((intent, labels))
        return out
