"""Stratified sampling of intact/perturbed pairs for human evaluation.

For every (rule, dataset) stratum up to `per_rule_cap` applied perturbations
are drawn uniformly without replacement; strata with fewer applicable
sentences contribute all of them.  One seeded generator drives both the
per-stratum draws and the final presentation shuffle, so a fixed seed gives
a byte-identical evaluation set.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import Sentence
from .engine import PerturbationRule, apply_rule


@dataclass(frozen=True)
class EvalItem:
    item_id: str
    sent_id: str
    dataset: str
    rule: str
    sentence_a: str  # intact text
    sentence_b: str  # perturbed text


def build_eval_set(corpus: Sequence[Sentence],
                   rules: Sequence[PerturbationRule],
                   per_rule_cap: int,
                   seed: int) -> list[EvalItem]:
    if not corpus:
        raise ValueError("empty corpus")
    if per_rule_cap < 1:
        raise ValueError("per_rule_cap must be >= 1")
    rng = random.Random(seed)

    candidates: list[tuple[str, str, Sentence, Sentence]] = []
    datasets = sorted({s.dataset for s in corpus})
    by_dataset = {d: [s for s in corpus if s.dataset == d] for d in datasets}
    chosen = []
    for rule in rules:
        for dataset in datasets:
            candidates = []
            for sentence in by_dataset[dataset]:
                result = apply_rule(rule, sentence)
                if result.applied and result.sentence.text != sentence.text:
                    candidates.append((rule.name, dataset, sentence, result.sentence))
            take = min(per_rule_cap, len(candidates))
            if take:
                chosen.extend(rng.sample(candidates, take))

    rng.shuffle(chosen)
    return [EvalItem(item_id=f"item_{i:04d}", sent_id=intact.sent_id,
                     dataset=dataset, rule=rule_name,
                     sentence_a=intact.text, sentence_b=perturbed.text)
            for i, (rule_name, dataset, intact, perturbed) in enumerate(chosen, start=1)]
