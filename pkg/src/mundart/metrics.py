"""Quantitative evaluation: intent accuracy, exact span-F1, perturbation
success rates, eWAVE-category aggregation, contrastive preference accuracy,
and inter-annotator agreement statistics.

Deltas follow the convention intact minus variant, so a positive delta is a
performance drop.  For the contrastive preference accuracy a model "prefers"
the intact sentence when it scores it with a *lower* pseudo-perplexity.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import extract_spans


class MetricError(ValueError):
    """Raised for inconsistent or incomplete evaluation inputs."""


@dataclass(frozen=True)
class PredictionRecord:
    sent_id: str
    variant: str  # "intact", a rule name, or "all"
    run_seed: int
    predicted_intent: str
    predicted_slots: tuple[str, ...]
    pppl: float | None = None


@dataclass
class EvalReport:
    variant: str
    run_seed: int | None  # None marks the mean over seeds
    intent_accuracy: float
    slot_precision: float
    slot_recall: float
    slot_f1: float
    delta_accuracy: float
    delta_f1: float
    success_rate: float
    slot_success_rate: float
    n_perturbed: int
    vetoes: int = 0
    # contrastive evaluation; None when no pseudo-perplexity scores were given
    preference_accuracy: float | None = None


@dataclass(frozen=True)
class PairScore:
    sent_id: str
    rule: str
    pppl_intact: float
    pppl_perturbed: float


@dataclass
class AgreementReport:
    exact_match_pct: float
    pearson_r: float
    binarized_exact_match_pct: float
    cohens_kappa: float
    annotator_means: dict[str, float]
    per_rule_means: dict[str, dict[str, float]]
    n_items: int
    n_idk_excluded: int


def intent_accuracy(gold: Sequence[str], predicted: Sequence[str]) -> float:
    if len(gold) != len(predicted):
        raise MetricError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    if not gold:
        raise MetricError("empty input")
    return sum(g == p for g, p in zip(gold, predicted)) / len(gold)


def span_f1(gold: Sequence[Sequence[str]], predicted: Sequence[Sequence[str]],
            sent_ids: Sequence[str] | None = None) -> tuple[float, float, float]:
    """Micro-averaged exact-match span F1: type, start, and end must all agree."""
    if len(gold) != len(predicted):
        raise MetricError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    tp = n_gold = n_pred = 0
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if len(g) != len(p):
            ident = sent_ids[i] if sent_ids else f"#{i}"
            raise MetricError(f"sentence {ident}: {len(g)} gold labels vs {len(p)} predicted")
        gold_spans = set(extract_spans(list(g)))
        pred_spans = set(extract_spans(list(p)))
        tp += len(gold_spans & pred_spans)
        n_gold += len(gold_spans)
        n_pred += len(pred_spans)
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def success_rate(gold_intents: Mapping[str, str],
                 intact_preds: Mapping[str, str],
                 perturbed_preds: Mapping[str, str],
                 applied: Mapping[str, bool]) -> float:
    """Share of perturbed sentences whose intent flips from correct to wrong."""
    applied_ids = [sid for sid, flag in applied.items() if flag]
    flips = 0
    for sid in applied_ids:
        if sid not in intact_preds or sid not in perturbed_preds:
            raise MetricError(f"missing prediction for applied sentence {sid}")
        gold = gold_intents[sid]
        if intact_preds[sid] == gold and perturbed_preds[sid] != gold:
            flips += 1
    return flips / len(applied_ids) if applied_ids else 0.0


def slot_success_rate(gold_intact: Mapping[str, Sequence[str]],
                      gold_perturbed: Mapping[str, Sequence[str]],
                      intact_preds: Mapping[str, Sequence[str]],
                      perturbed_preds: Mapping[str, Sequence[str]],
                      applied: Mapping[str, bool]) -> float:
    """Same as success_rate with "correct" = the full span set matches."""
    applied_ids = [sid for sid, flag in applied.items() if flag]
    flips = 0
    for sid in applied_ids:
        if sid not in intact_preds or sid not in perturbed_preds:
            raise MetricError(f"missing prediction for applied sentence {sid}")
        before_ok = (extract_spans(list(intact_preds[sid]))
                     == extract_spans(list(gold_intact[sid])))
        after_ok = (extract_spans(list(perturbed_preds[sid]))
                    == extract_spans(list(gold_perturbed[sid])))
        if before_ok and not after_ok:
            flips += 1
    return flips / len(applied_ids) if applied_ids else 0.0


def aggregate_by_category(per_rule: Mapping[str, EvalReport],
                          rules) -> dict[str, float]:
    """Mean delta-F1 per eWAVE category; rules that never applied are excluded."""
    categories = {rule.name: rule.category for rule in rules}
    buckets: dict[str, list[float]] = {}
    for name, report in per_rule.items():
        if name not in categories:
            raise MetricError(f"unknown rule {name!r} in per-rule reports")
        if report.n_perturbed == 0:
            continue
        buckets.setdefault(categories[name], []).append(report.delta_f1)
    return {cat: sum(vals) / len(vals) for cat, vals in sorted(buckets.items())}


def preference_accuracy(pairs: Sequence[PairScore]) -> float:
    """Share of pairs where the model prefers the intact sentence.

    Lower pseudo-perplexity means preferred; exact ties count one half.
    """
    if not pairs:
        raise MetricError("no score pairs")
    total = 0.0
    for pair in pairs:
        if pair.pppl_intact < pair.pppl_perturbed:
            total += 1.0
        elif pair.pppl_intact == pair.pppl_perturbed:
            total += 0.5
    return total / len(pairs)


BINARIZE = {1: 0, 2: 0, 3: 1, 4: 1, 5: 1}


def binarize_score(score: int) -> int:
    return BINARIZE[score]


def _pearson(a: Sequence[float], b: Sequence[float]) -> float:
    if len(set(a)) < 2 or len(set(b)) < 2:
        return float("nan")
    return statistics.correlation(a, b)


def agreement_report(ratings, item_rules: Mapping[str, str] | None = None) -> AgreementReport:
    """Two-annotator agreement over 1-5 fluency scores.

    `ratings` are records with item_id, annotator_id and score (1-5 or "idk");
    idk items are excluded from every statistic and only counted.  Cohen's
    kappa is computed on the binarized scores ({1,2} -> 0, {3,4,5} -> 1) with
    marginal-product expected agreement.
    """
    by_annotator: dict[str, dict[str, object]] = {}
    for record in ratings:
        by_annotator.setdefault(record.annotator_id, {})[record.item_id] = record.score
    if len(by_annotator) != 2:
        raise MetricError(f"expected exactly 2 annotators, got {len(by_annotator)}")
    (name_a, scores_a), (name_b, scores_b) = sorted(by_annotator.items())
    only_one = sorted(set(scores_a) ^ set(scores_b))
    if only_one:
        raise MetricError(f"items rated by only one annotator: {', '.join(only_one)}")

    item_ids = sorted(scores_a)
    kept, excluded = [], 0
    for item in item_ids:
        if scores_a[item] == "idk" or scores_b[item] == "idk":
            excluded += 1
        else:
            kept.append(item)
    if not kept:
        raise MetricError("no items left after excluding idk ratings")

    a = [int(scores_a[i]) for i in kept]
    b = [int(scores_b[i]) for i in kept]
    n = len(kept)
    exact = sum(x == y for x, y in zip(a, b)) / n

    bin_a = [binarize_score(x) for x in a]
    bin_b = [binarize_score(x) for x in b]
    bin_exact = sum(x == y for x, y in zip(bin_a, bin_b)) / n
    p_a1 = sum(bin_a) / n
    p_b1 = sum(bin_b) / n
    p_expected = p_a1 * p_b1 + (1 - p_a1) * (1 - p_b1)
    if p_expected == 1.0:
        kappa = 1.0
    else:
        kappa = (bin_exact - p_expected) / (1 - p_expected)

    per_rule: dict[str, dict[str, list[int]]] = {}
    if item_rules:
        for item, x, y in zip(kept, a, b):
            rule = item_rules.get(item)
            if rule is None:
                continue
            bucket = per_rule.setdefault(rule, {name_a: [], name_b: []})
            bucket[name_a].append(x)
            bucket[name_b].append(y)

    return AgreementReport(
        exact_match_pct=100.0 * exact,
        pearson_r=_pearson(a, b),
        binarized_exact_match_pct=100.0 * bin_exact,
        cohens_kappa=kappa,
        annotator_means={name_a: sum(a) / n, name_b: sum(b) / n},
        per_rule_means={rule: {who: sum(vals) / len(vals) for who, vals in bucket.items()}
                        for rule, bucket in sorted(per_rule.items())},
        n_items=n,
        n_idk_excluded=excluded,
    )
