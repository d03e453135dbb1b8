"""Command-line entry points: perturb, evaluate, agreement, sample, rules, serve."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import CorpusError, load_corpus, save_corpus
from .engine import apply_all, apply_rule, get_rule, registry


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CorpusError, KeyError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mundart",
        description="Colloquial German perturbations for task-oriented dialogue corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rules", help="inspect the rule catalog")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("perturb", help="apply perturbation rules to a corpus")
    p.add_argument("input", type=Path, help="CoNLL-U corpus with Slot/intent annotations")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--rules", help="comma-separated rule names, one output corpus each")
    group.add_argument("--all", action="store_true", dest="all_rules",
                       help="compose every rule in the fixed order into one corpus")
    p.add_argument("--report", type=Path, help="summary TSV (default <out>/summary.tsv)")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("evaluate", help="score predictions on intact vs. perturbed gold")
    p.add_argument("--gold-intact", type=Path, required=True)
    p.add_argument("--gold-dir", type=Path, required=True,
                   help="directory with <variant>.conllu gold corpora")
    p.add_argument("--pred", type=Path, required=True,
                   help="JSON-lines predictions: sent_id, variant, run_seed, intent, slots[, pppl]")
    p.add_argument("--out", type=Path, required=True, help="report directory")
    p.add_argument("--summary", type=Path,
                   help="perturb summary TSV supplying per-rule veto counts")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("agreement", help="two-annotator agreement statistics")
    p.add_argument("--ratings", type=Path, required=True, help="JSON-lines rating log")
    p.add_argument("--items", type=Path,
                   help="evaluation-set file; enables the per-rule score table")
    p.add_argument("--out", type=Path, required=True, help="report directory")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("sample", help="build the human-evaluation set")
    p.add_argument("input", type=Path)
    p.add_argument("--cap", type=int, default=8, help="max sentences per rule per dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="JSON-lines output file")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("serve", help="run the rating-collection service")
    p.add_argument("--items", type=Path, required=True, help="evaluation-set file")
    p.add_argument("--ratings", type=Path, required=True, help="rating log (created if absent)")
    p.add_argument("--bind", default="127.0.0.1:8765", help="host:port")
    p.add_argument("--static", type=Path, help="directory with the annotation UI bundle")
    p.set_defaults(func=cmd_serve)
    return parser


def cmd_rules(args) -> int:
    for rule in registry():
        print(f"{rule.name}\t{rule.category}")
    return 0


def cmd_perturb(args) -> int:
    corpus = load_corpus(args.input)
    args.out.mkdir(parents=True, exist_ok=True)
    report_path = args.report or args.out / "summary.tsv"
    rows = []
    if args.all_rules:
        rules = registry()
        results = [apply_all(rules, s) for s in corpus]
        save_corpus(args.out / "all.conllu", [r.sentence for r in results])
        vetoes_by_rule = {rule.name: 0 for rule in rules}
        applied_by_rule = {rule.name: 0 for rule in rules}
        for result in results:
            for step in result.steps:
                applied_by_rule[step.rule_name] += int(step.applied)
                vetoes_by_rule[step.rule_name] += int(step.vetoed)
        for rule in rules:
            rows.append((rule.name, applied_by_rule[rule.name], vetoes_by_rule[rule.name]))
        rows.append(("all", sum(int(r.applied) for r in results),
                     sum(int(r.vetoed) for r in results)))
    else:
        names = [n.strip() for n in args.rules.split(",") if n.strip()]
        for name in names:
            rule = get_rule(name)
            results = [apply_rule(rule, s) for s in corpus]
            save_corpus(args.out / f"{name}.conllu", [r.sentence for r in results])
            rows.append((name, sum(int(r.applied) for r in results),
                         sum(int(r.vetoed) for r in results)))
    with open(report_path, "w", encoding="utf-8") as handle:
        handle.write("rule\tapplied\tvetoes\n")
        for name, applied, vetoes in rows:
            handle.write(f"{name}\t{applied}\t{vetoes}\n")
    for name, applied, vetoes in rows:
        print(f"{name}: applied={applied} vetoes={vetoes}")
    return 0


def read_predictions(path: Path) -> "list[PredictionRecord]":
    from .metrics import MetricError, PredictionRecord

    records = []
    with open(path, encoding="utf-8") as handle:
        for no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                slots = raw["slots"]
                if isinstance(slots, str):
                    slots = slots.split()
                records.append(PredictionRecord(
                    sent_id=raw["sent_id"], variant=raw["variant"],
                    run_seed=int(raw["run_seed"]), predicted_intent=raw["intent"],
                    predicted_slots=tuple(slots),
                    pppl=float(raw["pppl"]) if raw.get("pppl") is not None else None))
            except (json.JSONDecodeError, KeyError, TypeError) as err:
                raise MetricError(f"{path}:{no}: bad prediction record ({err})") from err
    seen = set()
    for rec in records:
        key = (rec.sent_id, rec.variant, rec.run_seed)
        if key in seen:
            raise MetricError(f"duplicate prediction for {key}")
        seen.add(key)
    return records


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def evaluate_predictions(gold_intact, gold_variants, predictions,
                         vetoes_by_rule=None):
    """Compute per-(variant, seed) and per-variant mean reports.

    gold_intact: list of Sentences; gold_variants: dict variant -> list of
    Sentences; predictions: list of PredictionRecord.
    """
    from .metrics import (EvalReport, MetricError, PairScore, intent_accuracy,
                          preference_accuracy, slot_success_rate, span_f1,
                          success_rate)

    vetoes_by_rule = vetoes_by_rule or {}
    intact_by_id = {s.sent_id: s for s in gold_intact}
    sent_ids = sorted(intact_by_id)

    groups: dict[tuple[str, int], dict[str, PredictionRecord]] = {}
    for rec in predictions:
        groups.setdefault((rec.variant, rec.run_seed), {})[rec.sent_id] = rec

    missing = []
    for (variant, seed), recs in sorted(groups.items()):
        if variant != "intact" and variant not in gold_variants:
            raise MetricError(f"no gold corpus for variant {variant!r}")
        for sid in sent_ids:
            if sid not in recs:
                missing.append((sid, variant, seed))
        if variant != "intact" and ("intact", seed) not in groups:
            raise MetricError(f"no intact predictions for seed {seed}")
    if missing:
        listing = ", ".join(f"({s}, {v}, {d})" for s, v, d in missing[:10])
        raise MetricError(f"missing predictions: {listing}"
                          + (" ..." if len(missing) > 10 else ""))

    variants = sorted({v for v, _ in groups})
    reports: dict[str, list[EvalReport]] = {v: [] for v in variants}
    for (variant, seed), recs in sorted(groups.items()):
        gold = intact_by_id if variant == "intact" else \
            {s.sent_id: s for s in gold_variants[variant]}
        gold_intents = [gold[sid].intent for sid in sent_ids]
        gold_bios = [gold[sid].bio() for sid in sent_ids]
        pred_intents = [recs[sid].predicted_intent for sid in sent_ids]
        pred_bios = [list(recs[sid].predicted_slots) for sid in sent_ids]
        acc = intent_accuracy(gold_intents, pred_intents)
        precision, recall, f1 = span_f1(gold_bios, pred_bios, sent_ids)
        if variant == "intact":
            report = EvalReport(variant, seed, acc, precision, recall, f1,
                                0.0, 0.0, 0.0, 0.0, 0, 0)
        else:
            intact_recs = groups[("intact", seed)]
            intact_acc = intent_accuracy(
                [intact_by_id[sid].intent for sid in sent_ids],
                [intact_recs[sid].predicted_intent for sid in sent_ids])
            _, _, intact_f1 = span_f1(
                [intact_by_id[sid].bio() for sid in sent_ids],
                [list(intact_recs[sid].predicted_slots) for sid in sent_ids], sent_ids)
            applied = {sid: gold[sid].text != intact_by_id[sid].text
                       for sid in sent_ids}
            rate = success_rate({sid: intact_by_id[sid].intent for sid in sent_ids},
                                {sid: intact_recs[sid].predicted_intent for sid in sent_ids},
                                {sid: recs[sid].predicted_intent for sid in sent_ids},
                                applied)
            slot_rate = slot_success_rate(
                {sid: intact_by_id[sid].bio() for sid in sent_ids},
                {sid: gold[sid].bio() for sid in sent_ids},
                {sid: list(intact_recs[sid].predicted_slots) for sid in sent_ids},
                {sid: list(recs[sid].predicted_slots) for sid in sent_ids},
                applied)
            pairs = [PairScore(sid, variant, intact_recs[sid].pppl, recs[sid].pppl)
                     for sid in sent_ids
                     if applied[sid] and intact_recs[sid].pppl is not None
                     and recs[sid].pppl is not None]
            preference = preference_accuracy(pairs) if pairs else None
            report = EvalReport(variant, seed, acc, precision, recall, f1,
                                intact_acc - acc, intact_f1 - f1, rate, slot_rate,
                                sum(applied.values()),
                                vetoes_by_rule.get(variant, 0),
                                preference_accuracy=preference)
        reports[variant].append(report)

    means: dict[str, EvalReport] = {}
    for variant, per_seed in reports.items():
        scored = [r.preference_accuracy for r in per_seed
                  if r.preference_accuracy is not None]
        means[variant] = EvalReport(
            variant, None,
            _mean(r.intent_accuracy for r in per_seed),
            _mean(r.slot_precision for r in per_seed),
            _mean(r.slot_recall for r in per_seed),
            _mean(r.slot_f1 for r in per_seed),
            _mean(r.delta_accuracy for r in per_seed),
            _mean(r.delta_f1 for r in per_seed),
            _mean(r.success_rate for r in per_seed),
            _mean(r.slot_success_rate for r in per_seed),
            per_seed[0].n_perturbed,
            per_seed[0].vetoes,
            preference_accuracy=_mean(scored) if scored else None,
        )
    return reports, means


_COLUMNS = ("intent_accuracy", "slot_precision", "slot_recall", "slot_f1",
            "delta_accuracy", "delta_f1", "success_rate", "slot_success_rate",
            "n_perturbed", "vetoes", "preference_accuracy")


def _report_row(report: EvalReport) -> str:
    seed = "mean" if report.run_seed is None else str(report.run_seed)
    cells = [report.variant, seed]
    for col in _COLUMNS:
        value = getattr(report, col)
        if value is None:
            cells.append("-")
        else:
            cells.append(str(value) if isinstance(value, int) else f"{value:.6f}")
    return "\t".join(cells)


def cmd_evaluate(args) -> int:
    from .metrics import MetricError, aggregate_by_category

    gold_intact = load_corpus(args.gold_intact)
    predictions = read_predictions(args.pred)
    wanted = {rec.variant for rec in predictions} - {"intact"}
    gold_variants = {}
    for variant in sorted(wanted):
        path = args.gold_dir / f"{variant}.conllu"
        if not path.exists():
            raise MetricError(f"missing gold corpus {path}")
        gold_variants[variant] = load_corpus(path)

    vetoes_by_rule = {}
    if args.summary:
        with open(args.summary, encoding="utf-8") as handle:
            for line in handle.readlines()[1:]:
                name, _applied, vetoes = line.rstrip("\n").split("\t")
                vetoes_by_rule[name] = int(vetoes)

    reports, means = evaluate_predictions(gold_intact, gold_variants,
                                          predictions, vetoes_by_rule)

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "variants.tsv", "w", encoding="utf-8") as handle:
        handle.write("variant\trun_seed\t" + "\t".join(_COLUMNS) + "\n")
        for variant in sorted(reports):
            for report in reports[variant]:
                handle.write(_report_row(report) + "\n")
            handle.write(_report_row(means[variant]) + "\n")

    rule_names = {r.name for r in registry()}
    per_rule = {v: m for v, m in means.items() if v in rule_names}
    categories = aggregate_by_category(per_rule, registry())
    with open(args.out / "categories.tsv", "w", encoding="utf-8") as handle:
        handle.write("category\tdelta_f1\n")
        for category, delta in categories.items():
            handle.write(f"{category}\t{delta:.6f}\n")

    with open(args.out / "success_rate.tsv", "w", encoding="utf-8") as handle:
        handle.write("rule\tsuccess_rate\tslot_success_rate\tn_perturbed\tvetoes\n")
        for name, report in sorted(per_rule.items()):
            handle.write(f"{name}\t{report.success_rate:.6f}\t"
                         f"{report.slot_success_rate:.6f}\t{report.n_perturbed}\t"
                         f"{report.vetoes}\n")

    contrastive = {name: report.preference_accuracy
                   for name, report in sorted(means.items())
                   if report.preference_accuracy is not None}
    if contrastive:
        with open(args.out / "contrastive.tsv", "w", encoding="utf-8") as handle:
            handle.write("variant\tpreference_accuracy\n")
            for name, value in contrastive.items():
                handle.write(f"{name}\t{value:.6f}\n")

    summary = {
        "variants": {
            variant: {
                "per_seed": [vars(r) for r in reports[variant]],
                "mean": vars(means[variant]),
            }
            for variant in sorted(reports)
        },
        "categories": categories,
    }
    with open(args.out / "summary.json", "w", encoding="utf-8") as handle:
        json.dump(summary, handle, ensure_ascii=False, indent=2)
    print(f"wrote reports for {len(reports)} variants to {args.out}")
    return 0


def cmd_agreement(args) -> int:
    from .metrics import agreement_report
    from .service import read_ratings

    ratings = read_ratings(args.ratings)
    item_rules = None
    if args.items:
        item_rules = {}
        with open(args.items, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    raw = json.loads(line)
                    item_rules[raw["item_id"]] = raw["rule"]
    report = agreement_report(ratings, item_rules)

    args.out.mkdir(parents=True, exist_ok=True)
    payload = vars(report).copy()
    if payload["pearson_r"] != payload["pearson_r"]:  # NaN -> null in JSON
        payload["pearson_r"] = None
    with open(args.out / "agreement.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, indent=2)

    if item_rules is not None:
        annotators = sorted(report.annotator_means)
        with open(args.out / "per_rule.tsv", "w", encoding="utf-8") as handle:
            handle.write("rule\t" + "\t".join(f"mean_{a}" for a in annotators)
                         + "\tdisparity\n")
            for rule, by_annotator in report.per_rule_means.items():
                a, b = (by_annotator[x] for x in annotators)
                handle.write(f"{rule}\t{a:.4f}\t{b:.4f}\t{abs(a - b):.4f}\n")

    print(f"exact match: {report.exact_match_pct:.2f}%  "
          f"pearson r: {report.pearson_r:.4f}  "
          f"binarized exact match: {report.binarized_exact_match_pct:.2f}%  "
          f"kappa: {report.cohens_kappa:.4f}  "
          f"(n={report.n_items}, idk excluded={report.n_idk_excluded})")
    return 0


def cmd_sample(args) -> int:
    from .sampler import build_eval_set

    corpus = load_corpus(args.input)
    items = build_eval_set(corpus, registry(), args.cap, args.seed)
    with open(args.out, "w", encoding="utf-8") as handle:
        for item in items:
            handle.write(json.dumps(vars(item), ensure_ascii=False) + "\n")
    print(f"sampled {len(items)} items -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_items

    host, _, port = args.bind.rpartition(":")
    app = create_app(load_items(args.items), args.ratings,
                     static_dir=args.static)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


if __name__ == "__main__":
    sys.exit(main())
