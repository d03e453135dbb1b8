import json
from importlib import resources

import pytest

from mundart.baseline import MemorizingBaseline
from mundart.cli import main
from mundart.corpus import load_corpus


@pytest.fixture
def corpus_path(tmp_path):
    text = resources.files("mundart").joinpath("data/mini_de.conllu").read_text("utf-8")
    path = tmp_path / "mini.conllu"
    path.write_text(text, encoding="utf-8")
    return path


def test_rules_list(capsys):
    assert main(["rules", "list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 14
    assert lines[-2] == "schwa_elision\tVerbMorphology"


def test_perturb_single_rule(corpus_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["perturb", str(corpus_path), "--rules", "name_order",
                 "--out", str(out)]) == 0
    produced = load_corpus(out / "name_order.conllu")
    assert any("Merkel Angela" in s.text for s in produced)
    summary = (out / "summary.tsv").read_text().splitlines()
    assert summary[0] == "rule\tapplied\tvetoes"
    assert summary[1] == "name_order\t1\t0"


def test_perturb_identity_corpus_round_trips(corpus_path, tmp_path):
    out = tmp_path / "out"
    # name_order only applies to one sentence; all others must be unchanged
    main(["perturb", str(corpus_path), "--rules", "name_order", "--out", str(out)])
    original = load_corpus(corpus_path)
    produced = load_corpus(out / "name_order.conllu")
    changed = [a.sent_id for a, b in zip(original, produced) if a != b]
    assert changed == ["s02"]


def test_perturb_fan_out(corpus_path, tmp_path):
    out = tmp_path / "out"
    assert main(["perturb", str(corpus_path), "--rules",
                 "schwa_elision,es_contraction", "--out", str(out)]) == 0
    assert (out / "schwa_elision.conllu").exists()
    assert (out / "es_contraction.conllu").exists()


def test_perturb_all(corpus_path, tmp_path):
    out = tmp_path / "out"
    assert main(["perturb", str(corpus_path), "--all", "--out", str(out)]) == 0
    assert (out / "all.conllu").exists()
    rows = (out / "summary.tsv").read_text().splitlines()
    assert rows[-1].startswith("all\t20\t0")


def test_perturb_unknown_rule_fails(corpus_path, tmp_path, capsys):
    code = main(["perturb", str(corpus_path), "--rules", "bogus",
                 "--out", str(tmp_path / "x")])
    assert code == 1
    assert "unknown rule" in capsys.readouterr().err


def test_perturb_unparseable_input_fails(tmp_path, capsys):
    bad = tmp_path / "bad.conllu"
    bad.write_text("# sent_id = x\n# text = y\n1\ta\n\n", encoding="utf-8")
    assert main(["perturb", str(bad), "--all", "--out", str(tmp_path / "o")]) == 1


def write_predictions(path, corpus, variant_corpora, seeds=(1, 2), hook=None):
    model = MemorizingBaseline().fit(corpus)
    with open(path, "w", encoding="utf-8") as handle:
        for variant, sentences in variant_corpora.items():
            preds = model.predict(sentences)
            for sentence, (intent, slots) in zip(sentences, preds):
                for seed in seeds:
                    record = {"sent_id": sentence.sent_id, "variant": variant,
                              "run_seed": seed, "intent": intent,
                              "slots": " ".join(slots)}
                    if hook:
                        record = hook(record)
                    handle.write(json.dumps(record, ensure_ascii=False) + "\n")


@pytest.fixture
def eval_setup(corpus_path, tmp_path):
    gold_dir = tmp_path / "gold"
    main(["perturb", str(corpus_path), "--rules", "name_order,schwa_elision",
          "--out", str(gold_dir)])
    corpus = load_corpus(corpus_path)
    variants = {
        "intact": corpus,
        "name_order": load_corpus(gold_dir / "name_order.conllu"),
        "schwa_elision": load_corpus(gold_dir / "schwa_elision.conllu"),
    }
    pred_path = tmp_path / "preds.ndjson"
    write_predictions(pred_path, corpus, variants)
    return corpus_path, gold_dir, pred_path, tmp_path / "report"


def test_evaluate_perfect_predictions_zero_delta(eval_setup):
    corpus_path, gold_dir, pred_path, report_dir = eval_setup
    # memorizer predictions are position-based; schwa elision keeps positions,
    # so its delta is 0, while name_order moves a span boundary token... the
    # two-token person span keeps its positions too, so both deltas are 0 here
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 0
    summary = json.loads((report_dir / "summary.json").read_text())
    assert summary["variants"]["intact"]["mean"]["intent_accuracy"] == 1.0
    assert summary["variants"]["schwa_elision"]["mean"]["delta_f1"] == 0.0
    assert (report_dir / "variants.tsv").exists()
    assert (report_dir / "categories.tsv").exists()
    assert (report_dir / "success_rate.tsv").exists()


def test_evaluate_success_rate_fixture(corpus_path, tmp_path):
    gold_dir = tmp_path / "gold"
    main(["perturb", str(corpus_path), "--rules", "schwa_elision",
          "--out", str(gold_dir)])
    corpus = load_corpus(corpus_path)
    variants = {"intact": corpus,
                "schwa_elision": load_corpus(gold_dir / "schwa_elision.conllu")}
    applied_ids = [a.sent_id for a, b in
                   zip(corpus, variants["schwa_elision"]) if a.text != b.text]
    flip = set(applied_ids[:2])

    def hook(record):
        if record["variant"] == "schwa_elision" and record["sent_id"] in flip:
            record["intent"] = "flipped_intent"
        return record

    pred_path = tmp_path / "preds.ndjson"
    write_predictions(pred_path, corpus, variants, seeds=(1,), hook=hook)
    report_dir = tmp_path / "report"
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 0
    summary = json.loads((report_dir / "summary.json").read_text())
    rate = summary["variants"]["schwa_elision"]["mean"]["success_rate"]
    assert rate == pytest.approx(2 / len(applied_ids))


def test_evaluate_missing_gold_variant_fails(eval_setup, capsys):
    corpus_path, gold_dir, pred_path, report_dir = eval_setup
    (gold_dir / "name_order.conllu").unlink()
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 1
    assert "missing gold corpus" in capsys.readouterr().err


def test_evaluate_coverage_gap_fails(eval_setup, capsys):
    corpus_path, gold_dir, pred_path, report_dir = eval_setup
    lines = pred_path.read_text().strip().splitlines()
    pred_path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 1
    assert "missing predictions" in capsys.readouterr().err


def test_evaluate_contrastive_preference(corpus_path, tmp_path):
    gold_dir = tmp_path / "gold"
    main(["perturb", str(corpus_path), "--rules", "schwa_elision",
          "--out", str(gold_dir)])
    corpus = load_corpus(corpus_path)
    variants = {"intact": corpus,
                "schwa_elision": load_corpus(gold_dir / "schwa_elision.conllu")}

    def hook(record):
        # the model always scores the intact sentence as more probable
        record["pppl"] = 4.0 if record["variant"] == "intact" else 9.0
        return record

    pred_path = tmp_path / "preds.ndjson"
    write_predictions(pred_path, corpus, variants, seeds=(1,), hook=hook)
    report_dir = tmp_path / "report"
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 0
    summary = json.loads((report_dir / "summary.json").read_text())
    assert summary["variants"]["schwa_elision"]["mean"]["preference_accuracy"] == 1.0
    assert summary["variants"]["intact"]["mean"]["preference_accuracy"] is None
    table = (report_dir / "contrastive.tsv").read_text().splitlines()
    assert table == ["variant\tpreference_accuracy", "schwa_elision\t1.000000"]


def test_evaluate_without_pppl_has_no_contrastive_table(eval_setup):
    corpus_path, gold_dir, pred_path, report_dir = eval_setup
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir)]) == 0
    assert not (report_dir / "contrastive.tsv").exists()
    summary = json.loads((report_dir / "summary.json").read_text())
    assert summary["variants"]["name_order"]["mean"]["preference_accuracy"] is None


def test_sample_command(corpus_path, tmp_path):
    out = tmp_path / "eval_set.ndjson"
    assert main(["sample", str(corpus_path), "--cap", "8", "--seed", "13",
                 "--out", str(out)]) == 0
    items = [json.loads(line) for line in out.read_text().splitlines()]
    assert items
    assert all({"item_id", "sent_id", "dataset", "rule",
                "sentence_a", "sentence_b"} <= set(i) for i in items)
    # determinism across runs
    out2 = tmp_path / "eval_set2.ndjson"
    main(["sample", str(corpus_path), "--cap", "8", "--seed", "13",
          "--out", str(out2)])
    assert out.read_text() == out2.read_text()


def test_agreement_command(tmp_path):
    ratings = tmp_path / "ratings.ndjson"
    rows = []
    for i in range(4):
        rows.append({"item_id": f"i{i}", "annotator_id": "a", "score": 5})
        rows.append({"item_id": f"i{i}", "annotator_id": "b",
                     "score": 5 if i % 2 == 0 else 1})
    ratings.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    items = tmp_path / "items.ndjson"
    item_rows = [{"item_id": f"i{i}", "sent_id": f"s{i}", "dataset": "d",
                  "rule": "verb_clusters", "sentence_a": "a", "sentence_b": "b"}
                 for i in range(4)]
    items.write_text("\n".join(json.dumps(r) for r in item_rows) + "\n")
    out = tmp_path / "agree"
    assert main(["agreement", "--ratings", str(ratings), "--items", str(items),
                 "--out", str(out)]) == 0
    report = json.loads((out / "agreement.json").read_text())
    assert report["exact_match_pct"] == 50.0
    assert report["cohens_kappa"] == pytest.approx(0.0, abs=1e-12)
    per_rule = (out / "per_rule.tsv").read_text().splitlines()
    assert per_rule[1].startswith("verb_clusters\t5.0000\t3.0000\t2.0000")


VETO_CORPUS = """\
# sent_id = v1
# dataset = d
# intent = get_weather
# text = Er wartet .
1\tEr\ter\tPRON\t_\tPronType=Prs\t2\tnsubj\t_\t_
2\twartet\twarten\tVERB\t_\tTense=Pres|VerbForm=Fin\t0\troot\t_\t_
3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_
"""


def test_perturb_reports_veto_counts(tmp_path):
    # "wartet" lacks Person/Number, so the progressive rule must veto
    corpus = tmp_path / "veto.conllu"
    corpus.write_text(VETO_CORPUS, encoding="utf-8")
    out = tmp_path / "out"
    assert main(["perturb", str(corpus), "--rules", "progressive",
                 "--out", str(out)]) == 0
    rows = (out / "summary.tsv").read_text().splitlines()
    assert rows[1] == "progressive\t0\t1"
    produced = load_corpus(out / "progressive.conllu")
    assert produced == load_corpus(corpus)  # vetoed sentence stays intact


def test_perturb_all_reports_per_rule_vetoes(tmp_path):
    corpus = tmp_path / "veto.conllu"
    corpus.write_text(VETO_CORPUS, encoding="utf-8")
    out = tmp_path / "out"
    assert main(["perturb", str(corpus), "--all", "--out", str(out)]) == 0
    rows = dict(line.split("\t", 1) for line in
                (out / "summary.tsv").read_text().splitlines()[1:])
    assert rows["progressive"] == "0\t1"


def test_agreement_constant_scores_emit_null_pearson(tmp_path):
    ratings = tmp_path / "ratings.ndjson"
    rows = []
    for i in range(3):
        rows.append({"item_id": f"i{i}", "annotator_id": "a", "score": 5})
        rows.append({"item_id": f"i{i}", "annotator_id": "b", "score": 5})
    ratings.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    out = tmp_path / "agree"
    assert main(["agreement", "--ratings", str(ratings), "--out", str(out)]) == 0
    report = json.loads((out / "agreement.json").read_text())
    assert report["pearson_r"] is None
    assert report["cohens_kappa"] == 1.0


def test_duplicate_prediction_rejected(tmp_path):
    from mundart.cli import read_predictions
    from mundart.metrics import MetricError

    path = tmp_path / "preds.ndjson"
    record = {"sent_id": "s01", "variant": "intact", "run_seed": 1,
              "intent": "x", "slots": "O"}
    path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n")
    with pytest.raises(MetricError, match="duplicate"):
        read_predictions(path)


def test_seed_aggregation_is_arithmetic_mean(corpus_path, tmp_path):
    from mundart.cli import evaluate_predictions, read_predictions

    gold_dir = tmp_path / "gold"
    main(["perturb", str(corpus_path), "--rules", "schwa_elision",
          "--out", str(gold_dir)])
    corpus = load_corpus(corpus_path)
    perturbed = load_corpus(gold_dir / "schwa_elision.conllu")
    variants = {"intact": corpus, "schwa_elision": perturbed}

    def hook(record):
        # make seed 2 predictions wrong on one sentence so the seeds differ
        if record["run_seed"] == 2 and record["sent_id"] == "s01":
            record["intent"] = "wrong"
        return record

    pred_path = tmp_path / "preds.ndjson"
    write_predictions(pred_path, corpus, variants, seeds=(1, 2), hook=hook)
    reports, means = evaluate_predictions(
        corpus, {"schwa_elision": perturbed}, read_predictions(pred_path))
    for variant, per_seed in reports.items():
        for column in ("intent_accuracy", "slot_f1", "delta_accuracy",
                       "delta_f1", "success_rate"):
            expected = sum(getattr(r, column) for r in per_seed) / len(per_seed)
            assert abs(getattr(means[variant], column) - expected) < 1e-12
    assert means["intact"].intent_accuracy == pytest.approx(39 / 40)


def test_evaluate_summary_supplies_veto_counts(eval_setup, tmp_path):
    corpus_path, gold_dir, pred_path, report_dir = eval_setup
    summary_tsv = tmp_path / "perturb_summary.tsv"
    summary_tsv.write_text("rule\tapplied\tvetoes\nname_order\t1\t3\n")
    assert main(["evaluate", "--gold-intact", str(corpus_path),
                 "--gold-dir", str(gold_dir), "--pred", str(pred_path),
                 "--out", str(report_dir), "--summary", str(summary_tsv)]) == 0
    summary = json.loads((report_dir / "summary.json").read_text())
    assert summary["variants"]["name_order"]["mean"]["vetoes"] == 3


def test_agreement_three_annotators_fails(tmp_path, capsys):
    ratings = tmp_path / "ratings.ndjson"
    rows = [{"item_id": "i0", "annotator_id": who, "score": 5}
            for who in ("a", "b", "c")]
    ratings.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    assert main(["agreement", "--ratings", str(ratings),
                 "--out", str(tmp_path / "agree")]) == 1
    assert "2 annotators" in capsys.readouterr().err
