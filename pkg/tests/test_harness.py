import json

import numpy as np
import pytest
import torch

from aigiqa.corpus import fold_ids, ingest, stratified_split
from aigiqa.harness.case_study import case_study
from aigiqa.harness.config import (
    TrainConfig,
    checkpoint_name,
    config_hash,
    load_train_config,
)
from aigiqa.harness.evaluate import EmptyFoldError, evaluate, metrics_record
from aigiqa.harness.report import build_reports, render_reports, write_report
from aigiqa.harness.summary import mos_summary
from aigiqa.harness.train import FrModeDataError, MissingLabelsError, train
from aigiqa.subjective import MosLabel

from conftest import make_corpus_dir


def brightness_labels(corpus, dimensions=("quality", "authenticity", "correspondence")):
    """Synthetic MOS labels tied to image brightness (linearly recoverable)."""
    from PIL import Image

    labels = []
    for record in corpus:
        with Image.open(record.image_path) as img:
            mean = np.asarray(img.convert("L"), dtype=float).mean() / 255.0
        for i, dim in enumerate(dimensions):
            value = min(5.0, max(0.0, 0.5 + 4.0 * mean + 0.1 * i))
            labels.append(
                MosLabel(
                    image_id=record.image_id,
                    dimension=dim,
                    mean=value,
                    stddev=0.0,
                    epsilon=0.0,
                    kept_count=5,
                    discarded_ids=(),
                    mos=value,
                )
            )
    return labels


def quick_config(**kw):
    base = dict(backbone="stub", mode="nr", dimension="quality", epochs=2, seed=1)
    base.update(kw)
    return TrainConfig(**base)


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    """A small corpus, labels, split, and a 2-epoch nr checkpoint."""
    tmp_path = tmp_path_factory.mktemp("trained")
    manifest = make_corpus_dir(
        tmp_path, n_per_group=8, generators=("genA", "genB"), i2i_generators=("genB",),
        image_size=(48, 48),
    )
    corpus = ingest(manifest)
    split = stratified_split(corpus, ratio=3.0, seed=5)
    labels = brightness_labels(corpus)
    result = train(quick_config(), corpus, split, labels, tmp_path / "artifacts")
    return {
        "tmp_path": tmp_path,
        "manifest": manifest,
        "corpus": corpus,
        "split": split,
        "labels": labels,
        "result": result,
    }


class TestTrainConfig:
    def test_published_defaults(self):
        config = TrainConfig()
        assert config.batch_size == 8
        assert config.eval_batch_size == 20
        assert config.learning_rate == 1e-4
        assert config.weight_decay == 1e-5

    def test_roundtrip_through_file_and_env(self, tmp_path, monkeypatch):
        cfg_file = tmp_path / "train.json"
        cfg_file.write_text(json.dumps({"backbone": "stub", "epochs": 3}))
        monkeypatch.setenv("AIGIQA_EPOCHS", "7")
        monkeypatch.setenv("AIGIQA_TEXT_FUSION", "true")
        config = load_train_config(cfg_file, overrides={"dimension": "authenticity"})
        assert config.epochs == 7  # env beats file
        assert config.text_fusion is True
        assert config.dimension == "authenticity"  # override beats env
        # untouched fields keep the published defaults
        assert config.learning_rate == 1e-4
        assert config.weight_decay == 1e-5
        assert config.batch_size == 8
        assert config.eval_batch_size == 20

    def test_unknown_keys_rejected(self, tmp_path):
        cfg_file = tmp_path / "bad.json"
        cfg_file.write_text(json.dumps({"learning_rte": 0.1}))
        with pytest.raises(ValueError, match="unknown config keys"):
            load_train_config(cfg_file)

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            TrainConfig(mode="rr")
        with pytest.raises(ValueError):
            TrainConfig(dimension="beauty")

    def test_hash_changes_with_config(self):
        a = config_hash(TrainConfig())
        b = config_hash(TrainConfig(seed=1))
        assert a != b
        assert config_hash(TrainConfig()) == a

    def test_checkpoint_name_content_bearing(self):
        config = TrainConfig(mode="pr", backbone="stub", dimension="quality", seed=9)
        name = checkpoint_name(config)
        assert "pr" in name and "stub" in name and "quality" in name and "seed9" in name
        assert config_hash(config) in name


class TestTrain:
    def test_fr_scope_guard(self, trained):
        config = quick_config(mode="fr")
        with pytest.raises(FrModeDataError, match="T2I"):
            train(config, trained["corpus"], trained["split"], trained["labels"], "unused")

    def test_missing_labels_listed(self, trained):
        partial = [lb for lb in trained["labels"] if not lb.image_id.startswith("genA_cat_000")]
        with pytest.raises(MissingLabelsError, match="genA_cat_000"):
            train(quick_config(), trained["corpus"], trained["split"], partial, "unused")

    def test_loss_decreases(self, trained):
        history = trained["result"].history
        assert history[-1]["train_loss"] < history[0]["train_loss"]

    def test_history_file_written(self, trained):
        path = trained["result"].checkpoint_path
        history_file = path.with_name(path.stem + "_history.jsonl")
        rows = [json.loads(l) for l in history_file.read_text().splitlines()]
        assert len(rows) == 2
        assert {"epoch", "train_loss", "eval_srcc", "eval_plcc"} <= set(rows[0])

    def test_deterministic_loss_curves(self, tmp_path):
        manifest = make_corpus_dir(tmp_path, n_per_group=4, image_size=(32, 32))
        corpus = ingest(manifest)
        split = stratified_split(corpus, 3.0, seed=2)
        labels = brightness_labels(corpus)
        config = quick_config(epochs=3, seed=42)
        r1 = train(config, corpus, split, labels, tmp_path / "a")
        r2 = train(config, corpus, split, labels, tmp_path / "b")
        assert [h["train_loss"] for h in r1.history] == [h["train_loss"] for h in r2.history]
        assert [h["eval_srcc"] for h in r1.history] == [h["eval_srcc"] for h in r2.history]

    def test_per_dimension_isolation(self, trained):
        # training on quality must not read the other dimensions' labels
        quality_only = [lb for lb in trained["labels"] if lb.dimension == "quality"]
        result = train(
            quick_config(epochs=1, seed=8), trained["corpus"], trained["split"],
            quality_only, trained["tmp_path"] / "iso_artifacts",
        )
        assert result.checkpoint_path.exists()
        with pytest.raises(MissingLabelsError):
            train(
                quick_config(dimension="authenticity", epochs=1, seed=8),
                trained["corpus"], trained["split"], quality_only,
                trained["tmp_path"] / "iso_artifacts",
            )

    def test_pr_mode_trains_on_mixed_corpus(self, trained):
        config = quick_config(mode="pr", epochs=1)
        result = train(
            config, trained["corpus"], trained["split"], trained["labels"],
            trained["tmp_path"] / "pr_artifacts",
        )
        assert result.checkpoint_path.exists()

    def test_text_fusion_trains(self, trained):
        config = quick_config(text_fusion=True, epochs=1)
        result = train(
            config, trained["corpus"], trained["split"], trained["labels"],
            trained["tmp_path"] / "tier_artifacts",
        )
        assert result.checkpoint_path.exists()
        record = evaluate(
            result.checkpoint_path, trained["corpus"], trained["split"], trained["labels"]
        )
        assert record["method"] == "nr-tier"


class TestEvaluate:
    def test_deterministic(self, trained):
        kwargs = dict(
            checkpoint=trained["result"].checkpoint_path,
            corpus=trained["corpus"],
            split=trained["split"],
            labels=trained["labels"],
        )
        a = evaluate(**kwargs)
        b = evaluate(**kwargs)
        assert a["srcc"] == b["srcc"]
        assert a["plcc"] == b["plcc"]

    def test_perfect_oracle_predictor(self):
        truth = np.array([1.0, 2.5, 3.0, 4.25, 0.5])
        record = metrics_record(truth, truth.copy())
        assert record["srcc"] == pytest.approx(1.0, abs=1e-12)
        assert record["plcc"] == pytest.approx(1.0, abs=1e-12)

    def test_scope_filters(self, trained):
        t2i = evaluate(
            trained["result"].checkpoint_path, trained["corpus"], trained["split"],
            trained["labels"], scope="t2i",
        )
        i2i = evaluate(
            trained["result"].checkpoint_path, trained["corpus"], trained["split"],
            trained["labels"], scope="i2i",
        )
        full = evaluate(
            trained["result"].checkpoint_path, trained["corpus"], trained["split"],
            trained["labels"], scope="full",
        )
        assert t2i["n"] + i2i["n"] == full["n"]
        assert t2i["scope"] == "t2i"

    def test_empty_fold(self, trained):
        # a split with no test images at all
        all_train = [a for a in trained["split"] if a.fold == "train"]
        with pytest.raises(EmptyFoldError):
            evaluate(
                trained["result"].checkpoint_path, trained["corpus"], all_train,
                trained["labels"],
            )

    def test_train_fold_evaluation(self, trained):
        record = evaluate(
            trained["result"].checkpoint_path, trained["corpus"], trained["split"],
            trained["labels"], fold="train",
        )
        assert record["fold"] == "train"
        assert record["n"] == len(fold_ids(trained["split"], "train"))


def eval_record(method="nr", backbone="stub", dimension="quality", scope="full",
                srcc_v=0.5, plcc_v=0.5):
    return {
        "method": method, "backbone": backbone, "mode": method.split("-")[0],
        "text_fusion": "tier" in method, "dimension": dimension, "scope": scope,
        "fold": "test", "checkpoint": f"ckpt_{method}.pt", "config_hash": "h",
        "split": "split.jsonl", "labels": "labels.jsonl",
        "srcc": srcc_v, "plcc": plcc_v, "n": 10,
    }


class TestReport:
    def test_cardinality(self):
        records = [
            eval_record(method=m, dimension=d, srcc_v=0.5 + i * 0.01)
            for i, (m, d) in enumerate(
                (m, d) for m in ("nr", "pr") for d in ("quality", "authenticity", "correspondence")
            )
        ]
        reports = build_reports(records)
        assert len(reports) == 1
        report = reports[0]
        assert len(report.rows) == 2
        assert all(len(dims) == 3 for dims in report.rows.values())
        assert report.scope == "full"

    def test_single_method_best_everywhere(self):
        records = [eval_record(dimension=d) for d in ("quality", "authenticity", "correspondence")]
        text = render_reports(build_reports(records))
        assert text.count("*") == 6  # six metric columns, one row

    def test_best_and_second_marked(self):
        records = [
            eval_record(method="nr", dimension="quality", srcc_v=0.7, plcc_v=0.6),
            eval_record(method="pr", dimension="quality", srcc_v=0.8, plcc_v=0.5),
        ]
        text = render_reports(build_reports(records))
        assert "0.8000*" in text and "0.7000+" in text
        assert "0.6000*" in text and "0.5000+" in text

    def test_scope_grouping(self):
        records = [eval_record(scope="full"), eval_record(scope="t2i")]
        reports = build_reports(records)
        assert [r.scope for r in reports] == ["full", "t2i"]

    def test_write_report_files(self, tmp_path):
        records = [eval_record(dimension=d) for d in ("quality", "authenticity")]
        jsonl_path, txt_path = write_report(records, tmp_path)
        lines = jsonl_path.read_text().strip().splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0])["checkpoint"]  # traceability preserved
        assert "scope: full" in txt_path.read_text()

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_reports([])


class TestMosSummary:
    def test_degenerate_single_bin(self, trained):
        labels = [
            MosLabel(r.image_id, "quality", 3.0, 0.0, 0.0, 2, (), 3.0)
            for r in trained["corpus"]
        ]
        summary = mos_summary(labels, trained["corpus"], bins=10)
        counts = summary["dimensions"]["quality"]["global"]["counts"]
        assert sum(1 for c in counts if c > 0) == 1
        assert sum(counts) == len(labels)

    def test_per_generator_grouping(self, trained):
        summary = mos_summary(trained["labels"], trained["corpus"], bins=10)
        for dim in ("quality", "authenticity", "correspondence"):
            assert set(summary["dimensions"][dim]["by_generator"]) == {"genA", "genB"}
            assert set(summary["dimensions"][dim]["by_subset"]) == {"T2I", "I2I"}

    def test_counts_match_brute_force_recount(self, trained):
        bins = 10
        summary = mos_summary(trained["labels"], trained["corpus"], bins=bins)
        edges = summary["dimensions"]["quality"]["global"]["edges"]
        values = [lb.mos for lb in trained["labels"] if lb.dimension == "quality"]
        recount = [0] * bins
        for v in values:
            for i in range(bins):
                last = i == bins - 1
                if edges[i] <= v < edges[i + 1] or (last and v == edges[-1]):
                    recount[i] += 1
                    break
        assert summary["dimensions"]["quality"]["global"]["counts"] == recount


class TestCaseStudy:
    def test_predictions_next_to_ground_truth(self, trained, tmp_path):
        corpus, split, labels = trained["corpus"], trained["split"], trained["labels"]
        out = tmp_path / "cs"
        paths = []
        for mode in ("nr", "pr"):
            for dim in ("quality", "authenticity", "correspondence"):
                cfg = quick_config(mode=mode, dimension=dim, epochs=1)
                paths.append(train(cfg, corpus, split, labels, out).checkpoint_path)
        image_id = fold_ids(split, "test")[0]
        record = case_study(paths, image_id, corpus, split, labels)
        assert set(record["predictions"]) == {"nr (stub)", "pr (stub)"}
        for preds in record["predictions"].values():
            assert set(preds) == {"quality", "authenticity", "correspondence"}
        assert set(record["ground_truth"]) == {"quality", "authenticity", "correspondence"}

    def test_unknown_image(self, trained):
        with pytest.raises(ValueError, match="unknown image"):
            case_study(
                [trained["result"].checkpoint_path], "ghost",
                trained["corpus"], trained["split"], trained["labels"],
            )

    def test_train_fold_image_rejected(self, trained):
        train_image = fold_ids(trained["split"], "train")[0]
        with pytest.raises(ValueError, match="not in the test fold"):
            case_study(
                [trained["result"].checkpoint_path], train_image,
                trained["corpus"], trained["split"], trained["labels"],
            )

    def test_mismatched_dimension_sets_rejected(self, trained, tmp_path):
        corpus, split, labels = trained["corpus"], trained["split"], trained["labels"]
        pr_q = train(quick_config(mode="pr", dimension="quality", epochs=1),
                     corpus, split, labels, tmp_path / "x").checkpoint_path
        pr_a = train(quick_config(mode="pr", dimension="authenticity", epochs=1),
                     corpus, split, labels, tmp_path / "x").checkpoint_path
        image_id = fold_ids(split, "test")[0]
        # nr covers {quality} only; pr covers {quality, authenticity}
        with pytest.raises(ValueError, match="share one dimension set"):
            case_study(
                [trained["result"].checkpoint_path, pr_q, pr_a],
                image_id, corpus, split, labels,
            )
