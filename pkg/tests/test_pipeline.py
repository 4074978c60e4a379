from __future__ import annotations

import json
from pathlib import Path

import pytest

from lscd.cli import main
from lscd.errors import StageError
from lscd.pipeline import (
    Pipeline,
    derive_seed,
    load_config,
    run_benchmark_generation,
)

CONFIG_TEMPLATE = """
[paths]
corpus_t1 = {bench}/corpus_t1.txt
corpus_t2 = {bench}/corpus_t2.txt
targets = {bench}/targets.txt
gold = {bench}/gold.tsv
binary_gold = {bench}/gold_binary.tsv
output_dir = {out}

[sgns]
dimension = 16
window = 3
negatives = 2
epochs = 1

[encoder]
dimension = 16
context_radius = 2

[ensemble]
grid_step = 0.25

[run]
seed = 7
"""


@pytest.fixture(scope="module")
def bench_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("bench")
    run_benchmark_generation(path, n_targets=5, sentences=600, seed=3)
    return path


def write_config(tmp_path: Path, bench: Path, extra: str = "") -> Path:
    out = tmp_path / "out"
    text = CONFIG_TEMPLATE.format(bench=bench, out=out) + extra
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


class TestConfig:
    def test_defaults_and_parsing(self, tmp_path, bench_dir):
        config = load_config(write_config(tmp_path, bench_dir))
        assert config.sgns.dimension == 16
        assert config.sgns.window == 3
        assert config.sgns.negatives == 2
        assert config.sgns.noise_exponent == 0.75  # documented default
        assert config.encoder.dimension == 16
        assert config.encoder.epochs == 1  # documented default
        assert config.masked is True
        assert config.threshold == "auto"
        assert config.theta is None
        assert config.grid_step == 0.25
        assert config.align_steps == ("normalize", "center")
        assert config.pair_budget is None
        assert config.seed == 7

    def test_unknown_key_rejected(self, tmp_path, bench_dir):
        path = write_config(tmp_path, bench_dir)
        text = path.read_text().replace("[sgns]", "[sgns]\ntypo_key = 3")
        path.write_text(text)
        with pytest.raises(ValueError, match="typo_key"):
            load_config(path)

    def test_unknown_section_rejected(self, tmp_path, bench_dir):
        path = write_config(tmp_path, bench_dir, extra="\n[mystery]\nx = 1\n")
        with pytest.raises(ValueError, match="mystery"):
            load_config(path)

    def test_missing_required_path(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[paths]\ncorpus_t1 = x\n", encoding="utf-8")
        with pytest.raises(ValueError, match="corpus_t2"):
            load_config(path)

    def test_missing_file_rejected(self, tmp_path, bench_dir):
        config_path = write_config(tmp_path, bench_dir)
        text = config_path.read_text().replace("corpus_t1.txt", "nope.txt")
        config_path.write_text(text)
        with pytest.raises(FileNotFoundError):
            load_config(config_path)

    def test_overrides(self, tmp_path, bench_dir):
        config = load_config(
            write_config(tmp_path, bench_dir),
            overrides={"seed": 99, "theta": 0.5, "masked": False, "pair_budget": 500},
        )
        assert config.seed == 99
        assert config.theta == 0.5
        assert config.masked is False
        assert config.pair_budget == 500

    def test_derive_seed_stable_and_distinct(self):
        assert derive_seed(7, "sgns-t1") == derive_seed(7, "sgns-t1")
        assert derive_seed(7, "sgns-t1") != derive_seed(7, "sgns-t2")
        assert derive_seed(7, "sgns-t1") != derive_seed(8, "sgns-t1")


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory, bench_dir):
    tmp = tmp_path_factory.mktemp("run")
    config_path = write_config(tmp, bench_dir)
    config = load_config(config_path)
    pipeline = Pipeline(config)
    pipeline.run_all()
    return tmp, config_path, config, pipeline


class TestPipelineRun:
    def test_outputs_exist(self, run_dir):
        _, _, config, _ = run_dir
        answers = config.output_dir / "answers"
        for name in (
            "graded_context_free.tsv",
            "graded_context_dependent.tsv",
            "graded_ensemble.tsv",
            "binary_ensemble.tsv",
        ):
            assert (answers / name).is_file()
        assert (config.output_dir / "manifest.json").is_file()
        assert (config.output_dir / "run.complete").is_file()

    def test_answer_files_cover_targets(self, run_dir, bench_dir):
        _, _, config, _ = run_dir
        targets = (bench_dir / "targets.txt").read_text().split()
        graded = (config.output_dir / "answers" / "graded_ensemble.tsv").read_text()
        words = [line.split("\t")[0] for line in graded.strip().splitlines()]
        assert sorted(words) == sorted(targets)
        binary = (config.output_dir / "answers" / "binary_ensemble.tsv").read_text()
        labels = {l.split("\t")[1] for l in binary.strip().splitlines()}
        assert labels <= {"0", "1"}

    def test_manifest_covers_every_tunable(self, run_dir):
        _, _, config, _ = run_dir
        manifest = json.loads((config.output_dir / "manifest.json").read_text())
        for field_name in (
            "corpus_t1",
            "corpus_t2",
            "targets",
            "gold",
            "binary_gold",
            "output_dir",
            "masked",
            "threshold",
            "sgns",
            "encoder",
            "align_steps",
            "pair_budget",
            "theta",
            "grid_step",
            "seed",
            "deterministic",
        ):
            assert field_name in manifest["config"]
        assert manifest["inputs"]["corpus_t1"]
        assert set(manifest["stages"]) == {
            "ingest",
            "static",
            "align",
            "clf-dataset",
            "clf-model",
            "uses",
            "scores",
            "ensemble",
            "evaluate",
        }

    def test_rerun_fully_cached_and_byte_identical(self, run_dir):
        _, _, config, _ = run_dir
        manifest_before = (config.output_dir / "manifest.json").read_bytes()
        answers_before = {
            p.name: p.read_bytes() for p in (config.output_dir / "answers").iterdir()
        }
        pipeline = Pipeline(load_config(run_dir[1]))
        pipeline.run_all()
        assert all(res.cached for res in pipeline.stages.values())
        assert (config.output_dir / "manifest.json").read_bytes() == manifest_before
        for p in (config.output_dir / "answers").iterdir():
            assert p.read_bytes() == answers_before[p.name]

    def test_downstream_change_keeps_upstream_cache(self, run_dir):
        _, config_path, config, first = run_dir
        pipeline = Pipeline(load_config(config_path, overrides={"theta": 0.25}))
        pipeline.run_all()
        for stage in ("ingest", "static", "align", "clf-dataset", "clf-model", "uses", "scores"):
            assert pipeline.stages[stage].cached
            assert pipeline.stages[stage].key == first.stages[stage].key
        assert pipeline.stages["ensemble"].key != first.stages["ensemble"].key

    def test_theta_zero_matches_context_free_answers(self, run_dir):
        _, config_path, config, _ = run_dir
        pipeline = Pipeline(load_config(config_path, overrides={"theta": 0.0}))
        pipeline.run_all()
        answers = config.output_dir / "answers"
        assert (answers / "graded_ensemble.tsv").read_bytes() == (
            answers / "graded_context_free.tsv"
        ).read_bytes()

    def test_evaluation_report_written(self, run_dir):
        _, _, config, pipeline = run_dir
        report_dir = pipeline.stages["evaluate"].path
        report = (report_dir / "report.tsv").read_text(encoding="utf-8").splitlines()
        assert report[0] == "model\tmetric\tvalue"
        metrics = {(r.split("\t")[0], r.split("\t")[1]) for r in report[1:]}
        assert ("context_free", "spearman") in metrics
        assert ("context_dependent", "spearman") in metrics
        assert ("ensemble", "spearman") in metrics
        assert ("ensemble", "binary_accuracy") in metrics
        assert ("ensemble", "theta_grid_search") in metrics
        assert (report_dir / "summary.txt").is_file()

    def test_interrupted_stage_rebuilt(self, run_dir):
        _, config_path, config, first = run_dir
        # Simulate a partial write: remove the sentinel of a cheap stage.
        stage_dir = first.stages["ensemble"].path
        (stage_dir / ".complete").unlink()
        pipeline = Pipeline(load_config(config_path))
        pipeline.run_all()
        assert not pipeline.stages["ensemble"].cached
        assert (stage_dir / ".complete").is_file()


class TestPipelineErrors:
    def test_stage_error_carries_stage_name(self, tmp_path, bench_dir):
        # A corpus file of blank lines passes config validation but fails
        # inside the ingest stage, which must tag the error with its name.
        config_path = write_config(tmp_path, bench_dir)
        blank = tmp_path / "blank.txt"
        blank.write_text("\n\n\n", encoding="utf-8")
        config = load_config(config_path, overrides={"corpus_t1": blank})
        pipeline = Pipeline(config)
        with pytest.raises(StageError, match="ingest") as excinfo:
            pipeline.ingest()
        assert excinfo.value.stage == "ingest"
        # no sentinel was written for the failed stage
        stage_root = config.output_dir / "ingest"
        assert not any(stage_root.rglob(".complete"))

    def test_evaluate_without_gold_rejected(self, tmp_path, bench_dir):
        config_path = write_config(tmp_path, bench_dir)
        config = load_config(config_path, overrides={"gold": None, "binary_gold": None})
        with pytest.raises(StageError, match="evaluate"):
            Pipeline(config).evaluate()


class TestCli:
    def test_gen_bench_and_single_stage(self, tmp_path, capsys):
        bench = tmp_path / "bench"
        assert main(
            ["gen-bench", "--out", str(bench), "--targets", "4", "--sentences", "300", "--seed", "1"]
        ) == 0
        config_path = write_config(tmp_path, bench)
        assert main(["ingest", "--config", str(config_path)]) == 0
        out = capsys.readouterr().out
        assert "ingest: built" in out
        # rerun is cached
        assert main(["ingest", "--config", str(config_path)]) == 0
        assert "ingest: cached" in capsys.readouterr().out

    def test_run_all_and_no_mask(self, tmp_path, capsys):
        bench = tmp_path / "bench"
        main(["gen-bench", "--out", str(bench), "--targets", "4", "--sentences", "300", "--seed", "2"])
        config_path = write_config(tmp_path, bench)
        assert main(["run-all", "--config", str(config_path), "--deterministic"]) == 0
        out = capsys.readouterr().out
        assert "answers:" in out and "spearman" in out

        # --no-mask keeps corpus-unique tokens in the dataset
        assert main(["build-clf", "--config", str(config_path), "--no-mask"]) == 0
        out_dir = tmp_path / "out" / "clf-dataset"
        datasets = sorted(out_dir.iterdir())
        assert len(datasets) == 2  # masked and unmasked variants

        # --pair-budget flows through to the scoring stage (new cache key)
        assert main(["score", "--config", str(config_path), "--pair-budget", "50"]) == 0
        score_dirs = sorted((tmp_path / "out" / "scores").iterdir())
        assert len(score_dirs) == 2

    def test_cli_error_exit_code(self, tmp_path, capsys):
        assert main(["run-all", "--config", str(tmp_path / "none.ini")]) == 1
        assert "error" in capsys.readouterr().err

    def test_cli_degrees_parsing(self, tmp_path):
        bench = tmp_path / "bench"
        assert main(
            [
                "gen-bench", "--out", str(bench), "--targets", "3",
                "--sentences", "200", "--seed", "3", "--degrees", "0,0.5,1",
            ]
        ) == 0
        gold = (bench / "gold.tsv").read_text().strip().splitlines()
        assert [line.split("\t")[1] for line in gold] == ["0", "0.5", "1"]
