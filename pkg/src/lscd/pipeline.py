"""Pipeline orchestration: configuration, staged execution with on-disk
caching, and the run manifest.

Every stage writes its artifacts under ``output_dir/<stage>/<key>/`` where
the key is a content hash over the stage's inputs (source file hashes,
upstream stage keys, the relevant configuration values and the derived
seed). A stage directory counts as valid only once its ``.complete``
sentinel exists, so interrupted runs are rebuilt. Stages always read their
inputs back from the upstream artifact files, never from in-process state;
a cached and a freshly built upstream therefore feed downstream stages
identically.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import platform
import shutil
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, benchmark as benchmark_mod
from .align import (
    DEFAULT_PREPROCESSING,
    AlignedPair,
    align as align_spaces,
    load_rotation_tsv,
    save_rotation_tsv,
)
from .context import (
    EncoderConfig,
    UseSet,
    export_uses,
    extract_uses,
    import_uses,
    load_classifier,
    save_classifier,
    train_time_classifier,
)
from .corpus import (
    T1,
    T2,
    apply_threshold,
    build_clf_dataset,
    build_vocabulary,
    frequency_threshold,
    load_corpus,
    load_targets,
    write_corpus,
    write_dataset_tsv,
)
from .ensemble import (
    CHANGED,
    Ranking,
    Theta,
    binarize,
    combine,
    grid_search_theta,
    ranks_from_scores,
    theta_from_accuracy,
)
from .errors import LscdError, StageError
from .evaluate import binary_accuracy, load_binary_gold, load_gold, spearman
from .scoring import (
    CONTEXT_DEPENDENT,
    CONTEXT_FREE,
    contextual_score,
    fill_unscorable,
    read_scores_tsv,
    static_score,
    write_scores_tsv,
)
from .sgns import SgnsConfig, load_vectors, save_vectors, train_sgns

ANSWER_DIR = "answers"
MANIFEST_NAME = "manifest.json"
RUN_SENTINEL = "run.complete"

_FLOAT_FMT = ".9g"


@dataclass
class PipelineConfig:
    """Everything a run needs; mirrors the key=value config file."""

    corpus_t1: Path
    corpus_t2: Path
    targets: Path
    output_dir: Path
    gold: Path | None = None
    binary_gold: Path | None = None
    masked: bool = True
    threshold: str = "auto"  # "auto", "none" or an integer literal
    sgns: SgnsConfig = field(default_factory=SgnsConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    align_steps: tuple[str, ...] = DEFAULT_PREPROCESSING
    pair_budget: int | None = None
    theta: float | None = None  # None: predict from classifier accuracy
    grid_step: float | None = None
    seed: int = 42
    deterministic: bool = True

    def validate(self) -> None:
        for name in ("corpus_t1", "corpus_t2", "targets", "gold", "binary_gold"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"config path {name} = {path} does not exist")
        if self.threshold not in ("auto", "none"):
            int(self.threshold)  # raises ValueError if not an integer literal
        if self.theta is not None and not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta override must be in [0, 1]")

    def threshold_for(self, total_sentences: int) -> int | None:
        if self.threshold == "auto":
            return frequency_threshold(total_sentences)
        if self.threshold == "none":
            return None
        return int(self.threshold)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key, value in d.items():
            if isinstance(value, Path):
                d[key] = str(value)
        d["align_steps"] = list(self.align_steps)
        return d


def _parse_optional(text: str):
    return None if text.strip().lower() in ("", "none") else text.strip()


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    """Read the key=value config file (section headers, one key per line).

    Every key has a documented default; unknown keys are rejected so typos
    cannot silently fall back to defaults.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file {path} not found")

    known = {
        "paths": {"corpus_t1", "corpus_t2", "targets", "gold", "binary_gold", "output_dir"},
        "corpus": {"masked", "threshold"},
        "sgns": {
            "dimension",
            "window",
            "negatives",
            "epochs",
            "learning_rate",
            "noise_exponent",
            "subsample_threshold",
        },
        "encoder": {"dimension", "context_radius", "epochs", "learning_rate"},
        "align": {"preprocessing"},
        "scoring": {"pair_budget"},
        "ensemble": {"theta", "grid_step"},
        "run": {"seed", "deterministic"},
    }
    for section in parser.sections():
        if section not in known:
            raise ValueError(f"unknown config section [{section}]")
        unknown = set(parser[section]) - known[section]
        if unknown:
            raise ValueError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
            )

    def get(section, key, fallback):
        return parser.get(section, key, fallback=fallback)

    paths = parser["paths"] if parser.has_section("paths") else {}
    for required in ("corpus_t1", "corpus_t2", "targets"):
        if required not in paths:
            raise ValueError(f"config is missing [paths] {required}")

    sgns_defaults = SgnsConfig()
    sub = _parse_optional(get("sgns", "subsample_threshold", "none") or "none")
    sgns = SgnsConfig(
        dimension=int(get("sgns", "dimension", sgns_defaults.dimension)),
        window=int(get("sgns", "window", sgns_defaults.window)),
        negatives=int(get("sgns", "negatives", sgns_defaults.negatives)),
        epochs=int(get("sgns", "epochs", sgns_defaults.epochs)),
        initial_learning_rate=float(
            get("sgns", "learning_rate", sgns_defaults.initial_learning_rate)
        ),
        noise_exponent=float(
            get("sgns", "noise_exponent", sgns_defaults.noise_exponent)
        ),
        subsample_threshold=None if sub is None else float(sub),
    )
    enc_defaults = EncoderConfig()
    encoder = EncoderConfig(
        dimension=int(get("encoder", "dimension", enc_defaults.dimension)),
        context_radius=int(
            get("encoder", "context_radius", enc_defaults.context_radius)
        ),
        epochs=int(get("encoder", "epochs", enc_defaults.epochs)),
        learning_rate=float(
            get("encoder", "learning_rate", enc_defaults.learning_rate)
        ),
    )

    gold = _parse_optional(get("paths", "gold", "none") or "none")
    binary_gold = _parse_optional(get("paths", "binary_gold", "none") or "none")
    budget = _parse_optional(get("scoring", "pair_budget", "none") or "none")
    theta = _parse_optional(get("ensemble", "theta", "auto") or "auto")
    if theta == "auto":
        theta = None
    grid_step = _parse_optional(get("ensemble", "grid_step", "none") or "none")

    config = PipelineConfig(
        corpus_t1=Path(paths["corpus_t1"]),
        corpus_t2=Path(paths["corpus_t2"]),
        targets=Path(paths["targets"]),
        output_dir=Path(get("paths", "output_dir", "out")),
        gold=Path(gold) if gold else None,
        binary_gold=Path(binary_gold) if binary_gold else None,
        masked=parser.getboolean("corpus", "masked", fallback=True),
        threshold=get("corpus", "threshold", "auto"),
        sgns=sgns,
        encoder=encoder,
        align_steps=tuple(
            s.strip()
            for s in get("align", "preprocessing", "normalize,center").split(",")
            if s.strip()
        ),
        pair_budget=int(budget) if budget else None,
        theta=float(theta) if theta is not None else None,
        grid_step=float(grid_step) if grid_step else None,
        seed=int(get("run", "seed", 42)),
        deterministic=parser.getboolean("run", "deterministic", fallback=True),
    )
    if overrides:
        config = dataclasses.replace(config, **overrides)
    config.validate()
    return config


def derive_seed(seed: int, label: str) -> int:
    """Stable per-stage seed derived from the global seed."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:4], "little")


def _hash_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _key_of(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class StageResult:
    name: str
    key: str
    path: Path
    cached: bool


class Pipeline:
    """Executes stages on demand, reusing cached artifacts when the inputs,
    configuration and seeds are unchanged."""

    def __init__(self, config: PipelineConfig):
        config.validate()
        self.cfg = config
        self.stages: dict[str, StageResult] = {}
        self._file_hashes: dict[str, str] = {}

    # -- plumbing ---------------------------------------------------------

    def _hash(self, path: Path | None) -> str | None:
        if path is None:
            return None
        key = str(path)
        if key not in self._file_hashes:
            self._file_hashes[key] = _hash_file(path)
        return self._file_hashes[key]

    def _ensure(self, name: str, payload: dict, build) -> StageResult:
        if name in self.stages:
            return self.stages[name]
        key = _key_of(payload)
        directory = self.cfg.output_dir / name / key
        sentinel = directory / ".complete"
        if sentinel.exists():
            result = StageResult(name, key, directory, cached=True)
        else:
            if directory.exists():
                shutil.rmtree(directory)
            directory.mkdir(parents=True)
            try:
                build(directory)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(name, exc) from exc
            sentinel.touch()
            result = StageResult(name, key, directory, cached=False)
        self.stages[name] = result
        return result

    # -- stages -----------------------------------------------------------

    def ingest(self) -> StageResult:
        """Load and validate both corpora, apply the frequency threshold for
        the static branch, and record corpus statistics."""
        cfg = self.cfg
        payload = {
            "stage": "ingest",
            "corpus_t1": self._hash(cfg.corpus_t1),
            "corpus_t2": self._hash(cfg.corpus_t2),
            "targets": self._hash(cfg.targets),
            "threshold": cfg.threshold,
        }

        def build(directory: Path):
            c1 = load_corpus(cfg.corpus_t1, T1)
            c2 = load_corpus(cfg.corpus_t2, T2)
            targets = load_targets(cfg.targets)
            vocab = build_vocabulary(c1, c2)
            total = c1.sentence_count + c2.sentence_count
            threshold = cfg.threshold_for(total)
            if threshold:
                f1 = apply_threshold(c1, vocab, threshold, targets)
                f2 = apply_threshold(c2, vocab, threshold, targets)
            else:
                f1, f2 = c1, c2
            write_corpus(f1, directory / "corpus_t1.txt")
            write_corpus(f2, directory / "corpus_t2.txt")
            stats = {
                "sentences_t1": c1.sentence_count,
                "sentences_t2": c2.sentence_count,
                "vocabulary_size": len(vocab),
                "threshold": threshold,
                "filtered_sentences_t1": f1.sentence_count,
                "filtered_sentences_t2": f2.sentence_count,
                "targets": len(targets),
            }
            (directory / "stats.json").write_text(
                json.dumps(stats, indent=2, sort_keys=True)
            )

        return self._ensure("ingest", payload, build)

    def train_static(self) -> StageResult:
        cfg = self.cfg
        ingest = self.ingest()
        seeds = {p: derive_seed(cfg.seed, f"sgns-{p}") for p in (T1, T2)}
        payload = {
            "stage": "static",
            "ingest": ingest.key,
            "sgns": dataclasses.asdict(dataclasses.replace(cfg.sgns, seed=0)),
            "seeds": seeds,
        }

        def build(directory: Path):
            for period in (T1, T2):
                corpus = load_corpus(ingest.path / f"corpus_{period}.txt", period)
                space = train_sgns(
                    corpus, dataclasses.replace(cfg.sgns, seed=seeds[period])
                )
                save_vectors(space, directory / f"{period}.vec")

        return self._ensure("static", payload, build)

    def align(self) -> StageResult:
        cfg = self.cfg
        static = self.train_static()
        payload = {
            "stage": "align",
            "static": static.key,
            "steps": list(cfg.align_steps),
        }

        def build(directory: Path):
            s1 = load_vectors(static.path / f"{T1}.vec")
            s2 = load_vectors(static.path / f"{T2}.vec")
            pair = align_spaces(s1, s2, steps=cfg.align_steps)
            save_vectors(pair.space_t1, directory / f"{T1}.vec")
            save_vectors(pair.space_t2, directory / f"{T2}.vec")
            save_rotation_tsv(pair.rotation, directory / "rotation.tsv")
            (directory / "shared_vocabulary.txt").write_text(
                "\n".join(pair.shared_vocabulary) + "\n", encoding="utf-8"
            )

        return self._ensure("align", payload, build)

    def build_clf(self) -> StageResult:
        cfg = self.cfg
        seed = derive_seed(cfg.seed, "clf-dataset")
        payload = {
            "stage": "clf-dataset",
            "corpus_t1": self._hash(cfg.corpus_t1),
            "corpus_t2": self._hash(cfg.corpus_t2),
            "masked": cfg.masked,
            "seed": seed,
        }

        def build(directory: Path):
            c1 = load_corpus(cfg.corpus_t1, T1)
            c2 = load_corpus(cfg.corpus_t2, T2)
            dataset = build_clf_dataset(c1, c2, masked=cfg.masked, seed=seed)
            write_dataset_tsv(dataset, directory / "dataset.tsv")
            meta = {"masked": dataset.masked, "mask_token": dataset.mask_token}
            (directory / "meta.json").write_text(
                json.dumps(meta, indent=2, sort_keys=True)
            )

        return self._ensure("clf-dataset", payload, build)

    def train_clf(self) -> StageResult:
        cfg = self.cfg
        dataset_stage = self.build_clf()
        seed = derive_seed(cfg.seed, "clf-train")
        payload = {
            "stage": "clf-model",
            "dataset": dataset_stage.key,
            "corpus_t1": self._hash(cfg.corpus_t1),
            "corpus_t2": self._hash(cfg.corpus_t2),
            "encoder": dataclasses.asdict(dataclasses.replace(cfg.encoder, seed=0)),
            "seed": seed,
        }

        def build(directory: Path):
            from .corpus import read_dataset_tsv

            meta = json.loads((dataset_stage.path / "meta.json").read_text())
            dataset = read_dataset_tsv(
                dataset_stage.path / "dataset.tsv",
                masked=meta["masked"],
                mask_token=meta["mask_token"],
            )
            # The full joint vocabulary (plus the mask token) means later
            # extraction over the raw corpora never meets OOV tokens.
            c1 = load_corpus(cfg.corpus_t1, T1)
            c2 = load_corpus(cfg.corpus_t2, T2)
            vocabulary = build_vocabulary(c1, c2).words + [meta["mask_token"]]
            model, metrics = train_time_classifier(
                dataset,
                dataclasses.replace(cfg.encoder, seed=seed),
                vocabulary=vocabulary,
            )
            save_classifier(model, directory / "model.npz")
            rows = [
                ("accuracy", metrics.accuracy),
                ("accuracy_t1", metrics.per_label_accuracy[T1]),
                ("accuracy_t2", metrics.per_label_accuracy[T2]),
                ("test_count_t1", metrics.example_counts[T1]),
                ("test_count_t2", metrics.example_counts[T2]),
            ]
            with open(directory / "metrics.tsv", "w", encoding="utf-8") as fh:
                for name, value in rows:
                    fh.write(f"{name}\t{format(value, _FLOAT_FMT)}\n")

        return self._ensure("clf-model", payload, build)

    def extract(self) -> StageResult:
        cfg = self.cfg
        model_stage = self.train_clf()
        payload = {
            "stage": "uses",
            "model": model_stage.key,
            "corpus_t1": self._hash(cfg.corpus_t1),
            "corpus_t2": self._hash(cfg.corpus_t2),
            "targets": self._hash(cfg.targets),
        }

        def build(directory: Path):
            model = load_classifier(model_stage.path / "model.npz")
            targets = load_targets(cfg.targets)
            for period, path in ((T1, cfg.corpus_t1), (T2, cfg.corpus_t2)):
                corpus = load_corpus(path, period)
                uses = extract_uses(model, corpus, targets)
                export_uses(uses, directory / f"uses_{period}.tsv")

        return self._ensure("uses", payload, build)

    def score(self) -> StageResult:
        cfg = self.cfg
        align_stage = self.align()
        uses_stage = self.extract()
        seed = derive_seed(cfg.seed, "mpe")
        payload = {
            "stage": "scores",
            "align": align_stage.key,
            "uses": uses_stage.key,
            "targets": self._hash(cfg.targets),
            "pair_budget": cfg.pair_budget,
            "seed": seed,
        }

        def build(directory: Path):
            targets = load_targets(cfg.targets)
            s1 = load_vectors(align_stage.path / f"{T1}.vec")
            s2 = load_vectors(align_stage.path / f"{T2}.vec")
            rotation = load_rotation_tsv(align_stage.path / "rotation.tsv")
            shared = (
                (align_stage.path / "shared_vocabulary.txt")
                .read_text(encoding="utf-8")
                .splitlines()
            )
            pair = AlignedPair(
                space_t1=s1, space_t2=s2, rotation=rotation, shared_vocabulary=shared
            )
            cf = static_score(pair, targets)

            def by_word(period: str) -> dict[str, UseSet]:
                sets = import_uses(uses_stage.path / f"uses_{period}.tsv")
                return {u.word: u for u in sets}

            uses_t1 = by_word(T1)
            uses_t2 = by_word(T2)
            dim = cfg.encoder.dimension
            pairs = []
            for word in targets:
                u1 = uses_t1.get(word) or UseSet(word, T1, np.empty((0, dim)), [])
                u2 = uses_t2.get(word) or UseSet(word, T2, np.empty((0, dim)), [])
                pairs.append((u1, u2))
            cd = contextual_score(
                pairs, targets, pair_budget=cfg.pair_budget, seed=seed
            )
            write_scores_tsv([cf, cd], directory / "scores.tsv")

        return self._ensure("scores", payload, build)

    def ensemble(self) -> StageResult:
        cfg = self.cfg
        scores_stage = self.score()
        model_stage = self.train_clf()
        payload = {
            "stage": "ensemble",
            "scores": scores_stage.key,
            "model": model_stage.key,
            "theta": cfg.theta,
        }

        def build(directory: Path):
            by_model = read_scores_tsv(scores_stage.path / "scores.tsv")
            cf = fill_unscorable(by_model[CONTEXT_FREE])
            cd = fill_unscorable(by_model[CONTEXT_DEPENDENT])
            r_cf = ranks_from_scores(cf)
            r_cd = ranks_from_scores(cd)

            accuracy = _read_metric(model_stage.path / "metrics.tsv", "accuracy")
            if cfg.theta is not None:
                theta = Theta(value=cfg.theta, provenance="manual")
            else:
                theta = theta_from_accuracy(accuracy)
            combined = combine(r_cf, r_cd, theta)
            labels = binarize(combined)

            with open(directory / "theta.tsv", "w", encoding="utf-8") as fh:
                fh.write(f"theta\t{format(theta.value, _FLOAT_FMT)}\n")
                fh.write(f"provenance\t{theta.provenance}\n")
                fh.write(f"classifier_accuracy\t{format(accuracy, _FLOAT_FMT)}\n")

            flags = {
                w: ",".join(
                    m
                    for m, s in ((CONTEXT_FREE, cf), (CONTEXT_DEPENDENT, cd))
                    if w in s.unscorable
                )
                for w in r_cf.ranks
            }
            with open(directory / "ranks.tsv", "w", encoding="utf-8") as fh:
                fh.write("word\tcontext_free\tcontext_dependent\tensemble\tmedian_filled\n")
                for w in r_cf.ranks:
                    fh.write(
                        f"{w}\t{format(r_cf.ranks[w], '.6g')}"
                        f"\t{format(r_cd.ranks[w], '.6g')}"
                        f"\t{format(combined.ranks[w], '.6g')}"
                        f"\t{flags[w] or '-'}\n"
                    )

            _write_graded(directory / "graded_context_free.tsv", r_cf)
            _write_graded(directory / "graded_context_dependent.tsv", r_cd)
            _write_graded(directory / "graded_ensemble.tsv", combined)
            with open(directory / "binary_ensemble.tsv", "w", encoding="utf-8") as fh:
                for w in combined.ranks:
                    fh.write(f"{w}\t{1 if labels[w] == CHANGED else 0}\n")

        return self._ensure("ensemble", payload, build)

    def evaluate(self) -> StageResult:
        cfg = self.cfg
        if cfg.gold is None and cfg.binary_gold is None:
            raise StageError(
                "evaluate", ValueError("no gold file configured; nothing to evaluate")
            )
        ensemble_stage = self.ensemble()
        payload = {
            "stage": "evaluate",
            "ensemble": ensemble_stage.key,
            "gold": self._hash(cfg.gold),
            "binary_gold": self._hash(cfg.binary_gold),
            "grid_step": cfg.grid_step,
        }

        def build(directory: Path):
            rankings = _read_rankings(ensemble_stage.path / "ranks.tsv")
            rows: list[tuple[str, str, float]] = []
            if cfg.gold is not None:
                gold = load_gold(cfg.gold)
                for model in (CONTEXT_FREE, CONTEXT_DEPENDENT, "ensemble"):
                    rows.append(
                        (model, "spearman", spearman(rankings[model], gold))
                    )
                if cfg.grid_step is not None:
                    best = grid_search_theta(
                        rankings[CONTEXT_FREE],
                        rankings[CONTEXT_DEPENDENT],
                        gold.graded,
                        step=cfg.grid_step,
                    )
                    rows.append(("ensemble", "theta_grid_search", best.value))
            if cfg.binary_gold is not None:
                binary_gold = load_binary_gold(cfg.binary_gold)
                predicted = _read_binary(ensemble_stage.path / "binary_ensemble.tsv")
                rows.append(
                    ("ensemble", "binary_accuracy", binary_accuracy(predicted, binary_gold))
                )
            with open(directory / "report.tsv", "w", encoding="utf-8") as fh:
                fh.write("model\tmetric\tvalue\n")
                for model, metric, value in rows:
                    fh.write(f"{model}\t{metric}\t{format(value, _FLOAT_FMT)}\n")
            summary = [
                f"{model} {metric} = {format(value, '.4f')}"
                for model, metric, value in rows
            ]
            (directory / "summary.txt").write_text(
                "\n".join(summary) + "\n", encoding="utf-8"
            )

        return self._ensure("evaluate", payload, build)

    # -- whole runs -------------------------------------------------------

    def run_all(self) -> dict:
        """Execute the full pipeline, publish the answer files and write the
        run manifest. Returns a report of what ran and what was reused."""
        cfg = self.cfg
        ensemble_stage = self.ensemble()
        if cfg.gold is not None or cfg.binary_gold is not None:
            self.evaluate()

        run_sentinel = cfg.output_dir / RUN_SENTINEL
        if run_sentinel.exists():
            run_sentinel.unlink()

        answers = cfg.output_dir / ANSWER_DIR
        answers.mkdir(parents=True, exist_ok=True)
        for name in (
            "graded_context_free.tsv",
            "graded_context_dependent.tsv",
            "graded_ensemble.tsv",
            "binary_ensemble.tsv",
        ):
            shutil.copyfile(ensemble_stage.path / name, answers / name)

        manifest = {
            "package_version": __version__,
            "python_version": platform.python_version(),
            "numpy_version": np.__version__,
            "config": self.cfg.as_dict(),
            "inputs": {
                "corpus_t1": self._hash(cfg.corpus_t1),
                "corpus_t2": self._hash(cfg.corpus_t2),
                "targets": self._hash(cfg.targets),
                "gold": self._hash(cfg.gold),
                "binary_gold": self._hash(cfg.binary_gold),
            },
            "derived_seeds": {
                label: derive_seed(cfg.seed, label)
                for label in ("sgns-t1", "sgns-t2", "clf-dataset", "clf-train", "mpe")
            },
            "stages": {name: res.key for name, res in sorted(self.stages.items())},
        }
        (cfg.output_dir / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        run_sentinel.touch()
        return self.report()

    def report(self) -> dict:
        return {
            "stages": {
                name: {"key": res.key, "cached": res.cached, "path": str(res.path)}
                for name, res in self.stages.items()
            },
            "output_dir": str(self.cfg.output_dir),
        }


def _write_graded(path: Path, ranking: Ranking) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word, rank in ranking.ranks.items():
            fh.write(f"{word}\t{format(rank, '.6g')}\n")


def _read_metric(path: Path, name: str) -> float:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, value = line.rstrip("\n").split("\t")
            if key == name:
                return float(value)
    raise LscdError(f"metric {name!r} not found in {path}")


def _read_rankings(path: Path) -> dict[str, Ranking]:
    columns = {CONTEXT_FREE: {}, CONTEXT_DEPENDENT: {}, "ensemble": {}}
    with open(path, encoding="utf-8") as fh:
        fh.readline()  # header
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            word = parts[0]
            columns[CONTEXT_FREE][word] = float(parts[1])
            columns[CONTEXT_DEPENDENT][word] = float(parts[2])
            columns["ensemble"][word] = float(parts[3])
    return {
        name: Ranking(ranks=ranks, source=name) for name, ranks in columns.items()
    }


def _read_binary(path: Path) -> dict[str, int]:
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word, value = line.rstrip("\n").split("\t")
            labels[word] = int(value)
    return labels


def run_benchmark_generation(
    out_dir: str | Path,
    n_targets: int,
    sentences: int,
    seed: int,
    degrees: list[float] | None = None,
) -> dict[str, Path]:
    """Generate a synthetic benchmark and write its files to `out_dir`."""
    if degrees is None:
        degrees = list(np.linspace(0.0, 1.0, n_targets))
    bench = benchmark_mod.generate_shift_benchmark(
        n_targets=n_targets, degrees=degrees, base_sentences=sentences, seed=seed
    )
    return benchmark_mod.write_benchmark(bench, out_dir)
