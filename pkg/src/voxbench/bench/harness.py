"""Benchmark orchestration: every extractor x reducer x classifier combination.

The pipeline per combination is silence removal, feature extraction,
dimensionality reduction (inductive for PCA, transductive for the neighbor
embedding), frame-level classification on a held-out-recording split, and
metric collection. Failures are recorded per combination, never fatal to a
sweep.
"""

from __future__ import annotations

import dataclasses
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..audio_io import load_wav
from ..classifiers import CLASSIFIER_NAMES, LabeledDataset, predict, train_by_name
from ..errors import PipelineError, UndefinedRoc
from ..features import ExtractorConfig, default_config, extract
from ..preprocessing import fit_silence_model, remove_silence
from ..reduction import DEFAULT_LEARNING_RATE, SneConfig, reduce_for_pipeline
from .corpus import CorpusManifest, derive_seed
from .reports import (
    REFERENCE_ACCURACY,
    REFERENCE_DISTINGUISHABLE,
    REFERENCE_NOTE,
    REFERENCE_SCALING,
    format_float,
    write_grid_table,
    write_report_json,
)

EXTRACTOR_NAMES = ("mfcc", "lpcc", "plp")
REDUCER_NAMES = ("sne", "pca")
DEFAULT_MAX_FRAMES_PER_FILE = 60
DEFAULT_RECALL_THRESHOLD = 0.5


@dataclass(frozen=True)
class ReducerSpec:
    """Reduction method plus its knobs; name defaults to the method."""

    method: str
    target_dim: int = 2
    perplexity: Optional[float] = None
    max_iter: int = 500
    learning_rate: float = DEFAULT_LEARNING_RATE
    kernel: str = "gaussian"

    def __post_init__(self):
        if self.method not in REDUCER_NAMES:
            raise ValueError(f"method must be one of {REDUCER_NAMES}")

    def sne_config(self, seed: int) -> SneConfig:
        return SneConfig(
            target_dim=self.target_dim,
            perplexity=self.perplexity,
            max_iter=self.max_iter,
            learning_rate=self.learning_rate,
            kernel=self.kernel,
            seed=seed,
        )


@dataclass(frozen=True)
class ClassifierSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class HarnessSettings:
    """Cross-combination knobs shared by a whole sweep."""

    max_frames_per_file: Optional[int] = DEFAULT_MAX_FRAMES_PER_FILE
    recall_threshold: float = DEFAULT_RECALL_THRESHOLD
    vad_u_threshold: float = 3.0
    vad_min_segment_ms: float = 50.0


@dataclass(frozen=True)
class SweepGrid:
    extractors: tuple[ExtractorConfig, ...]
    reducers: tuple[ReducerSpec, ...]
    classifiers: tuple[ClassifierSpec, ...]


def default_grid() -> SweepGrid:
    return SweepGrid(
        extractors=tuple(default_config(kind) for kind in EXTRACTOR_NAMES),
        reducers=tuple(ReducerSpec(method=m) for m in REDUCER_NAMES),
        classifiers=tuple(ClassifierSpec(name=n) for n in CLASSIFIER_NAMES),
    )


@dataclass(frozen=True)
class FrameTable:
    """Stacked per-frame features for a whole corpus."""

    features: np.ndarray
    speakers: np.ndarray  # dense 0..K-1
    recordings: np.ndarray  # index into manifest.entries
    class_count: int


def _subsample_rows(count: int, cap: Optional[int]) -> np.ndarray:
    if cap is None or count <= cap:
        return np.arange(count)
    return np.round(np.linspace(0, count - 1, cap)).astype(int)


def corpus_frames(
    manifest: CorpusManifest,
    config: ExtractorConfig,
    settings: HarnessSettings = HarnessSettings(),
) -> FrameTable:
    """Silence-trim and extract every recording into one frame table."""
    speaker_to_class = {sid: i for i, sid in enumerate(manifest.speaker_ids)}
    blocks, speakers, recordings = [], [], []
    sample_rate = manifest.sample_rate
    for rec_idx, entry in enumerate(manifest.entries):
        signal = load_wav(manifest.resolve(entry))
        if sample_rate is None:
            sample_rate = signal.sample_rate
        elif signal.sample_rate != sample_rate:
            raise PipelineError(
                f"{entry.path}: sample rate {signal.sample_rate} differs from corpus {sample_rate}"
            )
        model = fit_silence_model(signal, u_threshold=settings.vad_u_threshold)
        with warnings.catch_warnings():
            # speech-dense recordings trip the contamination warning by design
            warnings.simplefilter("ignore")
            trimmed = remove_silence(
                signal, model, min_segment_ms=settings.vad_min_segment_ms
            ).trimmed
        values = extract(trimmed, config, source=entry.path).values
        keep = _subsample_rows(values.shape[0], settings.max_frames_per_file)
        blocks.append(values[keep])
        speakers.append(np.full(keep.size, speaker_to_class[entry.speaker]))
        recordings.append(np.full(keep.size, rec_idx))
    return FrameTable(
        features=np.vstack(blocks),
        speakers=np.concatenate(speakers),
        recordings=np.concatenate(recordings),
        class_count=len(speaker_to_class),
    )


def holdout_train_mask(manifest: CorpusManifest, table: FrameTable, rotation: int) -> np.ndarray:
    """True for frames of training recordings; one recording per speaker held out.

    The split is by recording, so frames of one file never straddle the split;
    rotation picks which recording each speaker contributes to the test side.
    """
    held_out = set()
    by_speaker: dict[int, list[int]] = {}
    for rec_idx, entry in enumerate(manifest.entries):
        by_speaker.setdefault(entry.speaker, []).append(rec_idx)
    for recs in by_speaker.values():
        recs_sorted = sorted(recs, key=lambda r: manifest.entries[r].sample)
        held_out.add(recs_sorted[rotation % len(recs_sorted)])
    return ~np.isin(table.recordings, sorted(held_out))


# --- metrics -----------------------------------------------------------------

def confusion_matrix(true_labels, predicted, class_count: int) -> np.ndarray:
    matrix = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(matrix, (true_labels, predicted), 1)
    return matrix


def roc_points(test_labels, scores, speaker: int) -> np.ndarray:
    """One-vs-rest ROC sweep over the speaker's score channel.

    Points are sorted by false-positive rate and include (0,0) and (1,1);
    tied scores collapse into single sweep steps.
    """
    channel = np.asarray(scores)[:, speaker]
    positives = np.asarray(test_labels) == speaker
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRoc(f"speaker {speaker} lacks positive or negative test frames")
    order = np.argsort(-channel, kind="stable")
    sorted_pos = positives[order]
    sorted_scores = channel[order]
    tp = np.cumsum(sorted_pos)
    fp = np.cumsum(~sorted_pos)
    boundaries = np.nonzero(np.diff(sorted_scores))[0]
    idx = np.concatenate([boundaries, [positives.size - 1]])
    curve = np.column_stack([fp[idx] / n_neg, tp[idx] / n_pos])
    return np.vstack([[0.0, 0.0], curve])


_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # numpy < 2 fallback


def roc_auc(points) -> float:
    points = np.asarray(points, dtype=np.float64)
    return float(_trapezoid(points[:, 1], points[:, 0]))


def _evaluate_split(reduced, table, train_mask, classifier: ClassifierSpec, seed, settings, self_test=False):
    data = LabeledDataset(points=reduced, labels=table.speakers, train_mask=train_mask)
    model = train_by_name(classifier.name, data, seed=seed, **classifier.params)
    if self_test:  # validation hook: score the training frames themselves
        eval_points, true_labels, eval_recordings = data.train_points, data.train_labels, table.recordings[train_mask]
    else:
        eval_points, true_labels, eval_recordings = data.test_points, data.test_labels, table.recordings[~train_mask]
    predicted, scores = predict(model, eval_points)

    confusion = confusion_matrix(true_labels, predicted, table.class_count)
    total = int(confusion.sum())
    accuracy_pct = 100.0 * confusion.trace() / total
    row_sums = confusion.sum(axis=1)
    recalls = np.where(row_sums > 0, confusion.diagonal() / np.maximum(row_sums, 1), 0.0)
    distinguishable = int((recalls > settings.recall_threshold).sum())

    curves = {}
    for speaker in range(table.class_count):
        try:
            curves[str(speaker)] = roc_points(true_labels, scores, speaker).tolist()
        except UndefinedRoc:
            pass

    # recording-level majority vote, reported separately from frame accuracy
    rec_hits = []
    for rec in np.unique(eval_recordings):
        rows = eval_recordings == rec
        votes = np.bincount(predicted[rows], minlength=table.class_count)
        rec_hits.append(votes.argmax() == true_labels[rows][0])

    return {
        "frame_accuracy_pct": float(accuracy_pct),
        "per_speaker_recall": [float(r) for r in recalls],
        "distinguishable_count": distinguishable,
        "confusion": confusion.tolist(),
        "roc_curves": curves,
        "recording_accuracy_pct": float(100.0 * np.mean(rec_hits)),
        "test_frames": total,
    }


# --- single combination ---------------------------------------------------------

def run_combination(
    manifest: CorpusManifest,
    extractor: ExtractorConfig,
    reducer: ReducerSpec,
    classifier: ClassifierSpec,
    master_seed: int = 0,
    rotation: Optional[int] = None,
    settings: HarnessSettings = HarnessSettings(),
    self_test: bool = False,
) -> dict:
    """Run one pipeline combination end to end and return its report entry.

    self_test trains and evaluates on the same frames (a validation hook);
    normal runs hold one recording per speaker out for the test side.
    """
    if rotation is None:
        rotation = derive_seed(master_seed, "split")
    combo_tag = f"{extractor.kind}:{reducer.method}:{classifier.name}"
    entry = {
        "extractor": extractor.kind,
        "reducer": reducer.method,
        "classifier": classifier.name,
        "seed": derive_seed(master_seed, combo_tag),
        "transductive": reducer.method == "sne",
        "split_rotation": rotation % 10**9,
    }
    try:
        table = corpus_frames(manifest, extractor, settings)
        if self_test:
            train_mask = np.ones(table.speakers.size, dtype=bool)
        else:
            train_mask = holdout_train_mask(manifest, table, rotation)
        reduced, info = reduce_for_pipeline(
            table.features,
            train_mask,
            reducer.method,
            target_dim=reducer.target_dim,
            sne_config=reducer.sne_config(derive_seed(master_seed, f"embed:{extractor.kind}:{reducer.method}")),
        )
        entry["transductive"] = info["transductive"]
        entry.update(
            _evaluate_split(reduced, table, train_mask, classifier, entry["seed"], settings, self_test)
        )
        entry["status"] = "ok"
    except PipelineError as exc:
        entry["status"] = "failed"
        entry["failure_reason"] = f"{type(exc).__name__}: {exc}"
    return entry


# --- full sweep -------------------------------------------------------------------

def _manifest_metadata(manifest: CorpusManifest) -> dict:
    per_speaker: dict[int, int] = {}
    for entry in manifest.entries:
        per_speaker[entry.speaker] = per_speaker.get(entry.speaker, 0) + 1
    return {
        "files": [e.path for e in manifest.entries],
        "speakers": len(per_speaker),
        "recordings": len(manifest.entries),
        "sample_rate": manifest.sample_rate,
    }


def run_sweep(
    manifest: CorpusManifest,
    grid: Optional[SweepGrid] = None,
    master_seed: int = 0,
    settings: HarnessSettings = HarnessSettings(),
    out_dir=None,
    jobs: int = 1,
) -> dict:
    """Every grid combination on one shared split; optionally writes report files.

    Stage outputs are shared: one frame table per extractor, one embedding per
    extractor/reducer pair. Seeds derive from (master_seed, stage tag), so
    serial and parallel sweeps produce identical reports.
    """
    grid = grid or default_grid()
    rotation = derive_seed(master_seed, "split")

    tables: dict[str, FrameTable] = {}
    masks: dict[str, np.ndarray] = {}
    stage_errors: dict[str, str] = {}
    for extractor in grid.extractors:
        try:
            table = corpus_frames(manifest, extractor, settings)
            tables[extractor.kind] = table
            masks[extractor.kind] = holdout_train_mask(manifest, table, rotation)
        except PipelineError as exc:
            stage_errors[extractor.kind] = f"{type(exc).__name__}: {exc}"

    reduced: dict[tuple[str, str], np.ndarray] = {}
    transductive: dict[str, bool] = {}
    for extractor in grid.extractors:
        if extractor.kind in stage_errors:
            continue
        for reducer in grid.reducers:
            key = (extractor.kind, reducer.method)
            try:
                seed = derive_seed(master_seed, f"embed:{extractor.kind}:{reducer.method}")
                reduced[key], info = reduce_for_pipeline(
                    tables[extractor.kind].features,
                    masks[extractor.kind],
                    reducer.method,
                    target_dim=reducer.target_dim,
                    sne_config=reducer.sne_config(seed),
                )
                transductive[reducer.method] = info["transductive"]
            except PipelineError as exc:
                stage_errors[f"{extractor.kind}:{reducer.method}"] = f"{type(exc).__name__}: {exc}"

    def run_cell(extractor: ExtractorConfig, reducer: ReducerSpec, classifier: ClassifierSpec) -> dict:
        combo_tag = f"{extractor.kind}:{reducer.method}:{classifier.name}"
        entry = {
            "extractor": extractor.kind,
            "reducer": reducer.method,
            "classifier": classifier.name,
            "seed": derive_seed(master_seed, combo_tag),
            "transductive": reducer.method == "sne",
            "split_rotation": rotation % 10**9,
        }
        reason = stage_errors.get(extractor.kind) or stage_errors.get(
            f"{extractor.kind}:{reducer.method}"
        )
        if reason is not None:
            entry["status"] = "failed"
            entry["failure_reason"] = reason
            return entry
        try:
            entry.update(
                _evaluate_split(
                    reduced[(extractor.kind, reducer.method)],
                    tables[extractor.kind],
                    masks[extractor.kind],
                    classifier,
                    entry["seed"],
                    settings,
                )
            )
            entry["status"] = "ok"
        except PipelineError as exc:
            entry["status"] = "failed"
            entry["failure_reason"] = f"{type(exc).__name__}: {exc}"
        return entry

    cells = [
        (extractor, reducer, classifier)
        for reducer in grid.reducers
        for extractor in grid.extractors
        for classifier in grid.classifiers
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(lambda cell: run_cell(*cell), cells))
    else:
        entries = [run_cell(*cell) for cell in cells]
    entries.sort(key=lambda e: (e["reducer"], e["extractor"], e["classifier"]))

    report = {
        "master_seed": master_seed,
        "manifest": _manifest_metadata(manifest),
        "settings": dataclasses.asdict(settings),
        "grid": {
            "extractors": [dataclasses.asdict(e) for e in grid.extractors],
            "reducers": [dataclasses.asdict(r) for r in grid.reducers],
            "classifiers": [dataclasses.asdict(c) for c in grid.classifiers],
        },
        "combinations": entries,
        "reference_results": {
            "note": REFERENCE_NOTE,
            "accuracy": REFERENCE_ACCURACY,
            "distinguishable": REFERENCE_DISTINGUISHABLE,
            "scaling": REFERENCE_SCALING,
        },
    }
    if out_dir is not None:
        write_sweep_outputs(report, out_dir, grid)
    return report


def write_sweep_outputs(report: dict, out_dir, grid: Optional[SweepGrid] = None) -> None:
    """report.json plus the accuracy/distinguishable CSV mirrors per reducer."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report_json(report, out_dir / "report.json")

    entries = report["combinations"]
    by_key = {(e["reducer"], e["extractor"], e["classifier"]): e for e in entries}
    reducers = sorted({e["reducer"] for e in entries})
    extractors = list(dict.fromkeys(e["extractor"] for e in entries))
    classifiers = list(dict.fromkeys(e["classifier"] for e in entries))

    for reducer in reducers:
        def accuracy_cell(classifier, extractor, reducer=reducer):
            entry = by_key.get((reducer, extractor, classifier))
            if entry is None or entry["status"] != "ok":
                return None
            return format_float(entry["frame_accuracy_pct"])

        def distinguishable_cell(classifier, extractor, reducer=reducer):
            entry = by_key.get((reducer, extractor, classifier))
            if entry is None or entry["status"] != "ok":
                return None
            return str(entry["distinguishable_count"])

        write_grid_table(out_dir / f"accuracy_{reducer}.csv", accuracy_cell, classifiers, extractors)
        write_grid_table(
            out_dir / f"distinguishable_{reducer}.csv", distinguishable_cell, classifiers, extractors
        )


# --- speaker scaling curve ---------------------------------------------------------

def speaker_scaling_curve(
    manifest: CorpusManifest,
    extractor: ExtractorConfig,
    reducer: ReducerSpec,
    classifier: ClassifierSpec,
    speaker_counts,
    master_seed: int = 0,
    settings: HarnessSettings = HarnessSettings(),
) -> list[tuple[int, float, Optional[float]]]:
    """Accuracy of one combination versus the number of speakers.

    Returns (speaker_count, accuracy_pct, delta_per_speaker) rows; the delta
    column is the discrete rate of change between consecutive rows.
    """
    counts = sorted(speaker_counts)
    if counts[-1] > len(manifest.speaker_ids):
        raise ValueError("speaker_counts exceed the manifest's speaker count")
    rows: list[tuple[int, float, Optional[float]]] = []
    for count in counts:
        entry = run_combination(
            manifest.subset_speakers(count),
            extractor,
            reducer,
            classifier,
            master_seed=master_seed,
            settings=settings,
        )
        if entry["status"] != "ok":
            raise PipelineError(f"{count}-speaker run failed: {entry['failure_reason']}")
        accuracy = entry["frame_accuracy_pct"]
        delta = None
        if rows:
            prev_count, prev_acc, _ = rows[-1]
            delta = (accuracy - prev_acc) / (count - prev_count)
        rows.append((count, accuracy, delta))
    return rows


__all__ = [
    "ClassifierSpec",
    "FrameTable",
    "HarnessSettings",
    "ReducerSpec",
    "SweepGrid",
    "confusion_matrix",
    "corpus_frames",
    "default_grid",
    "holdout_train_mask",
    "roc_auc",
    "roc_points",
    "run_combination",
    "run_sweep",
    "speaker_scaling_curve",
    "write_sweep_outputs",
]
