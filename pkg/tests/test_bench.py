import json

import numpy as np
import pytest

from voxbench.audio_io import load_wav
from voxbench.bench import (
    ClassifierSpec,
    HarnessSettings,
    ReducerSpec,
    SweepGrid,
    corpus_frames,
    generate_synthetic_corpus,
    holdout_train_mask,
    load_manifest,
    roc_auc,
    roc_points,
    run_combination,
    run_sweep,
    speaker_scaling_curve,
)
from voxbench.errors import UndefinedRoc
from voxbench.features import default_config

FAST = HarnessSettings(max_frames_per_file=25)


def pairwise_auc(labels, channel, speaker):
    pos = channel[labels == speaker]
    neg = channel[labels != speaker]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (len(pos) * len(neg))


# --- corpus -------------------------------------------------------------------

def test_corpus_same_seed_is_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_synthetic_corpus(2, 2, 1.0, seed=5, out_dir=a)
    generate_synthetic_corpus(2, 2, 1.0, seed=5, out_dir=b)
    for name in sorted(p.name for p in a.iterdir()):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_corpus_speakers_have_distinct_spectra(tmp_path):
    manifest = generate_synthetic_corpus(2, 2, 1.5, seed=9, out_dir=tmp_path / "c")
    centroids = {}
    for entry in manifest.entries[:2], manifest.entries[2:]:
        sig = load_wav(manifest.resolve(entry[0]))
        spectrum = np.abs(np.fft.rfft(sig.samples)) ** 2
        freqs = np.fft.rfftfreq(len(sig.samples), 1 / sig.sample_rate)
        centroids[entry[0].speaker] = (freqs * spectrum).sum() / spectrum.sum()
    assert abs(centroids[0] - centroids[1]) > 50.0


def test_corpus_leading_silence_is_quiet(small_corpus):
    for entry in small_corpus.entries:
        sig = load_wav(small_corpus.resolve(entry))
        head = sig.samples[: int(0.2 * sig.sample_rate)]
        head_rms = np.sqrt(np.mean(head**2))
        total_rms = np.sqrt(np.mean(sig.samples**2))
        assert head_rms < 0.05 * total_rms


def test_manifest_roundtrip(small_corpus):
    loaded = load_manifest(small_corpus.root / "manifest.csv")
    assert [e.path for e in loaded.entries] == [e.path for e in small_corpus.entries]
    assert loaded.speaker_ids == [0, 1, 2]
    sub = loaded.subset_speakers(2)
    assert sub.speaker_ids == [0, 1]


def test_manifest_validation(tmp_path):
    from voxbench.bench import CorpusManifest, ManifestEntry

    with pytest.raises(ValueError):
        CorpusManifest(entries=(ManifestEntry("a.wav", 0, 0), ManifestEntry("b.wav", 0, 1)), root=tmp_path)
    with pytest.raises(ValueError):
        CorpusManifest(
            entries=(ManifestEntry("a.wav", 0, 0), ManifestEntry("b.wav", 1, 0)), root=tmp_path
        )


# --- split ---------------------------------------------------------------------

def test_holdout_split_never_straddles_recordings(small_corpus):
    table = corpus_frames(small_corpus, default_config("mfcc"), FAST)
    mask = holdout_train_mask(small_corpus, table, rotation=0)
    for rec in np.unique(table.recordings):
        rows = table.recordings == rec
        assert mask[rows].all() or (~mask[rows]).all()
    # exactly one held-out recording per speaker
    held = {
        small_corpus.entries[r].speaker
        for r in np.unique(table.recordings[~mask])
    }
    assert held == {0, 1, 2}


def test_holdout_rotation_changes_selection(small_corpus):
    table = corpus_frames(small_corpus, default_config("mfcc"), FAST)
    first = holdout_train_mask(small_corpus, table, rotation=0)
    second = holdout_train_mask(small_corpus, table, rotation=1)
    assert (first != second).any()


# --- ROC -------------------------------------------------------------------------

def test_roc_perfect_scores():
    labels = np.array([0, 0, 0, 1, 1, 1])
    scores = np.column_stack([1 - labels, labels]).astype(float)
    points = roc_points(labels, scores, speaker=1)
    assert [0.0, 1.0] in points.tolist()
    assert points[0].tolist() == [0.0, 0.0]
    assert points[-1].tolist() == [1.0, 1.0]
    assert roc_auc(points) == pytest.approx(1.0)


def test_roc_constant_scores_is_diagonal():
    labels = np.array([0, 1, 0, 1, 1, 0])
    scores = np.full((6, 2), 0.5)
    points = roc_points(labels, scores, speaker=0)
    assert roc_auc(points) == pytest.approx(0.5)


def test_roc_matches_pairwise_oracle():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 3, 300)
    scores = rng.normal(0, 1, (300, 3)) + 0.8 * np.eye(3)[labels]
    for speaker in range(3):
        points = roc_points(labels, scores, speaker)
        assert np.all(np.diff(points[:, 0]) >= 0)
        assert np.all(np.diff(points[:, 1]) >= 0)
        oracle = pairwise_auc(labels, scores[:, speaker], speaker)
        assert roc_auc(points) == pytest.approx(oracle, abs=1e-6)


def test_roc_undefined_without_both_classes():
    labels = np.zeros(5, dtype=int)
    with pytest.raises(UndefinedRoc):
        roc_points(labels, np.ones((5, 2)), speaker=0)


# --- single combination ------------------------------------------------------------

def test_combination_metrics_are_consistent(small_corpus):
    entry = run_combination(
        small_corpus,
        default_config("mfcc"),
        ReducerSpec("pca"),
        ClassifierSpec("weighted knn", {"k": 3}),
        master_seed=1,
        settings=FAST,
    )
    assert entry["status"] == "ok"
    confusion = np.array(entry["confusion"])
    assert confusion.sum() == entry["test_frames"]
    accuracy = 100.0 * confusion.trace() / confusion.sum()
    assert entry["frame_accuracy_pct"] == pytest.approx(accuracy, abs=0.1)
    recalls = np.array(entry["per_speaker_recall"])
    assert ((recalls >= 0) & (recalls <= 1)).all()
    assert entry["distinguishable_count"] == (recalls > 0.5).sum()
    assert 0 <= entry["frame_accuracy_pct"] <= 100
    assert set(entry["roc_curves"]) == {"0", "1", "2"}
    assert entry["transductive"] is False


def test_combination_self_test_hook(small_corpus):
    entry = run_combination(
        small_corpus,
        default_config("mfcc"),
        ReducerSpec("pca"),
        ClassifierSpec("weighted knn", {"k": 1}),
        master_seed=1,
        settings=FAST,
        self_test=True,
    )
    assert entry["frame_accuracy_pct"] == 100.0


def test_failed_stage_is_recorded_not_raised(small_corpus):
    bad = default_config("mfcc", filter_count=300, fft_size=512)  # more filters than FFT bins
    entry = run_combination(
        small_corpus, bad, ReducerSpec("pca"), ClassifierSpec("weighted knn"), settings=FAST
    )
    assert entry["status"] == "failed"
    assert "FilterbankTooDense" in entry["failure_reason"]


def test_two_speaker_sne_knn_beats_chance_with_margin(small_corpus):
    entry = run_combination(
        small_corpus.subset_speakers(2),
        default_config("mfcc"),
        ReducerSpec("sne"),
        ClassifierSpec("weighted knn", {"k": 5}),
        master_seed=0,
        settings=FAST,
    )
    assert entry["status"] == "ok"
    assert entry["frame_accuracy_pct"] >= 50.0 + 20.0  # chance is 50% for two speakers


# --- sweep ---------------------------------------------------------------------------

def test_default_grid_shape():
    from voxbench.bench import default_grid

    grid = default_grid()
    cells = len(grid.extractors) * len(grid.reducers) * len(grid.classifiers)
    assert cells == 30
    assert {c.name for c in grid.classifiers} == {
        "complex tree", "weighted knn", "fine svm", "feed forward", "bagged trees",
    }
    assert [e.kind for e in grid.extractors] == ["mfcc", "lpcc", "plp"]


def mini_grid():
    return SweepGrid(
        extractors=(default_config("mfcc"),),
        reducers=(ReducerSpec("pca"),),
        classifiers=(ClassifierSpec("weighted knn", {"k": 3}), ClassifierSpec("complex tree")),
    )


def test_sweep_produces_one_entry_per_cell(small_corpus, tmp_path):
    report = run_sweep(
        small_corpus, grid=mini_grid(), master_seed=3, settings=FAST, out_dir=tmp_path
    )
    assert len(report["combinations"]) == 2
    for entry in report["combinations"]:
        assert entry["status"] == "ok"
        assert "seed" in entry and "transductive" in entry
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "accuracy_pca.csv").exists()
    table = (tmp_path / "accuracy_pca.csv").read_text().splitlines()
    assert table[0] == "classifier,mfcc"
    assert {row.split(",")[0] for row in table[1:]} == {"weighted knn", "complex tree"}


def test_sweep_deterministic_and_parallel_identical(small_corpus, tmp_path):
    serial = tmp_path / "serial"
    threaded = tmp_path / "threaded"
    run_sweep(small_corpus, grid=mini_grid(), master_seed=5, settings=FAST, out_dir=serial)
    run_sweep(
        small_corpus, grid=mini_grid(), master_seed=5, settings=FAST, out_dir=threaded, jobs=2
    )
    for name in ("report.json", "accuracy_pca.csv", "distinguishable_pca.csv"):
        assert (serial / name).read_bytes() == (threaded / name).read_bytes(), name


def test_sweep_reports_reference_fixtures(small_corpus, tmp_path):
    report = run_sweep(small_corpus, grid=mini_grid(), master_seed=3, settings=FAST)
    reference = report["reference_results"]
    assert "different" in reference["note"]
    assert reference["scaling"]["mfcc"] == [87.2, 81.2, 74.5, 69.7, 67.1, 66.9]
    assert reference["accuracy"]["sne"]["weighted knn"]["mfcc"] == 68.9


def test_sweep_records_failures_in_csv(small_corpus, tmp_path):
    grid = SweepGrid(
        extractors=(default_config("mfcc", filter_count=300, fft_size=512),),
        reducers=(ReducerSpec("pca"),),
        classifiers=(ClassifierSpec("weighted knn"),),
    )
    report = run_sweep(small_corpus, grid=grid, master_seed=0, settings=FAST, out_dir=tmp_path)
    assert report["combinations"][0]["status"] == "failed"
    table = (tmp_path / "accuracy_pca.csv").read_text()
    assert "failed" in table


def test_report_floats_have_six_significant_digits(small_corpus, tmp_path):
    run_sweep(small_corpus, grid=mini_grid(), master_seed=3, settings=FAST, out_dir=tmp_path)
    payload = json.loads((tmp_path / "report.json").read_text())
    checked = 0
    for entry in payload["combinations"]:
        for recall in entry["per_speaker_recall"]:
            assert float(f"{recall:.6g}") == recall
            checked += 1
    assert checked > 0


# --- scaling curve ----------------------------------------------------------------------

def test_scaling_curve_rows_and_deltas(small_corpus):
    rows = speaker_scaling_curve(
        small_corpus,
        default_config("mfcc"),
        ReducerSpec("pca"),
        ClassifierSpec("weighted knn", {"k": 3}),
        speaker_counts=[2, 3],
        master_seed=2,
        settings=FAST,
    )
    assert len(rows) == 2
    assert rows[0][2] is None
    (n2, acc2, _), (n3, acc3, delta) = rows
    assert (n2, n3) == (2, 3)
    assert delta == pytest.approx(acc3 - acc2)
