"""Command-line interface: synth, vad, extract, reduce, train, predict, bench, roc."""

from __future__ import annotations

import argparse
import csv
import json
import pickle
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audio_io import load_wav, write_wav
from .bench import (
    ClassifierSpec,
    HarnessSettings,
    ReducerSpec,
    SweepGrid,
    generate_synthetic_corpus,
    load_manifest,
    load_report_json,
    roc_auc,
    run_sweep,
    speaker_scaling_curve,
    write_roc_csv,
)
from .bench.reports import format_float, write_scaling_curve
from .classifiers import CLASSIFIER_NAMES, LabeledDataset, predict, train_by_name
from .errors import PipelineError
from .features import ExtractorConfig, default_config, extract
from .preprocessing import fit_silence_model, remove_silence
from .reduction import SneConfig, pca_fit, pca_transform, sne_fit

MODEL_FORMAT = "voxbench-model"
MODEL_FORMAT_VERSION = 1

MODEL_ALIASES = {
    "knn": "weighted knn",
    "tree": "complex tree",
    "bagged": "bagged trees",
    "svm": "fine svm",
    "ffnn": "feed forward",
}


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


# --- feature/embedding CSV interchange ------------------------------------------

def write_feature_csv(path, rows, coeff_count, prefix):
    """Rows of (source, speaker, frame, vector) with c1..cN / y1..yN columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "speaker", "frame", *(f"{prefix}{i+1}" for i in range(coeff_count))])
        for source, speaker, frame, vector in rows:
            writer.writerow([source, speaker, frame, *(format_float(v) for v in vector)])


def read_feature_csv(path):
    """Returns (sources, speakers, frames, matrix); speaker -1 when unlabeled."""
    sources, speakers, frames, vectors = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        value_cols = len(header) - 3
        for row in reader:
            sources.append(row[0])
            speakers.append(int(row[1]) if row[1] not in ("", "None") else -1)
            frames.append(int(row[2]))
            vectors.append([float(v) for v in row[3 : 3 + value_cols]])
    return sources, np.array(speakers), np.array(frames), np.array(vectors)


# --- subcommand handlers ----------------------------------------------------------

def cmd_synth(args) -> int:
    manifest = generate_synthetic_corpus(
        n_speakers=args.speakers,
        samples_each=args.samples,
        seconds=args.seconds,
        seed=args.seed,
        out_dir=args.out_dir,
        sample_rate=args.sample_rate,
    )
    print(f"wrote {len(manifest.entries)} recordings and manifest.csv under {args.out_dir}")
    return 0


def cmd_vad(args) -> int:
    signal = load_wav(args.in_path)
    model = fit_silence_model(signal, u_threshold=args.threshold, frame_ms=args.block_ms)
    result = remove_silence(
        signal,
        model,
        min_segment_ms=args.min_segment_ms,
        endpoints_only=args.endpoints_only,
    )
    write_wav(args.out_path, result.trimmed)
    if args.report:
        payload = {
            "segments": [
                {
                    "start_sample": int(s),
                    "end_sample": int(e),
                    "start_seconds": float(format_float(s / signal.sample_rate)),
                    "end_seconds": float(format_float(e / signal.sample_rate)),
                }
                for s, e in result.segments
            ],
            "input_samples": len(signal),
            "trimmed_samples": len(result.trimmed),
            "sample_rate": signal.sample_rate,
        }
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"kept {len(result.trimmed)} of {len(signal)} samples in {len(result.segments)} segments")
    return 0


def _extractor_config_from_args(args) -> ExtractorConfig:
    overrides = {}
    for attr, key in (
        ("pre_emphasis", "pre_emphasis_a"),
        ("frame_ms", "frame_ms"),
        ("hop_ms", "hop_ms"),
        ("fft_size", "fft_size"),
        ("filter_count", "filter_count"),
        ("lpc_order", "lpc_order_q"),
        ("num_ceps", "num_ceps"),
        ("dct", "dct_kind"),
    ):
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    if args.include_c0:
        overrides["include_c0"] = True
    return default_config(args.method, **overrides)


def cmd_extract(args) -> int:
    config = _extractor_config_from_args(args)
    in_path = Path(args.in_path)
    rows = []
    if in_path.suffix.lower() == ".csv":
        manifest = load_manifest(in_path)
        jobs = [(manifest.resolve(e), e.path, e.speaker) for e in manifest.entries]
    else:
        jobs = [(in_path, in_path.name, -1)]
    for wav_path, source, speaker in jobs:
        signal = load_wav(wav_path)
        model = fit_silence_model(signal)
        trimmed = remove_silence(signal, model).trimmed if not args.no_vad else signal
        feats = extract(trimmed, config, speaker_label=speaker, source=source)
        for frame_idx, vector in enumerate(feats.values):
            rows.append((source, speaker, frame_idx, vector))
    write_feature_csv(args.out_path, rows, config.num_ceps, "c")
    print(f"wrote {len(rows)} frames x {config.num_ceps} coefficients to {args.out_path}")
    return 0


def cmd_reduce(args) -> int:
    sources, speakers, frames, matrix = read_feature_csv(args.in_path)
    if args.method == "pca":
        model = pca_fit(matrix, args.dim)
        reduced = pca_transform(model, matrix)
        trace = None
    else:
        config = SneConfig(
            target_dim=args.dim,
            perplexity=args.perplexity,
            seed=args.seed,
            max_iter=args.max_iter,
            kernel=args.kernel,
        )
        embedding = sne_fit(matrix, config)
        reduced = embedding.coords
        trace = embedding.cost_trace
    rows = [
        (source, speaker, frame, vector)
        for source, speaker, frame, vector in zip(sources, speakers, frames, reduced)
    ]
    write_feature_csv(args.out_path, rows, args.dim, "y")
    if args.trace and trace is not None:
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "cost"])
            for i, cost in enumerate(trace):
                writer.writerow([i, format_float(cost)])
    print(f"wrote {reduced.shape[0]} x {args.dim} embedding to {args.out_path}")
    return 0


def _parse_params(spec: str | None) -> dict:
    if not spec:
        return {}
    params = {}
    for item in spec.split(","):
        key, _, raw = item.partition("=")
        if not _:
            raise ValueError(f"malformed parameter {item!r}; expected key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        params[key.strip()] = value
    return params


def cmd_train(args) -> int:
    _, speakers, _, matrix = read_feature_csv(args.in_path)
    if (speakers < 0).any():
        return _fail("training rows must carry speaker labels")
    name = MODEL_ALIASES[args.model]
    data = LabeledDataset(points=matrix, labels=speakers, train_mask=np.ones(len(speakers), bool))
    model = train_by_name(name, data, seed=args.seed, **_parse_params(args.params))
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "class_count": model.class_count,
        "input_dim": model.input_dim,
        "model": model,
    }
    with open(args.out_path, "wb") as fh:
        pickle.dump(payload, fh)
    print(f"trained {name} on {matrix.shape[0]} frames; saved to {args.out_path}")
    return 0


def cmd_predict(args) -> int:
    with open(args.model_path, "rb") as fh:
        payload = pickle.load(fh)
    if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_FORMAT_VERSION:
        return _fail(f"{args.model_path} is not a version-{MODEL_FORMAT_VERSION} model file")
    model = payload["model"]
    sources, _, frames, matrix = read_feature_csv(args.in_path)
    labels, scores = predict(model, matrix)
    with open(args.out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["source", "frame", "predicted", *(f"score{i}" for i in range(model.class_count))]
        )
        for source, frame, label, row in zip(sources, frames, labels, scores):
            writer.writerow([source, frame, int(label), *(format_float(v) for v in row)])
    print(f"predicted {len(labels)} frames with {model.kind}; wrote {args.out_path}")
    return 0


def _grid_from_json(path) -> tuple[SweepGrid, dict]:
    with open(path) as fh:
        raw = json.load(fh)
    extractors = tuple(
        default_config(item.pop("kind"), **item) for item in raw.get("extractors", [])
    ) or tuple(default_config(k) for k in ("mfcc", "lpcc", "plp"))
    reducers = tuple(ReducerSpec(**item) for item in raw.get("reducers", [])) or (
        ReducerSpec("sne"),
        ReducerSpec("pca"),
    )
    classifiers = tuple(
        ClassifierSpec(name=item.pop("name"), params=item) for item in raw.get("classifiers", [])
    ) or tuple(ClassifierSpec(n) for n in CLASSIFIER_NAMES)
    extras = {k: raw[k] for k in ("max_frames_per_file", "recall_threshold", "scaling_curve") if k in raw}
    return SweepGrid(extractors=extractors, reducers=reducers, classifiers=classifiers), extras


def cmd_bench(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.grid:
        grid, extras = _grid_from_json(args.grid)
    else:
        grid, extras = None, {}
    settings = HarnessSettings(
        max_frames_per_file=extras.get("max_frames_per_file", args.max_frames_per_file),
        recall_threshold=extras.get("recall_threshold", args.recall_threshold),
    )
    report = run_sweep(
        manifest,
        grid=grid,
        master_seed=args.seed,
        settings=settings,
        out_dir=args.out_dir,
        jobs=args.jobs,
    )
    ok = sum(1 for e in report["combinations"] if e["status"] == "ok")
    print(f"{ok}/{len(report['combinations'])} combinations succeeded; report under {args.out_dir}")

    curve_spec = extras.get("scaling_curve")
    if curve_spec:
        rows = speaker_scaling_curve(
            manifest,
            default_config(curve_spec.get("extractor", "mfcc")),
            ReducerSpec(curve_spec.get("reducer", "sne")),
            ClassifierSpec(curve_spec.get("classifier", "weighted knn")),
            speaker_counts=curve_spec.get("speaker_counts", [2, 3, 4, 5, 6, 7]),
            master_seed=args.seed,
            settings=settings,
        )
        write_scaling_curve(Path(args.out_dir) / "scaling_curve.csv", rows)
        print("scaling curve written to scaling_curve.csv")
    return 0


def cmd_roc(args) -> int:
    report = load_report_json(args.report)
    for entry in report["combinations"]:
        matches = (
            entry.get("extractor") == args.extractor
            and entry.get("reducer") == args.reducer
            and entry.get("classifier") == MODEL_ALIASES.get(args.classifier, args.classifier)
        )
        if matches:
            if entry["status"] != "ok":
                return _fail(f"combination failed: {entry.get('failure_reason')}")
            curves = entry["roc_curves"]
            key = str(args.speaker)
            if key not in curves:
                return _fail(f"no ROC curve for speaker {args.speaker}")
            points = curves[key]
            write_roc_csv(args.out_path, points)
            print(f"wrote {len(points)} ROC points (AUC {format_float(roc_auc(points))}) to {args.out_path}")
            return 0
    return _fail("no matching combination in the report")


# --- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voxbench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"voxbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic speaker corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--speakers", type=int, default=7)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--seconds", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("vad", help="remove silence from a recording")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", dest="out_path", required=True)
    p.add_argument("--threshold", type=float, default=3.0, help="cutoff in sigma multiples")
    p.add_argument("--block-ms", type=float, default=10.0)
    p.add_argument("--min-segment-ms", type=float, default=50.0)
    p.add_argument("--endpoints-only", action="store_true")
    p.add_argument("--report", help="write segment boundaries as JSON")
    p.set_defaults(handler=cmd_vad)

    p = sub.add_parser("extract", help="extract features from a wav or manifest")
    p.add_argument("--in", dest="in_path", required=True, help="wav file or manifest csv")
    p.add_argument("--method", choices=("mfcc", "lpcc", "plp"), required=True)
    p.add_argument("--out", dest="out_path", required=True)
    p.add_argument("--no-vad", action="store_true", help="skip silence removal")
    p.add_argument("--pre-emphasis", type=float)
    p.add_argument("--frame-ms", type=float)
    p.add_argument("--hop-ms", type=float)
    p.add_argument("--fft-size", type=int)
    p.add_argument("--filter-count", type=int)
    p.add_argument("--lpc-order", type=int)
    p.add_argument("--num-ceps", type=int)
    p.add_argument("--dct", choices=("dct2", "idct"))
    p.add_argument("--include-c0", action="store_true", help="keep the log-energy coefficient")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("reduce", help="reduce a feature csv to a low-dimensional embedding")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--method", choices=("pca", "sne"), required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--perplexity", type=float)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--kernel", choices=("gaussian", "student-t"), default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_path", required=True)
    p.add_argument("--trace", help="write the per-iteration cost trace csv")
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("train", help="train a classifier on an embedding csv")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--model", choices=sorted(MODEL_ALIASES), required=True)
    p.add_argument("--params", help="comma-separated key=value overrides, e.g. k=5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="out_path", required=True)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", help="label an embedding csv with a saved model")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--model-file", dest="model_path", required=True)
    p.add_argument("--out", dest="out_path", required=True)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("bench", help="run the full combination sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--grid", help="JSON grid config; defaults to the full 5x3x2 grid")
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-frames-per-file", type=int, default=60)
    p.add_argument("--recall-threshold", type=float, default=0.5)
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("roc", help="extract one speaker's ROC curve from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--speaker", type=int, required=True)
    p.add_argument("--extractor", default="mfcc")
    p.add_argument("--reducer", default="sne")
    p.add_argument("--classifier", default="knn")
    p.add_argument("--out", dest="out_path", required=True)
    p.set_defaults(handler=cmd_roc)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except PipelineError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except (OSError, ValueError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
