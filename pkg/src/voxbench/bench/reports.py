"""Report serialization: the full JSON plus table-shaped CSV mirrors.

All floats are written with six significant digits so repeated runs of the
same seed compare byte-for-byte.
"""

from __future__ import annotations

import csv
import json

# Accuracy/distinguishability figures from the original comparative study.
# Shipped for side-by-side display only: they were measured on that study's
# private 15-speaker corpus and are not comparable to synthetic runs.
REFERENCE_NOTE = (
    "reference results from the original comparative study "
    "(different, private corpus; never an assertion target)"
)

REFERENCE_ACCURACY = {
    "sne": {
        "complex tree": {"mfcc": 51.2, "lpcc": 33.4, "plp": 44.0},
        "weighted knn": {"mfcc": 68.9, "lpcc": 51.3, "plp": 66.3},
        "fine svm": {"mfcc": 57.9, "lpcc": 38.0, "plp": 52.8},
        "feed forward": {"mfcc": 51.5, "lpcc": 47.0, "plp": 50.3},
        "bagged trees": {"mfcc": 67.4, "lpcc": 47.3, "plp": 66.2},
    },
    "pca": {
        "complex tree": {"mfcc": 20.2, "lpcc": 22.1, "plp": 24.0},
        "weighted knn": {"mfcc": 17.1, "lpcc": 25.0, "plp": 26.4},
        "fine svm": {"mfcc": 23.0, "lpcc": 18.5, "plp": 22.0},
        "feed forward": {"mfcc": 18.0, "lpcc": 17.5, "plp": 20.0},
        "bagged trees": {"mfcc": 13.7, "lpcc": 18.6, "plp": 22.4},
    },
}

REFERENCE_DISTINGUISHABLE = {
    "sne": {
        "complex tree": {"mfcc": 4, "lpcc": 2, "plp": 3},
        "weighted knn": {"mfcc": 7, "lpcc": 5, "plp": 7},
        "fine svm": {"mfcc": 6, "lpcc": 2, "plp": 6},
        "feed forward": {"mfcc": 4, "lpcc": 3, "plp": 5},
        "bagged trees": {"mfcc": 7, "lpcc": 5, "plp": 7},
    },
    "pca": {
        "complex tree": {"mfcc": 2, "lpcc": 1, "plp": 2},
        "weighted knn": {"mfcc": 1, "lpcc": 1, "plp": 2},
        "fine svm": {"mfcc": 1, "lpcc": 1, "plp": 1},
        "feed forward": {"mfcc": 2, "lpcc": 1, "plp": 1},
        "bagged trees": {"mfcc": 1, "lpcc": 1, "plp": 1},
    },
}

REFERENCE_SCALING = {
    "speakers": [2, 3, 4, 5, 6, 7],
    "mfcc": [87.2, 81.2, 74.5, 69.7, 67.1, 66.9],
    "lpcc": [81.3, 70.0, 60.2, 54.9, 53.1, 49.1],
    "plp": [86.2, 79.6, 74.6, 70.4, 68.5, 66.3],
}


def format_float(x: float) -> str:
    return f"{x:.6g}"


def round_floats(value):
    """Recursively round floats to six significant digits for serialization."""
    if isinstance(value, float):
        return float(format_float(value))
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    return value


def write_report_json(report: dict, path) -> None:
    payload = round_floats(report)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_grid_table(path, cell_of, classifiers, extractors) -> None:
    """Rows = classifiers, columns = extractors; cell_of returns str or None."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["classifier", *extractors])
        for name in classifiers:
            row = [name]
            for extractor in extractors:
                cell = cell_of(name, extractor)
                row.append("failed" if cell is None else cell)
            writer.writerow(row)


def write_scaling_curve(path, rows) -> None:
    """Rows of (speaker_count, accuracy_pct, delta_per_speaker or None)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["speakers", "accuracy_pct", "delta_per_speaker"])
        for count, accuracy, delta in rows:
            writer.writerow(
                [count, format_float(accuracy), "" if delta is None else format_float(delta)]
            )


def write_roc_csv(path, points) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in points:
            writer.writerow([format_float(fpr), format_float(tpr)])


def load_report_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "REFERENCE_ACCURACY",
    "REFERENCE_DISTINGUISHABLE",
    "REFERENCE_NOTE",
    "REFERENCE_SCALING",
    "format_float",
    "load_report_json",
    "round_floats",
    "write_grid_table",
    "write_report_json",
    "write_roc_csv",
    "write_scaling_curve",
]
