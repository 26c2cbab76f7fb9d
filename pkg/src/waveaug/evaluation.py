"""Classifier evaluation: overall / per-SNR / per-class accuracy and a
row-normalized confusion matrix, plus delimited-text report writers."""

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import ClassifierError, predict


@dataclass
class EvaluationReport:
    overall: float
    per_snr: dict            # snr -> accuracy
    per_snr_counts: dict     # snr -> frame count
    per_class: dict          # class name -> accuracy
    per_class_counts: dict
    confusion: np.ndarray    # rows true, cols predicted, row-normalized
    labels: list
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "overall": self.overall,
            "per_snr": {str(k): v for k, v in self.per_snr.items()},
            "per_snr_counts": {str(k): v for k, v in self.per_snr_counts.items()},
            "per_class": self.per_class,
            "per_class_counts": self.per_class_counts,
            "confusion": self.confusion.tolist(),
            "labels": self.labels,
            "metadata": self.metadata,
        }


def evaluate(model, x, labels, snrs, label_names, metadata=None):
    """Deterministic evaluation of a model over a labeled test set."""
    if len(x) == 0:
        raise ClassifierError("empty test set")
    n_classes = model.spec.n_classes
    if n_classes != len(label_names):
        raise ClassifierError(
            f"model emits {n_classes} classes but label map has {len(label_names)}"
        )
    labels = np.asarray(labels)
    if labels.max() >= n_classes or labels.min() < 0:
        raise ClassifierError("test labels outside the model's label map")
    preds = predict(model, x)
    hits = preds == labels

    overall = float(hits.mean())
    per_snr, per_snr_counts = {}, {}
    for snr in sorted(set(np.asarray(snrs).tolist())):
        sel = np.asarray(snrs) == snr
        per_snr[snr] = float(hits[sel].mean())
        per_snr_counts[snr] = int(sel.sum())
    per_class, per_class_counts = {}, {}
    confusion = np.zeros((n_classes, n_classes))
    for t, p in zip(labels, preds):
        confusion[t, p] += 1
    for c, name in enumerate(label_names):
        count = int(confusion[c].sum())
        per_class_counts[name] = count
        per_class[name] = float(confusion[c, c] / count) if count else 0.0
        if count:
            confusion[c] /= count
    return EvaluationReport(
        overall=overall,
        per_snr=per_snr,
        per_snr_counts=per_snr_counts,
        per_class=per_class,
        per_class_counts=per_class_counts,
        confusion=confusion,
        labels=list(label_names),
        metadata=metadata or {},
    )


def _header_lines(report):
    out = []
    for key, val in sorted(report.metadata.items()):
        out.append(f"# {key}: {val}")
    out.append(f"# overall_accuracy: {report.overall:.6f}")
    return out


def snr_table(report):
    lines = _header_lines(report)
    lines.append("snr_db\taccuracy\tframes")
    for snr, acc in report.per_snr.items():
        lines.append(f"{snr:g}\t{acc:.6f}\t{report.per_snr_counts[snr]}")
    return "\n".join(lines) + "\n"


def class_table(report):
    lines = _header_lines(report)
    lines.append("class\taccuracy\tframes")
    for name, acc in report.per_class.items():
        lines.append(f"{name}\t{acc:.6f}\t{report.per_class_counts[name]}")
    return "\n".join(lines) + "\n"


def confusion_table(report):
    lines = _header_lines(report)
    lines.append("true\\pred\t" + "\t".join(report.labels))
    for i, name in enumerate(report.labels):
        row = "\t".join(f"{v:.6f}" for v in report.confusion[i])
        lines.append(f"{name}\t{row}")
    return "\n".join(lines) + "\n"


def comparison_table(named_reports):
    """Side-by-side overall and per-SNR accuracy for several eval outputs."""
    if not named_reports:
        raise ValueError("nothing to compare")
    names = [n for n, _ in named_reports]
    snrs = sorted({snr for _, r in named_reports for snr in r["per_snr"]},
                  key=float)
    lines = ["method\toverall\t" + "\t".join(f"snr_{s}" for s in snrs)]
    for name, rep in named_reports:
        row = [name, f"{rep['overall']:.6f}"]
        for s in snrs:
            v = rep["per_snr"].get(s)
            row.append(f"{v:.6f}" if v is not None else "-")
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def save_report(report, directory):
    """Write report.json plus the three TSV tables into ``directory``."""
    import os

    os.makedirs(directory, exist_ok=True)
    paths = {
        "report.json": json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n",
        "accuracy_vs_snr.tsv": snr_table(report),
        "per_class.tsv": class_table(report),
        "confusion_matrix.tsv": confusion_table(report),
    }
    for name, text in paths.items():
        path = os.path.join(directory, name)
        with open(path, "w") as fh:
            fh.write(text)
    return sorted(paths)
