"""Bit-exact dataset persistence.

A dataset is a file pair: ``<name>.manifest`` (JSON, human-readable) plus
``<name>.iq`` (raw little-endian float32, frame-major, I row then Q row).
Frame i starts at byte offset ``i * frame_bytes``. Writes go through a
temporary file and an atomic rename, payload first and manifest last, so a
failed write never leaves a readable partial dataset.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .frames import IqFrame

SCHEMA_VERSION = 1


class DatasetError(ValueError):
    """Manifest/payload mismatch or unsupported schema."""


@dataclass
class DatasetManifest:
    labels: list            # class names; frame label = index into this list
    snr_grid: list
    split: str              # "train" | "test"
    length: int
    frame_labels: list
    frame_snrs: list
    frame_origins: list
    generation: dict = field(default_factory=dict)
    master_seed: int = 0
    schema_version: int = SCHEMA_VERSION

    @property
    def frame_count(self):
        return len(self.frame_labels)

    @property
    def frame_bytes(self):
        return 2 * self.length * 4

    @property
    def payload_bytes(self):
        return self.frame_count * self.frame_bytes

    def validate(self):
        n = self.frame_count
        if len(self.frame_snrs) != n or len(self.frame_origins) != n:
            raise DatasetError("per-frame record arrays disagree in length")
        for lab in self.frame_labels:
            if not 0 <= lab < len(self.labels):
                raise DatasetError(f"frame label {lab} outside label map")
        if self.split not in ("train", "test"):
            raise DatasetError(f"split must be train/test, got {self.split!r}")

    def to_json(self):
        doc = {
            "schema_version": self.schema_version,
            "split": self.split,
            "frame_count": self.frame_count,
            "length": self.length,
            "frame_bytes": self.frame_bytes,
            "byte_offset_of_frame_i": "i * frame_bytes",
            "labels": self.labels,
            "snr_grid": self.snr_grid,
            "master_seed": self.master_seed,
            "generation": self.generation,
            "frame_labels": self.frame_labels,
            "frame_snrs": self.frame_snrs,
            "frame_origins": self.frame_origins,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise DatasetError(
                f"unsupported schema_version {doc.get('schema_version')!r}"
            )
        m = cls(
            labels=doc["labels"],
            snr_grid=doc["snr_grid"],
            split=doc["split"],
            length=doc["length"],
            frame_labels=doc["frame_labels"],
            frame_snrs=doc["frame_snrs"],
            frame_origins=doc["frame_origins"],
            generation=doc.get("generation", {}),
            master_seed=doc.get("master_seed", 0),
        )
        if doc["frame_count"] != m.frame_count:
            raise DatasetError("frame_count disagrees with per-frame records")
        m.validate()
        return m


def manifest_for(frames, labels, snr_grid, split, length, generation=None, master_seed=0):
    return DatasetManifest(
        labels=list(labels),
        snr_grid=list(snr_grid),
        split=split,
        length=length,
        frame_labels=[int(f.label) for f in frames],
        frame_snrs=[float(f.snr_db) for f in frames],
        frame_origins=[f.origin for f in frames],
        generation=generation or {},
        master_seed=master_seed,
    )


def _paths(path):
    path = str(path)
    return path + ".manifest", path + ".iq"


def _atomic_write(path, data):
    tmp = path + ".tmp"
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(tmp, mode) as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def write_dataset(manifest, frames, path):
    """Write ``path``.manifest + ``path``.iq; identical inputs give identical bytes."""
    manifest.validate()
    if len(frames) != manifest.frame_count:
        raise DatasetError(
            f"manifest says {manifest.frame_count} frames, got {len(frames)}"
        )
    payload = np.empty((len(frames), 2, manifest.length), dtype="<f4")
    for i, f in enumerate(frames):
        if f.samples.shape != (2, manifest.length):
            raise DatasetError(
                f"frame {i} has shape {f.samples.shape}, expected (2, {manifest.length})"
            )
        if int(f.label) != manifest.frame_labels[i]:
            raise DatasetError(f"frame {i} label disagrees with manifest")
        payload[i] = f.samples.astype("<f4")
    manifest_path, iq_path = _paths(path)
    _atomic_write(iq_path, payload.tobytes())
    _atomic_write(manifest_path, manifest.to_json())


def read_dataset(path):
    """Exact inverse of :func:`write_dataset` -> (manifest, frames)."""
    manifest_path, iq_path = _paths(path)
    with open(manifest_path) as fh:
        manifest = DatasetManifest.from_json(fh.read())
    size = os.path.getsize(iq_path)
    if size != manifest.payload_bytes:
        raise DatasetError(
            f"payload is {size} bytes, manifest arithmetic demands "
            f"{manifest.payload_bytes} ({manifest.frame_count} x {manifest.frame_bytes})"
        )
    raw = np.fromfile(iq_path, dtype="<f4")
    data = raw.reshape(manifest.frame_count, 2, manifest.length)
    frames = [
        IqFrame(
            samples=data[i],
            label=manifest.frame_labels[i],
            snr_db=manifest.frame_snrs[i],
            origin=manifest.frame_origins[i],
        )
        for i in range(manifest.frame_count)
    ]
    return manifest, frames


def merge_sets(manifest_a, frames_a, manifest_b, frames_b):
    """Concatenate two compatible sets (a first), keeping origin tags."""
    if manifest_a.length != manifest_b.length:
        raise DatasetError("cannot merge datasets with different frame lengths")
    if manifest_a.labels != manifest_b.labels:
        raise DatasetError("cannot merge datasets with different label maps")
    merged = DatasetManifest(
        labels=list(manifest_a.labels),
        snr_grid=sorted(set(manifest_a.snr_grid) | set(manifest_b.snr_grid)),
        split=manifest_a.split,
        length=manifest_a.length,
        frame_labels=list(manifest_a.frame_labels) + list(manifest_b.frame_labels),
        frame_snrs=list(manifest_a.frame_snrs) + list(manifest_b.frame_snrs),
        frame_origins=list(manifest_a.frame_origins) + list(manifest_b.frame_origins),
        generation=dict(manifest_a.generation),
        master_seed=manifest_a.master_seed,
    )
    merged.validate()
    return merged, list(frames_a) + list(frames_b)
