"""The IqFrame record: one labeled 2xL real matrix (I row, Q row)."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class IqFrame:
    """One IQ frame plus its modulation label, SNR tag, and origin tag.

    ``samples`` is a (2, L) float array; synthesized frames are float32
    (the storage precision), augmented frames stay float64 in memory until
    written. ``origin`` is "raw" for synthesized frames, or a compact tag
    such as "rnsr:d=0:l=2:w=haar" for augmented ones.
    """

    samples: np.ndarray
    label: int
    snr_db: float
    origin: str = "raw"

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 2 or self.samples.shape[0] != 2:
            raise ValueError(f"frame samples must be 2xL, got shape {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("frame contains non-finite samples")

    @property
    def length(self):
        return self.samples.shape[1]


def stack_frames(frames):
    """Pack a frame list into (X, labels, snrs) arrays for batch use."""
    if not frames:
        raise ValueError("empty frame list")
    x = np.stack([f.samples for f in frames]).astype(np.float32)
    labels = np.array([f.label for f in frames], dtype=np.int64)
    snrs = np.array([f.snr_db for f in frames], dtype=np.float64)
    return x, labels, snrs
