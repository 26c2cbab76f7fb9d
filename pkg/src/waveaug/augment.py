"""Training-set augmentation by wavelet detail-coefficient replacement,
plus the flip / segment-shift / segment-concatenation baselines.

Replacement modes:

* azsr  - the chosen detail band becomes all zeros;
* rzsr  - each element independently keeps its value or becomes zero
          (uniform 0/1 mask);
* rnsr  - the band is replaced by sqrt(beta) * standard normal noise,
          beta being the band's energy. "elementwise" power mode keeps that
          raw draw (per-element std sqrt(beta), expected energy beta * band
          length); "energy_exact" rescales the draw so its total energy
          equals beta exactly.

One operation replaces each of the E+2 detail bands in turn, so a source
frame yields E+2 new frames per operation (times the number of bases for
the multi-wavelet variant). Randomness is derived per
(frame, operation, band, basis), so augmented sets are reproducible and
order-independent.
"""

from dataclasses import dataclass, field

import numpy as np

from .dataset_io import DatasetManifest, DatasetError
from .frames import IqFrame
from .wavelets import SUPPORTED_BASES, decompose, reconstruct

METHODS = ("AZSR", "RZSR", "RNSR", "RNSR_MW", "FLIP", "SEGCS", "SEGMC", "NONE")
_REPLACE_MODES = ("azsr", "rzsr", "rnsr")


class AugmentError(ValueError):
    """Invalid plan or augmentation arguments."""


@dataclass
class AugmentationPlan:
    method: str
    operations: int = 1                       # D
    depth: int = 3                            # E
    wavelets: list = field(default_factory=lambda: ["haar"])
    rnsr_power_mode: str = "elementwise"
    seg_k: int = 3
    master_seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise AugmentError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.operations < 0:
            raise AugmentError("operation count must be >= 0")
        if self.depth < 1:
            raise AugmentError("decomposition depth must be >= 1")
        if len(set(self.wavelets)) != len(self.wavelets):
            raise AugmentError("duplicate wavelet names in plan")
        for w in self.wavelets:
            if w not in SUPPORTED_BASES:
                raise AugmentError(f"unsupported wavelet {w!r}")
        if self.method == "RNSR_MW":
            if len(self.wavelets) < 2:
                raise AugmentError("RNSR_MW needs at least two wavelets")
        elif len(self.wavelets) != 1:
            raise AugmentError(f"{self.method} takes exactly one wavelet")
        if self.rnsr_power_mode not in ("elementwise", "energy_exact"):
            raise AugmentError(f"unknown power mode {self.rnsr_power_mode!r}")
        if self.seg_k < 2:
            raise AugmentError("segment count must be >= 2")

    def expected_count(self, n_frames):
        """Exact output size of :func:`build_augmented_set` for n input frames."""
        d, e, w = self.operations, self.depth, len(self.wavelets)
        if self.method == "NONE" or d == 0:
            return n_frames
        if self.method in ("AZSR", "RZSR", "RNSR"):
            return n_frames * (1 + d * (e + 2))
        if self.method == "RNSR_MW":
            return n_frames * (1 + d * (e + 2) * w)
        if self.method == "FLIP":
            return n_frames * 4
        return n_frames * (1 + d)  # SEGCS / SEGMC

    def to_dict(self):
        return {
            "method": self.method,
            "operations": self.operations,
            "depth": self.depth,
            "wavelets": list(self.wavelets),
            "rnsr_power_mode": self.rnsr_power_mode,
            "seg_k": self.seg_k,
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def replace_detail(coeffs, band, mode, rng, power_mode="elementwise"):
    """Return a copy of ``coeffs`` with detail ``band`` replaced."""
    if mode not in _REPLACE_MODES:
        raise AugmentError(f"unknown replacement mode {mode!r}")
    if not 0 <= band < len(coeffs.details):
        raise AugmentError(
            f"detail index {band} out of range 0..{len(coeffs.details) - 1}"
        )
    out = coeffs.copy()
    original = coeffs.details[band]
    n = original.shape[0]
    if mode == "azsr":
        replacement = np.zeros(n)
    elif mode == "rzsr":
        replacement = original * rng.integers(0, 2, size=n)
    else:
        beta = float(np.sum(original ** 2))
        replacement = np.sqrt(beta) * rng.standard_normal(n)
        if power_mode == "energy_exact":
            energy = float(np.sum(replacement ** 2))
            if energy > 0.0:
                replacement *= np.sqrt(beta / energy)
    out.details[band] = replacement
    out.replaced = coeffs.replaced + (band,)
    return out


def _tag(method, op, band, basis_name):
    return f"{method.lower()}:d={op}:l={band}:w={basis_name}"


def _rebuild(coeffs, source, tag):
    samples = reconstruct(coeffs)
    return IqFrame(samples=samples, label=source.label, snr_db=source.snr_db,
                   origin=tag)


def augment_once(frame, basis_name, depth, mode, rng, power_mode="elementwise"):
    """One operation: replace each detail band in turn -> depth+2 new frames."""
    coeffs = decompose(frame.samples, basis_name, depth,
                       label=frame.label, snr_db=frame.snr_db)
    out = []
    for band in range(depth + 2):
        edited = replace_detail(coeffs, band, mode, rng, power_mode)
        out.append(_rebuild(edited, frame, _tag(mode, 0, band, basis_name)))
    return out


def augment_mw(frame, wavelet_names, depth, rng, power_mode="elementwise"):
    """One multi-wavelet operation: rnsr under each basis, concatenated."""
    if len(set(wavelet_names)) != len(wavelet_names):
        raise AugmentError("duplicate wavelet names")
    if len(wavelet_names) < 2:
        raise AugmentError("multi-wavelet augmentation needs at least two bases")
    out = []
    for name in wavelet_names:
        out.extend(augment_once(frame, name, depth, "rnsr", rng, power_mode))
    return out


def flip(frame, axis):
    """vertical = negate both rows; horizontal = reverse time. Label kept."""
    if axis == "vertical":
        samples = -frame.samples
    elif axis == "horizontal":
        samples = frame.samples[:, ::-1].copy()
    else:
        raise AugmentError(f"axis must be vertical/horizontal, got {axis!r}")
    return IqFrame(samples=samples, label=frame.label, snr_db=frame.snr_db,
                   origin=f"flip:{axis[0]}")


def _flip_both(frame):
    return IqFrame(samples=-frame.samples[:, ::-1], label=frame.label,
                   snr_db=frame.snr_db, origin="flip:vh")


def _random_cuts(length, k, rng):
    cuts = rng.choice(np.arange(1, length), size=k - 1, replace=False)
    cuts.sort()
    return cuts


def seg_cs(frame, k, rng):
    """Cut at k-1 random columns and rotate the segment order by one."""
    length = frame.length
    if k > length:
        raise AugmentError(f"cannot cut {length} columns into {k} segments")
    if k < 2:
        raise AugmentError("segment count must be >= 2")
    cuts = _random_cuts(length, k, rng)
    bounds = [0, *cuts.tolist(), length]
    segments = [frame.samples[:, bounds[i]:bounds[i + 1]] for i in range(k)]
    rotated = np.concatenate(segments[1:] + segments[:1], axis=1)
    return IqFrame(samples=rotated.copy(), label=frame.label, snr_db=frame.snr_db,
                   origin=f"segcs{k}")


def seg_mc(frames, k, rng):
    """Concatenate aligned segments drawn from k distinct same-label frames."""
    if len(frames) < 2:
        raise AugmentError("segment concatenation needs at least two source frames")
    labels = {f.label for f in frames}
    snrs = {f.snr_db for f in frames}
    if len(labels) != 1 or len(snrs) != 1:
        raise AugmentError("source frames must share one label and SNR cell")
    if k > len(frames):
        raise AugmentError(f"need {k} distinct sources, got {len(frames)}")
    length = frames[0].length
    picks = rng.choice(len(frames), size=k, replace=False)
    cuts = _random_cuts(length, k, rng)
    bounds = [0, *cuts.tolist(), length]
    parts = [frames[picks[i]].samples[:, bounds[i]:bounds[i + 1]] for i in range(k)]
    out = np.concatenate(parts, axis=1)
    assert out.shape[1] == length
    return IqFrame(samples=out.copy(), label=frames[0].label,
                   snr_db=frames[0].snr_db, origin=f"segmc{k}")


def _derived_rng(master_seed, *key):
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(v) for v in key))
    return np.random.default_rng(ss)


def build_augmented_set(manifest, frames, plan):
    """Originals plus their augmented frames, canonically ordered.

    Output order is all originals (input order) followed by augmented frames
    sorted by (frame index, operation, band, wavelet index). Test splits are
    refused: only training data is ever augmented.
    """
    if manifest.split != "train":
        raise AugmentError("only train splits are augmented; test sets never are")
    if len(frames) != manifest.frame_count:
        raise DatasetError("manifest/frame count mismatch")
    length = manifest.length
    if plan.method in ("AZSR", "RZSR", "RNSR", "RNSR_MW"):
        if length % (2 ** plan.depth) or length < 2 ** plan.depth:
            raise AugmentError(
                f"depth {plan.depth} too deep for frame length {length}"
            )

    new_frames = []
    d_ops = plan.operations
    if plan.method == "NONE" or d_ops == 0:
        pass
    elif plan.method in ("AZSR", "RZSR", "RNSR", "RNSR_MW"):
        mode = "rnsr" if plan.method == "RNSR_MW" else plan.method.lower()
        for i, frame in enumerate(frames):
            per_basis = {
                w: decompose(frame.samples, w, plan.depth,
                             label=frame.label, snr_db=frame.snr_db)
                for w in plan.wavelets
            }
            for d in range(d_ops):
                for band in range(plan.depth + 2):
                    for wj, w in enumerate(plan.wavelets):
                        rng = _derived_rng(plan.master_seed, i, d, band, wj)
                        edited = replace_detail(per_basis[w], band, mode, rng,
                                                plan.rnsr_power_mode)
                        tag = _tag(mode if plan.method != "RNSR_MW" else "rnsr_mw",
                                   d, band, w)
                        new_frames.append(_rebuild(edited, frame, tag))
    elif plan.method == "FLIP":
        for frame in frames:
            new_frames.append(flip(frame, "vertical"))
            new_frames.append(flip(frame, "horizontal"))
            new_frames.append(_flip_both(frame))
    elif plan.method == "SEGCS":
        for i, frame in enumerate(frames):
            for d in range(d_ops):
                rng = _derived_rng(plan.master_seed, i, d)
                new_frames.append(seg_cs(frame, plan.seg_k, rng))
    elif plan.method == "SEGMC":
        cells = {}
        for i, frame in enumerate(frames):
            cells.setdefault((frame.label, frame.snr_db), []).append(frame)
        for i, frame in enumerate(frames):
            pool = cells[(frame.label, frame.snr_db)]
            for d in range(d_ops):
                rng = _derived_rng(plan.master_seed, i, d)
                new_frames.append(seg_mc(pool, plan.seg_k, rng))

    out_frames = list(frames) + new_frames
    expected = plan.expected_count(len(frames))
    assert len(out_frames) == expected, (len(out_frames), expected)
    out_manifest = DatasetManifest(
        labels=list(manifest.labels),
        snr_grid=list(manifest.snr_grid),
        split=manifest.split,
        length=length,
        frame_labels=[int(f.label) for f in out_frames],
        frame_snrs=[float(f.snr_db) for f in out_frames],
        frame_origins=[f.origin for f in out_frames],
        generation={**manifest.generation, "augmentation": plan.to_dict()},
        master_seed=manifest.master_seed,
    )
    return out_manifest, out_frames
