"""Labeled baseband IQ frame synthesis: bits -> symbols -> RRC shaping ->
frequency/phase impairment -> AWGN at a target SNR.

Per-frame draws come from a generator seeded by (master seed, split, frame
index), so datasets regenerate bit-identically and frames could be produced
in parallel. Linear schemes are pulse-shaped with a root raised-cosine
filter and cropped to a fully settled window; FSK schemes are rendered
phase-continuous at constant envelope (no pulse shaping), with tone spacing
1/(2*sps) cycles/sample.
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .frames import IqFrame
from .modulation import get_scheme, map_symbols


class SynthesisError(ValueError):
    """Bad channel/profile parameters or undersized symbol streams."""


@dataclass
class ChannelSpec:
    """Frequency offset (cycles/sample), phase offset (radians), target SNR."""

    f0: float = 0.0
    theta: float = 0.0
    snr_db: float = math.inf

    def __post_init__(self):
        if not -0.2 <= self.f0 <= 0.2:
            raise SynthesisError(f"f0 must lie in [-0.2, 0.2], got {self.f0}")
        if not 0.0 <= self.theta < 2.0 * np.pi:
            raise SynthesisError(f"theta must lie in [0, 2pi), got {self.theta}")

    def noise_variance(self, signal_power):
        """Total noise variance per complex sample for the target SNR."""
        if math.isinf(self.snr_db):
            return 0.0
        var = signal_power / 10.0 ** (self.snr_db / 10.0)
        if not var > 0.0:
            raise SynthesisError("noise variance must be positive for finite SNR")
        return var


def rrc_taps(beta, sps, span):
    """Unit-energy root raised-cosine taps (span*sps + 1 of them).

    The removable singularities at t = 0 and t = +-1/(4 beta) use their
    analytic limits.
    """
    if not 0.0 < beta < 1.0:
        raise SynthesisError(f"roll-off must lie in (0, 1), got {beta}")
    n_taps = span * sps + 1
    t = (np.arange(n_taps) - (n_taps - 1) / 2.0) / sps  # symbol periods
    taps = np.empty(n_taps)
    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            taps[i] = 1.0 - beta + 4.0 * beta / np.pi
        elif abs(abs(4.0 * beta * ti) - 1.0) < 1e-12:
            taps[i] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            taps[i] = (
                np.sin(np.pi * ti * (1.0 - beta))
                + 4.0 * beta * ti * np.cos(np.pi * ti * (1.0 + beta))
            ) / (np.pi * ti * (1.0 - (4.0 * beta * ti) ** 2))
    return taps / np.sqrt(np.sum(taps ** 2))


def symbols_needed(scheme, length, sps, span):
    """Symbol count for one frame, including filter-transient guard symbols."""
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    if scheme.is_fsk:
        return length // sps
    # one guard symbol beyond the filter span keeps the crop window settled
    # even with OQPSK's half-symbol Q delay
    return length // sps + span + 1


def _shape_linear(symbols, taps, sps, length, offset_q):
    up = np.zeros(symbols.shape[0] * sps, dtype=np.complex128)
    up[::sps] = symbols
    if offset_q:
        q = np.zeros_like(up.imag)
        q[sps // 2:] = up.imag[: -sps // 2]
        up = up.real + 1j * q
    shaped = np.convolve(up, taps.astype(np.complex128))
    start = (shaped.shape[0] - length) // 2
    return shaped[start:start + length]


def shape_and_impair(symbols, taps, sps, channel, scheme, length=1024):
    """Render exactly ``length`` complex samples as a noiseless 2xL frame."""
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    symbols = np.asarray(symbols)
    need = symbols_needed(scheme, length, sps, span=(taps.shape[0] - 1) // sps if scheme.is_linear else 0)
    if symbols.shape[0] < need:
        raise SynthesisError(
            f"{scheme.name}: need {need} symbols for {length} samples, got {symbols.shape[0]}"
        )
    symbols = symbols[:need]
    if scheme.is_fsk:
        order = scheme.order
        tone_spacing = 1.0 / (2.0 * sps)  # cycles/sample between adjacent tones
        f_sym = (symbols.astype(np.float64) - (order - 1) / 2.0) * tone_spacing
        f_per_sample = np.repeat(f_sym, sps)[:length]
        phase = 2.0 * np.pi * np.concatenate(([0.0], np.cumsum(f_per_sample[:-1])))
        signal = np.exp(1j * phase)
    else:
        signal = _shape_linear(symbols.astype(np.complex128), taps, sps, length,
                               offset_q=scheme.family == "OQPSK")
    n = np.arange(length)
    signal = signal * np.exp(1j * (2.0 * np.pi * channel.f0 * n + channel.theta))
    return np.vstack([signal.real, signal.imag])


def add_awgn(frame, snr_db, rng):
    """Add white Gaussian noise calibrated against the frame's own power."""
    frame = np.asarray(frame, dtype=np.float64)
    if not np.all(np.isfinite(frame)):
        raise SynthesisError("cannot add noise to a non-finite frame")
    if snr_db is None or (isinstance(snr_db, float) and math.isinf(snr_db)):
        return frame.copy()
    power = np.mean(frame[0] ** 2 + frame[1] ** 2)
    var = power / 10.0 ** (snr_db / 10.0)
    noise = rng.standard_normal(frame.shape) * np.sqrt(var / 2.0)
    return frame + noise


@dataclass
class Profile:
    """Dataset generation recipe; the manifest echoes every field."""

    name: str
    schemes: list
    snr_grid: list
    train_per_cell: int
    test_per_cell: int
    length: int = 1024
    sps: int = 8
    span: int = 6
    beta_range: tuple = (0.2, 0.7)
    f0_range: tuple = (-0.2, 0.2)
    master_seed: int = 0

    def __post_init__(self):
        if not self.schemes:
            raise SynthesisError("profile needs at least one scheme")
        if not self.snr_grid:
            raise SynthesisError("profile needs a nonempty SNR grid")
        for s in self.schemes:
            get_scheme(s)
        self.beta_range = tuple(self.beta_range)
        self.f0_range = tuple(self.f0_range)

    def frame_count(self, split):
        per_cell = self.train_per_cell if split == "train" else self.test_per_cell
        return len(self.schemes) * len(self.snr_grid) * per_cell

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def rml1024(master_seed=0):
    """Full-grid profile: 12 schemes x 26 SNRs, 10 train / 500 test per cell."""
    return Profile(
        name="rml1024",
        schemes=["BPSK", "8PSK", "2FSK", "4FSK", "8FSK", "QPSK",
                 "OQPSK", "8PAM", "4PAM", "64QAM", "32QAM", "16QAM"],
        snr_grid=list(range(-20, 31, 2)),
        train_per_cell=10,
        test_per_cell=500,
        master_seed=master_seed,
    )


def rml1024_mini(master_seed=0):
    """Desk-scale profile: 4 schemes x 4 SNRs, 10 train / 200 test per cell."""
    return Profile(
        name="rml1024_mini",
        schemes=["BPSK", "QPSK", "2FSK", "4PAM"],
        snr_grid=[0, 6, 12, 18],
        train_per_cell=10,
        test_per_cell=200,
        master_seed=master_seed,
    )


PRESETS = {"rml1024": rml1024, "rml1024_mini": rml1024_mini}

_SPLIT_CODE = {"train": 0, "test": 1}


def _frame_rng(profile, split, index):
    ss = np.random.SeedSequence(entropy=profile.master_seed,
                                spawn_key=(_SPLIT_CODE[split], index))
    return np.random.default_rng(ss)


def synthesize_frame(profile, scheme_name, snr_db, label, rng):
    """One frame; draw order (beta, f0, theta, bits, noise) is fixed."""
    scheme = get_scheme(scheme_name)
    beta = rng.uniform(*profile.beta_range)
    f0 = rng.uniform(*profile.f0_range)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    n_sym = symbols_needed(scheme, profile.length, profile.sps, profile.span)
    bits = rng.integers(0, 2, size=n_sym * scheme.bits_per_symbol)
    symbols = map_symbols(bits, scheme)
    taps = rrc_taps(beta, profile.sps, profile.span)
    channel = ChannelSpec(f0=f0, theta=theta, snr_db=float(snr_db))
    clean = shape_and_impair(symbols, taps, profile.sps, channel, scheme,
                             length=profile.length)
    noisy = add_awgn(clean, float(snr_db), rng)
    return IqFrame(samples=noisy.astype(np.float32), label=label,
                   snr_db=float(snr_db), origin="raw")


def synthesize_split(profile, split):
    """All frames of one split, ordered (scheme, snr, cell index)."""
    if split not in _SPLIT_CODE:
        raise SynthesisError(f"split must be 'train' or 'test', got {split!r}")
    per_cell = profile.train_per_cell if split == "train" else profile.test_per_cell
    frames = []
    index = 0
    for label, scheme_name in enumerate(profile.schemes):
        for snr in profile.snr_grid:
            for _ in range(per_cell):
                rng = _frame_rng(profile, split, index)
                frames.append(synthesize_frame(profile, scheme_name, snr, label, rng))
                index += 1
    return frames


def synthesize_dataset(profile):
    """Both splits -> {"train": (manifest, frames), "test": (manifest, frames)}.

    The manifest echoes the full profile and master seed, so a dataset can be
    regenerated bit-exactly from its own metadata.
    """
    from .dataset_io import manifest_for

    out = {}
    for split in ("train", "test"):
        frames = synthesize_split(profile, split)
        manifest = manifest_for(frames, profile.schemes, profile.snr_grid,
                                split, profile.length,
                                generation=profile.to_dict(),
                                master_seed=profile.master_seed)
        out[split] = (manifest, frames)
    return out
