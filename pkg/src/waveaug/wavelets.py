"""Multi-basis discrete wavelet analysis/synthesis for 2xL IQ frames.

One 2-D level splits a frame into (CA, CH, CV, CD); deeper levels chain 1-D
transforms over the successive approximations. All transforms use periodic
(circular) extension, so every level is non-expansive and reconstruction is
exact at power-of-two lengths.

Conventions, pinned by the test suite:

* analysis      ca[n] = sum_f x[(2n - f) mod N] * lo_d[f]   (cd with hi_d)
* synthesis     y[(2n + f - (F-1)) mod N] += ca[n]*lo_r[f] + cd[n]*hi_r[f]
* orthogonal    hi_d[n] = (-1)^n * lo_d[F-1-n], lo_r/hi_r are the reversed
                decomposition filters
* 2-D level     filter+decimate along the length axis first, then combine the
                two rows; CA/CH take the row lowpass of the column lo/hi
                bands, CV/CD the row highpass.

rbio1.1 shares the haar lowpass but carries the opposite highpass sign
convention (the one used by common reference tables), so detail-coefficient
edits under the two bases synthesize differently even though plain
round-trips agree.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import dwt_periodic, idwt_periodic

_SQRT1_2 = 2.0 ** -0.5

# Canonical decomposition lowpass filters. Last digits are polished so the
# orthonormality and vanishing-moment sums hold to double precision; common
# published tables are ~1e-12 off per tap, which the energy-conservation and
# high-order moment checks can feel.
_DEC_LO = {
    "haar": [_SQRT1_2, _SQRT1_2],
    "db5": [
        0.0033357252854738285,
        -0.012580751999081896,
        -0.006241490212798324,
        0.07757149384004566,
        -0.032244869584638146,
        -0.24229488706638197,
        0.13842814590132047,
        0.7243085284377728,
        0.6038292697971899,
        0.16010239797419298,
    ],
    "sym5": [
        0.019538882735249875,
        -0.021101834024688376,
        -0.1753280899080559,
        0.01660210576450799,
        0.6339789634567892,
        0.7234076904040427,
        0.1993975339768584,
        -0.03913424930231368,
        0.02951949092570601,
        0.0273330683449989,
    ],
    "coif3": [
        -3.459977319504679e-05,
        -7.098330252075894e-05,
        0.00046621695982466087,
        0.0011175187709380396,
        -0.0025745176882630665,
        -0.009007976137358006,
        0.015880544863070348,
        0.03455502757280018,
        -0.08230192710667773,
        -0.07179982161898761,
        0.42848347637725126,
        0.7937772226258185,
        0.405176902409657,
        -0.06112339000290914,
        -0.06577191128188314,
        0.02345269614279353,
        0.007782596426763292,
        -0.003793512864027231,
    ],
    "rbio1.1": [_SQRT1_2, _SQRT1_2],
}

_ORTHOGONAL = ("haar", "db5", "sym5", "coif3")
SUPPORTED_BASES = ("haar", "db5", "sym5", "coif3", "rbio1.1")


class WaveletError(ValueError):
    """Invalid basis name, filter table, or transform input."""


@dataclass(frozen=True)
class WaveletBasis:
    """Analysis/synthesis filter quadruple for one named wavelet."""

    name: str
    lo_d: np.ndarray
    hi_d: np.ndarray
    lo_r: np.ndarray
    hi_r: np.ndarray
    kind: str  # "orthogonal" | "biorthogonal"

    @property
    def taps(self):
        return self.lo_d.shape[0]


def _qmf(lo):
    taps = lo.shape[0]
    signs = (-1.0) ** np.arange(taps)
    return signs * lo[::-1]


def _validate_orthogonal(name, lo):
    taps = lo.shape[0]
    if taps % 2:
        raise WaveletError(f"{name}: filter length must be even, got {taps}")
    if abs(lo.sum() - np.sqrt(2.0)) > 1e-10:
        raise WaveletError(f"{name}: lowpass sum is not sqrt(2)")
    if abs((lo * lo).sum() - 1.0) > 1e-10:
        raise WaveletError(f"{name}: lowpass energy is not 1")
    # double-shift orthogonality: <lo, shift_{2k} lo> = delta_k
    for k in range(1, taps // 2):
        if abs(np.dot(lo[: taps - 2 * k], lo[2 * k:])) > 1e-10:
            raise WaveletError(f"{name}: lowpass not orthogonal to its 2*{k} shift")


def _validate_roundtrip(basis):
    rng = np.random.default_rng(1234)
    x = rng.standard_normal(64)
    ca, cd = dwt_periodic(x, basis.lo_d, basis.hi_d)
    y = idwt_periodic(ca, cd, basis.lo_r, basis.hi_r)
    if np.max(np.abs(y - x)) > 1e-10:
        raise WaveletError(f"{basis.name}: filter quadruple fails perfect reconstruction")


def _build(name):
    lo_d = np.asarray(_DEC_LO[name], dtype=np.float64)
    hi_d = _qmf(lo_d)
    if name == "rbio1.1":
        hi_d = -hi_d
        kind = "biorthogonal"
    else:
        kind = "orthogonal"
        _validate_orthogonal(name, lo_d)
    b = WaveletBasis(
        name=name,
        lo_d=lo_d,
        hi_d=hi_d,
        lo_r=lo_d[::-1].copy(),
        hi_r=hi_d[::-1].copy(),
        kind=kind,
    )
    for arr in (b.lo_d, b.hi_d, b.lo_r, b.hi_r):
        arr.setflags(write=False)
    _validate_roundtrip(b)
    return b


_BASIS_CACHE = {}


def basis(name):
    """Return the named filter quadruple, validated on first load."""
    if name not in _DEC_LO:
        raise WaveletError(f"unknown wavelet {name!r}; supported: {', '.join(SUPPORTED_BASES)}")
    if name not in _BASIS_CACHE:
        _BASIS_CACHE[name] = _build(name)
    return _BASIS_CACHE[name]


def _as_basis(b):
    return b if isinstance(b, WaveletBasis) else basis(b)


def dwt1(x, b):
    """One periodic analysis level: even-length sequence -> (ca, cd)."""
    b = _as_basis(b)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise WaveletError(f"dwt1 expects a 1-D sequence, got shape {x.shape}")
    if x.shape[0] < 2 or x.shape[0] % 2:
        raise WaveletError(f"dwt1 needs an even length >= 2, got {x.shape[0]}")
    return dwt_periodic(x, b.lo_d, b.hi_d)


def idwt1(ca, cd, b):
    """Inverse of :func:`dwt1`; output has length 2*len(ca)."""
    b = _as_basis(b)
    ca = np.asarray(ca, dtype=np.float64)
    cd = np.asarray(cd, dtype=np.float64)
    if ca.shape != cd.shape or ca.ndim != 1:
        raise WaveletError(f"idwt1 needs matching 1-D bands, got {ca.shape} and {cd.shape}")
    return idwt_periodic(ca, cd, b.lo_r, b.hi_r)


def _row_analysis_weights(b):
    # periodic filtering of a 2-sample column collapses each filter to the
    # sums of its even- and odd-indexed taps
    return (
        np.array([b.lo_d[0::2].sum(), b.lo_d[1::2].sum()]),
        np.array([b.hi_d[0::2].sum(), b.hi_d[1::2].sum()]),
    )


def _row_synthesis_weights(b):
    # output parity m receives taps with f - (F-1) ≡ m (mod 2); F is even
    return (
        np.array([b.lo_r[1::2].sum(), b.lo_r[0::2].sum()]),
        np.array([b.hi_r[1::2].sum(), b.hi_r[0::2].sum()]),
    )


def dwt2(frame, b):
    """One separable level over a 2xL frame -> (CA, CH, CV, CD), each L/2."""
    b = _as_basis(b)
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2 or frame.shape[0] != 2:
        raise WaveletError(f"dwt2 expects a 2xL frame, got shape {frame.shape}")
    top_lo, top_hi = dwt1(frame[0], b)
    bot_lo, bot_hi = dwt1(frame[1], b)
    (e0, e1), (h0, h1) = _row_analysis_weights(b)
    ca = e0 * top_lo + e1 * bot_lo
    cv = h0 * top_lo + h1 * bot_lo
    ch = e0 * top_hi + e1 * bot_hi
    cd = h0 * top_hi + h1 * bot_hi
    return ca, ch, cv, cd


def idwt2(ca, ch, cv, cd, b):
    """Exact inverse of :func:`dwt2` -> 2 x (2*len(ca)) frame."""
    b = _as_basis(b)
    bands = [np.asarray(a, dtype=np.float64) for a in (ca, ch, cv, cd)]
    if len({a.shape for a in bands}) != 1 or bands[0].ndim != 1:
        raise WaveletError("idwt2 needs four 1-D bands of equal length")
    ca, ch, cv, cd = bands
    (l_top, l_bot), (h_top, h_bot) = _row_synthesis_weights(b)
    col_lo = (l_top * ca + h_top * cv, l_bot * ca + h_bot * cv)
    col_hi = (l_top * ch + h_top * cd, l_bot * ch + h_bot * cd)
    out = np.empty((2, 2 * ca.shape[0]))
    out[0] = idwt1(col_lo[0], col_hi[0], b)
    out[1] = idwt1(col_lo[1], col_hi[1], b)
    return out


@dataclass
class CoefficientSet:
    """One approximation band plus the ordered detail bands of a frame.

    ``details`` holds [CH, CV, CD, CD_1, ..., CD_{depth-1}] (depth+2 entries);
    ``ca`` is the deepest approximation.
    """

    ca: np.ndarray
    details: list
    basis: str
    depth: int
    label: int | None = None
    snr_db: float | None = None
    replaced: tuple = field(default_factory=tuple)

    def copy(self):
        return CoefficientSet(
            ca=self.ca.copy(),
            details=[d.copy() for d in self.details],
            basis=self.basis,
            depth=self.depth,
            label=self.label,
            snr_db=self.snr_db,
            replaced=self.replaced,
        )

    def validate_schedule(self, length=None):
        e = self.depth
        if len(self.details) != e + 2:
            raise WaveletError(f"expected {e + 2} detail bands, got {len(self.details)}")
        if length is None:
            length = 2 * self.details[0].shape[0]
        want = [length // 2] * 3 + [length // 2 ** (i + 1) for i in range(1, e)]
        got = [d.shape[0] for d in self.details]
        if got != want:
            raise WaveletError(f"detail length schedule {got} != {want}")
        if self.ca.shape[0] != length // 2 ** e:
            raise WaveletError(
                f"approximation length {self.ca.shape[0]} != {length // 2 ** e}"
            )
        return length


def decompose(frame, b, depth, label=None, snr_db=None):
    """One 2-D level plus (depth-1) chained 1-D levels -> CoefficientSet."""
    b = _as_basis(b)
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2 or frame.shape[0] != 2:
        raise WaveletError(f"decompose expects a 2xL frame, got shape {frame.shape}")
    length = frame.shape[1]
    if depth < 1:
        raise WaveletError(f"depth must be >= 1, got {depth}")
    if length % (2 ** depth) or length < 2 ** depth:
        raise WaveletError(f"depth {depth} too deep for frame length {length}")
    ca, ch, cv, cd = dwt2(frame, b)
    details = [ch, cv, cd]
    for _ in range(1, depth):
        ca, cdi = dwt1(ca, b)
        details.append(cdi)
    return CoefficientSet(ca=ca, details=details, basis=b.name, depth=depth,
                          label=label, snr_db=snr_db)


def reconstruct(coeffs):
    """Exact inverse of :func:`decompose` -> 2xL float64 array."""
    b = basis(coeffs.basis)
    length = coeffs.validate_schedule()
    ca = coeffs.ca
    for cdi in reversed(coeffs.details[3:]):
        ca = idwt1(ca, cdi, b)
    ch, cv, cd = coeffs.details[:3]
    frame = idwt2(ca, ch, cv, cd, b)
    assert frame.shape == (2, length)
    return frame
