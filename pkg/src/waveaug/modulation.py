"""Modulation schemes and bit-to-symbol mapping.

Symbol tables are Gray-coded and normalized to unit average alphabet energy
(non-FSK). Exact conventions, all pinned by tests:

* PSK: constellation point p (counter-clockwise from the phase offset) gets
  bit pattern gray(p). BPSK sits on the real axis (0 -> +1, 1 -> -1); QPSK
  and OQPSK start at 45 degrees; 8PSK starts at 0 degrees.
* PAM: amplitude levels ascend -(M-1), ..., +(M-1) step 2 before
  normalization; level p gets pattern gray(p).
* QAM: square grids for 16/64-QAM (I gets the high bit half, Q the low),
  an 8x4 rectangular grid for 32-QAM; each axis Gray-coded independently.
* FSK: tone p (lowest frequency first) gets pattern gray(p); map_symbols
  returns integer tone indices, rendered phase-continuous downstream.
"""

from dataclasses import dataclass

import numpy as np


class ModulationError(ValueError):
    """Unknown scheme or malformed bit sequence."""


@dataclass(frozen=True)
class ModulationScheme:
    name: str
    bits_per_symbol: int
    family: str  # PSK | FSK | PAM | QAM | OQPSK

    @property
    def order(self):
        return 1 << self.bits_per_symbol

    @property
    def is_fsk(self):
        return self.family == "FSK"

    @property
    def is_linear(self):
        return not self.is_fsk


SCHEMES = {
    s.name: s
    for s in (
        ModulationScheme("BPSK", 1, "PSK"),
        ModulationScheme("QPSK", 2, "PSK"),
        ModulationScheme("8PSK", 3, "PSK"),
        ModulationScheme("OQPSK", 2, "OQPSK"),
        ModulationScheme("2FSK", 1, "FSK"),
        ModulationScheme("4FSK", 2, "FSK"),
        ModulationScheme("8FSK", 3, "FSK"),
        ModulationScheme("4PAM", 2, "PAM"),
        ModulationScheme("8PAM", 3, "PAM"),
        ModulationScheme("16QAM", 4, "QAM"),
        ModulationScheme("32QAM", 5, "QAM"),
        ModulationScheme("64QAM", 6, "QAM"),
    )
}


def get_scheme(name):
    try:
        return SCHEMES[name]
    except KeyError:
        raise ModulationError(
            f"unknown scheme {name!r}; supported: {', '.join(sorted(SCHEMES))}"
        ) from None


def _gray(p):
    return p ^ (p >> 1)


def _psk_table(order, phase0):
    table = np.empty(order, dtype=np.complex128)
    for p in range(order):
        table[_gray(p)] = np.exp(1j * (phase0 + 2.0 * np.pi * p / order))
    return table


def _pam_levels(order):
    levels = np.arange(-(order - 1), order, 2, dtype=np.float64)
    table = np.empty(order)
    for p in range(order):
        table[_gray(p)] = levels[p]
    return table


def _normalize(table):
    return table / np.sqrt(np.mean(np.abs(table) ** 2))


def constellation(scheme):
    """Unit-mean-energy symbol table indexed by the symbol's bit pattern."""
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    if scheme.is_fsk:
        raise ModulationError(f"{scheme.name} has no linear constellation")
    if scheme.family in ("PSK", "OQPSK"):
        phase0 = np.pi / 4 if scheme.order == 4 else 0.0
        return _psk_table(scheme.order, phase0)  # unit modulus already
    if scheme.family == "PAM":
        return _normalize(_pam_levels(scheme.order).astype(np.complex128))
    # QAM: split bits between the I and Q axes (extra bit goes to I)
    i_bits = (scheme.bits_per_symbol + 1) // 2
    q_bits = scheme.bits_per_symbol - i_bits
    i_levels = _pam_levels(1 << i_bits)
    q_levels = _pam_levels(1 << q_bits)
    table = np.empty(scheme.order, dtype=np.complex128)
    for idx in range(scheme.order):
        table[idx] = i_levels[idx >> q_bits] + 1j * q_levels[idx & ((1 << q_bits) - 1)]
    return _normalize(table)


def fsk_tones(scheme):
    """Tone-order index per bit pattern (lowest frequency = tone 0)."""
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    if not scheme.is_fsk:
        raise ModulationError(f"{scheme.name} is not an FSK scheme")
    tones = np.empty(scheme.order, dtype=np.int64)
    for p in range(scheme.order):
        tones[_gray(p)] = p
    return tones


def _pack_bits(bits, width):
    bits = np.asarray(bits, dtype=np.int64)
    if bits.ndim != 1:
        raise ModulationError("bits must be a 1-D sequence")
    if np.any((bits != 0) & (bits != 1)):
        raise ModulationError("bits must be 0/1")
    if bits.shape[0] % width:
        raise ModulationError(
            f"bit count {bits.shape[0]} not divisible by {width} bits/symbol"
        )
    grouped = bits.reshape(-1, width)
    weights = 1 << np.arange(width - 1, -1, -1)
    return grouped @ weights


def map_symbols(bits, scheme):
    """Map a bit sequence onto symbols.

    Linear schemes return complex symbols from the unit-energy table; FSK
    returns integer tone indices.
    """
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    idx = _pack_bits(bits, scheme.bits_per_symbol)
    if scheme.is_fsk:
        return fsk_tones(scheme)[idx]
    return constellation(scheme)[idx]
