import numpy as np
import pytest

from waveaug import modulation as mod

LINEAR = ["BPSK", "QPSK", "8PSK", "OQPSK", "4PAM", "8PAM", "16QAM", "32QAM", "64QAM"]
FSK = ["2FSK", "4FSK", "8FSK"]


class TestSchemes:
    def test_all_twelve_present(self):
        assert len(mod.SCHEMES) == 12

    @pytest.mark.parametrize("name", LINEAR + FSK)
    def test_order_is_power_of_two(self, name):
        s = mod.get_scheme(name)
        assert s.order == 2 ** s.bits_per_symbol

    def test_unknown_scheme_rejected(self):
        with pytest.raises(mod.ModulationError, match="unknown scheme"):
            mod.get_scheme("16APSK")


class TestConstellations:
    @pytest.mark.parametrize("name", LINEAR)
    def test_unit_mean_energy(self, name):
        table = mod.constellation(name)
        assert abs(np.mean(np.abs(table) ** 2) - 1.0) < 1e-12

    def test_bpsk_mapping(self):
        out = mod.map_symbols([0, 1], "BPSK")
        assert np.allclose(out, [1.0, -1.0], atol=1e-12)

    def test_qpsk_gray_angles(self):
        out = mod.map_symbols([0, 0, 0, 1, 1, 1, 1, 0], "QPSK")
        assert np.allclose(np.abs(out), 1.0, atol=1e-12)
        assert np.allclose(np.degrees(np.angle(out)), [45, 135, -135, -45], atol=1e-9)

    def test_4pam_all_zero_bits(self):
        out = mod.map_symbols([0] * 8, "4PAM")
        table = mod.constellation("4PAM")
        most_negative = table.real.min()
        assert np.allclose(out.real, most_negative, atol=1e-12)
        # alphabet is {+-1, +-3}/sqrt(5) by direct enumeration
        expected = np.array([-3, -1, 1, 3]) / np.sqrt(5)
        assert np.allclose(sorted(table.real), expected, atol=1e-12)

    def test_4pam_alphabet_energy_by_enumeration(self):
        table = mod.constellation("4PAM")
        assert abs(sum(abs(v) ** 2 for v in table) / 4 - 1.0) < 1e-12

    def test_gray_adjacent_psk_points_differ_one_bit(self):
        table = mod.constellation("8PSK")
        order = np.argsort(np.angle(table))
        ring = [int(order[i]) for i in range(8)]
        for a, b in zip(ring, ring[1:] + ring[:1]):
            assert bin(a ^ b).count("1") == 1

    def test_fsk_has_no_constellation(self):
        with pytest.raises(mod.ModulationError, match="no linear constellation"):
            mod.constellation("2FSK")


class TestMapSymbols:
    def test_symbol_count(self):
        out = mod.map_symbols([0, 1] * 12, "8PSK")
        assert out.shape == (8,)

    def test_length_not_divisible_rejected(self):
        with pytest.raises(mod.ModulationError, match="not divisible"):
            mod.map_symbols([0, 1, 0], "QPSK")

    def test_non_binary_rejected(self):
        with pytest.raises(mod.ModulationError, match="0/1"):
            mod.map_symbols([0, 2], "BPSK")

    @pytest.mark.parametrize("name", FSK)
    def test_fsk_returns_tone_indices(self, name):
        s = mod.get_scheme(name)
        bits = np.tile(np.arange(2), s.bits_per_symbol * 3)[: s.bits_per_symbol * 4]
        out = mod.map_symbols(bits, name)
        assert out.dtype == np.int64
        assert out.min() >= 0 and out.max() < s.order

    def test_2fsk_tone_mapping(self):
        out = mod.map_symbols([0, 1], "2FSK")
        assert out.tolist() == [0, 1]
