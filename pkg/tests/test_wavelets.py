import math

import numpy as np
import pytest

from waveaug import _kernels as kernels
from waveaug import wavelets as wv

ALL_BASES = list(wv.SUPPORTED_BASES)
ORTHOGONAL = [n for n in ALL_BASES if wv.basis(n).kind == "orthogonal"]

SQ2 = np.sqrt(2.0)


class TestFilterTables:
    def test_haar_filters(self):
        b = wv.basis("haar")
        assert np.allclose(b.lo_d, [1 / SQ2, 1 / SQ2], atol=0)
        assert np.allclose(b.hi_d, [1 / SQ2, -1 / SQ2], atol=0)

    @pytest.mark.parametrize("name", ORTHOGONAL)
    def test_admissibility_sums(self, name):
        b = wv.basis(name)
        assert abs(b.lo_d.sum() - SQ2) < 1e-10
        assert abs((b.lo_d ** 2).sum() - 1.0) < 1e-10

    @pytest.mark.parametrize("name", ORTHOGONAL)
    def test_qmf_relation(self, name):
        b = wv.basis(name)
        taps = b.taps
        expected = np.array([(-1.0) ** n * b.lo_d[taps - 1 - n] for n in range(taps)])
        assert np.array_equal(b.hi_d, expected)

    @pytest.mark.parametrize("name", ALL_BASES)
    def test_even_tap_count_and_reversed_rec(self, name):
        b = wv.basis(name)
        assert b.taps % 2 == 0
        assert np.array_equal(b.lo_r, b.lo_d[::-1])
        assert np.array_equal(b.hi_r, b.hi_d[::-1])

    def test_db5_has_ten_taps(self):
        assert wv.basis("db5").taps == 10

    def test_coif3_vanishing_moments(self):
        # moment sums computed by direct summation
        b = wv.basis("coif3")
        assert b.taps == 18
        n = np.arange(b.taps, dtype=float)
        for k in range(6):
            assert abs(math.fsum((n ** k * b.hi_d).tolist())) < 1e-6

    def test_rbio_is_biorthogonal_class(self):
        assert wv.basis("rbio1.1").kind == "biorthogonal"
        # opposite highpass sign convention from haar
        assert np.array_equal(wv.basis("rbio1.1").hi_d, -wv.basis("haar").hi_d)

    def test_unknown_name_rejected(self):
        with pytest.raises(wv.WaveletError, match="haar"):
            wv.basis("db99")


class TestDwt1:
    def test_constant_input(self):
        ca, cd = wv.dwt1([1.0, 1.0, 1.0, 1.0], "haar")
        assert np.allclose(ca, [SQ2, SQ2], atol=1e-15)
        assert np.allclose(cd, 0.0, atol=1e-15)

    def test_alternating_input(self):
        ca, cd = wv.dwt1([1.0, -1.0, 1.0, -1.0], "haar")
        assert np.allclose(ca, 0.0, atol=1e-15)
        assert np.allclose(np.abs(cd), SQ2, atol=1e-15)

    def test_analysis_convention_pinned(self):
        # ca[n] = sum_f x[(2n - f) mod N] * lo_d[f]
        x = np.array([3.0, 1.0, 4.0, 1.0])
        ca, cd = wv.dwt1(x, "haar")
        assert np.allclose(ca, [(3 + 1) / SQ2, (4 + 1) / SQ2], atol=1e-15)
        assert np.allclose(cd, [(3 - 1) / SQ2, (4 - 1) / SQ2], atol=1e-15)

    @pytest.mark.parametrize("name", ORTHOGONAL)
    def test_energy_conservation(self, name):
        x = np.random.default_rng(42).standard_normal(64)
        ca, cd = wv.dwt1(x, name)
        lhs = math.fsum((x ** 2).tolist())
        rhs = math.fsum((ca ** 2).tolist()) + math.fsum((cd ** 2).tolist())
        assert abs(lhs - rhs) < 1e-10

    def test_output_lengths(self):
        ca, cd = wv.dwt1(np.arange(128.0), "db5")
        assert ca.shape == cd.shape == (64,)

    def test_odd_length_rejected(self):
        with pytest.raises(wv.WaveletError, match="even"):
            wv.dwt1(np.arange(7.0), "haar")

    def test_short_length_rejected(self):
        with pytest.raises(wv.WaveletError):
            wv.dwt1(np.array([1.0]), "haar")


class TestIdwt1:
    def test_roundtrip_haar(self):
        x = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
        ca, cd = wv.dwt1(x, "haar")
        assert np.max(np.abs(wv.idwt1(ca, cd, "haar") - x)) < 1e-12

    def test_constant_inverse(self):
        out = wv.idwt1([SQ2, SQ2], [0.0, 0.0], "haar")
        assert np.allclose(out, 1.0, atol=1e-15)

    def test_roundtrip_rbio(self):
        x = np.random.default_rng(0).standard_normal(128)
        ca, cd = wv.dwt1(x, "rbio1.1")
        assert np.max(np.abs(wv.idwt1(ca, cd, "rbio1.1") - x)) < 1e-10

    @pytest.mark.parametrize("name", ALL_BASES)
    def test_roundtrip_all(self, name):
        x = np.random.default_rng(1).standard_normal(64)
        ca, cd = wv.dwt1(x, name)
        assert np.max(np.abs(wv.idwt1(ca, cd, name) - x)) < 1e-10

    def test_length_mismatch_rejected(self):
        with pytest.raises(wv.WaveletError, match="matching"):
            wv.idwt1(np.zeros(4), np.zeros(3), "haar")

    def test_output_length(self):
        assert wv.idwt1(np.zeros(16), np.zeros(16), "db5").shape == (32,)


class TestDwt2:
    def test_constant_frame(self):
        frame = np.full((2, 16), 3.0)
        ca, ch, cv, cd = wv.dwt2(frame, "haar")
        for band in (ch, cv, cd):
            assert np.allclose(band, 0.0, atol=1e-14)
        assert np.allclose(ca, ca[0])
        assert abs(ca[0]) > 0

    def test_antisymmetric_rows(self):
        rng = np.random.default_rng(2)
        r = rng.standard_normal(32)
        frame = np.vstack([r, -r])
        ca, ch, cv, cd = wv.dwt2(frame, "haar")
        assert np.allclose(ca, 0.0, atol=1e-12)
        assert np.allclose(ch, 0.0, atol=1e-12)
        energy = (cv ** 2).sum() + (cd ** 2).sum()
        assert abs(energy - (frame ** 2).sum()) < 1e-10

    @pytest.mark.parametrize("name", ORTHOGONAL)
    def test_energy_conservation_2d(self, name):
        frame = np.random.default_rng(3).standard_normal((2, 64))
        bands = wv.dwt2(frame, name)
        lhs = math.fsum((frame ** 2).ravel().tolist())
        rhs = math.fsum(np.concatenate([b ** 2 for b in bands]).tolist())
        assert abs(lhs - rhs) < 1e-10

    def test_band_lengths(self):
        bands = wv.dwt2(np.zeros((2, 128)), "db5")
        assert all(b.shape == (64,) for b in bands)

    def test_wrong_row_count_rejected(self):
        with pytest.raises(wv.WaveletError, match="2xL"):
            wv.dwt2(np.zeros((3, 16)), "haar")

    @pytest.mark.parametrize("name", ALL_BASES)
    def test_row_step_matches_generic_kernel(self, name):
        # the 2-sample row transform must equal the generic periodic kernel
        # applied column by column
        b = wv.basis(name)
        frame = np.random.default_rng(4).standard_normal((2, 16))
        ca, ch, cv, cd = wv.dwt2(frame, name)
        top_lo, top_hi = wv.dwt1(frame[0], b)
        bot_lo, bot_hi = wv.dwt1(frame[1], b)
        for col in range(16 // 2):
            a, d = kernels.dwt_periodic(
                np.array([top_lo[col], bot_lo[col]]), b.lo_d, b.hi_d)
            assert abs(a[0] - ca[col]) < 1e-12
            assert abs(d[0] - cv[col]) < 1e-12
            a, d = kernels.dwt_periodic(
                np.array([top_hi[col], bot_hi[col]]), b.lo_d, b.hi_d)
            assert abs(a[0] - ch[col]) < 1e-12
            assert abs(d[0] - cd[col]) < 1e-12


class TestIdwt2:
    def test_roundtrip_haar_2x1024(self):
        frame = np.random.default_rng(5).standard_normal((2, 1024))
        out = wv.idwt2(*wv.dwt2(frame, "haar"), "haar")
        assert np.max(np.abs(out - frame)) < 1e-10

    def test_zero_bands(self):
        out = wv.idwt2(np.zeros(8), np.zeros(8), np.zeros(8), np.zeros(8), "db5")
        assert out.shape == (2, 16)
        assert np.all(out == 0.0)

    def test_roundtrip_coif3_2x256(self):
        frame = np.random.default_rng(6).standard_normal((2, 256))
        out = wv.idwt2(*wv.dwt2(frame, "coif3"), "coif3")
        assert np.max(np.abs(out - frame)) < 1e-9

    def test_length_mismatch_rejected(self):
        with pytest.raises(wv.WaveletError, match="equal length"):
            wv.idwt2(np.zeros(8), np.zeros(8), np.zeros(8), np.zeros(4), "haar")


class TestDecomposeReconstruct:
    def test_schedule_e3(self):
        coeffs = wv.decompose(np.zeros((2, 1024)), "haar", 3)
        assert [d.shape[0] for d in coeffs.details] == [512, 512, 512, 256, 128]
        assert coeffs.ca.shape == (128,)
        assert len(coeffs.details) == 5

    def test_schedule_e1(self):
        coeffs = wv.decompose(np.zeros((2, 64)), "haar", 1)
        assert len(coeffs.details) == 3
        assert coeffs.ca.shape == (32,)

    def test_total_count_nonexpansive(self):
        for depth in range(1, 6):
            coeffs = wv.decompose(np.zeros((2, 1024)), "db5", depth)
            total = coeffs.ca.size + sum(d.size for d in coeffs.details)
            assert total == 2 * 1024

    def test_depth_too_deep_rejected(self):
        with pytest.raises(wv.WaveletError, match="too deep"):
            wv.decompose(np.zeros((2, 16)), "haar", 5)

    @pytest.mark.parametrize("name", ALL_BASES)
    @pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
    def test_roundtrip(self, name, depth):
        rng = np.random.default_rng(depth)
        for _ in range(4):
            frame = rng.standard_normal((2, 1024))
            out = wv.reconstruct(wv.decompose(frame, name, depth))
            assert np.max(np.abs(out - frame)) < 1e-8

    def test_linearity(self):
        rng = np.random.default_rng(7)
        x, y = rng.standard_normal((2, 2, 256))
        a, b = 1.7, -0.3
        cx = wv.decompose(x, "db5", 3)
        cy = wv.decompose(y, "db5", 3)
        cz = wv.decompose(a * x + b * y, "db5", 3)
        assert np.max(np.abs(cz.ca - (a * cx.ca + b * cy.ca))) < 1e-10
        for dz, dx, dy in zip(cz.details, cx.details, cy.details):
            assert np.max(np.abs(dz - (a * dx + b * dy))) < 1e-10

    @pytest.mark.parametrize("name", ORTHOGONAL)
    def test_projection_idempotence(self, name):
        # zero one detail band, reconstruct, re-decompose: the band stays zero
        rng = np.random.default_rng(8)
        frame = rng.standard_normal((2, 256))
        coeffs = wv.decompose(frame, name, 3)
        for band in range(5):
            edited = coeffs.copy()
            edited.details[band] = np.zeros_like(edited.details[band])
            again = wv.decompose(wv.reconstruct(edited), name, 3)
            assert np.max(np.abs(again.details[band])) < 1e-8

    def test_schedule_violation_rejected(self):
        coeffs = wv.decompose(np.zeros((2, 64)), "haar", 2)
        coeffs.details[3] = np.zeros(7)
        with pytest.raises(wv.WaveletError, match="schedule"):
            wv.reconstruct(coeffs)


class TestKernelPaths:
    def test_numpy_and_loop_paths_bit_identical(self):
        b = wv.basis("db5")
        x = np.random.default_rng(9).standard_normal(256)
        ca_np, cd_np = kernels._dwt_periodic_numpy(x, b.lo_d, b.hi_d)
        ca_lp, cd_lp = kernels._dwt_periodic_loops(x, b.lo_d, b.hi_d)
        assert np.array_equal(ca_np, ca_lp)
        assert np.array_equal(cd_np, cd_lp)
        y_np = kernels._idwt_periodic_numpy(ca_np, cd_np, b.lo_r, b.hi_r)
        y_lp = kernels._idwt_periodic_loops(ca_np, cd_np, b.lo_r, b.hi_r)
        assert np.array_equal(y_np, y_lp)

    @pytest.mark.skipif(not kernels.NUMBA_ACTIVE, reason="numba disabled")
    def test_active_path_matches_fallback(self):
        b = wv.basis("coif3")
        x = np.random.default_rng(10).standard_normal(512)
        ca, cd = kernels.dwt_periodic(x, b.lo_d, b.hi_d)
        ca_np, cd_np = kernels._dwt_periodic_numpy(x, b.lo_d, b.hi_d)
        assert np.array_equal(ca, ca_np)
        assert np.array_equal(cd, cd_np)
        assert np.array_equal(
            kernels.idwt_periodic(ca, cd, b.lo_r, b.hi_r),
            kernels._idwt_periodic_numpy(ca, cd, b.lo_r, b.hi_r),
        )
