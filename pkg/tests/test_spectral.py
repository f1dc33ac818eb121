"""Band energy contours, smoothing, and rate of rise."""

import numpy as np
import pytest

from lmkit.audio import SampledSignal
from lmkit.spectral import (
    BandSpec,
    band_energies,
    rate_of_rise,
    smooth_advanced,
    smooth_basic,
    span_to_frames,
)

from conftest import contours_from_matrix

FS = 16000


def sine(freq, dur_s, amp=0.5, fs=FS, phase=0.0):
    t = np.arange(int(dur_s * fs)) / fs
    return SampledSignal(amp * np.sin(2 * np.pi * freq * t + phase), fs)


def oracle_band_energies(x, fs=FS, window_s=0.008, hop_s=0.001, nfft=256, floor=1e-10):
    """Frame-by-frame reference computation, independent of the library
    path (explicit python loop, full fft instead of rfft)."""
    nwin = round(window_s * fs)
    nhop = round(hop_s * fs)
    w = np.hanning(nwin)
    freqs = np.arange(nfft // 2 + 1) * fs / nfft
    bands = BandSpec().bands
    rows = []
    for start in range(0, len(x) - nwin + 1, nhop):
        spec = np.fft.fft(x[start : start + nwin] * w, nfft)[: nfft // 2 + 1]
        p = np.abs(spec) ** 2
        rows.append([p[(freqs >= lo) & (freqs < hi)].sum() for lo, hi in bands])
    return 10 * np.log10(np.array(rows).T + floor)


class TestBandEnergies:
    def test_matches_framewise_oracle(self, rng):
        x = rng.uniform(-0.5, 0.5, size=FS // 4)
        sig = SampledSignal(x, FS)
        c = band_energies(sig)
        np.testing.assert_allclose(c.energy_db, oracle_band_energies(x), atol=1e-8)

    def test_1khz_sine_lands_in_band2_with_margin(self):
        c = band_energies(sine(1000.0, 1.0))
        interior = c.energy_db[:, 50:-50]
        others = np.delete(interior, 1, axis=0)
        margin = interior[1] - others.max(axis=0)
        assert margin.min() >= 20.0

    def test_zero_signal_sits_at_floor(self):
        c = band_energies(SampledSignal(np.zeros(FS // 4), FS))
        np.testing.assert_allclose(c.energy_db, -100.0)

    def test_doubling_raises_all_bands_6db(self, rng):
        x = rng.uniform(-0.25, 0.25, size=FS // 2)
        c1 = band_energies(SampledSignal(x, FS))
        c2 = band_energies(SampledSignal(2 * x, FS))
        np.testing.assert_allclose(
            c2.energy_db - c1.energy_db, 20 * np.log10(2), atol=0.1
        )

    def test_band_overlap_feeds_both_bands(self):
        # 1.35 kHz lies in band 2 (0.8-1.5) and band 3 (1.2-2.0)
        c = band_energies(sine(1350.0, 0.5))
        interior = c.energy_db[:, 50:-50]
        assert interior[1].min() > 0
        assert interior[2].min() > 0
        # neighboring bands see only window leakage, 40+ dB down
        assert interior[3].max() < interior[1].min() - 40
        assert interior[0].max() < interior[1].min() - 40

    def test_time_shift_covariance(self, rng):
        x = rng.uniform(-0.5, 0.5, size=FS // 4)
        shift = 16 * 5  # 5 hops
        sig = SampledSignal(x, FS)
        sig_shifted = SampledSignal(np.concatenate([np.zeros(shift), x]), FS)
        c = band_energies(sig)
        cs = band_energies(sig_shifted)
        a = c.energy_db[:, 30:-30]
        b = cs.energy_db[:, 35 : 35 + a.shape[1]]
        np.testing.assert_allclose(a, b, atol=0.1)

    def test_signal_shorter_than_window(self):
        with pytest.raises(ValueError, match="shorter"):
            band_energies(SampledSignal(np.zeros(64), FS))

    def test_nfft_must_cover_window(self):
        with pytest.raises(ValueError, match="nfft"):
            band_energies(SampledSignal(np.zeros(4000), FS), nfft=64)

    def test_grid_metadata(self):
        c = band_energies(sine(500.0, 0.25))
        assert c.grid.hop_s == pytest.approx(0.001)
        assert c.grid.window_s == pytest.approx(0.008)
        assert c.grid.origin_s == pytest.approx(0.004)
        assert c.smoothing == "raw"


class TestBandSpec:
    def test_default_edges(self):
        assert BandSpec().bands[0] == (0.0, 400.0)
        assert BandSpec().bands[5] == (5000.0, 8000.0)

    def test_needs_six_bands(self):
        with pytest.raises(ValueError):
            BandSpec(((0.0, 100.0),))

    def test_rejects_inverted_edges(self):
        bad = tuple([(0.0, 400.0)] * 5 + [(5000.0, 4000.0)])
        with pytest.raises(ValueError):
            BandSpec(bad)


class TestSmoothing:
    def test_constant_preserved_both_methods(self):
        c = contours_from_matrix(np.full((6, 200), -37.0))
        for out in (smooth_basic(c, 0.02), smooth_advanced(c, 0.02)):
            np.testing.assert_allclose(out.energy_db, -37.0)

    def test_impulse_plateau(self):
        m = np.zeros((6, 101))
        m[2, 50] = 21.0
        c = contours_from_matrix(m)
        out = smooth_basic(c, 0.005)  # 5-frame window
        np.testing.assert_allclose(out.energy_db[2, 48:53], 21.0 / 5)

    def test_span_of_one_hop_is_identity(self, rng):
        m = rng.standard_normal((6, 80))
        c = contours_from_matrix(m)
        np.testing.assert_array_equal(smooth_basic(c, 0.001).energy_db, m)

    def test_identity_custom_kernel(self, rng):
        m = rng.standard_normal((6, 80))
        c = contours_from_matrix(m)
        out = smooth_advanced(c, 0.02, kernel=np.array([1.0]))
        np.testing.assert_allclose(out.energy_db, m)

    def test_impulse_reproduces_kernel_shape(self):
        m = np.zeros((6, 101))
        m[0, 50] = 1.0
        c = contours_from_matrix(m)
        k = np.hanning(11)
        out = smooth_advanced(c, 0.011, kernel=k)
        np.testing.assert_allclose(out.energy_db[0, 45:56], k / k.sum(), atol=1e-12)

    def test_basic_equals_uniform_advanced(self, rng):
        m = rng.uniform(-100, 0, size=(6, 300))
        c = contours_from_matrix(m)
        width = span_to_frames(0.02, 0.001)
        basic = smooth_basic(c, 0.02).energy_db
        uniform = smooth_advanced(c, 0.02, kernel=np.ones(width)).energy_db
        np.testing.assert_allclose(basic, uniform, atol=1e-9)

    def test_db_offset_shifts_smoothing_not_ror(self, rng):
        m = rng.uniform(-80, 0, size=(6, 250))
        c = contours_from_matrix(m)
        c_off = contours_from_matrix(m + 12.5)
        s1 = smooth_basic(c, 0.02)
        s2 = smooth_basic(c_off, 0.02)
        np.testing.assert_allclose(s2.energy_db - s1.energy_db, 12.5, atol=1e-9)
        np.testing.assert_allclose(
            rate_of_rise(s1, 0.05), rate_of_rise(s2, 0.05), atol=1e-9
        )

    def test_rejects_all_zero_kernel(self):
        c = contours_from_matrix(np.zeros((6, 10)))
        with pytest.raises(ValueError):
            smooth_advanced(c, 0.02, kernel=np.zeros(3))

    def test_rejects_unknown_kernel_name(self):
        c = contours_from_matrix(np.zeros((6, 10)))
        with pytest.raises(ValueError):
            smooth_advanced(c, 0.02, kernel="blackman")


class TestRateOfRise:
    def test_constant_contour_zero(self):
        c = contours_from_matrix(np.full((6, 100), -20.0))
        np.testing.assert_allclose(rate_of_rise(c, 0.05), 0.0)

    def test_ramp_interior_value(self):
        m = np.tile(np.arange(100, dtype=float), (6, 1))  # +1 dB per frame
        c = contours_from_matrix(m)
        ror = rate_of_rise(c, 0.01)  # k = 5
        np.testing.assert_allclose(ror[:, 5:-5], 10.0)

    def test_step_peaks_at_step_frame(self):
        m = np.zeros((6, 200))
        m[:, 100:] = 8.0
        c = contours_from_matrix(m)
        ror = rate_of_rise(c, 0.05)
        assert ror.max() == pytest.approx(8.0)
        # the supra-threshold plateau is centered on the step frame
        run = np.flatnonzero(ror[0] == 8.0)
        assert run[0] <= 100 <= run[-1]

    def test_step_must_cover_one_hop(self):
        c = contours_from_matrix(np.zeros((6, 50)))
        with pytest.raises(ValueError):
            rate_of_rise(c, 0.0005)
