"""Tests for spectral estimation and the aliasing-to-harmonic ratio.

The end-to-end AHR oracle is fully independent of the pipeline: the exact
output partials of a memoryless nonlinearity driven by a sine are computed
from a dense one-period FFT, assigned to harmonic or alias buckets by fold
arithmetic, and the predicted ratio is compared against the measured one.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from aliasbench.activations import ActivationSpec, apply_activation
from aliasbench.audio import AudioBuffer
from aliasbench.metrics import (
    ActivationContext,
    SignalAhr,
    UpsamplerContext,
    ahr,
    band_energy,
    build_report,
    estimate_spectrum,
    fold_frequency,
    measure_ahr,
    spectrogram,
    spectrogram_export,
)
from aliasbench.signals import (
    BENCH_AMPLITUDE,
    TestSignalSpec,
    gen_bandlimited,
    gen_sweep,
    midi_to_freq,
)

RATE = 44100


def sine_buffer(freq, duration_s=1.0, amplitude=1.0, rate=RATE, phase=0.0):
    t = np.arange(int(rate * duration_s)) / rate
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq * t + phase), rate)


class TestEstimateSpectrum:
    def test_unit_sine_total_power(self):
        """Bins sum to the window-weighted mean power: 0.5 for a unit sine."""
        s = estimate_spectrum(sine_buffer(441.0))
        assert_allclose(s.total_power, 0.5, rtol=1e-12)

    def test_normalization_independent_of_bin_alignment(self):
        s = estimate_spectrum(sine_buffer(400.3))
        assert_allclose(s.total_power, 0.5, rtol=1e-12)

    def test_silence_is_zero(self):
        s = estimate_spectrum(AudioBuffer(np.zeros(4096), RATE))
        assert np.all(s.power <= 1e-30)

    def test_rect_window_satisfies_parseval(self):
        rng = np.random.default_rng(42)
        v = rng.standard_normal(5000)
        s = estimate_spectrum(AudioBuffer(v, 8000), window="rect")
        assert_allclose(s.total_power, np.mean(v**2), rtol=1e-12)

    def test_zero_padding_and_resolution(self):
        """nfft is the next power of two >= 4x the trimmed length."""
        s = estimate_spectrum(AudioBuffer(np.zeros(10000), RATE), edge_trim=500)
        assert s.data_len == 9000
        assert s.fft_size == 65536
        assert_allclose(s.resolution_hz, RATE / 9000)
        assert_allclose(s.bin_hz, RATE / 65536)
        assert len(s.bin_freqs) == len(s.power) == 65536 // 2 + 1

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            estimate_spectrum(AudioBuffer(np.zeros(1023), RATE))
        with pytest.raises(ValueError):
            estimate_spectrum(AudioBuffer(np.zeros(2000), RATE), edge_trim=600)

    def test_bad_arguments_rejected(self):
        x = AudioBuffer(np.zeros(4096), RATE)
        with pytest.raises(ValueError):
            estimate_spectrum(x, window="blackman")
        with pytest.raises(ValueError):
            estimate_spectrum(x, edge_trim=-1)


class TestBandEnergy:
    def test_two_tone_bands_are_additive(self):
        x = sine_buffer(441.0)
        y = AudioBuffer(x.samples + 0.6 * sine_buffer(5000.0).samples, RATE)
        s = estimate_spectrum(y)
        hw = 4 * s.resolution_hz
        assert_allclose(band_energy(s, 441.0, hw), 0.5, rtol=1e-4)
        assert_allclose(band_energy(s, 5000.0, hw), 0.5 * 0.36, rtol=1e-4)

    def test_far_band_is_empty(self):
        s = estimate_spectrum(sine_buffer(441.0))
        assert band_energy(s, 15000.0, 4 * s.resolution_hz) <= 1e-10 * 0.5

    def test_band_wider_than_spectrum_gives_total(self):
        s = estimate_spectrum(sine_buffer(441.0))
        assert band_energy(s, 0.0, 1e9) == s.total_power

    def test_invalid_bands_rejected(self):
        s = estimate_spectrum(sine_buffer(441.0))
        with pytest.raises(ValueError):
            band_energy(s, -1.0, 10.0)
        with pytest.raises(ValueError):
            band_energy(s, 100.0, -1.0)


class TestFoldFrequency:
    def test_reflection_about_nyquist(self):
        assert fold_frequency(24000.0, 44100) == pytest.approx(20100.0)

    def test_below_nyquist_unchanged(self):
        assert fold_frequency(1000.0, 44100) == 1000.0
        assert fold_frequency(22050.0, 44100) == 22050.0

    def test_multiples_of_rate_fold_to_dc(self):
        assert fold_frequency(44100.0, 44100) == 0.0
        assert fold_frequency(88200.0, 44100) == 0.0

    def test_second_zone(self):
        assert fold_frequency(44100.0 + 300.0, 44100) == pytest.approx(300.0)
        assert fold_frequency(2 * 44100.0 - 300.0, 44100) == pytest.approx(300.0)

    def test_negative_frequency(self):
        assert fold_frequency(-100.0, 44100) == pytest.approx(100.0)


class TestMeasureAhr:
    def test_clean_sine_reads_below_minus_100(self):
        """A band-limited sine carries no alias lines; the only energy the
        alias bands collect is the fundamental's leakage skirt, far below
        anything a real nonlinearity produces."""
        x = gen_bandlimited(TestSignalSpec("sine", 60, duration_s=2.0))
        m = measure_ahr(x, midi_to_freq(60), ActivationContext(), edge_trim=4096)
        assert m.ahr_db <= -100.0
        assert m.harmonic_bands == 84
        assert m.alias_bands == 428

    def test_custom_floor(self):
        x = gen_bandlimited(TestSignalSpec("sine", 60, duration_s=2.0))
        v = ahr(x, midi_to_freq(60), ActivationContext(), edge_trim=4096, floor_db=-60.0)
        assert v == -60.0

    def test_gain_invariance(self):
        """Scaling the output does not move the ratio."""
        f0 = midi_to_freq(107)
        x = gen_bandlimited(TestSignalSpec("sine", 107, duration_s=2.0))
        y = apply_activation(x, ActivationSpec("snakebeta"))
        a = ahr(y, f0, ActivationContext(), edge_trim=4096)
        b = ahr(y.with_samples(y.samples * 3.7), f0, ActivationContext(), edge_trim=4096)
        assert abs(a - b) <= 1e-9

    def test_phase_invariance(self):
        """Input phase only re-aligns leakage against the bin grid; the
        measured ratio moves by far less than a microdecibel."""
        f0 = midi_to_freq(107)
        vals = []
        for phase in (0.0, 0.37, 1.9):
            x = sine_buffer(f0, duration_s=2.0, amplitude=BENCH_AMPLITUDE, phase=phase)
            y = apply_activation(x, ActivationSpec("snakebeta"))
            vals.append(ahr(y, f0, ActivationContext(), edge_trim=4096))
        assert max(vals) - min(vals) <= 1e-6

    def test_upsampler_context_measures_planted_image(self):
        """A -40 dB line at a declared image frequency reads as -40 dB."""
        x = sine_buffer(1000.0, duration_s=2.0)
        y = AudioBuffer(x.samples + 0.01 * sine_buffer(21050.0, duration_s=2.0).samples, RATE)
        ctx = UpsamplerContext(factor=2, input_rate=22050, alias_freqs=(21050.0,))
        m = measure_ahr(y, 1000.0, ctx, edge_trim=4096)
        assert m.harmonic_bands == 11  # k*1000 below the 11025 Hz input Nyquist
        assert m.alias_bands == 1
        assert abs(m.ahr_db - (-40.0)) <= 0.1

    def test_alias_band_near_dc_is_dropped(self):
        x = sine_buffer(1000.0, duration_s=2.0)
        ctx = UpsamplerContext(factor=2, input_rate=22050, alias_freqs=(0.5,))
        m = measure_ahr(x, 1000.0, ctx, edge_trim=4096)
        assert m.alias_bands == 0
        assert m.ahr_db == -120.0

    def test_alias_band_colliding_with_harmonic_is_dropped(self):
        x = sine_buffer(1000.0, duration_s=2.0)
        ctx = UpsamplerContext(factor=2, input_rate=22050, alias_freqs=(3000.2,))
        m = measure_ahr(x, 1000.0, ctx, edge_trim=4096)
        assert m.alias_bands == 0

    def test_added_noise_raises_ahr(self):
        f0 = midi_to_freq(60)
        x = gen_bandlimited(TestSignalSpec("sine", 60, duration_s=2.0))
        y = apply_activation(x, ActivationSpec("snakebeta"))
        clean = ahr(y, f0, ActivationContext(), edge_trim=4096)
        rng = np.random.default_rng(42)
        noisy = y.with_samples(y.samples + 1e-5 * rng.standard_normal(len(y)))
        assert ahr(noisy, f0, ActivationContext(), edge_trim=4096) > clean

    def test_empty_harmonic_set_rejected(self):
        x = sine_buffer(1000.0, duration_s=1.0)
        with pytest.raises(ValueError):
            measure_ahr(x, 30000.0, ActivationContext(), edge_trim=0)

    def test_nonpositive_f0_rejected(self):
        x = sine_buffer(1000.0, duration_s=1.0)
        with pytest.raises(ValueError):
            measure_ahr(x, 0.0, ActivationContext())


class TestAhrOracle:
    """Measured AHR vs an analytically predicted one, per nonlinearity.

    true_partials: |c_k| of f(A sin theta) from a 2^16-point single-period
    FFT. predicted_ahr: partial k carries power 2|c_k|^2; below Nyquist it is
    harmonic energy, at or above it folds, skipping folds that land on a
    harmonic (within the analysis band width) or near DC — the same
    bookkeeping the pipeline applies, but fed exact line strengths.
    """

    M = 2**16

    def predicted_ahr(self, fn, f0, k_cap=512):
        theta = 2 * np.pi * np.arange(self.M) / self.M
        mag = np.abs(np.fft.rfft(fn(BENCH_AMPLITUDE * np.sin(theta))) / self.M)
        nyq = RATE / 2
        e_h = e_a = 0.0
        for k in range(1, k_cap + 1):
            p = 2 * mag[k] ** 2
            f = k * f0
            if f < nyq:
                e_h += p
                continue
            fold = fold_frequency(f, RATE)
            near = round(fold / f0)
            if near >= 1 and near * f0 < nyq and abs(fold - near * f0) < 2.0:
                continue
            if fold < 2.0:
                continue
            e_a += p
        return 10 * np.log10(e_a / e_h)

    @pytest.mark.parametrize(
        "spec,fn",
        [
            (ActivationSpec("snakebeta"), lambda x: x + np.sin(x) ** 2),
            (ActivationSpec("elu"), lambda x: np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))),
        ],
        ids=["snakebeta", "elu"],
    )
    def test_pipeline_matches_analytic_prediction(self, spec, fn):
        sig = TestSignalSpec("sine", 107)
        f0 = sig.f0_hz
        y = apply_activation(gen_bandlimited(sig), spec)
        measured = ahr(y, f0, ActivationContext())
        assert abs(measured - self.predicted_ahr(fn, f0)) <= 0.05


class TestBuildReport:
    def entries(self):
        return [
            SignalAhr("sine", 261.6, -100.0, 1, 10),
            SignalAhr("sine", 523.3, -80.0, 1, 12),
            SignalAhr("sawtooth", 261.6, -30.0, 84, 20),
            SignalAhr("triangle", 261.6, -60.0, 42, 20),
        ]

    def test_means_are_taken_in_db(self):
        r = build_report("M", "abc", self.entries())
        assert r.per_type_mean_db["sine"] == -90.0
        assert r.per_type_mean_db["sawtooth"] == -30.0
        assert_allclose(r.overall_mean_db, np.mean([-100.0, -80.0, -30.0, -60.0]))

    def test_band_counts_accumulate(self):
        r = build_report("M", "abc", self.entries())
        assert r.harmonic_band_count == 128
        assert r.alias_band_count == 62

    def test_empty_report_rejected(self):
        with pytest.raises(ValueError):
            build_report("M", "abc", [])


class TestSpectrogram:
    def test_shape_for_benchmark_settings(self):
        """4 s at 44.1 kHz with frame 1024, hop 256 gives 513 x 687."""
        x = AudioBuffer(np.zeros(4 * RATE), RATE)
        freqs, times, mags = spectrogram(x, 1024, 256)
        assert mags.shape == (513, 687)
        assert len(freqs) == 513 and len(times) == 687
        assert_allclose(times[1] - times[0], 256 / RATE)
        assert freqs[0] == 0.0 and freqs[-1] == RATE / 2

    def test_pure_tone_concentrates_on_one_row(self):
        x = sine_buffer(RATE / 1024 * 100, duration_s=0.5)  # exactly bin 100
        _, _, mags = spectrogram(x, 1024, 256)
        assert np.all(np.argmax(mags[:, 2:-2], axis=0) == 100)

    def test_sweep_ridge_rises_monotonically(self):
        """The peak row of an exponential sweep never steps downward by more
        than one bin of measurement jitter."""
        y = gen_sweep(20.0, 20000.0, 4.0, RATE)
        _, _, mags = spectrogram(y, 1024, 256)
        ridge = np.argmax(mags, axis=0)
        interior = ridge[5:-5]
        assert np.all(np.diff(interior) >= -1)
        assert interior[-1] > interior[0] + 300

    def test_bad_arguments_rejected(self):
        x = AudioBuffer(np.zeros(4096), RATE)
        with pytest.raises(ValueError):
            spectrogram(x, 256, 512)  # hop > frame
        with pytest.raises(ValueError):
            spectrogram(AudioBuffer(np.zeros(100), RATE), 1024, 256)


class TestSpectrogramExport:
    def test_file_pair_and_pgm_header(self, tmp_path):
        x = sine_buffer(1000.0, duration_s=4.0)
        csv_path, pgm_path = spectrogram_export(x, 1024, 256, tmp_path / "panel")
        assert csv_path.name == "panel.csv" and pgm_path.name == "panel.pgm"
        blob = pgm_path.read_bytes()
        header, rest = blob.split(b"255\n", 1)
        assert header == b"P5\n687 513\n"
        assert len(rest) == 687 * 513
        assert max(rest) == 255  # the ridge saturates the scale

    def test_silence_renders_black(self, tmp_path):
        x = AudioBuffer(np.zeros(2 * RATE), RATE)
        _, pgm_path = spectrogram_export(x, 1024, 256, tmp_path / "quiet")
        body = pgm_path.read_bytes().split(b"255\n", 1)[1]
        assert set(body) == {0}

    def test_csv_layout(self, tmp_path):
        x = sine_buffer(1000.0, duration_s=1.0)
        csv_path, _ = spectrogram_export(x, 1024, 256, tmp_path / "panel")
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        header = lines[0].split(",")
        assert header[0] == "time_s"
        assert len(header) == 1 + 513
        assert len(lines) == 1 + (len(x) - 1024) // 256 + 2
        assert float(lines[1].split(",")[0]) == 0.0

    def test_no_temp_files_left(self, tmp_path):
        spectrogram_export(sine_buffer(500.0), 1024, 256, tmp_path / "p")
        assert sorted(p.name for p in tmp_path.iterdir()) == ["p.csv", "p.pgm"]
