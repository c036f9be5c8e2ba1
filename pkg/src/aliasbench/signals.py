"""Band-limited test-signal generation and the benchmark signal set.

All waveforms are synthesized additively from their Fourier series, summing
only partials that stay clear of the Nyquist fold, so the generated signals
are alias-free by construction. Any aliasing measured after passing them
through a module under test was introduced by that module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer

# Waveform names in declaration (and benchmark sort) order.
WAVEFORMS = ("sine", "sawtooth", "triangle")

#: Peak level every benchmark segment is normalized to (-1 dBFS).
BENCH_AMPLITUDE = 10.0 ** (-1.0 / 20.0)

#: Samples discarded at each edge before any benchmark spectral analysis.
EDGE_DISCARD = 8192

_BENCH_RATE = 44100
_BENCH_DURATION_S = 5.0
_MIDI_LO = 60  # C4
_MIDI_HI = 107  # B7


def midi_to_freq(note: int) -> float:
    """Equal-tempered frequency of a MIDI note number (A4 = 69 = 440 Hz)."""
    return 440.0 * 2.0 ** ((note - 69) / 12.0)


@dataclass(frozen=True)
class TestSignalSpec:
    """Recipe for one band-limited test signal."""

    __test__ = False  # keep pytest from collecting this despite the Test* name

    waveform: str
    midi_note: int
    duration_s: float = _BENCH_DURATION_S
    sample_rate: int = _BENCH_RATE
    amplitude: float = BENCH_AMPLITUDE

    def __post_init__(self) -> None:
        if self.waveform not in WAVEFORMS:
            raise ValueError(f"unknown waveform {self.waveform!r}, expected one of {WAVEFORMS}")
        if not _MIDI_LO <= self.midi_note <= _MIDI_HI:
            raise ValueError(
                f"midi_note {self.midi_note} outside the benchmark range [{_MIDI_LO}, {_MIDI_HI}]"
            )
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")

    @property
    def f0_hz(self) -> float:
        return midi_to_freq(self.midi_note)


def harmonic_cap_hz(sample_rate: int, n_samples: int) -> float:
    """Highest frequency a generated partial may occupy.

    Partials are kept at least max(50 Hz, 4 analysis bins) below Nyquist so
    that legitimate harmonics and fold products never share an analysis band.
    """
    bin_hz = sample_rate / n_samples
    return sample_rate / 2.0 - max(50.0, 4.0 * bin_hz)


def partial_series(waveform: str, f0: float, cap_hz: float) -> tuple[np.ndarray, np.ndarray]:
    """Harmonic numbers and signed Fourier amplitudes below ``cap_hz``.

    sine:     a_1 = 1
    sawtooth: a_k = (2/pi) * (-1)^(k+1) / k
    triangle: a_k = (8/pi^2) * (-1)^((k-1)/2) / k^2   for odd k
    """
    k_hi = int(math.ceil(cap_hz / f0)) - 1  # strict: a partial exactly at the cap is excluded
    if waveform == "sine":
        ks = np.array([1]) if k_hi >= 1 else np.array([], dtype=int)
    elif waveform == "sawtooth":
        ks = np.arange(1, k_hi + 1)
    elif waveform == "triangle":
        ks = np.arange(1, k_hi + 1, 2)
    else:
        raise ValueError(f"unknown waveform {waveform!r}")
    if ks.size == 0:
        return ks, np.array([])
    if waveform == "sine":
        amps = np.array([1.0])
    elif waveform == "sawtooth":
        amps = (2.0 / np.pi) * np.where(ks % 2 == 1, 1.0, -1.0) / ks
    else:
        amps = (8.0 / np.pi**2) * np.where(ks % 4 == 1, 1.0, -1.0) / ks.astype(float) ** 2
    return ks, amps


def law_k_values(waveform: str, amp_floor: float = 1e-6, cap: int = 512) -> tuple[int, ...]:
    """Harmonic numbers whose Fourier-law amplitude is at least amp_floor.

    Used for image accounting in the upsampler benchmark: an upsampler is
    linear, so only partials actually present in the input can produce
    images. sine -> (1,); sawtooth -> 1..cap; triangle -> odd k up to cap.
    """
    if waveform == "sine":
        return (1,) if 1.0 >= amp_floor else ()
    if waveform == "sawtooth":
        ks = [k for k in range(1, cap + 1) if (2.0 / math.pi) / k >= amp_floor]
        return tuple(ks)
    if waveform == "triangle":
        ks = [k for k in range(1, cap + 1, 2) if (8.0 / math.pi**2) / k**2 >= amp_floor]
        return tuple(ks)
    raise ValueError(f"unknown waveform {waveform!r}")


def gen_bandlimited(spec: TestSignalSpec) -> AudioBuffer:
    """Additive synthesis of one test signal, peak-normalized to spec.amplitude.

    Deterministic: equal specs produce bit-identical buffers. Rejects
    fundamentals at or above Nyquist.
    """
    f0 = spec.f0_hz
    if f0 >= spec.sample_rate / 2.0:
        raise ValueError(f"fundamental {f0:.2f} Hz is not below Nyquist ({spec.sample_rate / 2:.1f} Hz)")
    n = int(round(spec.duration_s * spec.sample_rate))
    ks, amps = partial_series(spec.waveform, f0, harmonic_cap_hz(spec.sample_rate, n))
    t = np.arange(n) / spec.sample_rate
    x = np.zeros(n)
    for k, a in zip(ks, amps):
        x += a * np.sin((2.0 * np.pi * f0 * k) * t)
    peak = np.max(np.abs(x)) if n else 0.0
    if peak > 0.0:
        x *= spec.amplitude / peak
    return AudioBuffer(x, spec.sample_rate)


def gen_sweep(f_start: float, f_end: float, duration_s: float, sample_rate: int) -> AudioBuffer:
    """Exponential sine sweep with continuous phase, unit amplitude.

    Instantaneous frequency is f_start * (f_end/f_start)^(t/T); the phase is
    its exact integral, so the sweep starts at f_start and ends at f_end.
    A constant-frequency request degenerates to a plain sine (phase 0).
    """
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    for f in (f_start, f_end):
        if not 0.0 < f < sample_rate / 2.0:
            raise ValueError(f"sweep frequency {f} Hz outside (0, Nyquist)")
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    log_ratio = math.log(f_end / f_start)
    if abs(log_ratio) < 1e-12:
        phase = 2.0 * np.pi * f_start * t
    else:
        phase = (2.0 * np.pi * f_start * duration_s / log_ratio) * (
            np.exp(t * (log_ratio / duration_s)) - 1.0
        )
    return AudioBuffer(np.sin(phase), sample_rate)


def benchmark_notes(note_grid: str = "loguniform48") -> list[int]:
    """MIDI notes of the benchmark grid.

    loguniform48: 48 log-uniform frequencies spanning C4..B7 endpoints
    included -- which is exactly the chromatic semitone grid 60..107.
    chromatic: MIDI 60..95 inclusive (36 notes).
    """
    if note_grid == "loguniform48":
        return list(range(_MIDI_LO, _MIDI_HI + 1))
    if note_grid == "chromatic":
        return list(range(60, 96))
    raise ValueError(f"unknown note grid {note_grid!r}")


def build_benchmark(note_grid: str = "loguniform48") -> list[tuple[TestSignalSpec, AudioBuffer]]:
    """All benchmark segments, sorted by (waveform order, note) ascending."""
    out: list[tuple[TestSignalSpec, AudioBuffer]] = []
    for waveform in WAVEFORMS:
        for note in benchmark_notes(note_grid):
            spec = TestSignalSpec(waveform=waveform, midi_note=note)
            out.append((spec, gen_bandlimited(spec)))
    return out
