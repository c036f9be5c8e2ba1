"""Spectral analysis and the aliasing-to-harmonic ratio (AHR).

AHR = 10 log10(E_alias / E_harmonic) in dB; more negative is better. Energies
are collected from a single long Hann-windowed FFT in narrow bands around the
expected harmonic and alias line positions, which are computed analytically
from the test signal's fundamental (never detected from the data):

* activation context -- harmonics k*f0 below Nyquist; aliases are the folds
  of k*f0 at and above Nyquist (reflection about 0 and Nyquist);
* upsampler context -- harmonics k*f0 below the *input* Nyquist; aliases are
  the spectral images |n*Fs_in +- k*f0| supplied by the caller.

Band bookkeeping uses bin masks, so overlapping bands are never counted
twice, and alias bands that would touch a harmonic band or DC are dropped.
The measurement is therefore insensitive to output gain and (for signals
periodic in the analysis frame) to time shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import fft as sfft
from scipy.signal import windows

from .audio import AudioBuffer

#: Default AHR clamp: numerically silent alias bands report this instead of -inf.
FLOOR_DB = -120.0

#: Band half-width in analysis-resolution bins (covers the Hann main lobe).
BAND_HALF_WIDTH_BINS = 4

#: Hard cap on harmonic indices considered anywhere in the bookkeeping.
K_CAP = 512


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    """One-sided power spectrum whose bins sum to the windowed mean power."""

    bin_freqs: np.ndarray
    power: np.ndarray
    window: str
    fft_size: int
    data_len: int
    sample_rate: int

    @property
    def resolution_hz(self) -> float:
        """Analysis resolution: rate over the *unpadded* data length."""
        return self.sample_rate / self.data_len

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.fft_size

    @property
    def total_power(self) -> float:
        return float(self.power.sum())


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def estimate_spectrum(x: AudioBuffer, window: str = "hann", edge_trim: int = 0) -> SpectrumEstimate:
    """Single-frame power spectrum of the edge-trimmed signal.

    The frame is windowed (Hann by default; "rect" gives exact Parseval),
    zero-padded to the next power of two >= 4x its length, and normalized so
    the bin powers sum to the window-weighted mean signal power: a unit-
    amplitude sine therefore integrates to ~0.5 regardless of padding.
    """
    if window not in ("hann", "rect"):
        raise ValueError(f"window must be hann or rect, got {window!r}")
    if edge_trim < 0:
        raise ValueError("edge_trim must be >= 0")
    data = x.samples[edge_trim : len(x) - edge_trim]
    n = data.size
    if n < 1024:
        raise ValueError(f"need at least 1024 samples after trimming, got {n}")
    w = windows.hann(n, sym=False) if window == "hann" else np.ones(n)
    nfft = _next_pow2(4 * n)
    spec = sfft.rfft(data * w, n=nfft)
    power = np.abs(spec) ** 2
    power *= 2.0
    power[0] /= 2.0
    power[-1] /= 2.0  # nfft is even, so the last bin is Nyquist
    power /= nfft * float(np.sum(w * w))
    freqs = sfft.rfftfreq(nfft, d=1.0 / x.sample_rate)
    return SpectrumEstimate(freqs, power, window, nfft, n, x.sample_rate)


def band_energy(s: SpectrumEstimate, center_hz: float, half_width_hz: float) -> float:
    """Sum of bin powers over [center - hw, center + hw] (clipped to the grid)."""
    if center_hz < 0:
        raise ValueError("band center must be >= 0")
    if half_width_hz < 0:
        raise ValueError("half width must be >= 0")
    lo, hi = _band_slice(s, center_hz, half_width_hz)
    return float(s.power[lo:hi].sum())


def _band_slice(s: SpectrumEstimate, center_hz: float, half_width_hz: float) -> tuple[int, int]:
    lo = int(np.searchsorted(s.bin_freqs, center_hz - half_width_hz, side="left"))
    hi = int(np.searchsorted(s.bin_freqs, center_hz + half_width_hz, side="right"))
    return lo, hi


def fold_frequency(freq_hz: float, sample_rate: float) -> float:
    """Reflect a frequency into [0, Nyquist] by mirroring about 0 and Nyquist."""
    nyq = sample_rate / 2.0
    r = math.fmod(freq_hz, sample_rate)
    if r < 0:
        r += sample_rate
    return sample_rate - r if r > nyq else r


@dataclass(frozen=True)
class ActivationContext:
    """AHR bookkeeping for a nonlinearity: folds of k*f0 are the aliases."""

    k_cap: int = K_CAP


@dataclass(frozen=True)
class UpsamplerContext:
    """AHR bookkeeping for an upsampling layer.

    alias_freqs are the image frequencies (in Hz, at the output rate) of the
    input's partials; harmonics are counted below the input Nyquist.
    """

    factor: int
    input_rate: int
    alias_freqs: tuple[float, ...]
    k_cap: int = K_CAP


@dataclass(frozen=True)
class AhrMeasurement:
    ahr_db: float
    harmonic_bands: int
    alias_bands: int
    harmonic_energy: float
    alias_energy: float


def measure_ahr(
    output: AudioBuffer,
    f0: float,
    context: ActivationContext | UpsamplerContext,
    edge_trim: int = 8192,
    floor_db: float = FLOOR_DB,
) -> AhrMeasurement:
    """AHR of a processed test signal with full band bookkeeping."""
    if f0 <= 0:
        raise ValueError("f0 must be positive")
    s = estimate_spectrum(output, edge_trim=edge_trim)
    hw = BAND_HALF_WIDTH_BINS * s.resolution_hz

    if isinstance(context, ActivationContext):
        nyq = output.sample_rate / 2.0
        ks = np.arange(1, context.k_cap + 1)
        harm = [k * f0 for k in ks if k * f0 < nyq]
        alias = [fold_frequency(k * f0, output.sample_rate) for k in ks if k * f0 >= nyq]
    else:
        nyq_in = context.input_rate / 2.0
        ks = np.arange(1, context.k_cap + 1)
        harm = [k * f0 for k in ks if k * f0 < nyq_in]
        alias = list(context.alias_freqs)
    if not harm:
        raise ValueError(f"empty harmonic set for f0={f0} Hz")

    hmask = np.zeros(s.power.size, dtype=bool)
    h_count = 0
    for f in harm:
        if f <= 2.0 * hw:  # band would touch DC
            continue
        lo, hi = _band_slice(s, f, hw)
        if hi > lo:
            hmask[lo:hi] = True
            h_count += 1

    amask = np.zeros(s.power.size, dtype=bool)
    a_count = 0
    for f in alias:
        if f <= 2.0 * hw:
            continue
        lo, hi = _band_slice(s, f, hw)
        if hi <= lo or hmask[lo:hi].any():  # collision with a harmonic band
            continue
        amask[lo:hi] = True
        a_count += 1

    assert not np.any(hmask & amask), "harmonic and alias bands must be disjoint"
    e_h = float(s.power[hmask].sum())
    e_a = float(s.power[amask].sum())
    if e_h <= 0.0 or e_a <= 0.0:
        ahr_db = floor_db
    else:
        ahr_db = max(floor_db, 10.0 * math.log10(e_a / e_h))
    return AhrMeasurement(ahr_db, h_count, a_count, e_h, e_a)


def ahr(
    output: AudioBuffer,
    f0: float,
    context: ActivationContext | UpsamplerContext,
    edge_trim: int = 8192,
    floor_db: float = FLOOR_DB,
) -> float:
    """Convenience wrapper returning only the dB value."""
    return measure_ahr(output, f0, context, edge_trim=edge_trim, floor_db=floor_db).ahr_db


@dataclass(frozen=True)
class SignalAhr:
    waveform: str
    f0_hz: float
    ahr_db: float
    harmonic_bands: int
    alias_bands: int


@dataclass(frozen=True)
class AhrReport:
    """Per-signal AHRs plus dB-domain aggregates for one module config."""

    module_name: str
    config_hash: str
    per_signal: tuple[SignalAhr, ...]
    per_type_mean_db: dict[str, float]
    overall_mean_db: float
    harmonic_band_count: int
    alias_band_count: int
    floor_db: float = FLOOR_DB


def build_report(module_name: str, config_hash: str, entries: list[SignalAhr]) -> AhrReport:
    """Aggregate per-signal rows; means are taken in the dB domain."""
    if not entries:
        raise ValueError("cannot build a report from zero signals")
    types: dict[str, list[float]] = {}
    for e in entries:
        types.setdefault(e.waveform, []).append(e.ahr_db)
    per_type = {w: float(np.mean(v)) for w, v in types.items()}
    return AhrReport(
        module_name=module_name,
        config_hash=config_hash,
        per_signal=tuple(entries),
        per_type_mean_db=per_type,
        overall_mean_db=float(np.mean([e.ahr_db for e in entries])),
        harmonic_band_count=sum(e.harmonic_bands for e in entries),
        alias_band_count=sum(e.alias_bands for e in entries),
    )


def spectrogram(x: AudioBuffer, frame: int, hop: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hann STFT magnitude: (bin_freqs, frame_times, S[frame//2+1, n_frames]).

    Frame count is ceil((len - frame)/hop) + 1; the tail frame is zero-padded.
    Frames are not zero-padded individually, so the row count is frame//2 + 1.
    """
    if hop < 1 or frame < hop:
        raise ValueError("need frame >= hop >= 1")
    n = len(x)
    if n < frame:
        raise ValueError(f"signal shorter than one frame ({n} < {frame})")
    n_frames = -(-(n - frame) // hop) + 1
    padded = np.zeros((n_frames - 1) * hop + frame)
    padded[:n] = x.samples
    w = windows.hann(frame, sym=False)
    cols = np.empty((frame // 2 + 1, n_frames))
    for i in range(n_frames):
        seg = padded[i * hop : i * hop + frame]
        cols[:, i] = np.abs(sfft.rfft(seg * w))
    freqs = sfft.rfftfreq(frame, d=1.0 / x.sample_rate)
    times = np.arange(n_frames) * hop / x.sample_rate
    return freqs, times, cols


def spectrogram_export(x: AudioBuffer, frame: int, hop: int, base_path: str | Path) -> tuple[Path, Path]:
    """Write the log-magnitude STFT as <base>.csv and <base>.pgm.

    dB values are relative to the global maximum, clamped to [-100, 0] and
    mapped linearly to pixel values [0, 255]; silence maps to all-zero pixels.
    PGM rows run from the highest frequency (top) down to DC.
    """
    base = Path(base_path)
    freqs, times, mags = spectrogram(x, frame, hop)
    peak = mags.max()
    if peak > 0.0:
        db = 20.0 * np.log10(np.maximum(mags, peak * 1e-10) / peak)
        db = np.clip(db, -100.0, 0.0)
    else:
        db = np.full(mags.shape, -100.0)

    csv_path = base.with_suffix(".csv")
    pgm_path = base.with_suffix(".pgm")

    header = "time_s," + ",".join(f"{f:.3f}" for f in freqs)
    lines = [header]
    for i, t in enumerate(times):
        lines.append(f"{t:.6f}," + ",".join(f"{v:.2f}" for v in db[:, i]))
    _atomic_write_bytes(csv_path, ("\n".join(lines) + "\n").encode())

    pixels = np.rint((db + 100.0) / 100.0 * 255.0).astype(np.uint8)
    pixels = pixels[::-1, :]  # highest frequency on top
    pgm_header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode()
    _atomic_write_bytes(pgm_path, pgm_header + pixels.tobytes())
    return csv_path, pgm_path


def _atomic_write_bytes(path: Path, blob: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(blob)
    tmp.replace(path)
