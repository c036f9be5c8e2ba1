"""Shared fixtures: a small on-disk benchmark for CLI tests and a terminal
summary that prints one line per acceptance criterion."""

from __future__ import annotations

import pytest

from aliasbench.bench import BenchEntryMeta, write_bench_csv
from aliasbench.signals import TestSignalSpec, gen_bandlimited
from aliasbench.wavio import wav_write

#: (criterion number, passed, detail) tuples registered by test_acceptance.
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"CRITERION {number:2d}: {status} — {detail}")


def make_bench_dir(root, notes=(60, 107), duration_s=1.0, sample_rate=44100):
    """Write a small but spectrally honest benchmark: WAVs + bench.csv."""
    root.mkdir(parents=True, exist_ok=True)
    metas = []
    for waveform in ("sine", "sawtooth", "triangle"):
        for note in notes:
            spec = TestSignalSpec(waveform, note, duration_s=duration_s, sample_rate=sample_rate)
            name = f"{waveform}_{note:03d}.wav"
            wav_write(gen_bandlimited(spec), root / name)
            metas.append(
                BenchEntryMeta(waveform, note, spec.f0_hz, duration_s, sample_rate, name)
            )
    write_bench_csv(root / "bench.csv", metas)
    return metas


@pytest.fixture(scope="session")
def tiny_bench(tmp_path_factory):
    """Six one-second signals (three waveforms x two notes) with bench.csv."""
    root = tmp_path_factory.mktemp("tinybench")
    metas = make_bench_dir(root)
    return root, metas
