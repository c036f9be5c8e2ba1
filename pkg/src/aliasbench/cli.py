"""Command-line front end: build the benchmark, run module comparisons,
export sweep spectrograms and filter responses.

Exit codes: 0 success, 2 bad configuration/arguments, 3 I/O failure,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .activations import ActivationSpec, apply_activation
from .audio import NumericError
from .bench import (
    DEFAULT_ACTIVATIONS,
    BenchEntryMeta,
    load_bench_csv,
    regenerate_entries,
    run_activations,
    upsampler_table,
    write_activation_full_csv,
    write_activation_summary_csv,
    write_bench_csv,
    write_per_signal_csv,
    write_upsampler_summary_csv,
)
from .configio import (
    ConfigError,
    config_hash,
    file_sha256,
    load_activation_configs,
    serialize_spec,
    write_csv,
    write_manifest,
)
from .filters import design_fir, frequency_response, interp_kernel, resample_filter_spec
from .metrics import spectrogram_export
from .signals import TestSignalSpec, build_benchmark, gen_sweep
from .wavio import WavError, wav_read, wav_write

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

SWEEP_F_START_HZ = 20.0
SWEEP_F_END_HZ = 20000.0
SWEEP_DURATION_S = 4.0
SWEEP_RATE = 44100
SWEEP_FRAME = 1024
SWEEP_HOP = 256

#: The six sweep panels: pass-through, then the oversampling ladder.
DEFAULT_SWEEP_PANELS: tuple[tuple[str, ActivationSpec | None], ...] = (
    ("01_no_activation", None),
    ("02_snakebeta_c1", ActivationSpec("snakebeta", name="snakebeta_c1")),
    ("03_snakebeta_c2", ActivationSpec("snakebeta", oversample=2, name="snakebeta_c2")),
    ("04_snakebeta_c4", ActivationSpec("snakebeta", oversample=4, name="snakebeta_c4")),
    ("05_adaa_snakebeta_c1", ActivationSpec("adaa_snakebeta", name="adaa_snakebeta_c1")),
    ("06_adaa_snakebeta_c2", ActivationSpec("adaa_snakebeta", oversample=2, name="adaa_snakebeta_c2")),
)


def cmd_gen_bench(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    metas: list[BenchEntryMeta] = []
    for spec, buf in build_benchmark(args.note_grid):
        name = f"{spec.waveform}_{spec.midi_note:03d}.wav"
        wav_write(buf, out_dir / name)
        metas.append(
            BenchEntryMeta(spec.waveform, spec.midi_note, spec.f0_hz, spec.duration_s, spec.sample_rate, name)
        )
    write_bench_csv(out_dir / "bench.csv", metas)
    write_manifest(
        out_dir / "manifest.json",
        {
            "command": "gen-bench",
            "version": __version__,
            "note_grid": args.note_grid,
            "seed": args.seed,
            "signals": len(metas),
            "files": {m.path: file_sha256(out_dir / m.path) for m in metas},
            "bench_csv_sha256": file_sha256(out_dir / "bench.csv"),
        },
    )
    print(f"wrote {len(metas)} signals to {out_dir}")
    return EXIT_OK


def _load_bench_entries(bench_dir: Path):
    metas = load_bench_csv(bench_dir / "bench.csv")
    entries = []
    for m in metas:
        buf = wav_read(bench_dir / m.path)
        if buf.sample_rate != m.sample_rate:
            raise ConfigError(
                f"{m.path}: WAV rate {buf.sample_rate} disagrees with metadata {m.sample_rate}"
            )
        entries.append((m.waveform, m.f0_hz, buf))
    return metas, entries


def cmd_run_activations(args: argparse.Namespace) -> int:
    bench_dir = Path(args.bench)
    metas, entries = _load_bench_entries(bench_dir)
    if args.configs:
        configs = load_activation_configs(args.configs)
        config_source = str(args.configs)
    else:
        configs = list(DEFAULT_ACTIVATIONS)
        config_source = "builtin"

    reports = run_activations(entries, configs, threads=args.threads)

    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    table_only = any(c.table_row for c in configs)
    write_activation_summary_csv(out, reports, table_only=table_only, configs=configs)
    per_signal = out.with_name(out.stem + "_per_signal.csv")
    full = out.with_name(out.stem + "_full.csv")
    write_per_signal_csv(per_signal, reports)
    write_activation_full_csv(full, reports, configs)
    write_manifest(
        out.with_name(out.stem + "_manifest.json"),
        {
            "command": "run-activations",
            "version": __version__,
            "bench_dir": str(bench_dir),
            "bench_csv_sha256": file_sha256(bench_dir / "bench.csv"),
            "config_source": config_source,
            "configs": [
                {"name": c.name, "hash": config_hash(c), "spec": serialize_spec(c)} for c in configs
            ],
            "seed": args.seed,
            "threads": args.threads,
            "signals": len(metas),
            "outputs": {p.name: file_sha256(p) for p in (out, per_signal, full)},
        },
    )
    for rep in reports:
        print(f"{rep.module_name:>24s}  average {rep.overall_mean_db:8.2f} dB")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_run_upsamplers(args: argparse.Namespace) -> int:
    if args.factor < 2:
        raise ConfigError(f"--factor must be >= 2, got {args.factor}")
    if args.seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {args.seeds}")
    bench_dir = Path(args.bench)
    metas = load_bench_csv(bench_dir / "bench.csv")
    try:
        specs = [
            TestSignalSpec(m.waveform, m.midi_note, duration_s=m.duration_s, sample_rate=m.sample_rate)
            for m in metas
        ]
    except ValueError as exc:
        raise ConfigError(f"bench.csv: {exc}") from exc
    entries = regenerate_entries(specs, args.factor)

    rows, reports = upsampler_table(
        entries,
        factor=args.factor,
        n_seeds=args.seeds,
        base_seed=args.seed,
        threads=args.threads,
    )

    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_upsampler_summary_csv(out, rows)
    per_signal = out.with_name(out.stem + "_per_signal.csv")
    write_per_signal_csv(per_signal, reports)
    write_manifest(
        out.with_name(out.stem + "_manifest.json"),
        {
            "command": "run-upsamplers",
            "version": __version__,
            "bench_dir": str(bench_dir),
            "bench_csv_sha256": file_sha256(bench_dir / "bench.csv"),
            "factor": args.factor,
            "conv_seeds": args.seeds,
            "seed": args.seed,
            "threads": args.threads,
            "signals": len(metas),
            "outputs": {p.name: file_sha256(p) for p in (out, per_signal)},
        },
    )
    for row in rows:
        print(f"{row.module:>24s}  average {row.average_db:8.2f} dB  tonal {row.tonal_line_db:8.2f} dB")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.config:
        configs = load_activation_configs(args.config)
        panels: list[tuple[str, ActivationSpec | None]] = [
            (f"{i + 1:02d}_{spec.name}", spec) for i, spec in enumerate(configs)
        ]
    else:
        panels = list(DEFAULT_SWEEP_PANELS)

    x = gen_sweep(SWEEP_F_START_HZ, SWEEP_F_END_HZ, SWEEP_DURATION_S, SWEEP_RATE)
    written = []
    for name, spec in panels:
        y = x if spec is None else apply_activation(x, spec)
        csv_path, pgm_path = spectrogram_export(y, SWEEP_FRAME, SWEEP_HOP, out_dir / name)
        written += [csv_path, pgm_path]
    print(f"wrote {len(written)} spectrogram files to {out_dir}")
    return EXIT_OK


def cmd_filter_response(args: argparse.Namespace) -> int:
    n = args.N
    if n < 1:
        raise ConfigError(f"--N must be >= 1, got {n}")
    if args.kind == "designed":
        if n < 2:
            raise ConfigError("designed response needs --N >= 2 (the resampling factor)")
        kernel = design_fir(resample_filter_spec(n))
    else:
        kernel = interp_kernel(args.kind, n)
    cutoff_norm = 1.0 / n

    omegas, response = frequency_response(kernel, 4096)
    omega_norm = omegas / np.pi
    mag = np.abs(response)
    dc = mag[0]
    with np.errstate(divide="ignore"):
        mag_db = np.maximum(20.0 * np.log10(mag / dc), -300.0)
    phase = np.angle(response)
    ideal_db = np.where(omega_norm <= cutoff_norm, 0.0, -300.0)

    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    rows = [
        [f"{w:.8f}", f"{m:.6f}", f"{p:.6f}", f"{i:.2f}"]
        for w, m, p, i in zip(omega_norm, mag_db, phase, ideal_db)
    ]
    write_csv(out, ["omega_normalized", "magnitude_db", "phase_rad", "ideal_magnitude_db"], rows)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aliasbench",
        description="Aliasing benchmark for activations and upsamplers on band-limited test signals.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="manifest seed for all randomness (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for signal evaluation (default 1)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-bench", parents=[common], help="synthesize the test-signal benchmark")
    p.add_argument("--out", required=True, help="output directory for WAVs + bench.csv")
    p.add_argument(
        "--note-grid", choices=("loguniform48", "chromatic"), default="loguniform48",
        help="48 log-uniform notes C4..B7 (default) or the 36-note chromatic grid",
    )
    p.set_defaults(func=cmd_gen_bench)

    p = sub.add_parser("run-activations", parents=[common], help="AHR comparison of activation configs")
    p.add_argument("--bench", required=True, help="benchmark directory from gen-bench")
    p.add_argument("--configs", default=None, help="key=value config blocks (default: built-in set)")
    p.add_argument("--out", required=True, help="summary CSV path")
    p.set_defaults(func=cmd_run_activations)

    p = sub.add_parser("run-upsamplers", parents=[common], help="AHR comparison of upsampler kinds")
    p.add_argument("--bench", required=True, help="benchmark directory from gen-bench")
    p.add_argument("--factor", type=int, default=2, help="upsampling factor L (default 2)")
    p.add_argument("--seeds", type=int, default=10, help="ConvTranspose seed count (default 10)")
    p.add_argument("--out", required=True, help="summary CSV path")
    p.set_defaults(func=cmd_run_upsamplers)

    p = sub.add_parser("sweep", parents=[common], help="sweep spectrograms per activation panel")
    p.add_argument("--config", default=None, help="activation config blocks (default: six standard panels)")
    p.add_argument("--out", required=True, help="output directory for CSV/PGM spectrograms")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("filter-response", parents=[common], help="frequency response of an upsampling kernel")
    p.add_argument("--kind", choices=("linear", "nearest", "designed"), required=True)
    p.add_argument("--N", type=int, default=2, help="kernel half-width / resampling factor (default 2)")
    p.add_argument("--out", required=True, help="response CSV path")
    p.set_defaults(func=cmd_filter_response)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WavError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
