"""Plain-text config blocks, content hashing, manifests, atomic file writes.

Config files are key = value lines; blank lines separate blocks; '#' starts
a comment line. Every value a spec dataclass needs has a fixed key; unknown
keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import fields
from pathlib import Path

from .activations import ActivationSpec
from .upsamplers import UpsamplerSpec


class ConfigError(ValueError):
    """Malformed, empty, or inconsistent configuration input."""


def parse_blocks(text: str) -> list[dict[str, str]]:
    """Split key=value text into a list of per-block dicts."""
    blocks: list[dict[str, str]] = []
    current: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current = {}
            continue
        if line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in block")
        current[key] = value
    if current:
        blocks.append(current)
    return blocks


def _convert(block: dict[str, str], casts: dict[str, type]) -> dict:
    out: dict = {}
    for key, value in block.items():
        if key not in casts:
            raise ConfigError(f"unknown config key {key!r}")
        cast = casts[key]
        try:
            if cast is bool:
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                out[key] = value.lower() == "true"
            else:
                out[key] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    return out


_ACTIVATION_CASTS = {
    "kind": str,
    "alpha": float,
    "beta": float,
    "slope": float,
    "elu_a": float,
    "oversample": int,
    "adaa_tol": float,
    "adaa_base": str,
    "name": str,
    "table_row": bool,
}

_UPSAMPLER_CASTS = {
    "kind": str,
    "factor": int,
    "kernel_size": int,
    "seed": int,
    "noise_prior": bool,
    "stopband_atten_db": float,
    "base_transition": float,
    "name": str,
    "table_row": bool,
}


def activation_spec_from_block(block: dict[str, str]) -> ActivationSpec:
    kwargs = _convert(block, _ACTIVATION_CASTS)
    if "kind" not in kwargs:
        raise ConfigError("activation block is missing 'kind'")
    try:
        return ActivationSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def upsampler_spec_from_block(block: dict[str, str]) -> UpsamplerSpec:
    kwargs = _convert(block, _UPSAMPLER_CASTS)
    if "kind" not in kwargs:
        raise ConfigError("upsampler block is missing 'kind'")
    try:
        return UpsamplerSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_activation_configs(path: str | Path) -> list[ActivationSpec]:
    blocks = parse_blocks(Path(path).read_text(encoding="utf-8"))
    if not blocks:
        raise ConfigError(f"{path}: no config blocks found")
    return [activation_spec_from_block(b) for b in blocks]


def load_upsampler_configs(path: str | Path) -> list[UpsamplerSpec]:
    blocks = parse_blocks(Path(path).read_text(encoding="utf-8"))
    if not blocks:
        raise ConfigError(f"{path}: no config blocks found")
    return [upsampler_spec_from_block(b) for b in blocks]


def serialize_spec(spec: ActivationSpec | UpsamplerSpec) -> str:
    """Canonical key = value block (field order fixed by the dataclass)."""
    return "\n".join(f"{f.name} = {getattr(spec, f.name)}" for f in fields(spec)) + "\n"


def config_hash(spec: ActivationSpec | UpsamplerSpec) -> str:
    """Short stable content hash of a config block."""
    return hashlib.sha256(serialize_spec(spec).encode()).hexdigest()[:12]


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write-temp-then-rename so partial files are never observable."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    tmp.replace(path)


def write_csv(path: str | Path, header: list[str], rows: list[list[str]]) -> None:
    """UTF-8, LF-terminated CSV with a mandatory header row."""
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_manifest(path: str | Path, payload: dict) -> None:
    """Deterministic JSON manifest: sorted keys, no timestamps."""
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
