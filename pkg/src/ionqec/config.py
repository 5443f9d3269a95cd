"""Flat key=value experiment configs.

One `key = value` pair per line, sections expressed as dotted key paths
(`noise.p_g`, `sweep.values`).  Comments start with `#` at the beginning
of a line.  The canonical serialization (sorted keys) feeds a sha256
hash used to stamp output files with the exact configuration that
produced them.
"""
from __future__ import annotations

import hashlib
import math

__all__ = [
    "parse_config",
    "load_config",
    "serialize_config",
    "config_hash",
    "get_str",
    "get_int",
    "get_float",
    "get_bool",
    "get_floats",
    "get_ints",
    "grid_values",
]

_REQUIRED = object()


def parse_config(text: str) -> dict[str, str]:
    """Parse config text into an ordered {key: value} dict of strings."""
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ValueError(f"line {lineno}: empty key in {raw!r}")
        if key in cfg:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        cfg[key] = value
    return cfg


def load_config(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: dict[str, str]) -> str:
    """Canonical text form: sorted keys, one pair per line."""
    lines = []
    for key in sorted(cfg):
        value = str(cfg[key])
        if "\n" in key or "\n" in value:
            raise ValueError(f"newlines not allowed in config entries: {key!r}")
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: dict[str, str]) -> str:
    """sha256 of the canonical serialization."""
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()


def _fetch(cfg, key, default):
    if key in cfg:
        return cfg[key]
    if default is _REQUIRED:
        raise KeyError(f"missing required config key {key!r}")
    return None


def get_str(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    return default if raw is None else raw


def get_int(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"config key {key!r} must be an integer, got {raw!r}")


def get_float(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    if raw is None:
        return default
    if raw == "inf":
        return math.inf
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"config key {key!r} must be a number, got {raw!r}")


_BOOL_WORDS = {"true": True, "yes": True, "1": True,
               "false": False, "no": False, "0": False}


def get_bool(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    if raw is None:
        return default
    word = raw.strip().lower()
    if word not in _BOOL_WORDS:
        raise ValueError(f"config key {key!r} must be a boolean, got {raw!r}")
    return _BOOL_WORDS[word]


def _split_list(raw: str):
    items = [part.strip() for part in raw.split(",")]
    return [part for part in items if part]


def get_floats(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    if raw is None:
        return default
    try:
        return [float(part) for part in _split_list(raw)]
    except ValueError:
        raise ValueError(f"config key {key!r} must be comma-separated numbers, got {raw!r}")


def get_ints(cfg: dict[str, str], key: str, default=_REQUIRED):
    raw = _fetch(cfg, key, default)
    if raw is None:
        return default
    try:
        return [int(part) for part in _split_list(raw)]
    except ValueError:
        raise ValueError(f"config key {key!r} must be comma-separated integers, got {raw!r}")


def grid_values(cfg: dict[str, str], prefix: str):
    """Numeric grid under a key prefix.

    Either an explicit list (`<prefix>.values = 1e-4, 2e-4, 5e-4`) or a
    spaced range (`<prefix>.from`, `<prefix>.to`, `<prefix>.points`,
    optional `<prefix>.spacing` of log or linear, default log).
    """
    values = get_floats(cfg, prefix + ".values", None)
    if values is not None:
        if not values:
            raise ValueError(f"{prefix}.values is empty")
        return values
    lo = get_float(cfg, prefix + ".from", None)
    hi = get_float(cfg, prefix + ".to", None)
    points = get_int(cfg, prefix + ".points", None)
    if lo is None or hi is None or points is None:
        raise ValueError(
            f"grid {prefix!r} needs either .values or .from/.to/.points")
    if points < 1:
        raise ValueError(f"{prefix}.points must be >= 1, got {points}")
    spacing = get_str(cfg, prefix + ".spacing", "log")
    if spacing == "log":
        if lo <= 0 or hi <= 0:
            raise ValueError(f"log grid {prefix!r} needs positive endpoints")
        if points == 1:
            return [lo]
        ratio = (hi / lo) ** (1.0 / (points - 1))
        return [lo * ratio**i for i in range(points)]
    if spacing == "linear":
        if points == 1:
            return [lo]
        step = (hi - lo) / (points - 1)
        return [lo + step * i for i in range(points)]
    raise ValueError(f"unknown spacing {spacing!r} for grid {prefix!r}")
