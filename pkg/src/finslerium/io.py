"""Parsing of command-line literals, deterministic JSON, artifacts and run manifests."""

from __future__ import annotations

import hashlib
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError

SCHEMA = "finslerium/1"

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_WITH_REAL = re.compile(rf"^([+-]?{_NUM})(?:([+-])({_NUM})?[ij])?$")
_PURE_IMAG = re.compile(rf"^([+-]?)({_NUM})?[ij]$")


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi`` or ``bi`` (``j`` is accepted for ``i``).

    >>> parse_complex("0.3-0.4i")
    (0.3-0.4j)
    """
    s = text.strip()
    m = _WITH_REAL.match(s)
    if m:
        re_part, sign, im = m.groups()
        if sign is None:
            return complex(float(re_part), 0.0)
        b = float(im) if im else 1.0
        return complex(float(re_part), b if sign == "+" else -b)
    m = _PURE_IMAG.match(s)
    if m:
        sign, im = m.groups()
        b = float(im) if im else 1.0
        return complex(0.0, -b if sign == "-" else b)
    raise ConfigurationError(f"bad complex literal {text!r}; use a, a+bi or a-bi")


def parse_complex_list(text: str) -> np.ndarray:
    return np.array([parse_complex(t) for t in text.split(",")], dtype=complex)


def parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"parameters look like key=value, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise ConfigurationError(f"parameter {key!r} needs a real value, got {val!r}") from exc
    return out


def parse_region(text: str) -> float:
    """``disk:R`` or ``ball:R`` → R."""
    kind, _, r = text.partition(":")
    if kind not in ("disk", "ball") or not r:
        raise ConfigurationError(f"region must be disk:R or ball:R, got {text!r}")
    try:
        R = float(r)
    except ValueError as exc:
        raise ConfigurationError(f"bad region radius {r!r}") from exc
    if not R > 0:
        raise ConfigurationError("region radius must be positive")
    return R


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(payload: dict) -> str:
    """Canonical JSON with the schema tag; equal inputs give equal bytes."""
    body = {"schema": SCHEMA, **to_jsonable(payload)}
    return json.dumps(body, indent=2, sort_keys=True, allow_nan=True) + "\n"


def digest(text: str | bytes) -> str:
    data = text.encode() if isinstance(text, str) else text
    return "sha256:" + hashlib.sha256(data).hexdigest()


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FINSLERIUM_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items) -> list:
    """Ordered map over a thread pool capped by FINSLERIUM_THREADS."""
    items = list(items)
    n = min(thread_count(), len(items)) or 1
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class RunManifest:
    command: list
    seed: int
    version: str = __version__
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0
    exit_status: int = 0

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / "manifest.json"
        path.write_text(dumps(asdict(self)))
        return path


def write_artifact(out_dir: Path, name: str, text: str, manifest: RunManifest) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    manifest.outputs.append({"path": name, "digest": digest(text)})
    return path
