"""Result files: CSV tables, JSON manifests and binary volume dumps.

Volume format (little-endian): 8-byte magic ``RQEDVOL1``; uint64 nx, ny, nz;
uint64 number of components; float64 spacing h; float64 origin x, y, z; then
nx*ny*nz*ncomp float64 values in row-major (C) order with the component index
fastest.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigurationError

VOLUME_MAGIC = b"RQEDVOL1"
_HEADER = struct.Struct("<8s4Q4d")


def format_value(value) -> str:
    """Stable text form: floats use repr (round-trip exact), the rest str()."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, rows: Iterable[Mapping]) -> Path:
    """Write rows (dicts) with the union of their keys as header, in first-seen order."""
    rows = list(rows)
    header: list = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(row[k]) if k in row else "" for k in header])
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=format_value) + "\n")
    return path


def write_volume(path, data, spacing: float, origin=(0.0, 0.0, 0.0)) -> Path:
    """Dump a scalar (n, n, n) or vector (n, n, n, m) field."""
    arr = np.asarray(data, dtype="<f8")
    if arr.ndim == 3:
        arr = arr[..., None]
    if arr.ndim != 4:
        raise ConfigurationError(f"volume must be 3D or 4D, got shape {arr.shape}")
    nx, ny, nz, nc = arr.shape
    header = _HEADER.pack(VOLUME_MAGIC, nx, ny, nz, nc, float(spacing), *map(float, origin))
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(arr).tobytes())
    return path


def read_volume(path) -> tuple[np.ndarray, float, np.ndarray]:
    """Returns (data of shape (nx, ny, nz, ncomp), spacing, origin)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigurationError("volume file truncated")
    magic, nx, ny, nz, nc, h, ox, oy, oz = _HEADER.unpack_from(raw)
    if magic != VOLUME_MAGIC:
        raise ConfigurationError("not a volume file")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if data.size != nx * ny * nz * nc:
        raise ConfigurationError("volume payload size does not match header")
    return data.reshape(nx, ny, nz, nc).copy(), h, np.array([ox, oy, oz])
