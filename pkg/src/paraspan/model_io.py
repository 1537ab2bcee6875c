"""Shared on-disk model container: JSON header + little-endian float32 blob.

Layout: ``u32 header_len | header JSON (UTF-8) | float32 arrays`` with the
arrays concatenated in the order declared by the header's ``param_order`` and
``shapes`` fields.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

_U32 = struct.Struct("<I")


def save_model_file(path: str | Path, header: dict, arrays: list[np.ndarray]):
    header = dict(header)
    header["shapes"] = [list(a.shape) for a in arrays]
    payload = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_U32.pack(len(payload)))
        fh.write(payload)
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_model_file(path: str | Path) -> tuple[dict, list[np.ndarray]]:
    raw = Path(path).read_bytes()
    (header_len,) = _U32.unpack_from(raw, 0)
    header = json.loads(raw[_U32.size : _U32.size + header_len].decode("utf-8"))
    arrays = []
    pos = _U32.size + header_len
    for shape in header["shapes"]:
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f4", count=count, offset=pos).astype(np.float64)
        arrays.append(arr.reshape(shape))
        pos += count * 4
    return header, arrays
