"""File formats: headerless CSV, the "DCEN1" binary container, PGM, manifests.

CSV is decimal at full float64 precision (%.17g) so load(save(x)) is
bit-identical.  The binary container is magic b"DCEN1", then ndim and the
dims as little-endian uint64, then the C-order float64 payload.  PGM output
is 8-bit min-max scaled (lossy by design; never read back).  Manifests are
sorted-key JSON capturing the resolved config, seed, library versions, wall
time, and a sha256 per output file.
"""

from __future__ import annotations

import hashlib
import json
import platform
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DCEN1"

__all__ = [
    "MAGIC",
    "save_csv",
    "load_csv",
    "save_bin",
    "load_bin",
    "save_pgm",
    "save_json",
    "load_json",
    "sha256_file",
    "build_manifest",
]


def save_csv(path, arr: np.ndarray) -> None:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError(f"only 1-d/2-d arrays serialize to CSV, got ndim={arr.ndim}")
    np.savetxt(path, arr, fmt="%.17g", delimiter=",")


def load_csv(path, ndmin: int = 1) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=ndmin)


def save_bin(path, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(np.asarray(arr, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        fh.write(arr.tobytes())


def load_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (ndim,) = struct.unpack("<Q", fh.read(8))
        shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
        data = np.frombuffer(fh.read(), dtype="<f8")
    expected = int(np.prod(shape)) if ndim else 1
    if data.size != expected:
        raise ValueError(f"payload has {data.size} values, dims say {expected}")
    return data.reshape(shape).copy()


def save_pgm(path, image: np.ndarray) -> None:
    """8-bit P5 with min-max intensity scaling (constant images map to 0)."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"PGM needs a 2-d image, got ndim={img.ndim}")
    lo, hi = float(img.min()), float(img.max())
    if hi > lo:
        scaled = np.rint((img - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(img)
    payload = scaled.astype(np.uint8).tobytes()
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + payload)


def save_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(command: str, config: dict, outputs: list, wall_time_ms: float) -> dict:
    """Everything needed to re-execute the run and check its outputs."""
    from . import __version__

    return {
        "command": command,
        "config": config,
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
        "wall_time_ms": wall_time_ms,
        "versions": {
            "dcen": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "scipy": _scipy_version(),
        },
    }


def _scipy_version() -> str:
    import scipy

    return scipy.__version__
