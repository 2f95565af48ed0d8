"""Report artifacts: CSV tables, PGM image dumps, run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

CSV_COLUMNS = ("preset", "class", "condition", "samples", "correct", "accuracy")


def write_csv_report(rows: list[dict], path) -> None:
    """One row per (class, condition); columns are fixed for easy diffing."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in CSV_COLUMNS})


def write_matrix_csv(matrix: np.ndarray, path, header: list[str] | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        if header is not None:
            writer.writerow(header)
        for row in np.asarray(matrix):
            writer.writerow([f"{v:.6g}" for v in row])


def write_pgm(values: np.ndarray, path) -> None:
    """Dump an array as binary PGM (P5), affinely mapped to 0..255.

    The map is recorded in a ``<path>.map.txt`` sidecar so pixel values can
    be converted back to physical units.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.asarray(values, dtype=np.float64)
    vmin = float(values.min())
    vmax = float(values.max())
    if vmax > vmin:
        scaled = (values - vmin) / (vmax - vmin) * 255.0
    else:
        scaled = np.zeros_like(values)
    pixels = np.rint(scaled).astype(np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(pixels.tobytes())
    with open(f"{path}.map.txt", "w") as f:
        f.write(f"pixel = round((value - {vmin!r}) / ({vmax!r} - {vmin!r}) * 255)\n"
                f"value = pixel / 255 * ({vmax!r} - {vmin!r}) + {vmin!r}\n")


def read_pgm(path) -> np.ndarray:
    """Read a binary P5 PGM back as uint8 (test/inspection helper)."""
    with open(path, "rb") as f:
        raw = f.read()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError(f"not a binary PGM: {path}")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=w * h).reshape(h, w)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, inputs: dict[str, str], outputs: list[Path]) -> Path:
    """Plain-text provenance: hashes of inputs and of every emitted file."""
    out_dir = Path(out_dir)
    lines = ["# run manifest: sha256 per file", "[inputs]"]
    for name, digest in sorted(inputs.items()):
        lines.append(f"{digest}  {name}")
    lines.append("[outputs]")
    for path in sorted(outputs):
        lines.append(f"{file_sha256(path)}  {Path(path).relative_to(out_dir)}")
    manifest = out_dir / "run_manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def echo_config(out_dir, config: dict) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "config_echo.json"
    path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return path
