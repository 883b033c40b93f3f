"""CSV and manifest emission.

All floats are written with 17 significant digits so files round-trip exactly
and identical configurations produce byte-identical output.  Every emitted
file is listed in a JSON manifest together with its SHA-256 hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

TRACE_HEADER = [
    "t",
    "p_z2",
    "p_z2bar",
    "log_norm_sq",
    "re_amp_z2",
    "im_amp_z2",
    "re_amp_z2bar",
    "im_amp_z2bar",
]
ENTROPY_HEADER = ["alpha", "energy", "g", "entropy_bits", "is_scar"]
PNUP_HEADER_PREFIX = ["alpha", "energy", "g", "overlap", "is_scar"]
SPECTRUM_HEADER = ["alpha", "g", "re_energy", "im_energy"]
SCARS_HEADER = ["alpha", "energy", "overlap", "is_scar"]
BASIS_HEADER = ["index", "bits", "bitstring", "n_up"]


def fmt(value) -> str:
    """Fixed-width decimal rendering: 17 significant digits for floats."""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_coo(path, matrix) -> Path:
    """Coordinate-format text dump (row col value per line) for external tools."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row)) if coo.nnz else []
    with open(path, "w", encoding="utf-8") as fh:
        for k in order:
            fh.write(f"{coo.row[k]} {coo.col[k]} {fmt(float(coo.data[k]))}\n")
    return path


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def pnup_header(length: int) -> list:
    return PNUP_HEADER_PREFIX + [f"nup_{k}" for k in range(length // 2 + 1)]


def write_manifest(
    out_dir,
    command: str,
    config: dict,
    dimension: int,
    stages: list,
    tolerances: dict,
    artifacts: list,
    scar_criterion: dict | None = None,
) -> Path:
    """JSON run record: config echo, per-stage wall time, hashes of every artifact."""
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config": config,
        "dimension": dimension,
        "stages": [{"name": name, "seconds": seconds} for name, seconds in stages],
        "tolerances": tolerances,
        "scar_criterion": scar_criterion,
        "artifacts": [
            {"path": str(Path(p).relative_to(out_dir)), "sha256": file_sha256(p)} for p in artifacts
        ],
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
