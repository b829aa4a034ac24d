"""Deterministic CSV and JSON sidecar writers.

All numeric output uses 17 significant digits, '.' decimals and '\n'
line endings so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_sidecar(csv_path: Path, payload: dict) -> Path:
    """JSON sidecar next to a CSV, echoing the fully resolved configuration."""
    side = Path(csv_path).with_suffix(".json")
    with open(side, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return side
