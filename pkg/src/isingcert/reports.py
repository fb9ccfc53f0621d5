"""Canonical report serialization: byte-stable JSON plus CSV plot tables.

Reports never contain timestamps or wall-clock data, so a fixed seed yields
byte-identical files.  Floats go through Python's shortest round-trip repr.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def default_out_dir() -> Path:
    return Path(os.environ.get("ISINGCERT_OUT", "out"))


def write_report(out_dir, name: str, payload: dict,
                 tables: dict[str, tuple[list[str], list[list]]] | None = None) -> Path:
    """Write `<name>.json` and one `<name>_<table>.csv` per table; returns the
    JSON path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{name}.json"
    report_path.write_text(canonical_json(payload))
    for table_name, (header, rows) in (tables or {}).items():
        with open(out_dir / f"{name}_{table_name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    return report_path
