"""Delimited and JSON-lines writers for per-draw records."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence, Union

from .cluster import ClusterRecord

SCHEMA_LINE = "# hawkes-exact v1"

__all__ = ["SCHEMA_LINE", "write_rows", "read_csv_rows", "write_event_dump", "event_dump_rows"]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_rows(path: Union[str, Path], rows: Sequence[dict], columns: Sequence[str],
               fmt: str = "csv") -> Path:
    """Write one record per row; floats are written with full round-trip precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            fh.write(SCHEMA_LINE + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(row.get(c, "")) for c in columns])
        elif fmt == "jsonl":
            for row in rows:
                fh.write(json.dumps({c: row[c] for c in columns if c in row}) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv_rows(path: Union[str, Path]) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def event_dump_rows(clusters: Iterable[ClusterRecord], first_id: int = 0) -> list[dict]:
    rows = []
    for cid, c in enumerate(clusters, start=first_id):
        for ev in c.events:
            rows.append({"cluster_id": cid, "event_index": ev.index, "time": ev.time,
                         "parent": ev.parent,
                         "service": "" if ev.service is None else ev.service})
    return rows


def write_event_dump(path: Union[str, Path], clusters: Iterable[ClusterRecord]) -> Path:
    """Sample-path export: one row per event with its cluster and parent link."""
    return write_rows(path, event_dump_rows(clusters),
                      ["cluster_id", "event_index", "time", "parent", "service"], "csv")
