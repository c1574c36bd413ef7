"""Line-delimited structured records and plain-text tables for CLI output."""

from __future__ import annotations

import json

SCHEMA = "photondistill.records/1"


def record(kind: str, **fields) -> dict:
    out = {"schema": SCHEMA, "kind": kind}
    out.update(fields)
    return out


def to_json_lines(records) -> str:
    return "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n"


def format_table(headers, rows) -> str:
    cells = [[str(h) for h in headers]]
    for row in rows:
        cells.append([_fmt(v) for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for ri, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if ri == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if v is None:
        return "-"
    return str(v)
