"""Result-row schema and CSV/JSON emission.

One row per (scenario, n_s, load set, method): bounds and optimizer gains
share the schema, distinguished by ``kind``.  Floats are written with
``repr`` so emitted files round-trip exactly and identical runs produce
byte-identical output (modulo the optional runtime column).
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math

__all__ = ["ResultRow", "format_value", "write_csv", "write_json", "rows_to_records"]


@dataclasses.dataclass
class ResultRow:
    scenario: str
    n_s: int
    load_set: str
    method: str  # ni | nio | ibd | sdr | es | cd | ga | psdr
    kind: str  # "bound" or "gain"
    value: float  # |h|^2 bound or achieved |h|^2
    capacity: float  # same quantity mapped through the capacity formula
    valid: bool
    seed: int | None = None
    runtime_s: float | None = None


def format_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


_COLUMNS = ["scenario", "n_s", "load_set", "method", "kind", "value", "capacity", "valid", "seed"]


def write_csv(rows, stream, include_runtime: bool = True) -> None:
    cols = _COLUMNS + (["runtime_s"] if include_runtime else [])
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([format_value(getattr(row, c)) for c in cols])


def rows_to_records(rows) -> list:
    records = []
    for row in rows:
        rec = dataclasses.asdict(row)
        if rec["value"] is not None and math.isnan(rec["value"]):
            rec["value"] = None  # JSON has no NaN
        if rec["capacity"] is not None and math.isnan(rec["capacity"]):
            rec["capacity"] = None
        records.append(rec)
    return records


def write_json(rows, stream, include_runtime: bool = True) -> None:
    records = rows_to_records(rows)
    if not include_runtime:
        for rec in records:
            rec.pop("runtime_s", None)
    json.dump(records, stream, indent=1)
    stream.write("\n")
