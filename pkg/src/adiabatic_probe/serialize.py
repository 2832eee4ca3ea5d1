"""CSV and JSON encodings of traces, sweep tables and condition reports.

Floats are written with ``repr`` (shortest string that round-trips exactly),
never with the locale. Infinity is the string ``inf`` in CSV and the object
``{"inf": true}`` in JSON. CSV files start with a ``# schema=...`` line
followed by the header row.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .spin import FidelityTrace, FieldParams
from .sweep import SweepRow, SweepTable

SCHEMA = "adiabatic-probe/1"
TABLE_COLUMNS = ("k", "r", "quantity", "value", "resonant")
TRACE_COLUMNS = ("t", "fidelity")


@dataclass
class OutputRecord:
    kind: str
    params: dict
    rows: list
    provenance: dict = field(default_factory=dict)
    dimensions: dict = field(default_factory=dict)
    schema: str = SCHEMA

    def __post_init__(self):
        expected = 1
        for n in self.dimensions.values():
            expected *= n
        if self.dimensions and expected != len(self.rows):
            raise ValueError(f"{len(self.rows)} rows do not match dimensions {self.dimensions}")


def encode_value(x: Any) -> Any:
    """JSON-safe form of a scalar; non-finite floats become tagged objects."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, float)):
        x = float(x)
        if math.isinf(x):
            return {"inf": True} if x > 0 else {"inf": True, "negative": True}
        if math.isnan(x):
            return {"nan": True}
        return x
    if isinstance(x, dict):
        return {k: encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_value(x: Any) -> Any:
    if isinstance(x, dict):
        if x.get("inf") is True:
            return -math.inf if x.get("negative") else math.inf
        if x.get("nan") is True:
            return math.nan
        return {k: decode_value(v) for k, v in x.items()}
    if isinstance(x, list):
        return [decode_value(v) for v in x]
    return x


def csv_number(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def params_dict(p: FieldParams) -> dict:
    return {
        "omega0": p.omega0,
        "omega1": p.omega1,
        "omega_prime": p.omega_prime,
        "K": p.K,
        "R": p.R,
        "theta": p.theta,
    }


def table_record(table: SweepTable, provenance: dict | None = None) -> OutputRecord:
    rows = [
        {"k": r.K, "r": r.R, "quantity": r.quantity, "value": r.value, "resonant": r.resonant}
        for r in table.rows
    ]
    params = {
        "k_values": list(table.k_values),
        "r_values": list(table.r_values),
        "quantities": list(table.quantities),
        **table.params,
    }
    return OutputRecord(
        kind="sweep",
        params=params,
        rows=rows,
        provenance=provenance or {"method": "closed-form"},
        dimensions={"k": len(table.k_values), "r": len(table.r_values), "quantities": len(table.quantities)},
    )


def trace_record(trace: FidelityTrace, provenance: dict | None = None) -> OutputRecord:
    rows = [{"t": float(t), "fidelity": float(f)} for t, f in zip(trace.times, trace.values)]
    return OutputRecord(
        kind="trace",
        params=params_dict(trace.params),
        rows=rows,
        provenance={"method": trace.method, **(provenance or {})},
        dimensions={"t": len(rows)},
    )


def to_json(record: OutputRecord) -> str:
    obj = {
        "schema": record.schema,
        "kind": record.kind,
        "params": record.params,
        "dimensions": record.dimensions,
        "provenance": record.provenance,
        "rows": record.rows,
    }
    return json.dumps(encode_value(obj), indent=1, allow_nan=False) + "\n"


def from_json(text: str) -> OutputRecord:
    obj = decode_value(json.loads(text))
    if "schema" not in obj:
        raise ValueError("missing schema field")
    return OutputRecord(
        kind=obj.get("kind", ""),
        params=obj.get("params", {}),
        rows=obj.get("rows", []),
        provenance=obj.get("provenance", {}),
        dimensions=obj.get("dimensions", {}),
        schema=obj["schema"],
    )


def to_csv(record: OutputRecord) -> str:
    columns = TABLE_COLUMNS if record.kind == "sweep" else TRACE_COLUMNS
    buf = io.StringIO()
    buf.write(f"# schema={record.schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in record.rows:
        out = []
        for col in columns:
            v = row[col]
            if isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, (int, float)):
                out.append(csv_number(v))
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()


def table_from_csv(text: str) -> list:
    """Parse a sweep CSV back into ``SweepRow`` tuples."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != TABLE_COLUMNS:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    return [
        SweepRow(float(r["k"]), float(r["r"]), r["quantity"], float(r["value"]), r["resonant"] == "true")
        for r in reader
    ]
