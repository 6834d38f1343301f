"""Helpers for reading/writing scan tables and scan configuration."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, TextIO, Tuple

from dotenv import dotenv_values

from .scan import Normalization, Quantity, RowFlag, ScanRow, ScanSpec, ScanTable, SweepVariable, column_units

Record = Dict[str, Any]


def format_number(value: float) -> str:
    """Shortest text that round-trips a double exactly."""
    return format(value, ".17g")


def _format_echo(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    return str(getattr(value, "value", value))


def _parse_echo(text: str) -> Any:
    if text in ("true", "false"):
        return text == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config(path: Path) -> Dict[str, str]:
    """Parse a ``key=value`` scan configuration file; dashes in keys become underscores."""
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    values = dotenv_values(path)
    return {key.replace("-", "_"): value for key, value in values.items() if value is not None}


def settings_echo(spec: ScanSpec) -> Record:
    """Scan settings followed by every quadrature tolerance the rows are computed with."""
    echo = spec.model_dump(mode="json")
    echo.update(spec.quadrature().model_dump(mode="json"))
    return echo


def spec_echo(table: ScanTable) -> Record:
    return settings_echo(table.spec)


def echo_units(echo: Record) -> Dict[str, str]:
    """Column units implied by an echo; empty when the echo does not name a known scan."""
    try:
        return column_units(
            Quantity(echo["quantity"]),
            SweepVariable(echo["sweep"]),
            Normalization(echo.get("normalize", Normalization.RAW.value)),
        )
    except (KeyError, ValueError):
        return {}


def _column_key(header: str) -> str:
    return header.split(" (", 1)[0]


def table_records(table: ScanTable) -> List[Record]:
    return [row.as_dict(table.spec) for row in table.rows]


def render_csv(echo: Record, annotations: Dict[str, str], records: Iterable[Record]) -> str:
    """CSV body preceded by ``# key=value`` lines echoing the scan settings and ``# @key=value`` annotations.

    Header cells read ``name (unit)``; :func:`parse_csv` keys records by ``name``.
    """
    buffer = io.StringIO()
    for key, value in echo.items():
        buffer.write(f"# {key}={_format_echo(value)}\n")
    for key, value in annotations.items():
        buffer.write(f"# @{key}={value}\n")
    records = list(records)
    if records:
        writer = csv.writer(buffer, lineterminator="\n")
        columns = list(records[0])
        units = echo_units(echo)
        writer.writerow([f"{c} ({units[c]})" if c in units else c for c in columns])
        for record in records:
            writer.writerow(
                [format_number(record[c]) if isinstance(record[c], float) else record[c] for c in columns]
            )
    return buffer.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_json(echo: Record, annotations: Dict[str, str], records: Iterable[Record]) -> str:
    payload: Record = {"spec": echo, "units": echo_units(echo)}
    payload["rows"] = [{k: _json_safe(v) for k, v in r.items()} for r in records]
    if annotations:
        payload["annotations"] = annotations
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_stream(table: ScanTable) -> str:
    """One JSON object per line: ``start``, one ``row`` per sweep value, ``done``."""
    echo = spec_echo(table)
    start = {"type": "start", "spec": echo, "units": echo_units(echo), "annotations": table.annotations}
    lines = [json.dumps(start)]
    for index, record in enumerate(table_records(table)):
        row = {k: _json_safe(v) for k, v in record.items()}
        lines.append(json.dumps({"type": "row", "index": index, "row": row}))
    lines.append(json.dumps({"type": "done", "count": len(table.rows)}))
    return "\n".join(lines) + "\n"


def render_table(table: ScanTable, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(spec_echo(table), table.annotations, table_records(table))
    if fmt == "json":
        return render_json(spec_echo(table), table.annotations, table_records(table))
    if fmt == "stream":
        return render_stream(table)
    raise ValueError(f"Unknown output format {fmt!r}")


def write_text(destination: str | Path, text: str, stdout: TextIO | None = None) -> None:
    """Write ``text`` to a file, or to stdout when ``destination`` is ``-``."""
    if str(destination) == "-":
        stream = stdout or sys.stdout
        stream.write(text)
        stream.flush()
        return
    path = Path(destination)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit(table: ScanTable, fmt: str, destination: str | Path = "-") -> None:
    write_text(destination, render_table(table, fmt))


def parse_csv(text: str) -> Tuple[Record, Dict[str, str], List[Record]]:
    echo: Record = {}
    annotations: Dict[str, str] = {}
    body: List[str] = []
    for line in text.splitlines():
        if line.startswith("# @"):
            key, _, value = line[3:].partition("=")
            annotations[key] = value
        elif line.startswith("# "):
            key, _, value = line[2:].partition("=")
            echo[key] = _parse_echo(value)
        elif line:
            body.append(line)
    records: List[Record] = []
    if body:
        reader = csv.DictReader(body)
        for raw in reader:
            fields = {_column_key(k): v for k, v in raw.items()}
            records.append({k: v if k == "flag" else float(v) for k, v in fields.items()})
    return echo, annotations, records


def parse_json(text: str) -> Tuple[Record, Dict[str, str], List[Record]]:
    payload = json.loads(text)
    if not isinstance(payload, dict) or "rows" not in payload:
        raise ValueError(f"Expected an object with 'spec' and 'rows', found {type(payload).__name__}")
    records = [
        {k: (math.nan if v is None else v) if k != "flag" else v for k, v in row.items()}
        for row in payload["rows"]
    ]
    return payload.get("spec", {}), payload.get("annotations", {}), records


def rows_from_records(table_spec: ScanSpec, records: Iterable[Record]) -> List[ScanRow]:
    """Rebuild typed rows from parsed records of a table produced for ``table_spec``."""
    return [
        ScanRow(
            float(r[table_spec.sweep.value]),
            float(r["value_par"]),
            float(r["value_perp"]),
            float(r["value_total"]),
            float(r["abs_error"]),
            RowFlag(r["flag"]),
        )
        for r in records
    ]
