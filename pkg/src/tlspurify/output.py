"""Deterministic table emission: CSV with a commented config echo, or a
single JSON document.

Floats are printed with 17 significant digits in lowercase scientific
notation, which round-trips exactly and pins the output bytes.  Cells may
also be labels ("divergent", "unphysical", region letters); NaN or infinity
reaching a writer is a bug and raises instead of leaking into a file.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig

__all__ = ["Table", "fmt_float", "write_table", "emit_error"]


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value reached the writer: {x!r}")
    return f"{x:.16e}"


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return fmt_float(float(v))


def _json_value(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value reached the writer: {v!r}")
        return v
    return v


@dataclass
class Table:
    command: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *cells) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(f"row width {len(cells)} != header width "
                             f"{len(self.columns)}")
        self.rows.append(cells)


def _render_csv(table: Table, cfg: RunConfig) -> str:
    lines = [f"# {table.command}"]
    lines += [f"# {line}" for line in cfg.echo_lines()]
    for key in sorted(table.metadata):
        lines.append(f"# meta {key} = {_cell(table.metadata[key])}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(table: Table, cfg: RunConfig) -> str:
    doc = {
        "command": table.command,
        "config": cfg.to_dict(),
        "metadata": {k: _json_value(v) for k, v in
                     sorted(table.metadata.items())},
        "columns": table.columns,
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, sort_keys=True, allow_nan=False,
                      separators=(",", ":")) + "\n"


def write_table(table: Table, cfg: RunConfig, *, fmt: str | None = None,
                out: str | None | Path = "use-config") -> None:
    """Render the table and write it to the configured destination."""
    fmt = fmt or cfg.format
    if out == "use-config":
        out = cfg.out
    text = _render_json(table, cfg) if fmt == "json" else _render_csv(table, cfg)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def emit_error(code: str, message: str, parameter: str = "") -> None:
    """Machine-readable error object on stderr."""
    sys.stderr.write(json.dumps({"code": code, "message": message,
                                 "parameter": parameter}) + "\n")
