"""Deterministic table rendering and error emission."""

from __future__ import annotations

import json
import math

import pytest

from tlspurify.config import RunConfig
from tlspurify.output import Table, emit_error, fmt_float, write_table


def _demo_table() -> Table:
    t = Table("demo", ["name", "flag", "count", "value"],
              metadata={"b_key": 2, "a_key": "note"})
    t.add("first", True, 3, 0.1)
    t.add("divergent", False, -1, 2.5e-17)
    return t


def test_fmt_float():
    assert fmt_float(0.1) == "1.0000000000000001e-01"
    assert fmt_float(-2.0) == "-2.0000000000000000e+00"
    assert float(fmt_float(1 / 3)) == 1 / 3     # exact round trip
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            fmt_float(bad)


def test_row_width_checked():
    t = Table("demo", ["a", "b"])
    with pytest.raises(ValueError):
        t.add(1.0)
    with pytest.raises(ValueError):
        t.add(1.0, 2.0, 3.0)


def test_csv_layout(capsys):
    cfg = RunConfig.from_dict({})
    write_table(_demo_table(), cfg)
    text = capsys.readouterr().out
    assert text.endswith("\n")
    lines = text.splitlines()
    assert lines[0] == "# demo"
    echo = cfg.echo_lines()
    assert lines[1:1 + len(echo)] == [f"# {e}" for e in echo]
    # metadata block, sorted, after the echo
    k = 1 + len(echo)
    assert lines[k] == "# meta a_key = note"
    assert lines[k + 1] == "# meta b_key = 2"
    assert lines[k + 2] == "name,flag,count,value"
    assert lines[k + 3] == "first,true,3,1.0000000000000001e-01"
    assert lines[k + 4] == "divergent,false,-1,2.4999999999999999e-17"
    assert len(lines) == k + 5


def test_json_layout(capsys):
    cfg = RunConfig.from_dict({})
    write_table(_demo_table(), cfg, fmt="json")
    text = capsys.readouterr().out
    doc = json.loads(text)
    assert set(doc) == {"command", "config", "metadata", "columns", "rows"}
    assert doc["command"] == "demo"
    assert doc["columns"] == ["name", "flag", "count", "value"]
    assert doc["rows"] == [["first", True, 3, 0.1],
                           ["divergent", False, -1, 2.5e-17]]
    assert doc["metadata"] == {"a_key": "note", "b_key": 2}
    assert doc["config"]["model"]["J"] == 0.1


def test_non_finite_rejected():
    cfg = RunConfig.from_dict({})
    t = Table("demo", ["v"])
    t.add(math.nan)
    with pytest.raises(ValueError):
        write_table(t, cfg)
    with pytest.raises(ValueError):
        write_table(t, cfg, fmt="json")


def test_write_to_file_and_format_override(tmp_path):
    cfg = RunConfig.from_dict({"run": {"format": "csv"}})
    f = tmp_path / "out.json"
    write_table(_demo_table(), cfg, fmt="json", out=f)
    doc = json.loads(f.read_text())
    assert doc["command"] == "demo"
    # config-held output path is honoured when none is passed explicitly
    f2 = tmp_path / "out.csv"
    cfg2 = cfg.override(out=str(f2))
    write_table(_demo_table(), cfg2)
    assert f2.read_text().startswith("# demo\n")


def test_render_determinism(capsys):
    cfg = RunConfig.from_dict({})
    write_table(_demo_table(), cfg)
    first = capsys.readouterr().out
    write_table(_demo_table(), cfg)
    second = capsys.readouterr().out
    assert first == second


def test_emit_error(capsys):
    emit_error("bad-value", "broken knob", "run.samples")
    err = capsys.readouterr().err
    assert json.loads(err) == {"code": "bad-value", "message": "broken knob",
                               "parameter": "run.samples"}
