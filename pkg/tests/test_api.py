from __future__ import annotations

import asyncio
import json

import pytest
from fastapi import HTTPException

from api import main as api_main
from api.main import convert_table, health_check, run_scan_endpoint, run_scan_stream
from api.models import ScanRequest
from casimir import scan
from casimir.errors import InvalidParameterError
from casimir.numerics import QuadratureConfig
from casimir.scan import Quantity, RowFlag, ScanSpec, SweepVariable


def greens_request(**overrides) -> ScanRequest:
    spec = ScanSpec(quantity=Quantity.GREENS, sweep=SweepVariable.Z, lo=0.2, hi=1.0, count=3)
    return ScanRequest(spec=spec, **overrides)


async def collect_stream(request: ScanRequest) -> list[dict]:
    response = await run_scan_stream(request)
    chunks = [chunk async for chunk in response.body_iterator]
    messages = []
    for chunk in chunks:
        text = chunk.decode() if isinstance(chunk, bytes) else chunk
        assert text.startswith("data: ") and text.endswith("\n\n")
        messages.append(json.loads(text[len("data: "):]))
    return messages


def test_health_lists_quantities():
    body = asyncio.run(health_check())
    assert body["status"] == "healthy"
    assert "greens" in body["quantities"]


def test_scan_endpoint_returns_rows():
    response = asyncio.run(run_scan_endpoint(greens_request()))
    assert response.success
    assert response.channels == ["shift_par", "shift_perp", "shift"]
    assert response.units["Z"] == "length"
    assert response.units["value_total"] == "energy"
    assert response.spec["max_subdivisions"] == QuadratureConfig().max_subdivisions
    assert [row["Z"] for row in response.rows] == pytest.approx([0.2, 0.6, 1.0])
    assert all(row["flag"] == "ok" for row in response.rows)
    assert response.events[0].step == "start"
    assert response.events[-1].step == "done"


def test_failed_rows_serialize_as_null(monkeypatch: pytest.MonkeyPatch):
    def broken(spec):
        raise ValueError("no convergence")

    monkeypatch.setattr(scan, "_evaluate", broken)
    response = convert_table(scan.run_scan(greens_request().spec))
    assert not response.success
    assert response.rows[0]["value_total"] is None
    assert response.rows[0]["flag"] == RowFlag.ERROR.value


def test_library_errors_become_422(monkeypatch: pytest.MonkeyPatch):
    def reject(*args, **kwargs):
        raise InvalidParameterError("Z <= 0")

    monkeypatch.setattr(api_main, "run_scan", reject)
    with pytest.raises(HTTPException) as info:
        asyncio.run(run_scan_endpoint(greens_request()))
    assert info.value.status_code == 422


def test_unexpected_errors_become_500(monkeypatch: pytest.MonkeyPatch):
    def explode(*args, **kwargs):
        raise RuntimeError("worker died")

    monkeypatch.setattr(api_main, "run_scan", explode)
    with pytest.raises(HTTPException) as info:
        asyncio.run(run_scan_endpoint(greens_request()))
    assert info.value.status_code == 500


def test_stream_sends_rows_in_order():
    messages = asyncio.run(collect_stream(greens_request()))
    assert [m["type"] for m in messages] == ["ack", "row", "row", "row", "done", "complete"]
    assert [m["index"] for m in messages if m["type"] == "row"] == [0, 1, 2]
    assert messages[-1]["exitCode"] == 0


def test_stream_reports_total_failure(monkeypatch: pytest.MonkeyPatch):
    def broken(spec):
        raise ValueError("bad row")

    monkeypatch.setattr(scan, "_evaluate", broken)
    spec = ScanSpec(quantity=Quantity.RESONANT_SHIFT, sweep=SweepVariable.L, lo=0.1, hi=1.0, count=2)
    messages = asyncio.run(collect_stream(ScanRequest(spec=spec, kappa_max=0)))
    assert [m["type"] for m in messages] == ["ack", "annotations", "row", "row", "done", "complete"]
    assert set(messages[1]["annotations"]) == {"kappa_0"}
    assert messages[-1]["exitCode"] == 3


def test_request_bounds():
    with pytest.raises(ValueError):
        greens_request(workers=0)
    with pytest.raises(ValueError):
        greens_request(kappa_max=-1)
