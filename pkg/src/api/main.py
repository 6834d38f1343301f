import asyncio
import json
import logging
import math
from contextlib import asynccontextmanager
from typing import Any, Dict

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv not installed, environment variables should be set manually
    pass

from casimir import __doc__ as package_doc
from casimir.errors import CasimirError
from casimir.scan import Quantity, ScanTable, evaluate_row, resonance_annotations, run_scan
from casimir.scan_io import settings_echo

from .models import ScanEventModel, ScanRequest, ScanResponse

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Starting Casimir-Polder scan API")
    yield
    logger.info("Shutting down Casimir-Polder scan API")


app = FastAPI(
    title="Casimir-Polder Scan API",
    description=package_doc,
    version="0.1.0",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _finite(record: Dict[str, Any]) -> Dict[str, Any]:
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in record.items()}


def convert_table(table: ScanTable) -> ScanResponse:
    """Convert a scan table to the API response model"""
    events = [
        ScanEventModel(
            step=event.step,
            message=event.message,
            timestamp=event.timestamp.isoformat(),
            payload=_finite(event.payload or {})
        )
        for event in table.events
    ]
    return ScanResponse(
        success=not table.all_failed,
        spec=settings_echo(table.spec),
        units=table.spec.column_units(),
        channels=list(table.spec.channels),
        rows=[_finite(row.as_dict(table.spec)) for row in table.rows],
        annotations=table.annotations,
        events=events
    )


def _annotations(request: ScanRequest) -> Dict[str, str]:
    if request.kappa_max is None:
        return {}
    return resonance_annotations(request.spec, request.kappa_max)


@app.get("/")
async def root():
    return {"message": "Casimir-Polder Scan API", "version": "0.1.0"}


@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "quantities": [q.value for q in Quantity],
    }


@app.post("/api/scan", response_model=ScanResponse)
async def run_scan_endpoint(request: ScanRequest):
    """Run a full sweep and return every row"""
    try:
        table = await asyncio.to_thread(run_scan, request.spec, request.workers, _annotations(request))
        return convert_table(table)
    except CasimirError as e:
        logger.exception("Invalid scan request")
        raise HTTPException(status_code=422, detail=f"Scan rejected: {str(e)}")
    except Exception as e:
        logger.exception("Error running scan")
        raise HTTPException(status_code=500, detail=f"Scan failed: {str(e)}")


@app.post("/api/scan/stream")
async def run_scan_stream(request: ScanRequest):
    """Stream scan rows as they are computed"""

    async def generate_stream():
        try:
            spec = request.spec
            ack = {'type': 'ack', 'spec': settings_echo(spec), 'units': spec.column_units()}
            yield f"data: {json.dumps(ack)}\n\n"

            annotations = _annotations(request)
            if annotations:
                yield f"data: {json.dumps({'type': 'annotations', 'annotations': annotations})}\n\n"

            failed = 0
            values = spec.sweep_values()
            for index, value in enumerate(values):
                row = await asyncio.to_thread(evaluate_row, spec, float(value))
                if row.flag.value in ("error", "pole-near"):
                    failed += 1
                row_data = {'type': 'row', 'index': index, 'row': _finite(row.as_dict(spec))}
                yield f"data: {json.dumps(row_data)}\n\n"

            yield f"data: {json.dumps({'type': 'done', 'count': len(values)})}\n\n"
            yield f"data: {json.dumps({'type': 'complete', 'exitCode': 3 if failed == len(values) else 0})}\n\n"

        except Exception as e:
            logger.exception("Error in stream scan")
            error_data = {
                'type': 'error',
                'message': str(e)
            }
            yield f"data: {json.dumps(error_data)}\n\n"

    return StreamingResponse(
        generate_stream(),
        media_type="text/event-stream",
        headers={
            "Cache-Control": "no-cache",
            "Connection": "keep-alive",
        }
    )


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
