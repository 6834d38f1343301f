from pydantic import BaseModel, Field
from typing import Dict, Any, List, Optional

from casimir.scan import ScanSpec


class ScanRequest(BaseModel):
    spec: ScanSpec
    workers: int = Field(1, ge=1, le=32)
    kappa_max: Optional[int] = Field(None, ge=0)


class ScanEventModel(BaseModel):
    step: str
    message: str
    timestamp: str
    payload: Optional[Dict[str, Any]] = None


class ScanResponse(BaseModel):
    success: bool
    spec: Dict[str, Any]
    channels: List[str]
    units: Dict[str, str] = {}
    rows: List[Dict[str, Any]]
    annotations: Dict[str, str] = {}
    events: List[ScanEventModel]
