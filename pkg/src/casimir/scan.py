"""Parameter sweeps: one row per sweep value, evaluated in order.

A :class:`ScanSpec` names the quantity, the swept variable and the fixed
parameters. Rows are independent pure computations, so they may be farmed out
to worker processes; output order always follows the sweep. A failing row is
recorded with a flag and NaN values and never aborts the scan.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from itertools import repeat
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import greens, modes
from .asymptotics import ResonanceLengths, resonance_condition
from .core import Polarization, Stack, Transition
from .errors import (
    CasimirError,
    DispersionPoleError,
    MissingPoleError,
    PoleClusteringError,
)
from .numerics import QuadratureConfig
from .shift import shift_breakdown

LOGGER = logging.getLogger(__name__)


class Quantity(str, Enum):
    GROUND_SHIFT = "ground-shift"
    EXCITED_SHIFT = "excited-shift"
    RESONANT_SHIFT = "resonant-shift"
    TRAPPED_MODES = "trapped-modes"
    COMPLETENESS = "completeness"
    GREENS = "greens"


class SweepVariable(str, Enum):
    Z = "Z"
    L = "L"
    E = "E"
    N_L = "n_l"
    N_S = "n_s"
    K_PAR = "k_par"


class Normalization(str, Enum):
    RAW = "raw"
    TIMES_Z3 = "times-Z3"
    TIMES_Z4 = "times-Z4"


class RowFlag(str, Enum):
    OK = "ok"
    UNCONVERGED = "unconverged"
    POLE_NEAR = "pole-near"
    ERROR = "error"


_SHIFT_QUANTITIES = {Quantity.GROUND_SHIFT, Quantity.EXCITED_SHIFT, Quantity.RESONANT_SHIFT, Quantity.GREENS}

# Meaning of the value_par, value_perp and value_total columns per quantity.
CHANNELS: Dict[Quantity, Tuple[str, str, str]] = {
    Quantity.GROUND_SHIFT: ("shift_par", "shift_perp", "shift"),
    Quantity.EXCITED_SHIFT: ("shift_par", "shift_perp", "shift"),
    Quantity.RESONANT_SHIFT: ("shift_par", "shift_perp", "shift"),
    Quantity.GREENS: ("shift_par", "shift_perp", "shift"),
    Quantity.TRAPPED_MODES: ("te_count", "tm_count", "total_count"),
    Quantity.COMPLETENESS: ("mode_sum", "target", "residual"),
}

# Natural units, hbar = c = 1: energy and inverse length coincide.
_SWEEP_UNITS: Dict[SweepVariable, str] = {
    SweepVariable.Z: "length",
    SweepVariable.L: "length",
    SweepVariable.E: "energy",
    SweepVariable.N_L: "1",
    SweepVariable.N_S: "1",
    SweepVariable.K_PAR: "1/length",
}

_SHIFT_UNITS: Dict[Normalization, str] = {
    Normalization.RAW: "energy",
    Normalization.TIMES_Z3: "energy*length^3",
    Normalization.TIMES_Z4: "energy*length^4",
}


def column_units(quantity: Quantity, sweep: SweepVariable, normalize: Normalization) -> Dict[str, str]:
    """Unit of every table column; ``1`` marks dimensionless values."""
    if quantity is Quantity.TRAPPED_MODES:
        values = ("count", "count", "count", "1")
    elif quantity is Quantity.COMPLETENESS:
        values = ("1/length^3", "1/length^3", "1", "1")
    else:
        unit = _SHIFT_UNITS[normalize]
        values = (unit, unit, unit, unit)
    units = {sweep.value: _SWEEP_UNITS[sweep]}
    units.update(zip(("value_par", "value_perp", "value_total", "abs_error"), values))
    return units


class ScanSpec(BaseModel):
    """Everything needed to reproduce a sweep."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    quantity: Quantity = Quantity.GROUND_SHIFT
    sweep: SweepVariable = SweepVariable.Z
    lo: float = 0.1
    hi: float = 10.0
    count: int = Field(16, ge=2)
    log: bool = False
    n_l: float = Field(2.0, ge=1)
    n_s: float = Field(1.5, ge=1)
    L: float = Field(0.1, ge=0)
    Z: float = Field(1.0, gt=0)
    E: float = 1.0
    mu_par2: float = Field(1.0, ge=0)
    mu_perp2: float = Field(0.0, ge=0)
    k_par: float = Field(1.0, ge=0)
    rho: float = Field(0.0, ge=0)
    component: str = Field("zz", pattern=r"^[xyz]{2}$")
    normalize: Normalization = Normalization.RAW
    rel_tol: float = Field(1e-9, gt=0)

    @model_validator(mode="after")
    def _check_range(self) -> "ScanSpec":
        if not self.hi > self.lo:
            raise ValueError(f"sweep range needs hi > lo, got {self.lo}:{self.hi}")
        if self.log and self.lo <= 0:
            raise ValueError("logarithmic sweeps need lo > 0")
        if self.E == 0:
            raise ValueError("transition energy must be non-zero")
        if self.mu_par2 == 0 and self.mu_perp2 == 0 and self.quantity in _SHIFT_QUANTITIES:
            raise ValueError("at least one dipole component must be non-zero")
        if self.normalize is not Normalization.RAW and self.quantity not in _SHIFT_QUANTITIES:
            raise ValueError(f"normalization {self.normalize.value} applies to shifts only")
        return self

    def sweep_values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def at(self, value: float) -> "ScanSpec":
        """A copy with the swept variable pinned to ``value``."""
        return self.model_copy(update={self.sweep.value: float(value)})

    @property
    def channels(self) -> Tuple[str, str, str]:
        return CHANNELS[self.quantity]

    def column_units(self) -> Dict[str, str]:
        return column_units(self.quantity, self.sweep, self.normalize)

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol)


@dataclass(frozen=True)
class ScanRow:
    sweep_value: float
    value_par: float
    value_perp: float
    value_total: float
    abs_error: float
    flag: RowFlag = RowFlag.OK

    @classmethod
    def failed(cls, sweep_value: float, flag: RowFlag) -> "ScanRow":
        nan = math.nan
        return cls(sweep_value, nan, nan, nan, nan, flag)

    def as_dict(self, spec: ScanSpec) -> Dict[str, Any]:
        return {
            spec.sweep.value: self.sweep_value,
            "value_par": self.value_par,
            "value_perp": self.value_perp,
            "value_total": self.value_total,
            "abs_error": self.abs_error,
            "flag": self.flag.value,
        }


@dataclass
class ScanEvent:
    step: str
    message: str
    payload: Dict[str, Any] | None = None
    timestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def as_dict(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "message": self.message,
            "payload": self.payload or {},
            "timestamp": self.timestamp.isoformat(),
        }


@dataclass
class ScanTable:
    spec: ScanSpec
    rows: List[ScanRow] = field(default_factory=list)
    annotations: Dict[str, str] = field(default_factory=dict)
    events: List[ScanEvent] = field(default_factory=list)

    @property
    def all_failed(self) -> bool:
        return bool(self.rows) and all(row.flag in (RowFlag.ERROR, RowFlag.POLE_NEAR) for row in self.rows)


def _normalization_factor(spec: ScanSpec) -> float:
    if spec.normalize is Normalization.TIMES_Z3:
        return spec.Z**3
    if spec.normalize is Normalization.TIMES_Z4:
        return spec.Z**4
    return 1.0


def _evaluate(spec: ScanSpec) -> Tuple[float, float, float, float, bool]:
    stack = Stack(spec.n_l, spec.n_s, spec.L)
    cfg = spec.quadrature()
    quantity = spec.quantity

    if quantity in (Quantity.GROUND_SHIFT, Quantity.EXCITED_SHIFT, Quantity.RESONANT_SHIFT):
        energy = abs(spec.E) if quantity is Quantity.GROUND_SHIFT else -abs(spec.E)
        transition = Transition(energy, spec.mu_par2, spec.mu_perp2)
        parts = shift_breakdown(
            stack, [transition], spec.Z, cfg, resonant_only=quantity is Quantity.RESONANT_SHIFT
        )
        return parts.par, parts.perp, parts.total, parts.abs_error, parts.converged

    if quantity is Quantity.GREENS:
        par = greens.electrostatic_shift(stack, spec.mu_par2, 0.0, spec.Z, cfg)
        perp = greens.electrostatic_shift(stack, 0.0, spec.mu_perp2, spec.Z, cfg)
        total = par + perp
        return par.value, perp.value, total.value, total.abs_error, total.converged

    if quantity is Quantity.TRAPPED_MODES:
        te = modes.find_trapped_modes(stack, spec.k_par, Polarization.TE, cfg)
        tm = modes.find_trapped_modes(stack, spec.k_par, Polarization.TM, cfg)
        worst = max((root.residual for root in te + tm), default=0.0)
        return float(len(te)), float(len(tm)), float(len(te) + len(tm)), worst, True

    z = stack.L / 2 + spec.Z
    i, j = spec.component
    audit = modes.completeness_audit(stack, z, z, spec.rho, (i, j), cfg)
    return audit.mode_sum, audit.target, audit.residual, 0.0, audit.converged


def evaluate_row(spec: ScanSpec, value: float) -> ScanRow:
    """Evaluate one sweep point; failures become flagged NaN rows."""
    pinned = spec.at(value)
    try:
        par, perp, total, error, converged = _evaluate(pinned)
    except (DispersionPoleError, PoleClusteringError, MissingPoleError) as exc:
        LOGGER.warning("Row %s=%g sits on a guided-mode pole: %s", spec.sweep.value, value, exc)
        return ScanRow.failed(float(value), RowFlag.POLE_NEAR)
    except (CasimirError, ArithmeticError, ValueError):
        LOGGER.exception("Row %s=%g failed", spec.sweep.value, value)
        return ScanRow.failed(float(value), RowFlag.ERROR)
    factor = _normalization_factor(pinned)
    flag = RowFlag.OK if converged else RowFlag.UNCONVERGED
    return ScanRow(float(value), par * factor, perp * factor, total * factor, error * abs(factor), flag)


def iter_scan(spec: ScanSpec, workers: int = 1) -> Iterator[Tuple[int, ScanRow]]:
    """Yield ``(index, row)`` in sweep order."""
    values = [float(v) for v in spec.sweep_values()]
    if workers <= 1:
        for index, value in enumerate(values):
            yield index, evaluate_row(spec, value)
        return
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from enumerate(executor.map(evaluate_row, repeat(spec), values))


def _annotation(entry: ResonanceLengths) -> str:
    text = f"L_res={entry.L_res:.17g} L_antires={entry.L_antires:.17g}"
    return f"{text} interchanged=true" if entry.interchanged else text


def resonance_annotations(spec: ScanSpec, kappa_max: int) -> Dict[str, str]:
    stack = Stack(spec.n_l, spec.n_s, spec.L)
    return {f"kappa_{entry.kappa}": _annotation(entry) for entry in resonance_condition(stack, spec.E, kappa_max)}


def run_scan(spec: ScanSpec, workers: int = 1, annotations: Dict[str, str] | None = None) -> ScanTable:
    table = ScanTable(spec=spec, annotations=dict(annotations or {}))
    table.events.append(
        ScanEvent("start", f"{spec.quantity.value} over {spec.sweep.value}", {"count": spec.count, "workers": workers})
    )
    for index, row in iter_scan(spec, workers):
        table.rows.append(row)
        table.events.append(ScanEvent("row", f"row {index} {row.flag.value}", {"index": index, **row.as_dict(spec)}))
    failed = sum(row.flag is not RowFlag.OK for row in table.rows)
    table.events.append(ScanEvent("done", f"{len(table.rows)} rows, {failed} flagged", {"count": len(table.rows)}))
    LOGGER.info("Scan of %s finished: %d rows, %d flagged", spec.quantity.value, len(table.rows), failed)
    return table
