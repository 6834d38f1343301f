from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"

if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from casimir.core import Stack  # noqa: E402
from casimir.numerics import QuadratureConfig  # noqa: E402


@pytest.fixture()
def cfg() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture()
def tight_cfg() -> QuadratureConfig:
    return QuadratureConfig(rel_tol=1e-12, abs_tol=1e-16, max_subdivisions=200)


@pytest.fixture()
def layered_stack() -> Stack:
    return Stack(n_l=2.0, n_s=1.5, L=0.3)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
