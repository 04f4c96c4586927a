"""Harmonic labelings: constructors for trees and Z^2, slab analysis, verification."""
from __future__ import annotations

import os

# HARMONIA_THREADS caps the BLAS/LAPACK threads numpy uses; set before numpy loads.
_threads = os.environ.get("HARMONIA_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

from .graph import DiamondRegion, FiniteGraph, GraphError, GridPoint  # noqa: E402
from .labeling import (  # noqa: E402
    CoverageReport,
    DuplicateLabel,
    PartialLabeling,
    check_harmonic,
    coverage,
)

__version__ = "0.1.0"

__all__ = [
    "CoverageReport",
    "DiamondRegion",
    "DuplicateLabel",
    "FiniteGraph",
    "GraphError",
    "GridPoint",
    "PartialLabeling",
    "check_harmonic",
    "coverage",
]
