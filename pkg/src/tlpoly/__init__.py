"""Exact two-level quasi-polynomials and combinatorial families that realize them."""
from __future__ import annotations

from .core_math import Poly
from .quasipoly import QuasiPoly, qp_fit
from .twolevel import DepthExpr, OracleHandle, TwoLevelQP

__all__ = ["DepthExpr", "OracleHandle", "Poly", "QuasiPoly", "TwoLevelQP", "qp_fit"]
__version__ = "0.1.0"
