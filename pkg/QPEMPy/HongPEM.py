"""
Module for Hong's 2n+1 point estimate method.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .CoreTypes import (
    DimensionMismatchError, MarginalShape, ParameterError, PointKind, ShapeError, SigmaPointSet, WeightTable
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HpemLayout:
    """
    Per-dimension point coordinates c[i] = (c_i1, c_i2), their weights w[i], and the central weight w0.
    """
    c: np.ndarray
    w: np.ndarray
    w0: float


def hpem_layout(shape: MarginalShape) -> HpemLayout:
    gamma = shape.skewness
    kappa = shape.kurtosis

    # Assertion list
    radicand = kappa - 0.75 * gamma ** 2
    if np.any(radicand <= 0.0):
        bad = int(np.flatnonzero(radicand <= 0.0)[0])
        raise ShapeError(f"kurtosis - 3*skewness^2/4 must be positive, dimension {bad} has {radicand[bad]:.6g}.")
    spread = kappa - gamma ** 2
    if np.any(np.abs(spread) <= 1e-12 * np.abs(kappa)):
        bad = int(np.flatnonzero(np.abs(spread) <= 1e-12 * np.abs(kappa))[0])
        raise ShapeError(f"kurtosis equals skewness^2 in dimension {bad}, which gives an infinite weight.")

    root = np.sqrt(radicand)
    c1 = gamma / 2.0 + root
    c2 = gamma / 2.0 - root
    w1 = 1.0 / (c1 * (c1 - c2))
    w2 = -1.0 / (c2 * (c1 - c2))
    w0 = 1.0 - float(np.sum(1.0 / spread))

    if w0 < 0.0:
        logger.warning("HPEM central weight is negative (w0=%.6g) for n=%d.", w0, shape.dim)
    return HpemLayout(np.column_stack([c1, c2]), np.column_stack([w1, w2]), w0)


def build_hpem(n: int, shape: MarginalShape = None) -> tuple:
    """
    Builds the 2n+1 HPEM points: the central point, c_i1 on every axis i, then c_i2 on every axis i.

    All four weight vectors are identical. When no shape is given the inputs are standard normal.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"HPEM needs n >= 1, got n={n}.")
    n = int(n)
    if shape is None:
        shape = MarginalShape.standard_normal(n)
    if shape.dim != n:
        raise DimensionMismatchError(f"Marginal shape has {shape.dim} dimensions, expected {n}.")

    layout = hpem_layout(shape)

    # Central point first, then the two axis sweeps
    points = np.zeros((2 * n + 1, n))
    weights = np.empty(2 * n + 1)
    weights[0] = layout.w0
    for l in range(2):
        for i in range(n):
            row = 1 + l * n + i
            points[row, i] = layout.c[i, l]
            weights[row] = layout.w[i, l]

    kind = (PointKind.CENTRAL,) + (PointKind.AXIS,) * (2 * n)
    point_set = SigmaPointSet(points, kind)
    table = WeightTable.identical(weights)
    logger.debug("Built HPEM set n=%d with %d points", n, point_set.count)
    return point_set, table
