"""
Module for the quadratic point estimate method: point/weight construction, r-tuning,
stability factor, and moment constraint verification.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq, minimize_scalar

from .CoreTypes import (
    ParameterError, PointKind, SigmaPointSet, UnsupportedDimensionError, WeightTable, ordered_sum
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
DEFAULT_R = 3.0
DEFAULT_ZETA = -8.0
DEFAULT_XI = 60.0

# Sign order of the four diagonal points placed in every coordinate pair (i < j)
DIAGONAL_SIGNS = ((1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0))


@dataclass(frozen=True)
class QpemParams:
    n: int
    r: float = DEFAULT_R
    zeta: float = DEFAULT_ZETA
    xi: float = DEFAULT_XI

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise UnsupportedDimensionError(
                f"QPEM needs a dimension of at least 2, got n={self.n}; use HPEM for 1-D problems."
            )
        if not self.r > SQRT2:
            raise ParameterError(f"r must exceed sqrt(2), got r={self.r}.")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def unscaled(cls, n: int, r: float = DEFAULT_R) -> "QpemParams":
        return cls(n, r, 0.0, 0.0)

    @property
    def point_count(self) -> int:
        return 2 * self.n ** 2 + 1


@dataclass(frozen=True)
class QpemConstants:
    c0: float
    c1: float
    c2: float
    w0: float
    w1: float
    w2: float


def qpem_constants(params: QpemParams) -> QpemConstants:
    """
    Closed-form point radii and weights for the three point types.
    """
    n, r = params.n, params.r
    r2 = r * r
    c2 = math.sqrt(r2 * (n - 1) / (r2 + n - 4))
    w1 = (4 - n) / (2.0 * r2 * r2)
    w2 = 0.25 * ((r2 + n - 4) / (r2 * (n - 1))) ** 2
    w0 = 1.0 - math.fsum([2 * n * w1, 2 * n * (n - 1) * w2])
    return QpemConstants(0.0, r, c2, w0, w1, w2)


def build_qpem(params: QpemParams) -> tuple:
    """
    Builds the 2n^2+1 fully symmetric QPEM points and the order-specific weight table.

    Order: central point, +c1 on each axis, -c1 on each axis, then the diagonal points
    for every pair (i < j) in lexicographic order with signs (+,+), (-,+), (+,-), (-,-).
    """
    n = params.n
    const = qpem_constants(params)

    points = np.zeros((params.point_count, n))
    weights = np.empty(params.point_count)
    kind = [PointKind.CENTRAL]
    weights[0] = const.w0

    # Axis points
    row = 1
    for sign in (1.0, -1.0):
        for i in range(n):
            points[row, i] = sign * const.c1
            weights[row] = const.w1
            kind.append(PointKind.AXIS)
            row += 1

    # Diagonal points
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in DIAGONAL_SIGNS:
            points[row, i] = si * const.c2
            points[row, j] = sj * const.c2
            weights[row] = const.w2
            kind.append(PointKind.DIAGONAL)
            row += 1

    point_set = SigmaPointSet(points, tuple(kind))
    table = WeightTable.scaled(weights, 0, params.zeta, params.xi)

    # Assertion list
    assert row == params.point_count, "Point count must be 2n^2+1."
    assert abs(table.total() - 1.0) <= 1e-12 * max(1.0, stability_factor(table)), "QPEM weights must sum to 1."

    logger.debug("Built QPEM set n=%d r=%.6g with %d points", n, params.r, point_set.count)
    return point_set, table


def stability_factor(weights: WeightTable) -> float:
    """
    Sum of the absolute values of the first-order weights.
    """
    return ordered_sum(np.abs(weights.w1))


def standard_normal_moment(exponents: Iterable[int]) -> float:
    """
    E[z1^k1 ... zn^kn] for independent standard normals: product of (k-1)!! over even k, 0 if any k is odd.
    """
    moment = 1.0
    for k in exponents:
        if k % 2:
            return 0.0
        moment *= math.prod(range(k - 1, 0, -2)) if k > 0 else 1.0
    return moment


def all_monomials(n: int, max_order: int) -> list:
    """
    Every exponent vector of total degree 1..max_order in n variables.
    """
    monomials = []
    for degree in range(1, max_order + 1):
        for coords in itertools.combinations_with_replacement(range(n), degree):
            exponents = [0] * n
            for c in coords:
                exponents[c] += 1
            monomials.append(tuple(exponents))
    return monomials


def _partitions(total: int, max_part: int, max_len: int):
    if total == 0:
        yield ()
        return
    if max_len == 0:
        return
    for part in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - part, part, max_len - 1):
            yield (part,) + rest


def canonical_monomials(n: int, max_order: int) -> list:
    """
    One representative exponent vector per coordinate-permutation class, degrees 1..max_order.

    For point sets invariant under coordinate permutations (QPEM, Smolyak grids, standard-normal
    HPEM) these representatives cover every monomial moment.
    """
    monomials = []
    for degree in range(1, max_order + 1):
        for parts in _partitions(degree, degree, n):
            monomials.append(tuple(parts) + (0,) * (n - len(parts)))
    return monomials


def _monomial_label(exponents) -> str:
    terms = [f"z{i + 1}^{k}" if k > 1 else f"z{i + 1}" for i, k in enumerate(exponents) if k]
    return "*".join(terms) if terms else "1"


def verify_mce(points: SigmaPointSet, weights: WeightTable, max_order: int,
               monomials: Union[None, Iterable[tuple]] = None) -> pd.DataFrame:
    """
    Residual of every monomial moment (total degree <= max_order by default) against the standard normal.

    Weighted sums use the first-order weights. The returned frame has one row per monomial with the
    estimate, target, absolute residual and the residual scaled by the largest term magnitude.
    """
    z = points.points
    w = weights.w1
    if monomials is None:
        monomials = all_monomials(points.dim, max_order)

    rows = []
    for exponents in monomials:
        # Multiply only the columns that appear in the monomial
        terms = w.copy()
        for j, k in enumerate(exponents):
            if k:
                terms = terms * z[:, j] ** k
        estimate = ordered_sum(terms)
        target = standard_normal_moment(exponents)
        residual = abs(estimate - target)
        scale = max(1.0, float(np.max(np.abs(terms))) if terms.size else 1.0, abs(target))
        rows.append({
            "monomial": _monomial_label(exponents),
            "exponents": tuple(exponents),
            "degree": int(sum(exponents)),
            "estimate": estimate,
            "target": target,
            "residual": residual,
            "scaled_residual": residual / scale,
        })

    return pd.DataFrame(rows, columns=[
        "monomial", "exponents", "degree", "estimate", "target", "residual", "scaled_residual"
    ])


def e6_residual(r, n: int):
    """
    Signed error of the sixth-order marginal moment: 15 - r^2(4-n) - (n-1) r^2(n-1)/(r^2+n-4).
    """
    u = np.asarray(r, dtype=float) ** 2
    return 15.0 - u * (4 - n) - (n - 1) * (u * (n - 1) / (u + n - 4))


def e6_squared(r, n: int):
    """
    Squared error in the sixth-order marginal moment.
    """
    if n < 2:
        raise UnsupportedDimensionError(f"e6 is defined for n >= 2, got n={n}.")
    residual = e6_residual(r, n)
    return residual * residual


def _e6_slope(r, n: int):
    # d e6 / d(r^2); zero at r^2 = 3 for every n != 4
    u = float(r) ** 2
    return -(4 - n) - (n - 1) ** 2 * (n - 4) / (u + n - 4) ** 2


@dataclass(frozen=True)
class R6Minimum:
    lower: float
    upper: float
    r: float
    e6_squared: float
    flat: bool = False


def bracket_r6_minima(n: int, r_max: float = 10.0, grid_size: int = 4001) -> list:
    """
    Scans r in (sqrt(2), r_max] for local minima of e6^2 and refines every bracket found.
    """
    if n < 2:
        raise UnsupportedDimensionError(f"e6 is defined for n >= 2, got n={n}.")

    grid = np.linspace(SQRT2 * (1.0 + 1e-9), r_max, grid_size)
    values = e6_squared(grid, n)

    # n = 4 makes the residual constant in r
    if np.ptp(values) <= 1e-12 * max(1.0, float(np.max(values))):
        logger.warning("e6^2 is flat in r for n=%d; returning the stationary point sqrt(3) by convention.", n)
        return [R6Minimum(float(grid[0]), r_max, math.sqrt(3.0), float(e6_squared(math.sqrt(3.0), n)), True)]

    minima = []
    for i in range(1, grid_size - 1):
        if not (values[i] <= values[i - 1] and values[i] <= values[i + 1]):
            continue
        if values[i] == values[i - 1] and values[i] == values[i + 1]:
            continue
        lo, hi = float(grid[i - 1]), float(grid[i + 1])

        # A sign change of the residual is a zero of e6^2; otherwise look for a stationary point
        if e6_residual(lo, n) * e6_residual(hi, n) <= 0.0:
            r_best = brentq(lambda x: float(e6_residual(x, n)), lo, hi, xtol=1e-15, maxiter=200)
        elif _e6_slope(lo, n) * _e6_slope(hi, n) <= 0.0:
            r_best = brentq(lambda x: _e6_slope(x, n), lo, hi, xtol=1e-15, maxiter=200)
        else:
            r_best = minimize_scalar(
                lambda x: float(e6_squared(x, n)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
            ).x
        logger.debug("e6^2 bracket [%.6f, %.6f] -> r=%.12f", lo, hi, r_best)
        minima.append(R6Minimum(lo, hi, float(r_best), float(e6_squared(r_best, n))))

    if not minima:
        res = minimize_scalar(lambda x: float(e6_squared(x, n)), bounds=(float(grid[0]), r_max), method="bounded")
        minima.append(R6Minimum(float(grid[0]), r_max, float(res.x), float(res.fun)))

    # Neighbouring grid cells can bracket the same minimizer
    unique = []
    for m in sorted(minima, key=lambda m: m.r):
        if not unique or abs(m.r - unique[-1].r) > 1e-9:
            unique.append(m)
    return unique


def argmin_r6(n: int) -> float:
    """
    The r > sqrt(2) minimizing e6^2. Ties are logged with every bracket and the smallest r wins.
    """
    minima = bracket_r6_minima(n)
    best = min(m.e6_squared for m in minima)
    ties = [m for m in minima if m.e6_squared <= best + 1e-18 + 1e-12 * best]
    if len(ties) > 1:
        logger.warning(
            "e6^2 has %d global minimizers for n=%d: %s; returning the smallest r.", len(ties), n,
            ", ".join(f"r={m.r:.12g} in [{m.lower:.6g}, {m.upper:.6g}]" for m in ties)
        )
    return ties[0].r
