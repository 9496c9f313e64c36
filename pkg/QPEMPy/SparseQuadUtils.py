"""
Module for 1-D Gauss-Hermite rules and the Smolyak sparse grid built from them.
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from enum import auto

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .CoreTypes import ParameterError, PointKind, SigmaPointSet, StrEnum, WeightTable, ordered_sum

logger = logging.getLogger(__name__)

MAX_LEVEL = 2
MERGE_ATOL = 1e-12


class GrowthOptions(StrEnum):
    LINEAR = auto()  # 1, 2, 3 nodes
    ODD = auto()  # 1, 3, 5 nodes


@dataclass(frozen=True)
class Rule1D:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def gauss_hermite_1d(m: int) -> Rule1D:
    """
    The m-node probabilists' Gauss-Hermite rule with weights normalized to sum to 1.
    """
    if int(m) != m or m < 1:
        raise ParameterError(f"A Gauss-Hermite rule needs m >= 1 nodes, got m={m}.")
    nodes, weights = hermegauss(int(m))
    weights = weights / math.sqrt(2.0 * math.pi)

    # Enforce the exact symmetry of the rule about zero
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return Rule1D(nodes, weights)


def rule_size(level: int, growth: GrowthOptions = GrowthOptions.LINEAR) -> int:
    if GrowthOptions(growth) == GrowthOptions.ODD:
        return 2 * level + 1
    return level + 1


def _level_vectors(n: int, total: int):
    # Sparse level vectors {dimension: level} with levels summing to total
    for dims in itertools.combinations_with_replacement(range(n), total):
        yield dict(Counter(dims))


def smolyak_grid(n: int, level: int, growth: GrowthOptions = GrowthOptions.LINEAR) -> tuple:
    """
    Smolyak combination-technique grid on N(0, I_n) with coincident points merged.

    Each level vector l with max(0, level-n+1) <= |l| <= level contributes the tensor product of the
    1-D rules with coefficient (-1)^(level-|l|) * C(n-1, level-|l|). Points closer than 1e-12 per
    coordinate are merged with their weights summed. The origin comes first, then points ordered by
    number of nonzero coordinates.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"Smolyak grids need n >= 1, got n={n}.")
    if int(level) != level or level < 0:
        raise ParameterError(f"Smolyak level must be a non-negative integer, got {level}.")
    if level > MAX_LEVEL:
        raise ParameterError(f"Smolyak level {level} is unsupported; the maximum level is {MAX_LEVEL}.")
    n, level = int(n), int(level)
    growth = GrowthOptions(growth)

    rules = [gauss_hermite_1d(rule_size(l, growth)) for l in range(level + 1)]
    merged = {}

    for total in range(max(0, level - n + 1), level + 1):
        coefficient = (-1) ** (level - total) * math.comb(n - 1, level - total)
        for levels in _level_vectors(n, total):
            active = sorted(levels)
            active_rules = [rules[levels[d]] for d in active]

            # Dimensions at level 0 sit at the single node 0, so only active ones are enumerated
            for picks in itertools.product(*(range(r.size) for r in active_rules)):
                weight = float(coefficient)
                key = []
                coords = []
                for d, rule, k in zip(active, active_rules, picks):
                    weight *= rule.weights[k]
                    q = int(np.rint(rule.nodes[k] / MERGE_ATOL))
                    if q != 0:
                        key.append((d, q))
                        coords.append((d, rule.nodes[k]))
                entry = merged.setdefault(tuple(key), (coords, []))
                entry[1].append(weight)

    # Build the merged point set
    keys = sorted(merged, key=lambda k: (len(k), k))
    points = np.zeros((len(keys), n))
    weights = np.empty(len(keys))
    for row, key in enumerate(keys):
        coords, parts = merged[key]
        for d, value in coords:
            points[row, d] = value
        weights[row] = ordered_sum(parts)

    keep = np.abs(weights) > 1e-14
    if not np.all(keep):
        logger.debug("Dropping %d merged points with zero weight", int(np.sum(~keep)))
        points = points[keep]
        weights = weights[keep]
        keys = [k for k, flag in zip(keys, keep) if flag]

    kind = tuple(PointKind.CENTRAL if not k else PointKind.GRID for k in keys)
    point_set = SigmaPointSet(points, kind)
    table = WeightTable.identical(weights)

    # Assertion list
    assert abs(table.total() - 1.0) <= 1e-12 * max(1.0, ordered_sum(np.abs(weights))), (
        "Smolyak weights must sum to 1."
    )

    logger.debug("Built Smolyak grid n=%d level=%d growth=%s with %d points", n, level, growth, point_set.count)
    return point_set, table
