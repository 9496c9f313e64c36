"""
Module for Monte Carlo, Latin Hypercube and Sobol point generation in standard normal space.
"""
import logging
import warnings
from dataclasses import dataclass
from enum import auto
from typing import Union

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .CoreTypes import ParameterError, PointKind, SigmaPointSet, StrEnum, UnsupportedDimensionError, WeightTable

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240101
# Dimension limit of the direction-number table shipped with scipy's Sobol engine
SOBOL_MAX_DIM = getattr(qmc.Sobol, "MAXDIM", 21201)


class SamplingOptions(StrEnum):
    MC = auto()
    LHS = auto()
    SOBOL = auto()


@dataclass(frozen=True)
class SamplePlan:
    method: SamplingOptions
    count: int
    seed: Union[None, int] = None
    skip: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", SamplingOptions(self.method))

        # Assertion list
        if int(self.count) != self.count or self.count < 1:
            raise ParameterError(f"Sample count must be a positive integer, got {self.count}.")
        if int(self.skip) != self.skip or self.skip < 0:
            raise ParameterError(f"Sobol skip must be a non-negative integer, got {self.skip}.")
        if self.seed is not None and not (0 <= int(self.seed) < 2 ** 64):
            raise ParameterError(f"Seed must be a 64-bit unsigned integer, got {self.seed}.")

    @property
    def resolved_seed(self) -> int:
        return DEFAULT_SEED if self.seed is None else int(self.seed)


def make_generator(seed: int) -> np.random.Generator:
    """
    Counter-based Philox generator keyed by a 64-bit seed.
    """
    return np.random.Generator(np.random.Philox(int(seed)))


def inv_norm_cdf(p):
    """
    Inverse standard normal CDF for p in (0, 1).
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr > 0.0) & (p_arr < 1.0))):
        raise ParameterError("inv_norm_cdf needs probabilities strictly inside (0, 1).")
    out = ndtri(p_arr)
    return float(out) if out.ndim == 0 else out


def unit_design(plan: SamplePlan, n: int) -> np.ndarray:
    """
    The LHS or Sobol design in the unit hypercube before the normal mapping.
    """
    if plan.method == SamplingOptions.LHS:
        sampler = qmc.LatinHypercube(d=n, scramble=True, seed=make_generator(plan.resolved_seed))
        return sampler.random(plan.count)

    if plan.method == SamplingOptions.SOBOL:
        if n > SOBOL_MAX_DIM:
            raise UnsupportedDimensionError(f"Sobol direction numbers support at most {SOBOL_MAX_DIM} dimensions, got {n}.")
        sampler = qmc.Sobol(d=n, scramble=False)
        if plan.skip:
            sampler.fast_forward(plan.skip)
        # Point counts follow the published schedules, which are rarely powers of two
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            return sampler.random(plan.count)

    raise ParameterError(f"Method {plan.method} has no unit-hypercube design.")


def generate(plan: SamplePlan, n: int) -> tuple:
    """
    N points in z-space with uniform weights 1/N in all four weight vectors.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"Sampling needs n >= 1, got n={n}.")
    n = int(n)

    if plan.method == SamplingOptions.MC:
        points = make_generator(plan.resolved_seed).standard_normal((plan.count, n))
    else:
        design = unit_design(plan, n)
        if np.any(design <= 0.0):
            raise ParameterError("The Sobol origin maps to -inf; use skip >= 1.")
        points = ndtri(design)

    logger.debug("Generated %d %s points in %d dimensions", plan.count, plan.method, n)
    return SigmaPointSet(points, (PointKind.SAMPLE,) * plan.count), WeightTable.uniform(plan.count)


def stratum_occupancy(design: np.ndarray) -> np.ndarray:
    """
    Counts of unit-hypercube points in each of the N equiprobable strata, one row per dimension.
    """
    design = np.atleast_2d(design)
    count, dim = design.shape
    strata = np.clip(np.floor(design * count).astype(int), 0, count - 1)
    return np.stack([np.bincount(strata[:, d], minlength=count) for d in range(dim)])
