"""
Module for shared domain types, errors, and numeric conventions used by every other module.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import auto
from typing import Iterable, Union

import numpy as np

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11: backport of the standard-library StrEnum
    from enum import Enum

    class StrEnum(str, Enum):
        def __new__(cls, *values):
            value = str(*values)
            member = str.__new__(cls, value)
            member._value_ = value
            return member

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
WEIGHT_SUM_TOL = 1e-12


# Error hierarchy. Every error carries the exit code category used by the command line.
class QPEMError(Exception):
    exit_code = 1


class ParameterError(QPEMError, ValueError):
    exit_code = 2


class UnsupportedDimensionError(ParameterError):
    pass


class ShapeError(ParameterError):
    pass


class DimensionMismatchError(ParameterError):
    pass


class FactorizationError(QPEMError, ValueError):
    exit_code = 3


class InconsistencyError(QPEMError, ArithmeticError):
    exit_code = 3


class ModelError(QPEMError, RuntimeError):
    exit_code = 4

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ProtocolError(ModelError):
    exit_code = 5


def ordered_sum(values: Iterable[float]) -> float:
    """
    Exactly rounded sum taken in index order, so every reduction is bit-reproducible.
    """
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


class PointKind(StrEnum):
    CENTRAL = auto()
    AXIS = auto()
    DIAGONAL = auto()
    GRID = auto()
    SAMPLE = auto()


@dataclass(frozen=True)
class GaussianSpec:
    """
    Mean vector and covariance matrix of the physical input variables.
    """
    mean: np.ndarray
    covariance: np.ndarray
    names: Union[None, tuple] = None

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        covariance = np.array(self.covariance, dtype=float)
        if covariance.ndim == 0:
            covariance = covariance.reshape(1, 1)
        mean.setflags(write=False)
        covariance.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", covariance)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def stds(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))


def structural_problems(spec: GaussianSpec) -> list:
    """
    Shape, finiteness and symmetry checks only.
    """
    problems = []
    cov = spec.covariance

    # Shape checks come first since the numeric checks need a square matrix
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        problems.append(f"covariance must be square, got shape {cov.shape}")
        return problems
    if cov.shape[0] != spec.mean.shape[0]:
        problems.append(
            f"mean length {spec.mean.shape[0]} does not match covariance dimension {cov.shape[0]}"
        )
    if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(spec.mean))):
        problems.append("mean and covariance must be finite")
        return problems

    # Symmetry to a relative tolerance
    scale = max(np.max(np.abs(cov)), np.finfo(float).tiny)
    asymmetry = np.max(np.abs(cov - cov.T))
    if asymmetry > SYMMETRY_RTOL * scale:
        problems.append(f"covariance is not symmetric (max |P - P^T| = {asymmetry:.3e})")

    return problems


def validate_spec(spec: GaussianSpec) -> list:
    """
    Returns the list of violated GaussianSpec invariants. An empty list means the spec is valid.
    """
    problems = structural_problems(spec)
    if problems:
        return problems
    cov = spec.covariance

    # Positive semi-definiteness through the eigenvalues of the symmetric part
    eigenvalues = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    lam_max = max(float(eigenvalues[-1]), 0.0)
    if eigenvalues[0] < -PSD_RTOL * lam_max or (lam_max == 0.0 and eigenvalues[0] < 0.0):
        problems.append(f"covariance is not positive semi-definite (min eigenvalue {eigenvalues[0]:.6g})")

    return problems


@dataclass(frozen=True)
class MarginalShape:
    """
    Per-dimension skewness and (non-excess) kurtosis of the standardized inputs.
    """
    skewness: np.ndarray
    kurtosis: np.ndarray

    def __post_init__(self):
        skewness = np.array(self.skewness, dtype=float).reshape(-1)
        kurtosis = np.array(self.kurtosis, dtype=float).reshape(-1)
        if skewness.shape != kurtosis.shape:
            raise ShapeError("skewness and kurtosis must have the same length.")
        skewness.setflags(write=False)
        kurtosis.setflags(write=False)
        object.__setattr__(self, "skewness", skewness)
        object.__setattr__(self, "kurtosis", kurtosis)

    @classmethod
    def standard_normal(cls, n: int) -> "MarginalShape":
        return cls(np.zeros(n), np.full(n, 3.0))

    @property
    def dim(self) -> int:
        return self.skewness.shape[0]


@dataclass(frozen=True)
class SigmaPointSet:
    """
    Deterministic (or sampled) points in standardized z-space, one row per point.
    """
    points: np.ndarray
    kind: tuple

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        kind = tuple(PointKind(k) for k in self.kind)

        # Assertion list
        assert points.shape[0] == len(kind), "Every point needs exactly one kind tag."
        assert sum(k == PointKind.CENTRAL for k in kind) <= 1, "At most one point can be tagged central."

        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "kind", kind)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def central_index(self) -> Union[None, int]:
        for i, k in enumerate(self.kind):
            if k == PointKind.CENTRAL:
                return i
        return None

    def is_fully_symmetric(self, atol: float = 1e-12) -> bool:
        """
        Checks that every non-central point has its negation in the set.
        """
        keys = {tuple(np.rint(p / atol).astype(np.int64)) for p in self.points}
        for p in self.points:
            if tuple(np.rint(-p / atol).astype(np.int64)) not in keys:
                return False
        return True


@dataclass(frozen=True)
class WeightTable:
    """
    Weights for moment orders 1 to 4. w1 = w2; w3 and w4 may differ at the central point only.
    """
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    w4: np.ndarray

    def __post_init__(self):
        arrays = []
        for name in ("w1", "w2", "w3", "w4"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            arrays.append(arr)
            object.__setattr__(self, name, arr)
        assert len({a.shape for a in arrays}) == 1, "All four weight vectors must have the same length."

    @classmethod
    def identical(cls, weights) -> "WeightTable":
        weights = np.asarray(weights, dtype=float)
        return cls(weights, weights, weights, weights)

    @classmethod
    def uniform(cls, count: int) -> "WeightTable":
        return cls.identical(np.full(count, 1.0 / count))

    @classmethod
    def scaled(cls, weights, central_index: int, zeta: float = 0.0, xi: float = 0.0) -> "WeightTable":
        weights = np.asarray(weights, dtype=float)
        w3 = weights.copy()
        w4 = weights.copy()
        w3[central_index] += zeta
        w4[central_index] += xi
        return cls(weights, weights.copy(), w3, w4)

    def __len__(self):
        return self.w1.shape[0]

    def order(self, k: int) -> np.ndarray:
        return (self.w1, self.w2, self.w3, self.w4)[k - 1]

    def total(self) -> float:
        return ordered_sum(self.w1)


@dataclass(frozen=True)
class MomentSummary:
    """
    First four moments of a scalar output. skew/kurt are None when m2 <= 0 (undefined).
    """
    mean: float
    std: float
    skew: Union[None, float]
    kurt: Union[None, float]
    central_moments: tuple = (0.0, 0.0, 0.0)
    provenance: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_central_moments(cls, mean, m2, m3, m4, provenance=None) -> "MomentSummary":
        if m2 > 0.0:
            std = math.sqrt(m2)
            skew = m3 / m2 ** 1.5
            kurt = m4 / m2 ** 2
        else:
            std = 0.0
            skew = None
            kurt = None
        return cls(float(mean), std, skew, kurt, (float(m2), float(m3), float(m4)), dict(provenance or {}))

    @classmethod
    def from_cumulants(cls, k1, k2, k3, k4, provenance=None) -> "MomentSummary":
        # Central moments from cumulants: m3 = k3, m4 = k4 + 3 k2^2
        return cls.from_central_moments(k1, k2, k3, k4 + 3.0 * k2 ** 2, provenance)

    @property
    def defined(self) -> bool:
        return self.skew is not None

    @property
    def cov(self) -> Union[None, float]:
        if self.mean == 0.0:
            return None
        return self.std / abs(self.mean)

    def as_dict(self) -> dict:
        return {
            "mean": self.mean, "std": self.std, "skew": self.skew, "kurt": self.kurt,
            "m2": self.central_moments[0], "m3": self.central_moments[1], "m4": self.central_moments[2],
            "skew_kurt_defined": self.defined, "provenance": self.provenance,
        }


@dataclass(frozen=True)
class EvaluationBatch:
    """
    Model outputs aligned index-for-index with a SigmaPointSet.
    """
    outputs: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        outputs = np.array(self.outputs, dtype=float).reshape(-1)
        bad = np.flatnonzero(~np.isfinite(outputs))
        if bad.size:
            raise ModelError(f"Model returned a non-finite output at point index {bad[0]}.", index=int(bad[0]))
        outputs.setflags(write=False)
        object.__setattr__(self, "outputs", outputs)

    def __len__(self):
        return self.outputs.shape[0]
