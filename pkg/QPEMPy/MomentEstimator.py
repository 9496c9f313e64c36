"""
Module for turning model outputs and weight tables into output moment estimates.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .CoreTypes import (
    DimensionMismatchError, EvaluationBatch, InconsistencyError, MomentSummary, WeightTable, ordered_sum
)

logger = logging.getLogger(__name__)

NEGATIVE_M2_RTOL = 1e-12
VARIANCE_FLOOR_RTOL = 1e-12
MOMENT_NAMES = ("mean", "std", "skew", "kurt")


def estimate_moments(batch: EvaluationBatch, weights: WeightTable, provenance: dict = None) -> MomentSummary:
    """
    Mean from the first-order weights, central moments m_k about that mean from the order-k weights.
    """
    if len(batch) != len(weights):
        raise DimensionMismatchError(f"Batch has {len(batch)} outputs but the weight table has {len(weights)} entries.")
    y = batch.outputs

    mean = ordered_sum(weights.w1 * y)
    dev = y - mean
    m2 = ordered_sum(weights.w2 * dev ** 2)
    m3 = ordered_sum(weights.w3 * dev ** 3)
    m4 = ordered_sum(weights.w4 * dev ** 4)

    # Negative weights can push m2 slightly below zero
    tolerance = NEGATIVE_M2_RTOL * ordered_sum(np.abs(weights.w2)) * float(np.max(y ** 2, initial=0.0))
    if m2 < -tolerance:
        raise InconsistencyError(f"Second central moment is negative (m2={m2:.6g}) beyond tolerance {tolerance:.3g}.")

    # Spread below the rounding floor of the outputs is a constant output
    if m2 <= (VARIANCE_FLOOR_RTOL * float(np.max(np.abs(y), initial=0.0))) ** 2:
        m2 = m3 = m4 = 0.0

    summary = MomentSummary.from_central_moments(mean, m2, m3, m4, provenance)
    if not summary.defined:
        logger.info("Output variance is zero; skewness and kurtosis are undefined.")
    return summary


def estimate_moments_componentwise(outputs, weights: WeightTable, provenance: dict = None) -> list:
    """
    One summary per output column of an (N, k) matrix.
    """
    outputs = np.asarray(outputs, dtype=float)
    if outputs.ndim == 1:
        outputs = outputs[:, None]
    return [
        estimate_moments(EvaluationBatch(outputs[:, j], f"component {j}"), weights, provenance)
        for j in range(outputs.shape[1])
    ]


@dataclass(frozen=True)
class ErrorReport:
    """
    Relative errors |est - ref| / |ref| per moment; None where the entry is undefined.
    """
    errors: dict
    undefined: tuple = ()
    reference: str = ""
    extras: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.errors[name]

    def as_dict(self) -> dict:
        data = {f"{name}_rel_error": self.errors[name] for name in MOMENT_NAMES}
        data["undefined"] = ",".join(self.undefined)
        data["reference"] = self.reference
        return data


def relative_errors(summary: MomentSummary, reference: MomentSummary, reference_tag: str = "") -> ErrorReport:
    errors = {}
    undefined = []
    for name in MOMENT_NAMES:
        est = getattr(summary, name)
        ref = getattr(reference, name)
        if est is None or ref is None or ref == 0.0 or not np.isfinite(ref):
            errors[name] = None
            undefined.append(name)
        else:
            errors[name] = abs(est - ref) / abs(ref)
    return ErrorReport(errors, tuple(undefined), reference_tag)
