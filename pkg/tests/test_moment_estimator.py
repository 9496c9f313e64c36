import math

import numpy as np
import pytest

from QPEMPy.CoreTypes import DimensionMismatchError, EvaluationBatch, InconsistencyError, MomentSummary, WeightTable
from QPEMPy.MomentEstimator import (
    MOMENT_NAMES, estimate_moments, estimate_moments_componentwise, relative_errors
)
from QPEMPy.QuadraticPEM import QpemParams, build_qpem


def _run(model, params):
    points, weights = build_qpem(params)
    return estimate_moments(EvaluationBatch(model(points.points)), weights)


def test_constant_model_has_undefined_shape_moments():
    summary = _run(lambda z: np.full(z.shape[0], 4.5), QpemParams(3))
    assert summary.mean == pytest.approx(4.5, rel=1e-14)
    assert summary.std == 0.0
    assert summary.skew is None and summary.kurt is None


@pytest.mark.parametrize("params", [QpemParams(2, 3.0), QpemParams.unscaled(2, 3.0)])
def test_linear_model_is_exact(params):
    summary = _run(lambda z: z[:, 0], params)
    assert summary.mean == pytest.approx(0.0, abs=1e-12)
    assert summary.std == pytest.approx(1.0, abs=1e-12)
    assert summary.skew == pytest.approx(0.0, abs=1e-12)
    assert summary.kurt == pytest.approx(3.0, abs=1e-12)


def test_square_model_misses_the_chi_square_skew():
    summary = _run(lambda z: z[:, 0] ** 2, QpemParams.unscaled(2, 3.0))
    m2, m3, _ = summary.central_moments
    assert summary.mean == pytest.approx(1.0, abs=1e-12)
    assert m2 == pytest.approx(2.0, abs=1e-12)
    # E[z^6] is estimated as 135/7 instead of 15
    assert m3 == pytest.approx(135.0 / 7.0 - 7.0, rel=1e-12)
    assert summary.skew == pytest.approx((135.0 / 7.0 - 7.0) / 2.0 ** 1.5, rel=1e-12)
    assert abs(summary.skew - math.sqrt(8.0)) > 0.1


def test_scaling_applies_at_the_central_point_only():
    plain = _run(lambda z: z[:, 0] ** 2, QpemParams.unscaled(2, 3.0))
    scaled = _run(lambda z: z[:, 0] ** 2, QpemParams(2, 3.0, zeta=-8.0, xi=60.0))
    assert scaled.mean == plain.mean
    assert scaled.std == plain.std
    # The central output deviates from the mean by -1
    assert scaled.central_moments[1] == pytest.approx(plain.central_moments[1] + 8.0, rel=1e-12)
    assert scaled.central_moments[2] == pytest.approx(plain.central_moments[2] + 60.0, rel=1e-12)


@pytest.mark.parametrize("a, b", [(2.5, -3.0), (0.5, 10.0), (7.0, 0.0)])
def test_affine_scaling_invariance(a, b):
    model = lambda z: np.sum(np.cumsum(z + 1.0, axis=1) ** 2, axis=1) + z[:, 0] ** 3
    base = _run(model, QpemParams(4))
    moved = _run(lambda z: a * model(z) + b, QpemParams(4))
    assert moved.mean == pytest.approx(a * base.mean + b, rel=1e-12)
    assert moved.std == pytest.approx(a * base.std, rel=1e-12)
    assert moved.skew == pytest.approx(base.skew, rel=1e-12)
    assert moved.kurt == pytest.approx(base.kurt, rel=1e-12)


def test_zero_scaling_equals_the_plain_weights_exactly():
    points, weights = build_qpem(QpemParams.unscaled(3))
    batch = EvaluationBatch(np.exp(0.3 * points.points[:, 0]) + points.points[:, 1] ** 2)
    plain = estimate_moments(batch, WeightTable.identical(weights.w1))
    scaled = estimate_moments(batch, WeightTable.scaled(weights.w1, 0, 0.0, 0.0))
    assert plain == scaled


@pytest.mark.parametrize("zeta", [0.0, -8.0, 25.0])
def test_odd_model_has_zero_third_moment(zeta):
    params = QpemParams(3, 3.0, zeta=zeta, xi=60.0)
    summary = _run(lambda z: z[:, 0] + z[:, 1] ** 3 + z[:, 0] * z[:, 2] ** 2, params)
    assert summary.mean == 0.0
    assert abs(summary.central_moments[1]) <= 1e-12
    assert abs(summary.skew) <= 1e-12


def test_negative_variance_beyond_tolerance_is_an_error():
    with pytest.raises(InconsistencyError):
        estimate_moments(EvaluationBatch([0.0, 1.0]), WeightTable.identical([1.5, -0.5]))


def test_length_mismatch():
    with pytest.raises(DimensionMismatchError):
        estimate_moments(EvaluationBatch([1.0, 2.0, 3.0]), WeightTable.uniform(2))


def test_componentwise_summaries():
    points, weights = build_qpem(QpemParams(2))
    outputs = np.column_stack([points.points[:, 0], 2.0 * points.points[:, 1] + 1.0])
    first, second = estimate_moments_componentwise(outputs, weights)
    assert first.std == pytest.approx(1.0, abs=1e-12)
    assert second.mean == pytest.approx(1.0, abs=1e-12)
    assert second.std == pytest.approx(2.0, abs=1e-12)


def test_relative_errors():
    reference = MomentSummary(23.6689, 2.6027, 0.3550, 3.2633)
    estimate = MomentSummary(23.6688, 2.5995, 0.3432, 3.0913)
    report = relative_errors(estimate, reference, "mc")
    assert report["skew"] == pytest.approx(0.0332, abs=5e-5)
    assert report.reference == "mc"
    assert report.undefined == ()
    assert relative_errors(reference, reference).errors == {name: 0.0 for name in MOMENT_NAMES}


def test_undefined_relative_errors_are_flagged():
    report = relative_errors(MomentSummary(1.0, 1.0, 0.1, 3.0), MomentSummary(0.0, 1.0, None, 3.0))
    assert report["mean"] is None and report["skew"] is None
    assert report.undefined == ("mean", "skew")
    data = report.as_dict()
    assert data["undefined"] == "mean,skew"
    assert data["std_rel_error"] == 0.0
