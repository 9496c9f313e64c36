import numpy as np
import pytest

from QPEMPy.CoreTypes import ParameterError, PointKind, UnsupportedDimensionError
from QPEMPy.SamplingUtils import (
    DEFAULT_SEED, SOBOL_MAX_DIM, SamplePlan, SamplingOptions, generate, inv_norm_cdf, stratum_occupancy, unit_design
)


def test_mc_is_reproducible_per_seed():
    first, weights = generate(SamplePlan(SamplingOptions.MC, 50, seed=3), 4)
    again, _ = generate(SamplePlan(SamplingOptions.MC, 50, seed=3), 4)
    other, _ = generate(SamplePlan(SamplingOptions.MC, 50, seed=4), 4)
    np.testing.assert_array_equal(first.points, again.points)
    assert not np.array_equal(first.points, other.points)
    assert first.points.shape == (50, 4)
    assert set(first.kind) == {PointKind.SAMPLE}
    np.testing.assert_array_equal(weights.w4, np.full(50, 1 / 50))


def test_missing_seed_uses_the_default():
    plan = SamplePlan("mc", 10)
    assert plan.resolved_seed == DEFAULT_SEED
    np.testing.assert_array_equal(
        generate(plan, 2)[0].points, generate(SamplePlan("mc", 10, seed=DEFAULT_SEED), 2)[0].points
    )


def test_mc_sample_moments():
    points, _ = generate(SamplePlan("mc", 200_000, seed=11), 3)
    z = points.points
    assert np.all(np.abs(z.mean(axis=0)) < 4.0 / np.sqrt(200_000))
    np.testing.assert_allclose(z.var(axis=0), 1.0, atol=0.02)


@pytest.mark.parametrize("count, n", [(10, 1), (73, 6), (201, 10)])
def test_lhs_fills_every_stratum_once(count, n):
    design = unit_design(SamplePlan("lhs", count, seed=5), n)
    np.testing.assert_array_equal(stratum_occupancy(design), np.ones((n, count), dtype=int))


def test_lhs_is_reproducible_per_seed():
    a, _ = generate(SamplePlan("lhs", 20, seed=9), 3)
    b, _ = generate(SamplePlan("lhs", 20, seed=9), 3)
    np.testing.assert_array_equal(a.points, b.points)


def test_sobol_skips_the_origin():
    points, weights = generate(SamplePlan("sobol", 8), 3)
    # The second point of the unscrambled sequence is (1/2, ..., 1/2)
    np.testing.assert_array_equal(points.points[0], 0.0)
    assert np.all(np.isfinite(points.points))
    assert weights.total() == pytest.approx(1.0, abs=1e-15)


def test_sobol_is_deterministic():
    a, _ = generate(SamplePlan("sobol", 73, skip=1), 6)
    b, _ = generate(SamplePlan("sobol", 73, skip=1), 6)
    np.testing.assert_array_equal(a.points, b.points)


def test_sobol_origin_is_rejected():
    with pytest.raises(ParameterError, match="skip"):
        generate(SamplePlan("sobol", 4, skip=0), 2)


def test_sobol_dimension_limit():
    with pytest.raises(UnsupportedDimensionError):
        generate(SamplePlan("sobol", 2), SOBOL_MAX_DIM + 1)


def test_inverse_normal_cdf():
    assert inv_norm_cdf(0.5) == 0.0
    assert inv_norm_cdf(0.975) == pytest.approx(1.959963984540054, rel=1e-12)
    np.testing.assert_allclose(inv_norm_cdf([0.025, 0.975]), [-1.959963984540054, 1.959963984540054], rtol=1e-12)
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ParameterError):
            inv_norm_cdf(p)


@pytest.mark.parametrize("kwargs", [{"count": 0}, {"count": 5, "skip": -1}, {"count": 5, "seed": -1}])
def test_plan_errors(kwargs):
    with pytest.raises(ParameterError):
        SamplePlan("mc", **kwargs)


def test_unknown_method_is_rejected():
    with pytest.raises(ValueError):
        SamplePlan("halton", 5)
