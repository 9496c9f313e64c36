import json

import numpy as np
import pytest

from QPEMPy.BenchmarkModels import CASES_DIR
from QPEMPy.CoreTypes import (
    DimensionMismatchError, FactorizationError, GaussianSpec, ParameterError, validate_spec
)
from QPEMPy.QuadraticPEM import QpemParams, build_qpem
from QPEMPy.SpaceTransform import (
    FactorOptions, block_correlation, corr_to_cov, dump_input_spec, factor_covariance, load_input_spec,
    spec_from_dict, to_x_space, to_z_space
)


@pytest.fixture
def correlated_spec():
    stds = np.array([1.0, 2.0, 0.5])
    corr = np.array([[1.0, 0.3, -0.2], [0.3, 1.0, 0.4], [-0.2, 0.4, 1.0]])
    return GaussianSpec([1.0, -2.0, 10.0], corr_to_cov(stds, corr))


@pytest.mark.parametrize("method", list(FactorOptions))
def test_factor_reconstructs_the_covariance(correlated_spec, method):
    factor = factor_covariance(correlated_spec, method)
    np.testing.assert_allclose(factor.matrix @ factor.matrix.T, correlated_spec.covariance, atol=1e-13)
    assert factor.method == method


def test_cholesky_factor_is_lower_triangular(correlated_spec):
    factor = factor_covariance(correlated_spec)
    np.testing.assert_array_equal(np.triu(factor.matrix, 1), 0.0)


def test_eigen_factor_columns_are_sorted_by_variance(correlated_spec):
    factor = factor_covariance(correlated_spec, FactorOptions.EIGEN)
    column_norms = np.sum(factor.matrix ** 2, axis=0)
    assert np.all(np.diff(column_norms) <= 1e-12)


@pytest.mark.parametrize("method", list(FactorOptions))
def test_round_trip_between_spaces(correlated_spec, method):
    factor = factor_covariance(correlated_spec, method)
    z = np.random.default_rng(0).standard_normal((20, 3))
    x = to_x_space(z, correlated_spec, factor)
    np.testing.assert_allclose(to_z_space(x, correlated_spec, factor), z, atol=1e-12)


def test_central_point_maps_to_the_mean(correlated_spec):
    points, _ = build_qpem(QpemParams(3))
    x = to_x_space(points, correlated_spec, factor_covariance(correlated_spec))
    np.testing.assert_array_equal(x[0], correlated_spec.mean)


def test_identity_input_is_the_identity_map():
    spec = GaussianSpec(np.zeros(4), np.eye(4))
    z = np.random.default_rng(1).standard_normal((5, 4))
    np.testing.assert_array_equal(to_x_space(z, spec, factor_covariance(spec)), z)


def test_mapped_points_carry_the_input_covariance(correlated_spec):
    points, weights = build_qpem(QpemParams(3))
    x = to_x_space(points, correlated_spec, factor_covariance(correlated_spec))
    mean = weights.w1 @ x
    cov = (weights.w1[:, None] * (x - mean)).T @ (x - mean)
    np.testing.assert_allclose(mean, correlated_spec.mean, atol=1e-12)
    np.testing.assert_allclose(cov, correlated_spec.covariance, atol=1e-12)


def test_singular_covariance_needs_the_eigen_factor():
    spec = GaussianSpec([0.0, 0.0], [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(FactorizationError, match="eigen"):
        factor_covariance(spec, FactorOptions.CHOLESKY)
    factor = factor_covariance(spec, FactorOptions.EIGEN)
    np.testing.assert_allclose(factor.matrix @ factor.matrix.T, spec.covariance, atol=1e-14)


def test_indefinite_covariance_is_rejected():
    spec = GaussianSpec([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
    for method in FactorOptions:
        with pytest.raises(FactorizationError):
            factor_covariance(spec, method)


def test_asymmetric_covariance_is_a_parameter_error():
    with pytest.raises(ParameterError, match="symmetric"):
        factor_covariance(GaussianSpec([0.0, 0.0], [[1.0, 0.5], [0.1, 1.0]]))


def test_dimension_mismatch(correlated_spec):
    factor = factor_covariance(correlated_spec)
    with pytest.raises(DimensionMismatchError):
        to_x_space(np.zeros((2, 2)), correlated_spec, factor)
    with pytest.raises(DimensionMismatchError):
        to_z_space(np.zeros((2, 4)), correlated_spec, factor)


def test_corr_to_cov():
    np.testing.assert_array_equal(corr_to_cov([1.0, 2.0], [[1.0, 0.5], [0.5, 1.0]]), [[1.0, 1.0], [1.0, 4.0]])
    np.testing.assert_array_equal(corr_to_cov([3.0, 2.0], np.eye(2)), np.diag([9.0, 4.0]))


@pytest.mark.parametrize("stds, corr, message", [
    ([1.0, 1.0], [[1.0, 0.5], [0.4, 1.0]], "symmetric"),
    ([1.0, 1.0], [[2.0, 0.5], [0.5, 1.0]], "unit diagonal"),
    ([1.0, 1.0], [[1.0, 1.5], [1.5, 1.0]], r"\[-1, 1\]"),
    ([1.0, -1.0], np.eye(2), "non-negative"),
    ([1.0, 1.0, 1.0], np.eye(2), "3x3"),
])
def test_invalid_correlation(stds, corr, message):
    with pytest.raises(ParameterError, match=message):
        corr_to_cov(stds, corr)


def test_block_correlation():
    corr = block_correlation([2, 3], [0.5, 0.1])
    assert corr.shape == (5, 5)
    np.testing.assert_array_equal(np.diag(corr), 1.0)
    assert corr[0, 1] == 0.5
    assert corr[2, 4] == 0.1
    assert corr[0, 4] == 0.0


def test_correlation_blocks_entry():
    spec = spec_from_dict({
        "mean": [1.0, 1.0, 5.0], "std": [1.0, 2.0, 3.0],
        "corr_blocks": {"sizes": [2, 1], "within": [0.5, 0.0], "between": 0.2},
    })
    expected = corr_to_cov([1.0, 2.0, 3.0], block_correlation([2, 1], [0.5, 0.0], 0.2))
    np.testing.assert_array_equal(spec.covariance, expected)
    assert spec.covariance[0, 1] == pytest.approx(1.0)
    assert spec.covariance[1, 2] == pytest.approx(1.2)

    with pytest.raises(DimensionMismatchError, match="cover 2 inputs"):
        spec_from_dict({"mean": [0.0, 0.0, 0.0], "std": [1.0] * 3, "corr_blocks": {"sizes": [2], "within": [0.5]}})


def test_sixstory_input_is_positive_semi_definite():
    spec = load_input_spec(CASES_DIR / "sixstory.json")
    assert spec.dim == 18
    assert validate_spec(spec) == []
    corr = spec.covariance / np.outer(spec.stds, spec.stds)
    np.testing.assert_allclose(corr, block_correlation([6, 12], [0.5, 0.1]), atol=1e-15)


def test_rooftruss_input_matches_its_coefficients_of_variation():
    spec = load_input_spec(CASES_DIR / "rooftruss.json")
    np.testing.assert_array_equal(spec.mean, [2.0e4, 12.0, 9.82e-4, 0.04, 1.0e11, 2.0e10])
    np.testing.assert_allclose(spec.stds / spec.mean, [0.07, 0.01, 0.06, 0.12, 0.06, 0.06], rtol=1e-14)
    assert spec.names == ("q", "l", "A_s", "A_c", "E_s", "E_c")

    points, _ = build_qpem(QpemParams(6))
    x = to_x_space(points, spec, factor_covariance(spec))
    np.testing.assert_array_equal(x[0], spec.mean)


def test_spec_file_round_trip(tmp_path, correlated_spec):
    path = tmp_path / "input.json"
    dump_input_spec(GaussianSpec(correlated_spec.mean, correlated_spec.covariance, ("a", "b", "c")), path,
                    units=["m", "m", "kg"])
    data = json.loads(path.read_text())
    assert data["units"] == ["m", "m", "kg"]
    loaded = load_input_spec(path)
    np.testing.assert_array_equal(loaded.mean, correlated_spec.mean)
    np.testing.assert_array_equal(loaded.covariance, correlated_spec.covariance)
    assert loaded.names == ("a", "b", "c")


def test_spec_from_dict_forms():
    by_std = spec_from_dict({"mean": [0.0, 0.0], "std": [1.0, 2.0], "corr": [[1.0, 0.5], [0.5, 1.0]]})
    np.testing.assert_array_equal(by_std.covariance, [[1.0, 1.0], [1.0, 4.0]])
    by_coefficient = spec_from_dict({"mean": [10.0, -20.0], "cov_coefficient": [0.1, 0.1]})
    np.testing.assert_allclose(by_coefficient.stds, [1.0, 2.0])
    with pytest.raises(ParameterError):
        spec_from_dict({"std": [1.0]})
    with pytest.raises(ParameterError):
        spec_from_dict({"mean": [1.0]})


def test_unreadable_spec_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParameterError, match="Could not read"):
        load_input_spec(bad)
    with pytest.raises(ParameterError):
        load_input_spec(tmp_path / "missing.json")
