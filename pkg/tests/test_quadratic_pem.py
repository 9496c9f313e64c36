import logging
import math

import numpy as np
import pytest

from QPEMPy.CoreTypes import ParameterError, PointKind, UnsupportedDimensionError
from QPEMPy.QuadraticPEM import (
    QpemParams, all_monomials, argmin_r6, bracket_r6_minima, build_qpem, canonical_monomials, e6_residual,
    e6_squared, qpem_constants, stability_factor, standard_normal_moment, verify_mce
)
from QPEMPy.ReferenceTables import SCHEDULE_DIMS

SQRT3 = math.sqrt(3.0)
MCE_DIMS = (2, 3, 5, 10, 20, 50)
MCE_RADII = (1.5, SQRT3, 3.0, 5.0)


def _odd(exponents):
    return any(k % 2 for k in exponents)


@pytest.mark.parametrize("n", MCE_DIMS)
@pytest.mark.parametrize("r", MCE_RADII)
def test_moment_constraints_hold_through_degree_five(n, r):
    points, weights = build_qpem(QpemParams(n, r))
    monomials = all_monomials(n, 5) if n <= 10 else canonical_monomials(n, 5)
    table = verify_mce(points, weights, 5, monomials)
    assert len(table) == len(monomials)
    assert table["residual"].max() <= 1e-9


@pytest.mark.parametrize("n", MCE_DIMS)
@pytest.mark.parametrize("r", MCE_RADII)
def test_odd_moments_vanish_through_degree_seven(n, r):
    points, weights = build_qpem(QpemParams(n, r))
    odd = [m for m in canonical_monomials(n, 7) if _odd(m)]
    table = verify_mce(points, weights, 7, odd)
    assert (table["target"] == 0.0).all()
    assert table["residual"].max() <= 1e-12


def test_canonical_monomials_cover_every_permutation_class():
    # Partitions of 1..4 into at most three parts: 1 + 2 + 3 + 4
    monomials = canonical_monomials(3, 4)
    assert len(monomials) == 10
    assert (2, 1, 0) in monomials
    assert (1, 2, 0) not in monomials
    assert len(all_monomials(3, 2)) == 3 + 6


@pytest.mark.parametrize("exponents, expected", [
    ((2,), 1.0), ((4,), 3.0), ((6,), 15.0), ((8,), 105.0), ((2, 2), 1.0), ((4, 2), 3.0), ((3, 1), 0.0), ((0, 0), 1.0)
])
def test_standard_normal_moments(exponents, expected):
    assert standard_normal_moment(exponents) == expected


@pytest.mark.parametrize("n", SCHEDULE_DIMS)
def test_point_count_law(n):
    points, weights = build_qpem(QpemParams(n))
    assert points.count == 2 * n ** 2 + 1
    assert len(weights) == points.count
    assert weights.total() == pytest.approx(1.0, abs=1e-12 * stability_factor(weights))


def test_closed_form_constants_for_two_dimensions():
    const = qpem_constants(QpemParams(2, 3.0))
    assert const.c1 == 3.0
    assert const.c2 == pytest.approx(math.sqrt(9.0 / 7.0), rel=1e-15)
    assert const.w0 == pytest.approx(28.0 / 81.0, rel=1e-14)
    assert const.w1 == pytest.approx(1.0 / 81.0, rel=1e-15)
    assert const.w2 == pytest.approx(49.0 / 324.0, rel=1e-15)


def test_point_order_and_kinds():
    n, r = 3, 3.0
    points, weights = build_qpem(QpemParams(n, r))
    z = points.points
    c2 = qpem_constants(QpemParams(n, r)).c2

    assert points.kind[0] == PointKind.CENTRAL
    np.testing.assert_array_equal(z[0], 0.0)
    np.testing.assert_array_equal(z[1:4], r * np.eye(3))
    np.testing.assert_array_equal(z[4:7], -r * np.eye(3))
    np.testing.assert_allclose(z[7:11], c2 * np.array([[1, 1, 0], [-1, 1, 0], [1, -1, 0], [-1, -1, 0]]))
    np.testing.assert_allclose(z[11:15, [0, 2]], c2 * np.array([[1, 1], [-1, 1], [1, -1], [-1, -1]]))
    assert set(points.kind[1:7]) == {PointKind.AXIS}
    assert set(points.kind[7:]) == {PointKind.DIAGONAL}
    assert points.is_fully_symmetric()


def test_scaling_moves_only_the_central_third_and_fourth_order_weights():
    _, scaled = build_qpem(QpemParams(4, 3.0, zeta=-8.0, xi=60.0))
    _, plain = build_qpem(QpemParams.unscaled(4, 3.0))
    np.testing.assert_array_equal(scaled.w1, plain.w1)
    np.testing.assert_array_equal(scaled.w2, plain.w1)
    assert scaled.w3[0] == plain.w1[0] - 8.0
    assert scaled.w4[0] == plain.w1[0] + 60.0
    np.testing.assert_array_equal(scaled.w3[1:], plain.w1[1:])
    np.testing.assert_array_equal(scaled.w4[1:], plain.w1[1:])


@pytest.mark.parametrize("n, r", [(2, 3.0), (5, SQRT3), (10, 1.5), (20, 5.0)])
def test_sixth_order_estimate_matches_the_residual_formula(n, r):
    points, weights = build_qpem(QpemParams(n, r))
    table = verify_mce(points, weights, 6, [(6,) + (0,) * (n - 1)])
    assert table["estimate"].iloc[0] == pytest.approx(15.0 - e6_residual(r, n), rel=1e-12)


def test_stability_factor_at_fifty_dimensions():
    n, r = 50, 3.0
    u = r * r
    w1 = (4 - n) / (2.0 * u * u)
    w2 = 0.25 * ((u + n - 4) / (u * (n - 1))) ** 2
    w0 = 1.0 - 2 * n * w1 - 2 * n * (n - 1) * w2
    expected = abs(w0) + 2 * n * abs(w1) + 2 * n * (n - 1) * abs(w2)

    _, weights = build_qpem(QpemParams(n, r))
    value = stability_factor(weights)
    assert value < 100.0
    assert value == pytest.approx(expected, rel=1e-9)
    assert value == pytest.approx(57.79, abs=0.01)


@pytest.mark.parametrize("n", [4, 10, 50])
def test_sixth_order_tuning_returns_sqrt3(n):
    assert argmin_r6(n) == pytest.approx(SQRT3, abs=1e-6)


def test_flat_residual_at_four_dimensions_is_logged(caplog):
    with caplog.at_level(logging.WARNING, logger="QPEMPy.QuadraticPEM"):
        minima = bracket_r6_minima(4)
    assert len(minima) == 1 and minima[0].flat
    assert "flat" in caplog.text


def test_two_dimensions_have_two_exact_minimizers(caplog):
    lower = math.sqrt((9.0 - math.sqrt(21.0)) / 2.0)
    upper = math.sqrt((9.0 + math.sqrt(21.0)) / 2.0)

    minima = bracket_r6_minima(2)
    assert [m.r for m in minima] == pytest.approx([lower, upper], abs=1e-9)

    with caplog.at_level(logging.WARNING, logger="QPEMPy.QuadraticPEM"):
        r = argmin_r6(2)
    assert r == pytest.approx(lower, abs=1e-9)
    assert e6_squared(r, 2) <= 1e-18
    assert "global minimizers" in caplog.text


def test_three_dimensions_have_one_exact_minimizer():
    r = argmin_r6(3)
    assert r == pytest.approx(math.sqrt(6.0 + math.sqrt(21.0)), abs=1e-9)
    assert e6_squared(r, 3) <= 1e-18


def test_parameter_errors():
    with pytest.raises(UnsupportedDimensionError):
        QpemParams(1)
    with pytest.raises(ParameterError, match="sqrt\\(2\\)"):
        QpemParams(3, r=1.4)
    with pytest.raises(ParameterError):
        QpemParams(3, r=math.sqrt(2.0))
    with pytest.raises(UnsupportedDimensionError):
        e6_squared(2.0, 1)
