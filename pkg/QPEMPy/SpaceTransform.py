"""
Module for the affine map between standardized z-space and correlated physical x-space,
plus the input-distribution file format.
"""
import json
import logging
from dataclasses import dataclass
from enum import auto
from pathlib import Path
from typing import Union

import numpy as np
import scipy.linalg

from .CoreTypes import (
    PSD_RTOL, SYMMETRY_RTOL, DimensionMismatchError, FactorizationError, GaussianSpec, ParameterError,
    SigmaPointSet, StrEnum, structural_problems
)

logger = logging.getLogger(__name__)


class FactorOptions(StrEnum):
    CHOLESKY = auto()
    EIGEN = auto()


@dataclass(frozen=True)
class CovFactor:
    matrix: np.ndarray
    method: FactorOptions

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def factor_covariance(spec: GaussianSpec, method: FactorOptions = FactorOptions.CHOLESKY) -> CovFactor:
    """
    Square-root factor L with L L^T = P. Cholesky keeps the variable order; eigen returns V diag(sqrt(lambda)).
    """
    method = FactorOptions(method)
    problems = structural_problems(spec)
    if problems:
        raise ParameterError("Invalid Gaussian input: " + "; ".join(problems))
    cov = 0.5 * (spec.covariance + spec.covariance.T)

    if method == FactorOptions.CHOLESKY:
        try:
            matrix = scipy.linalg.cholesky(cov, lower=True)
        except np.linalg.LinAlgError as err:
            raise FactorizationError(
                f"Cholesky factorization failed ({err}); the covariance is not positive definite, try the eigen factor."
            ) from err
    else:
        eigenvalues, vectors = scipy.linalg.eigh(cov)
        eigenvalues = eigenvalues[::-1]
        vectors = vectors[:, ::-1]
        lam_max = max(float(eigenvalues[0]), 0.0)
        if eigenvalues[-1] < -PSD_RTOL * lam_max:
            raise FactorizationError(
                f"Covariance has eigenvalue {eigenvalues[-1]:.6g} below the clipping tolerance "
                f"{-PSD_RTOL * lam_max:.3g}."
            )
        if eigenvalues[-1] < 0.0:
            logger.warning("Clipping %d slightly negative eigenvalues to 0", int(np.sum(eigenvalues < 0.0)))
        matrix = vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))

    # Assertion list
    scale = max(np.max(np.sum(np.abs(cov), axis=1)), np.finfo(float).tiny)
    error = np.max(np.sum(np.abs(matrix @ matrix.T - cov), axis=1))
    assert error <= 1e-10 * scale, f"Factor reconstruction error {error:.3e} exceeds tolerance."

    matrix.setflags(write=False)
    return CovFactor(matrix, method)


def _as_matrix(points) -> np.ndarray:
    if isinstance(points, SigmaPointSet):
        return points.points
    return np.atleast_2d(np.asarray(points, dtype=float))


def to_x_space(points, spec: GaussianSpec, factor: CovFactor) -> np.ndarray:
    """
    Maps each z row to X = mu + L z.
    """
    z = _as_matrix(points)
    if z.shape[1] != spec.dim or factor.dim != spec.dim:
        raise DimensionMismatchError(
            f"Points have {z.shape[1]} dimensions, input has {spec.dim}, factor has {factor.dim}."
        )
    return spec.mean + z @ factor.matrix.T


def to_z_space(x, spec: GaussianSpec, factor: CovFactor) -> np.ndarray:
    x = _as_matrix(x)
    if x.shape[1] != spec.dim or factor.dim != spec.dim:
        raise DimensionMismatchError(f"Points have {x.shape[1]} dimensions, input has {spec.dim}.")
    centred = (x - spec.mean).T
    if factor.method == FactorOptions.CHOLESKY:
        return scipy.linalg.solve_triangular(factor.matrix, centred, lower=True).T
    return scipy.linalg.lstsq(factor.matrix, centred)[0].T


def corr_to_cov(stds, corr) -> np.ndarray:
    """
    P_ij = rho_ij * sigma_i * sigma_j after checking that rho is a valid correlation matrix.
    """
    stds = np.asarray(stds, dtype=float).reshape(-1)
    corr = np.asarray(corr, dtype=float)

    # Assertion list
    if corr.ndim != 2 or corr.shape != (stds.shape[0], stds.shape[0]):
        raise ParameterError(f"Correlation matrix must be {stds.shape[0]}x{stds.shape[0]}, got {corr.shape}.")
    if np.any(stds < 0.0) or not np.all(np.isfinite(stds)):
        raise ParameterError("Standard deviations must be finite and non-negative.")
    if np.max(np.abs(corr - corr.T), initial=0.0) > SYMMETRY_RTOL:
        raise ParameterError("Correlation matrix must be symmetric.")
    if np.max(np.abs(np.diag(corr) - 1.0), initial=0.0) > SYMMETRY_RTOL:
        raise ParameterError("Correlation matrix must have a unit diagonal.")
    if np.any(np.abs(corr) > 1.0):
        raise ParameterError("Correlation entries must lie in [-1, 1].")

    return corr * np.outer(stds, stds)


def block_correlation(sizes, within, between: float = 0.0) -> np.ndarray:
    """
    Correlation matrix with constant correlation inside each block and a common value between blocks.
    """
    total = int(sum(sizes))
    corr = np.full((total, total), float(between))
    start = 0
    for size, rho in zip(sizes, within):
        corr[start:start + size, start:start + size] = rho
        start += size
    np.fill_diagonal(corr, 1.0)
    return corr


def _correlation_entry(data: dict, dim: int) -> np.ndarray:
    if "corr_blocks" in data:
        blocks = data["corr_blocks"]
        if int(sum(blocks["sizes"])) != dim:
            raise DimensionMismatchError(f"Correlation blocks cover {sum(blocks['sizes'])} inputs, expected {dim}.")
        return block_correlation(blocks["sizes"], blocks["within"], blocks.get("between", 0.0))
    return np.asarray(data.get("corr", np.eye(dim)), dtype=float)


def spec_from_dict(data: dict) -> GaussianSpec:
    if "mean" not in data:
        raise ParameterError("Input distribution needs a 'mean' entry.")
    mean = np.asarray(data["mean"], dtype=float)
    if "cov" in data:
        cov = np.asarray(data["cov"], dtype=float)
    elif "std" in data:
        cov = corr_to_cov(data["std"], _correlation_entry(data, mean.shape[0]))
    elif "cov_coefficient" in data:
        stds = np.abs(mean) * np.asarray(data["cov_coefficient"], dtype=float)
        cov = corr_to_cov(stds, _correlation_entry(data, mean.shape[0]))
    else:
        raise ParameterError("Input distribution needs either 'cov' or 'std' (with optional 'corr').")
    return GaussianSpec(mean, cov, data.get("names"))


def load_input_spec(path: Union[str, Path]) -> GaussianSpec:
    """
    Reads a JSON object with 'mean' and either 'cov' or 'std' + 'corr' (or 'corr_blocks'). 'names' and 'units' are optional.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise ParameterError(f"Could not read input distribution {path}: {err}") from err
    logger.info("Loaded input distribution from %s", path)
    return spec_from_dict(data)


def dump_input_spec(spec: GaussianSpec, path: Union[str, Path], units=None):
    data = {"mean": spec.mean.tolist(), "cov": spec.covariance.tolist()}
    if spec.names is not None:
        data["names"] = list(spec.names)
    if units is not None:
        data["units"] = list(units)
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
