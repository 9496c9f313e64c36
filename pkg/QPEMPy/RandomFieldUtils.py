"""
Module for Karhunen-Loeve discretization of 1-D Gaussian random fields by the Nystrom method.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .CoreTypes import DimensionMismatchError, ParameterError, ordered_sum

logger = logging.getLogger(__name__)


def squared_exponential(dx, length: float):
    dx = np.asarray(dx, dtype=float)
    return np.exp(-(dx / length) ** 2)


@dataclass(frozen=True)
class Kernel:
    """
    Squared-exponential covariance sigma^2 * exp(-dx^2 / l^2).
    """
    variance: float
    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(l) for l in np.atleast_1d(self.lengths))

        # Assertion list
        if not self.variance > 0.0:
            raise ParameterError(f"Kernel variance must be positive, got {self.variance}.")
        if not lengths or min(lengths) <= 0.0:
            raise ParameterError(f"Kernel correlation lengths must be positive, got {lengths}.")
        object.__setattr__(self, "lengths", lengths)

    def __call__(self, x, y):
        """
        Covariance matrix between coordinate vectors x and y.
        """
        dx = np.subtract.outer(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.variance * squared_exponential(dx, self.lengths[0])


@dataclass(frozen=True)
class KLBasis:
    eigenvalues: np.ndarray
    modes: np.ndarray
    mesh: np.ndarray
    weights: np.ndarray
    mean: float
    stdev: float
    kernel: Kernel

    @property
    def terms(self) -> int:
        return self.eigenvalues.shape[0]


def trapezoid_weights(mesh: np.ndarray) -> np.ndarray:
    h = np.diff(mesh)
    weights = np.zeros_like(mesh)
    weights[:-1] += 0.5 * h
    weights[1:] += 0.5 * h
    return weights


def kl_decompose(mesh, kernel: Kernel, terms: int, mean: float = 0.0) -> KLBasis:
    """
    Leading KL eigenpairs of the kernel on the mesh, Nystrom with trapezoid quadrature.

    The symmetric problem W^1/2 C W^1/2 psi = lambda psi is solved and the modes phi = W^-1/2 psi are
    orthonormal under the quadrature weights. Each mode is signed so that its largest-magnitude entry is positive.
    """
    mesh = np.asarray(mesh, dtype=float).reshape(-1)

    # Assertion list
    if mesh.shape[0] < 2 or np.any(np.diff(mesh) <= 0.0):
        raise ParameterError("KL mesh must have at least two strictly increasing coordinates.")
    if int(terms) != terms or not 1 <= terms <= mesh.shape[0]:
        raise ParameterError(f"KL terms must be between 1 and the mesh size {mesh.shape[0]}, got {terms}.")
    terms = int(terms)

    weights = trapezoid_weights(mesh)
    root_w = np.sqrt(weights)
    cov = kernel(mesh, mesh)
    sym = root_w[:, None] * cov * root_w[None, :]

    count = mesh.shape[0]
    eigenvalues, vectors = scipy.linalg.eigh(sym, subset_by_index=[count - terms, count - 1])
    eigenvalues = eigenvalues[::-1]
    vectors = vectors[:, ::-1]

    # Rounding leaves tiny negative eigenvalues in the tail of smooth kernels
    floor = -1e-12 * eigenvalues[0]
    if np.any(eigenvalues < floor):
        logger.warning("Clipping %d KL eigenvalues below %.3g to 0", int(np.sum(eigenvalues < floor)), floor)
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    modes = (vectors / root_w[:, None]).T
    peaks = np.argmax(np.abs(modes), axis=1)
    signs = np.sign(modes[np.arange(terms), peaks])
    modes = modes * signs[:, None]

    eigenvalues.setflags(write=False)
    modes.setflags(write=False)
    basis = KLBasis(eigenvalues, modes, mesh, weights, float(mean), float(np.sqrt(kernel.variance)), kernel)
    logger.info("KL basis with %d terms captures %.6f of the field variance", terms, captured_variance_ratio(basis))
    return basis


def captured_variance_ratio(basis: KLBasis) -> float:
    return ordered_sum(basis.eigenvalues) / (basis.kernel.variance * ordered_sum(basis.weights))


def _check_eta(basis: KLBasis, eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape[-1] != basis.terms:
        raise DimensionMismatchError(f"eta has length {eta.shape[-1]}, the basis has {basis.terms} terms.")
    return eta


def realize(basis: KLBasis, eta) -> np.ndarray:
    """
    Field values on the mesh: mean + sum_k sqrt(lambda_k) phi_k eta_k. eta may be a batch of rows.
    """
    eta = _check_eta(basis, eta)
    return basis.mean + (eta * np.sqrt(basis.eigenvalues)) @ basis.modes


def interpolate_modes(basis: KLBasis, x) -> np.ndarray:
    """
    Nystrom interpolation phi_k(x) = 1/lambda_k sum_j w_j C(x, x_j) phi_k(x_j); zero for lambda_k = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cross = basis.kernel(x, basis.mesh) * basis.weights[None, :]
    projected = basis.modes @ cross.T
    safe = np.where(basis.eigenvalues > 0.0, basis.eigenvalues, 1.0)
    return np.where(basis.eigenvalues[:, None] > 0.0, projected / safe[:, None], 0.0)


def realize_at(basis: KLBasis, eta, x) -> np.ndarray:
    eta = _check_eta(basis, eta)
    return basis.mean + (eta * np.sqrt(basis.eigenvalues)) @ interpolate_modes(basis, x)
