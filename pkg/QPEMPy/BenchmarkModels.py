"""
Module for the built-in benchmark response models, their input distributions, analytic oracles,
and Monte Carlo reference runs.
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np
import scipy.linalg

from .CoreTypes import (
    DimensionMismatchError, EvaluationBatch, GaussianSpec, ModelError, MomentSummary, ParameterError, WeightTable
)
from .MomentEstimator import estimate_moments
from .RandomFieldUtils import Kernel, interpolate_modes, kl_decompose
from .ReferenceTables import REFERENCE_TABLES
from .SamplingUtils import make_generator
from .SparseQuadUtils import gauss_hermite_1d
from .SpaceTransform import FactorOptions, factor_covariance, load_input_spec, to_x_space

logger = logging.getLogger(__name__)

CASES_DIR = Path(__file__).resolve().parent / "cases"
STORY_HEIGHT = 4.0
MC_CHUNK = 100_000


def _as_rows(x, dim: int) -> tuple:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != dim:
        raise DimensionMismatchError(f"Model expects {dim} inputs per point, got {x.shape[1]}.")
    return x, single


def _first_bad(mask: np.ndarray) -> int:
    return int(np.flatnonzero(np.any(mask, axis=1) if mask.ndim > 1 else mask)[0])


def polynomial_model(n: int) -> Callable:
    """
    y = sum_i (sum_{j<=i} x_j)^2, vectorized over rows.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"The polynomial model needs n >= 1, got n={n}.")

    def model(x):
        x, single = _as_rows(x, n)
        y = np.sum(np.cumsum(x, axis=1) ** 2, axis=1)
        return float(y[0]) if single else y

    return model


def quadform_moment_oracle(n: int, mean: float = 5.0) -> MomentSummary:
    """
    Exact moments of y = x^T M x, M = L^T L with L lower-triangular ones, x ~ N(mean * 1, I).

    Cumulants are k_r = 2^(r-1) (r-1)! [tr(M^r) + r m^T M^r m].
    """
    ell = np.tril(np.ones((n, n)))
    m_mat = ell.T @ ell
    m_vec = np.full(n, float(mean))

    cumulants = []
    power = np.eye(n)
    for r in range(1, 5):
        power = power @ m_mat
        kappa = 2.0 ** (r - 1) * math.factorial(r - 1) * (np.trace(power) + r * m_vec @ power @ m_vec)
        cumulants.append(float(kappa))
    return MomentSummary.from_cumulants(*cumulants, provenance={"source": "analytic quadratic-form cumulants", "n": n})


def brute_force_gh_moments(n: int, nodes: int = 9, mean: float = 5.0) -> MomentSummary:
    """
    Moments of the polynomial model by a dense tensor Gauss-Hermite rule; nodes^n evaluations.
    """
    rule = gauss_hermite_1d(nodes)
    grid = np.array(list(itertools.product(rule.nodes, repeat=n)))
    weights = np.prod(np.array(list(itertools.product(rule.weights, repeat=n))), axis=1)
    outputs = polynomial_model(n)(grid + mean)
    return estimate_moments(EvaluationBatch(outputs), WeightTable.identical(weights),
                            {"source": f"tensor Gauss-Hermite {nodes}^{n}"})


def rooftruss_model(x):
    """
    Peak deflection in mm, 1000 q l^2 / 2 (3.81 / (A_c E_c) + 1.13 / (A_s E_s)), for SI inputs
    x = (q [N/m], l [m], A_s, A_c [m^2], E_s, E_c [N/m^2]).
    """
    x, single = _as_rows(x, 6)
    q, l, a_s, a_c, e_s, e_c = x.T
    bad = np.column_stack([a_s, a_c, e_s, e_c]) <= 0.0
    if np.any(bad):
        index = _first_bad(bad)
        raise ModelError(f"Roof truss areas and moduli must be positive (point {index}).", index=index)
    y = 1000.0 * q * l ** 2 / 2.0 * (3.81 / (a_c * e_c) + 1.13 / (a_s * e_s))
    return float(y[0]) if single else y


def sixstory_model(x, height: float = STORY_HEIGHT):
    """
    Top displacement of the six-story frame in mm for x = (F_1..F_6 [kN], EI_1..EI_12 [kN m^2]).

    Story k carries the shear of every floor load from k upward over the stiffness of its column pair.
    """
    x, single = _as_rows(x, 18)
    loads = x[:, :6]
    rigidity = x[:, 6:].reshape(-1, 6, 2).sum(axis=2)
    if np.any(rigidity <= 0.0):
        index = _first_bad(rigidity <= 0.0)
        raise ModelError(f"Six-story column stiffness sums must be positive (point {index}).", index=index)

    # Cumulative shear from the top floor down
    shear = np.cumsum(loads[:, ::-1], axis=1)[:, ::-1]
    drift = shear * height ** 3 / (12.0 * rigidity)
    u = 1000.0 * np.sum(drift, axis=1)
    return float(u[0]) if single else u


class ElasticBar:
    """
    Fixed-free bar under uniform load q with a Gaussian random rigidity field D(x) given by its KL expansion.

    100 two-node linear elements use the midpoint value of D; the nodal system is tridiagonal. The tip
    displacement is returned in mm.
    """

    def __init__(self, length=1.0, load=1.0, mean=100.0, stdev=10.0, corr_length=0.2, elements=100, terms=20,
                 chunk=20_000):

        # Assertion list
        assert elements > 0, "elements must be positive."
        assert terms <= elements + 1, "terms cannot exceed the number of mesh nodes."

        self.length = length
        self.load = load
        self.elements = elements
        self.chunk = chunk
        self.mesh = np.linspace(0.0, length, elements + 1)
        self.h = np.diff(self.mesh)
        self.midpoints = 0.5 * (self.mesh[:-1] + self.mesh[1:])
        self.basis = kl_decompose(self.mesh, Kernel(stdev ** 2, (corr_length,)), terms, mean)
        self.mid_modes = interpolate_modes(self.basis, self.midpoints)

        # Consistent nodal loads q h / 2 from each adjacent element, node 0 fixed
        forces = np.zeros(elements + 1)
        forces[:-1] += load * self.h / 2.0
        forces[1:] += load * self.h / 2.0
        self.forces = forces[1:]

    @property
    def dim(self) -> int:
        return self.basis.terms

    def rigidity(self, eta) -> np.ndarray:
        eta = np.atleast_2d(eta)
        return self.basis.mean + (eta * np.sqrt(self.basis.eigenvalues)) @ self.mid_modes

    def stiffness_bands(self, rigidity: np.ndarray) -> np.ndarray:
        """
        Banded (1, 1) storage of the reduced stiffness matrix for one rigidity vector.
        """
        k = rigidity / self.h
        ab = np.zeros((3, self.elements))
        ab[1, :-1] = k[:-1] + k[1:]
        ab[1, -1] = k[-1]
        ab[0, 1:] = -k[1:]
        ab[2, :-1] = -k[1:]
        return ab

    def solve(self, rigidity: np.ndarray) -> np.ndarray:
        return scipy.linalg.solve_banded((1, 1), self.stiffness_bands(rigidity), self.forces)

    def _tip_batch(self, rigidity: np.ndarray) -> np.ndarray:
        # Thomas algorithm over the batch; rows are independent systems
        k = rigidity / self.h
        diag = np.empty_like(k)
        diag[:, :-1] = k[:, :-1] + k[:, 1:]
        diag[:, -1] = k[:, -1]
        off = -k[:, 1:]
        rhs = np.broadcast_to(self.forces, k.shape).copy()
        for i in range(1, self.elements):
            factor = off[:, i - 1] / diag[:, i - 1]
            diag[:, i] -= factor * off[:, i - 1]
            rhs[:, i] -= factor * rhs[:, i - 1]
        return rhs[:, -1] / diag[:, -1]

    def __call__(self, eta):
        eta, single = _as_rows(eta, self.dim)
        out = np.empty(eta.shape[0])
        for start in range(0, eta.shape[0], self.chunk):
            stop = min(start + self.chunk, eta.shape[0])
            rigidity = self.rigidity(eta[start:stop])
            if np.any(rigidity <= 0.0):
                index = start + _first_bad(rigidity <= 0.0)
                raise ModelError(f"Elastic bar rigidity is non-positive at point {index}.", index=index)
            if stop - start == 1:
                out[start] = self.solve(rigidity[0])[-1]
            else:
                out[start:stop] = self._tip_batch(rigidity)
        out *= 1000.0
        return float(out[0]) if single else out


@functools.lru_cache(maxsize=1)
def default_elastic_bar() -> ElasticBar:
    return ElasticBar()


def elasticbar_model(eta):
    return default_elastic_bar()(eta)


@dataclass
class BenchmarkCase:
    name: str
    model: Callable
    input: GaussianSpec
    references: dict = field(default_factory=dict)
    units: str = ""
    description: str = ""
    oracle: Union[None, Callable] = None

    def __post_init__(self):
        assert self.input.dim > 0, "Benchmark input must have at least one dimension."

    @property
    def dim(self) -> int:
        return self.input.dim


def _polynomial_case(n: int) -> BenchmarkCase:
    spec = GaussianSpec(np.full(n, 5.0), np.eye(n), tuple(f"x_{i + 1}" for i in range(n)))
    return BenchmarkCase(
        "polynomial", polynomial_model(n), spec, units="-",
        description=f"Second-order polynomial with {n} inputs x_i ~ N(5, 1)",
        oracle=functools.partial(quadform_moment_oracle, n),
    )


def _rooftruss_case(n=None) -> BenchmarkCase:
    spec = load_input_spec(CASES_DIR / "rooftruss.json")
    return BenchmarkCase("rooftruss", rooftruss_model, spec, REFERENCE_TABLES["rooftruss"], units="mm",
                         description="Peak deflection of a roof truss with correlated loads, geometry and materials")


def _sixstory_case(n=None) -> BenchmarkCase:
    spec = load_input_spec(CASES_DIR / "sixstory.json")
    return BenchmarkCase("sixstory", sixstory_model, spec, REFERENCE_TABLES["sixstory"], units="mm",
                         description="Top displacement of a six-story shear frame with correlated loads and stiffnesses")


def _elasticbar_case(n=None) -> BenchmarkCase:
    bar = default_elastic_bar()
    spec = GaussianSpec(np.zeros(bar.dim), np.eye(bar.dim), tuple(f"eta_{i + 1}" for i in range(bar.dim)))
    return BenchmarkCase("elasticbar", bar, spec, REFERENCE_TABLES["elasticbar"], units="mm",
                         description="Tip displacement of an axially loaded bar with a KL random rigidity field")


CASE_BUILDERS = {
    "polynomial": lambda n=None: _polynomial_case(5 if n is None else int(n)),
    "rooftruss": _rooftruss_case,
    "sixstory": _sixstory_case,
    "elasticbar": _elasticbar_case,
}


def available_cases() -> list:
    return sorted(CASE_BUILDERS)


def get_case(name: str, n: int = None) -> BenchmarkCase:
    if name not in CASE_BUILDERS:
        raise ParameterError(f"Unknown case '{name}'; available cases: {', '.join(available_cases())}.")
    return CASE_BUILDERS[name](n)


def evaluate(model: Callable, x: np.ndarray, provenance: str = "", offset: int = 0) -> EvaluationBatch:
    """
    Runs a vectorized model over the rows of x and wraps the outputs, keeping the failing point index.
    """
    try:
        outputs = model(x)
        batch = EvaluationBatch(np.atleast_1d(outputs), provenance)
    except ModelError as err:
        if err.index is None:
            raise
        raise type(err)(f"{err} (global point index {offset + err.index})", index=offset + err.index) from err
    if len(batch) != x.shape[0]:
        raise ModelError(f"Model returned {len(batch)} outputs for {x.shape[0]} points.")
    return batch


def mc_reference(case: BenchmarkCase, count: int = 10 ** 6, seed: int = 0,
                 factor: FactorOptions = FactorOptions.CHOLESKY, chunk: int = MC_CHUNK) -> MomentSummary:
    """
    Seeded Monte Carlo moments of a case, drawn and evaluated in chunks of one Philox stream.
    """
    if count < 2:
        raise ParameterError(f"Monte Carlo references need at least 2 samples, got {count}.")
    generator = make_generator(seed)
    cov_factor = factor_covariance(case.input, factor)

    outputs = []
    for start in range(0, count, chunk):
        size = min(chunk, count - start)
        z = generator.standard_normal((size, case.dim))
        x = to_x_space(z, case.input, cov_factor)
        outputs.append(evaluate(case.model, x, case.name, offset=start).outputs)
        logger.debug("MC %s: evaluated %d of %d samples", case.name, start + size, count)

    provenance = {"method": "mc", "count": count, "seed": seed, "factor": str(factor), "case": case.name}
    summary = estimate_moments(EvaluationBatch(np.concatenate(outputs)), WeightTable.uniform(count), provenance)
    logger.info("MC reference for %s: mean=%.6g std=%.6g", case.name, summary.mean, summary.std)
    return summary


def sampling_band(summary: MomentSummary, count: int, sigmas: float = 4.0) -> dict:
    """
    Normal-theory bands mean +/- k std/sqrt(N) and std +/- k std/sqrt(2N) around a sampled summary.
    """
    half_mean = sigmas * summary.std / math.sqrt(count)
    half_std = sigmas * summary.std / math.sqrt(2.0 * count)
    return {
        "mean": (summary.mean - half_mean, summary.mean + half_mean),
        "std": (summary.std - half_std, summary.std + half_std),
    }


def mean_input_value(case: BenchmarkCase) -> float:
    """
    Model output at the transform of z = 0, which is the input mean.
    """
    return float(np.atleast_1d(case.model(case.input.mean[None, :]))[0])
