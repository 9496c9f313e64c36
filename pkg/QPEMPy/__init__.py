"""Package for moment propagation with the quadratic point estimate method and its baselines."""
__all__ = [
    'GaussianSpec', 'MarginalShape', 'SigmaPointSet', 'WeightTable', 'MomentSummary', 'EvaluationBatch',
    'PointKind', 'validate_spec',  # Core types
    'QPEMError', 'ParameterError', 'UnsupportedDimensionError', 'ShapeError', 'DimensionMismatchError',
    'FactorizationError', 'InconsistencyError', 'ModelError', 'ProtocolError',  # Errors
    'QpemParams', 'build_qpem', 'verify_mce', 'canonical_monomials', 'e6_squared', 'argmin_r6',
    'bracket_r6_minima', 'stability_factor',  # QPEM
    'build_hpem', 'hpem_layout', 'gauss_hermite_1d', 'smolyak_grid', 'GrowthOptions',  # Baseline rules
    'SamplePlan', 'SamplingOptions', 'generate', 'inv_norm_cdf',  # Sampling
    'FactorOptions', 'factor_covariance', 'to_x_space', 'to_z_space', 'corr_to_cov',
    'load_input_spec', 'dump_input_spec',  # Transform
    'estimate_moments', 'relative_errors',  # Estimator
    'Kernel', 'kl_decompose', 'realize', 'realize_at',  # Random fields
    'get_case', 'available_cases', 'quadform_moment_oracle', 'mc_reference', 'ExternalModel',  # Benchmarks
    'MethodOptions', 'RunConfig', 'build_points', 'propagate', 'run_benchmark',  # Pipeline
]

from .CoreTypes import (
    GaussianSpec, MarginalShape, SigmaPointSet, WeightTable, MomentSummary, EvaluationBatch, PointKind,
    validate_spec, QPEMError, ParameterError, UnsupportedDimensionError, ShapeError, DimensionMismatchError,
    FactorizationError, InconsistencyError, ModelError, ProtocolError
)
from .QuadraticPEM import (
    QpemParams, build_qpem, verify_mce, canonical_monomials, e6_squared, argmin_r6, bracket_r6_minima,
    stability_factor
)
from .HongPEM import build_hpem, hpem_layout
from .SparseQuadUtils import gauss_hermite_1d, smolyak_grid, GrowthOptions
from .SamplingUtils import SamplePlan, SamplingOptions, generate, inv_norm_cdf
from .SpaceTransform import (
    FactorOptions, factor_covariance, to_x_space, to_z_space, corr_to_cov, load_input_spec, dump_input_spec
)
from .MomentEstimator import estimate_moments, relative_errors
from .RandomFieldUtils import Kernel, kl_decompose, realize, realize_at
from .BenchmarkModels import get_case, available_cases, quadform_moment_oracle, mc_reference
from .ExternalModel import ExternalModel
from .PropagationWrappers import MethodOptions, RunConfig, build_points, propagate, run_benchmark

__version__ = "1.0"
