"""
Module for run configuration, the propagation pipeline, benchmark comparisons, and the points/report file formats.
"""
import json
import logging
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Union

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .BenchmarkModels import available_cases, evaluate, get_case, mc_reference
from .CoreTypes import ParameterError, PointKind, SigmaPointSet, StrEnum, WeightTable
from .ExternalModel import ExternalModel
from .HongPEM import build_hpem
from .MomentEstimator import MOMENT_NAMES, estimate_moments, relative_errors
from .QuadraticPEM import DEFAULT_R, DEFAULT_XI, DEFAULT_ZETA, QpemParams, build_qpem, stability_factor
from .ReferenceTables import REFERENCE_TABLES, SCHEDULE_DIMS, reference_row, sample_size
from .SamplingUtils import SamplePlan, SamplingOptions, generate
from .SparseQuadUtils import GrowthOptions, smolyak_grid
from .SpaceTransform import FactorOptions, factor_covariance, load_input_spec, to_x_space

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)


class MethodOptions(StrEnum):
    QPEM = "qpem"
    QPEM_UNSCALED = "qpem-unscaled"
    HPEM = "hpem"
    SGH3 = "sgh3"
    MC = "mc"
    LHS = "lhs"
    SOBOL = "sobol"


SAMPLING_METHODS = (MethodOptions.MC, MethodOptions.LHS, MethodOptions.SOBOL)
SEEDED_METHODS = (MethodOptions.MC, MethodOptions.LHS)


@dataclass
class RunConfig:
    method: MethodOptions = MethodOptions.QPEM
    dim: Union[None, int] = None
    r: float = DEFAULT_R
    zeta: float = DEFAULT_ZETA
    xi: float = DEFAULT_XI
    count: Union[None, int] = None
    seed: Union[None, int] = None
    skip: int = 1
    level: int = 2
    growth: GrowthOptions = GrowthOptions.LINEAR
    case: Union[None, str] = None
    case_dim: Union[None, int] = None
    external: Union[None, str] = None
    input_path: Union[None, str] = None
    timeout: float = 60.0
    workers: int = 1
    batch_size: Union[None, int] = None
    factor: FactorOptions = FactorOptions.CHOLESKY
    output: Union[None, str] = None
    plot: bool = False

    def validate(self) -> "RunConfig":
        """
        Normalizes option strings and raises ParameterError naming the first violated constraint.
        """
        try:
            self.method = MethodOptions(self.method)
            self.growth = GrowthOptions(self.growth)
            self.factor = FactorOptions(self.factor)
        except ValueError as err:
            raise ParameterError(str(err)) from err

        if self.dim is not None and self.dim < 1:
            raise ParameterError(f"Dimension must be at least 1, got {self.dim}.")
        if self.method in (MethodOptions.QPEM, MethodOptions.QPEM_UNSCALED) and not self.r > math.sqrt(2.0):
            raise ParameterError(f"r must exceed sqrt(2), got r={self.r}.")
        if self.seed is not None and self.method not in SEEDED_METHODS:
            raise ParameterError(f"A seed applies to mc and lhs only, not to {self.method}.")
        if self.count is not None and self.method not in SAMPLING_METHODS:
            raise ParameterError(f"A sample count applies to mc, lhs and sobol only, not to {self.method}.")
        if self.count is not None and self.count < 1:
            raise ParameterError(f"Sample count must be positive, got {self.count}.")
        if self.case is not None and self.external is not None:
            raise ParameterError("Give either a case name or an external command, not both.")
        if self.external is not None and self.input_path is None:
            raise ParameterError("An external model needs an input distribution file.")
        if self.workers < 1:
            raise ParameterError(f"Worker count must be at least 1, got {self.workers}.")
        return self

    def as_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, StrEnum) else v) for k, v in asdict(self).items()}


def build_points(config: RunConfig, n: int) -> tuple:
    """
    Point set and weight table in z-space for the configured method.
    """
    method = MethodOptions(config.method)
    if method == MethodOptions.QPEM:
        return build_qpem(QpemParams(n, config.r, config.zeta, config.xi))
    if method == MethodOptions.QPEM_UNSCALED:
        return build_qpem(QpemParams.unscaled(n, config.r))
    if method == MethodOptions.HPEM:
        return build_hpem(n)
    if method == MethodOptions.SGH3:
        return smolyak_grid(n, config.level, config.growth)

    count = config.count if config.count is not None else sample_size(str(method), n)
    plan = SamplePlan(SamplingOptions(str(method)), count, config.seed, config.skip)
    return generate(plan, n)


def resolve_model(config: RunConfig) -> tuple:
    """
    (name, model, input spec) for the configured case or external command.
    """
    if config.external is not None:
        spec = load_input_spec(config.input_path)
        model = ExternalModel(config.external, config.timeout, config.workers, config.batch_size)
        return "external", model, spec
    if config.case is None:
        raise ParameterError(f"Give a case name ({', '.join(available_cases())}) or an external command.")
    case = get_case(config.case, config.case_dim)
    spec = load_input_spec(config.input_path) if config.input_path else case.input
    return case.name, case.model, spec


def propagate(config: RunConfig, check_mean_input: bool = False) -> dict:
    """
    Points, transform, evaluation and moment estimation for one configuration; returns the JSON report.
    """
    config.validate()
    name, model, spec = resolve_model(config)
    started = time.perf_counter()

    if check_mean_input:
        value = float(np.atleast_1d(model(spec.mean[None, :]))[0])
        logger.info("Model %s at the input mean: %.10g", name, value)
        return {"config": config.as_dict(), "model": name, "mean_input_value": value}

    points, weights = build_points(config, spec.dim)
    factor = factor_covariance(spec, config.factor)
    x = to_x_space(points, spec, factor)
    logger.info("Built %d %s points (stability factor %.6g)", points.count, config.method, stability_factor(weights))

    batch = evaluate(model, x, name)
    provenance = {"method": str(config.method), "model": name, "factor": str(config.factor)}
    summary = estimate_moments(batch, weights, provenance)
    elapsed = time.perf_counter() - started

    report = {
        "config": config.as_dict(),
        "model": name,
        "summary": summary.as_dict(),
        "cov": summary.cov,
        "point_count": points.count,
        "stability_factor": stability_factor(weights),
        "seconds": elapsed,
    }
    if config.output:
        write_report_json(report, config.output)
    return report


@dataclass(frozen=True)
class Variant:
    label: str
    method: MethodOptions
    r: float = DEFAULT_R

    def config(self, **overrides) -> RunConfig:
        params = {"method": self.method}
        if self.method in (MethodOptions.QPEM, MethodOptions.QPEM_UNSCALED):
            params["r"] = self.r
        params.update(overrides)
        return RunConfig(**params)


COMPARISON_VARIANTS = (
    Variant("lhs", MethodOptions.LHS),
    Variant("sobol", MethodOptions.SOBOL),
    Variant("sgh3", MethodOptions.SGH3),
    Variant("hpem", MethodOptions.HPEM),
    Variant("qpem-unscaled-r1.732", MethodOptions.QPEM_UNSCALED, SQRT3),
    Variant("qpem-r1.732", MethodOptions.QPEM, SQRT3),
    Variant("qpem-unscaled-r3", MethodOptions.QPEM_UNSCALED, 3.0),
    Variant("qpem-r3", MethodOptions.QPEM, 3.0),
)
VARIANTS_BY_LABEL = {v.label: v for v in COMPARISON_VARIANTS + (Variant("mc", MethodOptions.MC),)}


def _variant_summary(variant: Variant, case, factor: FactorOptions, seed: Union[None, int]) -> tuple:
    overrides = {"factor": factor}
    if variant.method in SEEDED_METHODS and seed is not None:
        overrides["seed"] = seed
    config = variant.config(**overrides)
    points, weights = build_points(config, case.dim)
    x = to_x_space(points, case.input, factor_covariance(case.input, factor))
    batch = evaluate(case.model, x, case.name)
    summary = estimate_moments(batch, weights, {"label": variant.label, "case": case.name})
    return summary, points.count, stability_factor(weights)


def run_benchmark(case_name: str, labels: Iterable[str] = None, factor: FactorOptions = FactorOptions.CHOLESKY,
                  seed: Union[None, int] = None, n: Union[None, int] = None) -> tuple:
    """
    Runs each method variant on a case and compares it with the stored MC row (or the analytic oracle).

    Returns the wide comparison table and the long-format (label, moment) table.
    """
    case = get_case(case_name, n)
    labels = [v.label for v in COMPARISON_VARIANTS] if labels is None else list(labels)
    unknown = [label for label in labels if label not in VARIANTS_BY_LABEL]
    if unknown:
        raise ParameterError(f"Unknown method variants {unknown}; available: {', '.join(VARIANTS_BY_LABEL)}.")

    if case.oracle is not None:
        reference, reference_tag = case.oracle(), "analytic oracle"
    else:
        row = reference_row(case.name, "mc")
        reference, reference_tag = row.summary, row.source

    wide, long = [], []
    for label in labels:
        variant = VARIANTS_BY_LABEL[label]
        if variant.method == MethodOptions.MC:
            summary = mc_reference(case, seed=seed or 0, factor=factor)
            count, stability = summary.provenance["count"], 1.0
        else:
            summary, count, stability = _variant_summary(variant, case, factor, seed)
        errors = relative_errors(summary, reference, reference_tag)
        logger.info("%s %s: mean=%.6g std=%.6g skew=%s kurt=%s", case.name, label, summary.mean, summary.std,
                    summary.skew, summary.kurt)

        published = REFERENCE_TABLES.get(case.name, {}).get(label)
        wide.append({
            "case": case.name, "label": label, "points": count, "mean": summary.mean, "std": summary.std,
            "skew": summary.skew, "kurt": summary.kurt, "cov": summary.cov, "stability_factor": stability,
            **errors.as_dict(), "published_skew": published.skew if published else None,
            "published_kurt": published.kurt if published else None,
        })
        for moment in MOMENT_NAMES:
            long.append({
                "case": case.name, "dim": case.dim, "label": label, "moment": moment,
                "estimate": getattr(summary, moment), "reference": getattr(reference, moment),
                "rel_error": errors[moment],
            })

    return pd.DataFrame(wide), pd.DataFrame(long)


def run_polynomial_sweep(dims: Iterable[int] = SCHEDULE_DIMS, labels: Iterable[str] = None) -> pd.DataFrame:
    """
    Relative errors against the quadratic-form oracle over dimension, with scheduled sample sizes.
    """
    frames = []
    for n in dims:
        _, long = run_benchmark("polynomial", labels, n=n)
        frames.append(long)
        logger.info("Polynomial sweep finished n=%d", n)
    return pd.concat(frames, ignore_index=True)


def write_points_csv(points: SigmaPointSet, weights: WeightTable, path: Union[str, Path]):
    """
    Header kind,w1,w2,w3,w4,z1..zn; 17 significant digits so a read-back is bit-exact.
    """
    frame = pd.DataFrame({"kind": [str(k) for k in points.kind]})
    for k in range(1, 5):
        frame[f"w{k}"] = weights.order(k)
    for j in range(points.dim):
        frame[f"z{j + 1}"] = points.points[:, j]
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    logger.info("Wrote %d points to %s", points.count, path)


def read_points_csv(path: Union[str, Path]) -> tuple:
    frame = pd.read_csv(path, float_precision="round_trip")
    expected = ["kind", "w1", "w2", "w3", "w4"]
    if list(frame.columns[:5]) != expected or frame.shape[1] < 6:
        raise ParameterError(f"Points file {path} must start with columns {','.join(expected)},z1,...")
    z_cols = [c for c in frame.columns[5:]]
    points = SigmaPointSet(frame[z_cols].to_numpy(dtype=float), tuple(PointKind(k) for k in frame["kind"]))
    weights = WeightTable(*(frame[f"w{k}"].to_numpy(dtype=float) for k in range(1, 5)))
    return points, weights


def write_report_json(report: dict, path: Union[str, Path]):
    Path(path).write_text(json.dumps(report, indent=2, default=str) + "\n", encoding="utf-8")
    logger.info("Wrote report to %s", path)


def plot_relative_errors(long: pd.DataFrame, path: Union[str, Path], by_dim: bool = False):
    """
    Log-scale relative errors per moment: bars per method, or lines over dimension for sweeps.
    """
    data = long.dropna(subset=["rel_error"])
    fig, axes = plt.subplots(1, len(MOMENT_NAMES), figsize=(4 * len(MOMENT_NAMES), 3.5))
    for ax, moment in zip(axes, MOMENT_NAMES):
        part = data[data["moment"] == moment]
        if by_dim:
            for label, group in part.groupby("label", sort=False):
                ax.plot(group["dim"], group["rel_error"].clip(lower=1e-17), marker="o", label=label)
            ax.set_xlabel("dimension")
        else:
            ax.bar(part["label"], part["rel_error"].clip(lower=1e-17))
            ax.tick_params(axis="x", rotation=60)
        ax.set_yscale("log")
        ax.set_title(moment)
    axes[0].set_ylabel("relative error")
    if by_dim:
        axes[-1].legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    logger.info("Saved relative-error figure to %s", path)


def write_benchmark_outputs(wide: pd.DataFrame, long: pd.DataFrame, output: Union[str, Path], plot: bool = False,
                            by_dim: bool = False) -> dict:
    """
    Writes <output>.csv (wide), <output>_long.csv and optionally <output>.png; returns the paths.
    """
    output = Path(output)
    stem = output.with_suffix("")
    paths = {"long": Path(f"{stem}_long.csv")}
    if wide is not None:
        paths["table"] = stem.with_suffix(".csv")
        wide.to_csv(paths["table"], index=False, lineterminator="\n")
    long.to_csv(paths["long"], index=False, lineterminator="\n")
    if plot:
        paths["figure"] = stem.with_suffix(".png")
        plot_relative_errors(long, paths["figure"], by_dim)
    return paths
