from QPEMPy import argmin_r6, build_qpem, QpemParams, stability_factor
from QPEMPy.PropagationWrappers import run_polynomial_sweep, write_benchmark_outputs
from QPEMPy.ReferenceTables import SCHEDULE_DIMS

SWEEP_LABELS = ['lhs', 'sobol', 'sgh3', 'hpem', 'qpem-unscaled-r3', 'qpem-r3']


if __name__ == "__main__":
    # Stability factor and sixth-order radius over the scheduled dimensions
    for n in SCHEDULE_DIMS:
        _, weights = build_qpem(QpemParams(n))
        print(f"n={n:3d}  points={2 * n ** 2 + 1:5d}  stability={stability_factor(weights):8.3f}  "
              f"r6={argmin_r6(n):.6f}")

    # Relative errors against the analytic oracle, one line per method in the figure
    long = run_polynomial_sweep(labels=SWEEP_LABELS)
    print(long.pivot_table(index=['dim', 'label'], columns='moment', values='rel_error').to_string())
    write_benchmark_outputs(None, long, 'polynomial_sweep.csv', plot=True, by_dim=True)
