"""Matrix nuclear-norm metrics for hidden-state matrices.

Scores dense token-by-feature matrices with a length-normalized
nuclear-norm approximation built from column L2 norms, alongside exact
spectral baselines (SVD nuclear norm, normalized matrix entropy), a
scaling benchmark for the O(n^2) vs O(n^3) separation, and model
ranking utilities.
"""

from .bench import (
    BenchRecord,
    BenchTable,
    append_bench_csv,
    bench_matrix,
    fit_loglog_slope,
    run_scaling_bench,
    write_ratio_json,
)
from .core import (
    EPS_ROW,
    ConvergenceError,
    DegenerateSampleError,
    ManifestFormatError,
    MatrixFormatError,
    MnnkitError,
    as_matrix,
    center_and_row_normalize,
    column_l2_norms,
    mean_embedding,
)
from .matrixio import (
    ManifestSample,
    SampleManifest,
    load_logprobs,
    load_manifest,
    load_matrix,
    save_matrix,
)
from .mnn import MnnConfig, approx_nuclear_norm, approx_singular_values, matrix_nuclear_norm
from .probmetrics import (
    BoundsCheck,
    cross_entropy,
    frobenius_bounds,
    frobenius_norm,
    nuclear_bounds_check,
    perplexity,
    shannon_entropy,
)
from .report import (
    MetricReport,
    RankEntry,
    aggregate_scores,
    aggregate_scores_by_cohort,
    display_round,
    load_report_json,
    make_report,
    render_rank_csv,
    render_rank_markdown,
    size_cohort,
    stability_report,
    write_report_json,
)
from .spectral import (
    EPS_SYM,
    MAX_SWEEPS,
    TOL_JACOBI,
    Spectrum,
    dataset_matrix_entropy,
    exact_nuclear_norm,
    numerical_rank,
    sample_matrix_entropy,
    singular_values,
    symmetric_eigenvalues,
)

__version__ = "0.1.0"
