"""Exact multinomial goodness-of-fit testing.

Exact p-values for simple multinomial hypotheses, computed by enumerating a
growing neighborhood of the expected counts instead of the whole sample
space, alongside full-enumeration and Monte Carlo oracles, chi-square
asymptotics, randomized-test power analysis, a simulation-study harness and
a calibration-simplex forecast diagnostic.
"""

__version__ = "0.1.0"

from .asymptotic import asymptotic_p, chisq_cdf, chisq_sf
from .calsim import (
    ForecastParseError,
    ForecastRecord,
    HexCellSummary,
    HexGrid,
    assign,
    classify_p,
    parse_forecasts,
    render,
    render_svg,
    summaries_to_json,
    summarize,
)
from .core import (
    CHISQ,
    DEFAULT_STATISTICS,
    LLR,
    PROB_MASS,
    CountVector,
    Hypothesis,
    ProbabilityVector,
    StatisticKind,
    TestResult,
    power_divergence,
    validate_counts,
    validate_hypothesis,
)
from .exact import (
    DEFAULT_THETA,
    MIN_THETA,
    AcceptanceRegion,
    acceptance_region,
    p_value_exact,
    p_value_full_enum,
    p_values_full_enum,
)
from .lattice import (
    binomial_tail,
    distance,
    enumerate_full,
    enumerate_shell,
    nearest_lattice_point,
    simplex_size,
)
from .randomized import (
    RandomizedTest,
    build_randomized_test,
    extreme_power_labels,
    line_alternative,
    power,
    power_curve,
    region_weight,
)
from .sampling import (
    DEFAULT_MC_SAMPLES,
    child_rng,
    make_rng,
    mc_p_value,
    mc_p_value_generalized,
    mc_p_values,
    sample_generalized_multinomial,
    sample_multinomial,
    sample_uniform_simplex,
)
from .stats import (
    GapBound,
    continuous_log_pmf_at_expectation,
    continuous_statistic,
    evaluate,
    gap_bound,
    log_pmf,
)
from .study import (
    GroupSummary,
    STUDY_STATISTICS,
    StudyConfig,
    StudyRecord,
    group_summaries,
    relative_difference,
    relative_error,
    run_study,
    write_records_csv,
    write_summaries_json,
)

__all__ = [
    "__version__",
    "AcceptanceRegion",
    "CHISQ",
    "CountVector",
    "DEFAULT_MC_SAMPLES",
    "DEFAULT_STATISTICS",
    "DEFAULT_THETA",
    "ForecastParseError",
    "ForecastRecord",
    "GapBound",
    "GroupSummary",
    "HexCellSummary",
    "HexGrid",
    "Hypothesis",
    "LLR",
    "MIN_THETA",
    "PROB_MASS",
    "ProbabilityVector",
    "RandomizedTest",
    "STUDY_STATISTICS",
    "StatisticKind",
    "StudyConfig",
    "StudyRecord",
    "TestResult",
    "acceptance_region",
    "assign",
    "asymptotic_p",
    "binomial_tail",
    "build_randomized_test",
    "child_rng",
    "chisq_cdf",
    "chisq_sf",
    "classify_p",
    "continuous_log_pmf_at_expectation",
    "continuous_statistic",
    "distance",
    "enumerate_full",
    "enumerate_shell",
    "evaluate",
    "extreme_power_labels",
    "gap_bound",
    "group_summaries",
    "line_alternative",
    "log_pmf",
    "make_rng",
    "mc_p_value",
    "mc_p_value_generalized",
    "mc_p_values",
    "nearest_lattice_point",
    "p_value_exact",
    "p_value_full_enum",
    "p_values_full_enum",
    "parse_forecasts",
    "power",
    "power_curve",
    "power_divergence",
    "region_weight",
    "relative_difference",
    "relative_error",
    "render",
    "render_svg",
    "run_study",
    "sample_generalized_multinomial",
    "sample_multinomial",
    "sample_uniform_simplex",
    "simplex_size",
    "summaries_to_json",
    "summarize",
    "validate_counts",
    "validate_hypothesis",
    "write_records_csv",
    "write_summaries_json",
]
