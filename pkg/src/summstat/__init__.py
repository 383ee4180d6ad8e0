"""summstat: sample mean/SD estimation from reported summary statistics.

Studies that report a median with a range and/or interquartile range
(instead of mean and SD) can still enter a meta-analysis once their
moments are estimated.  This package implements the standard estimators
for the three common reporting patterns, the normal order-statistic
constants they rely on, a Monte Carlo harness for judging their
accuracy, and CSV/CLI plumbing around all of it.
"""

from .batch_io import (
    BatchCounts,
    EnrichedRecord,
    StudyRecord,
    UnsupportedPatternError,
    detect_scenario,
    process_file,
)
from .estimators import (
    C1,
    C2,
    C3,
    DEFAULT_METHODS,
    Estimate,
    Flag,
    MethodDispatchError,
    MethodId,
    ScenarioInput,
    ValidationError,
    estimate,
    mean_c1,
    mean_c2,
    mean_c3,
    sd_c1,
    sd_c2,
    sd_c3,
)
from .normal_math import cdf, pdf, quantile, quantile_array
from .order_stats import (
    QuadratureError,
    ScalingTable,
    blom,
    blom_eta,
    blom_xi,
    eta,
    expected_order_stat,
    generate_table,
    xi,
)
from .simulation import (
    DEFAULT_SEED,
    Beta,
    DistributionSpec,
    Exponential,
    LogNormal,
    Normal,
    SampleSummary,
    SimulationCell,
    SimulationConfig,
    Weibull,
    preset_study,
    relative_error,
    run_grid,
    run_study,
    sample,
    summarize,
    write_cells_csv,
)
from .transformer import MeanSdEstimator

__version__ = "0.1.0"

__all__ = [
    "BatchCounts",
    "Beta",
    "C1",
    "C2",
    "C3",
    "DEFAULT_METHODS",
    "DEFAULT_SEED",
    "DistributionSpec",
    "EnrichedRecord",
    "Estimate",
    "Exponential",
    "Flag",
    "LogNormal",
    "MeanSdEstimator",
    "MethodDispatchError",
    "MethodId",
    "Normal",
    "QuadratureError",
    "SampleSummary",
    "ScalingTable",
    "ScenarioInput",
    "SimulationCell",
    "SimulationConfig",
    "StudyRecord",
    "UnsupportedPatternError",
    "ValidationError",
    "Weibull",
    "blom",
    "blom_eta",
    "blom_xi",
    "cdf",
    "detect_scenario",
    "estimate",
    "eta",
    "expected_order_stat",
    "generate_table",
    "mean_c1",
    "mean_c2",
    "mean_c3",
    "pdf",
    "preset_study",
    "process_file",
    "quantile",
    "quantile_array",
    "relative_error",
    "run_grid",
    "run_study",
    "sample",
    "sd_c1",
    "sd_c2",
    "sd_c3",
    "summarize",
    "write_cells_csv",
    "xi",
]
