"""Archive-based Gaussian EDA with adaptive clustering for multimodal
continuous optimization, plus the benchmark suite and experiment harness.
"""

from .benchmarks import (
    BudgetExhausted,
    EvalBudget,
    Problem,
    evaluate,
    get_problem,
    make_cec2005_study_problem,
    make_cec2013_problem,
    make_composition,
)
from .core import Individual
from .dsts import ClusteringInput, ClusteringResult, cluster
from .eda2 import Eda2Params, Eda2Result, TerminationPolicy, run_eda2
from .gaussian_model import (
    Archive,
    DegenerateModelError,
    GaussianModel,
    SelectedSet,
    archive_push,
    build_model,
    estimate_covariance,
    estimate_covariance_with_archive,
    estimate_mean,
    log_density,
    sample,
)
from .niching import (
    Ceda2Config,
    PeakReport,
    SolutionArchive,
    fev,
    peak_ratio,
    run_ceda2,
)

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "BudgetExhausted",
    "Ceda2Config",
    "ClusteringInput",
    "ClusteringResult",
    "DegenerateModelError",
    "Eda2Params",
    "Eda2Result",
    "EvalBudget",
    "GaussianModel",
    "Individual",
    "PeakReport",
    "Problem",
    "SelectedSet",
    "SolutionArchive",
    "TerminationPolicy",
    "archive_push",
    "build_model",
    "cluster",
    "estimate_covariance",
    "estimate_covariance_with_archive",
    "estimate_mean",
    "evaluate",
    "fev",
    "get_problem",
    "log_density",
    "make_cec2005_study_problem",
    "make_cec2013_problem",
    "make_composition",
    "peak_ratio",
    "run_ceda2",
    "run_eda2",
    "sample",
]
