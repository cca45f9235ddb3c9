"""Penalty-SQP solver for inequality-constrained multi-objective optimization,
with front generation, quality metrics, and a benchmark harness."""

from .problems import (
    EvalCounter,
    EvaluationError,
    PenaltyValue,
    Problem,
    evaluate_phi,
    make_problem,
    merit,
    phi_star,
    scalarize,
    theta,
)
from .qp import KktCertificate, MaxQpIterations, QpInstance, QpSolution, certify_kkt, solve_qp
from .solver import (
    IterationRecord,
    LineSearchError,
    PenaltyUpdateDegenerate,
    SolveOutcome,
    SolverConfig,
    Status,
    line_search,
    solve,
    trace_to_table,
    update_sigma,
)
from .fronts import (
    Front,
    FrontPoint,
    build_reference_front,
    front_from_csv,
    front_to_csv,
    line_starts,
    nondominated_filter,
    rand_starts,
    weighted_sum_solve,
)
from .metrics import (
    MetricReport,
    MetricUndefined,
    ProfileCurve,
    delta_spread,
    fe1,
    front_extremes,
    gamma_spread,
    performance_profile,
    purity,
)
from .catalog import CatalogEntry, CatalogValidationError, catalog, get_entry, get_problem, validate_entry
from .bench import ReportError, RunConfig, config_from_dict, report, run_benchmark

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
