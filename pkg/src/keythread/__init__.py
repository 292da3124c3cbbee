"""Query-aware keyframe selection and interleaved narrative threading.

Selects k frames from a video's frame embeddings by maximizing a combined
relevance + diversity quadratic objective, exactly (exhaustive or
branch-and-bound) or approximately (greedy search with low-rank denoising,
grid downsampling, and local refinement), then threads the selection with
non-keyframe captions into one temporally ordered prompt plan.
"""

from .baselines import dpp_greedy_select, dpp_kernel, topk_select, uniform_select
from .errors import DataError, GuardError, KeythreadError
from .estimator import KeyframeSelector
from .exact import (
    SelectionResult,
    Solver,
    SolveStats,
    branch_and_bound,
    brute_force,
    upper_bound,
)
from .greedy import GreedyConfig, greedy_core, greedy_select, refine, search_on_matrix
from .harness import (
    ComparisonTable,
    MetricsReport,
    PlantedSegment,
    SyntheticSpec,
    compare_solvers,
    evaluate,
    run_solver,
    synth_instance,
)
from .interleave import (
    InterleavePlan,
    Layout,
    PlanItem,
    Scope,
    ThreadBudget,
    narrative_count,
    render_plan,
    solve_delta,
    thread,
)
from .scoring import (
    DownsampledMatrix,
    ScoreMatrix,
    Variant,
    build_score_matrix,
    diversity_score,
    downsample,
    low_rank_approx,
    objective,
    pairscore,
    relevance_scores,
)
from .store import (
    CaptionSet,
    EmbeddingMatrix,
    QueryVector,
    load_captions,
    load_embeddings,
    load_query,
    normalize_query,
    normalize_rows,
    write_captions,
    write_embeddings,
    write_query,
)

__version__ = "0.1.0"

__all__ = [
    "CaptionSet",
    "ComparisonTable",
    "DataError",
    "DownsampledMatrix",
    "EmbeddingMatrix",
    "GreedyConfig",
    "GuardError",
    "InterleavePlan",
    "KeyframeSelector",
    "KeythreadError",
    "Layout",
    "MetricsReport",
    "PlanItem",
    "PlantedSegment",
    "QueryVector",
    "ScoreMatrix",
    "Scope",
    "SelectionResult",
    "SolveStats",
    "Solver",
    "SyntheticSpec",
    "ThreadBudget",
    "Variant",
    "branch_and_bound",
    "brute_force",
    "build_score_matrix",
    "compare_solvers",
    "diversity_score",
    "downsample",
    "dpp_greedy_select",
    "dpp_kernel",
    "evaluate",
    "greedy_core",
    "greedy_select",
    "load_captions",
    "load_embeddings",
    "load_query",
    "low_rank_approx",
    "narrative_count",
    "normalize_query",
    "normalize_rows",
    "objective",
    "pairscore",
    "refine",
    "relevance_scores",
    "render_plan",
    "run_solver",
    "search_on_matrix",
    "solve_delta",
    "synth_instance",
    "thread",
    "topk_select",
    "uniform_select",
    "upper_bound",
    "write_captions",
    "write_embeddings",
    "write_query",
]
