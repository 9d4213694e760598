"""Online semi-automatic index tuning.

Work-function recommendation engines over a pluggable what-if cost oracle,
with DBA feedback, automatic candidate and partition maintenance, an exact
offline optimum for evaluation, a scenario harness, and a live session
service.
"""

from .core import (
    CachingOracle,
    CapacityError,
    CatalogError,
    Config,
    ConfigurationError,
    CostOracle,
    DOI_ENUMERATION_CAP,
    EMPTY,
    EnumerationLimitError,
    FeedbackEvent,
    Index,
    QUERY,
    RecommendationSchedule,
    Statement,
    TransitionCostTable,
    UPDATE,
    benefit,
    degree_of_interaction,
    minimal_stable_partition,
    prefers,
    stable_cost_identity_error,
    total_work,
)
from .offline import OptResult, optimum, optimum_over_partition, synthesize_feedback
from .partitioned import PartitionedEngine
from .synthetic import (
    CatalogSpec,
    SyntheticCatalog,
    Workload,
    WorkloadSpec,
    generate_workload,
    load_workload,
    save_workload,
)
from .tuner import Tuner, TunerConfig, choose_partition
from .wfa import CANDIDATE_CAP, WorkFunctionEngine

__version__ = "0.1.0"

__all__ = [
    "CANDIDATE_CAP",
    "CachingOracle",
    "CapacityError",
    "CatalogError",
    "CatalogSpec",
    "Config",
    "ConfigurationError",
    "CostOracle",
    "DOI_ENUMERATION_CAP",
    "EMPTY",
    "EnumerationLimitError",
    "FeedbackEvent",
    "Index",
    "OptResult",
    "PartitionedEngine",
    "QUERY",
    "RecommendationSchedule",
    "Statement",
    "SyntheticCatalog",
    "TransitionCostTable",
    "Tuner",
    "TunerConfig",
    "UPDATE",
    "WorkFunctionEngine",
    "Workload",
    "WorkloadSpec",
    "benefit",
    "choose_partition",
    "degree_of_interaction",
    "generate_workload",
    "load_workload",
    "minimal_stable_partition",
    "optimum",
    "optimum_over_partition",
    "prefers",
    "save_workload",
    "stable_cost_identity_error",
    "synthesize_feedback",
    "total_work",
]
