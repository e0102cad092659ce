"""Content analysis of specialist judgements with Cochran's Q."""

__version__ = "0.1.0"

from .cochran import (
    PermutationBudget,
    QTestResult,
    asymptotic_p,
    exact_p,
    mc_permutation_p,
    q_statistic,
    run_test,
)
from .condition import (
    ConditionSpec,
    MajoritySet,
    RetentionResult,
    WMatrix,
    apply_condition,
    build_w_matrix,
    concordance_fraction,
    cvr,
    leading_rows_w_matrix,
    majority_set,
)
from .datasets import load_teaching_learning
from .judgements import (
    JudgementFormatError,
    JudgementMatrix,
    ValidationReport,
    format_judgement_csv,
    parse_judgement_csv,
    read_judgement_csv,
    validate_matrix,
)
from .pipeline import Analysis, analyze
from .powersim import (
    CapabilityProfile,
    PowerEstimate,
    ScenarioSpec,
    builtin_scenarios,
    estimate_power,
    prop2_w_probability,
    simulate_judgements,
)
from .specfun import chi_square_sf
from .subgroup import SubgroupReport, analyze_subgroups, enumerate_subgroups
