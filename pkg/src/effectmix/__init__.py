"""effectmix: hypothesize distributions of individual treatment effects and
derive the design consequences — implied average effects, power, sign and
magnitude errors, and required sample sizes."""

from .design import (
    BinaryOutcome,
    ContinuousOutcome,
    DesignDiagnostics,
    DesignError,
    DesignSpec,
    PilotReport,
    PilotResult,
    SampleSizeResult,
    critical_z,
    diagnostics_fixed,
    diagnostics_mixture,
    pilot_report,
    power_fixed,
    required_n,
    se_conservative_binary,
    se_two_mean,
    se_two_proportion,
)
from .effects import (
    P_NULL_DIRECT_INTERVENTION,
    P_NULL_INDIRECT_MARKETING,
    BinaryTypeModel,
    BinaryTypeSummary,
    Discrete,
    EffectDistribution,
    EffectModelError,
    Normal,
    PlausibleRange,
    PointMass,
    StratifiedEffectCurve,
    Stratum,
    Uniform,
    binary_to_distribution,
    binary_type_ate,
    from_plausible_range,
    heuristic_ate,
    mixture_mean,
    mixture_variance,
    point_mass_distribution,
    sample,
    stratified_ate,
    with_null_mass,
)
from .elicitation import (
    BallsAllocation,
    ComparisonReport,
    ElicitationError,
    ElicitationSession,
    ExtremeJudgment,
    MidpointSplit,
    StageMismatchError,
    StudyContext,
    advance,
    comparison_report,
    derive_ate_post,
    new_session,
    session_from_json,
    session_to_json,
)
from .scenarios import (
    PlausibilityReport,
    ScenarioError,
    list_scenarios,
    retrospective_plausibility,
    run_all,
    run_scenario,
)
from .sessions import ConflictError, SessionNotFoundError, SessionStore

__version__ = "0.1.0"
