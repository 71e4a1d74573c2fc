"""Active-inference agents playing iterated normal-form games with transitions."""

from .games import (
    ActionSpace,
    GameSchedule,
    GameSpec,
    PayoffTensor,
    PreferenceTensor,
    TransitionEvent,
    build_canonical,
    preferences_from_payoffs,
)
from .beliefs import (
    FactorBelief,
    InferenceSettings,
    categorical_to_prior,
    dirichlet_mean,
    infer,
    predict_state,
    vfe_exact,
    vfe_mc,
)
from .genmodel import (
    GenerativeModel,
    TransitionBuffer,
    TransitionModel,
    bayesian_model_reduction,
    learn_update,
    normalized_matrix,
    predict_counts,
)
from .planning import (
    EFEBreakdown,
    PredictiveProfile,
    efe_all_actions,
    novelty,
    pragmatic_value,
    predictive_profile,
    salience,
)
from .selection import (
    PrecisionState,
    policy_distribution,
    sample_action,
    update_precision,
)
from .agent import AgentState, StepMetrics
from .harness import (
    AgentParams,
    ConditionSummary,
    TrialConfig,
    TrialRecord,
    builtin_conditions,
    classify_equilibrium,
    kde,
    run_condition,
    run_trial,
    split_seed,
)

__version__ = "0.1.0"
