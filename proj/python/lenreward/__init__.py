"""Adaptive dual-mode length reward engine.

Thin Python surface over the C++ core: rule-based answer verification,
dual-mode length rewards with model-aware difficulty signals, pass@k and
standardized-length bin evaluation, and a toy group-relative training
simulator.
"""

from ._core import (  # noqa: F401
    Batch,
    BatchScore,
    BetaPolicy,
    BinAggregation,
    BinOptions,
    BinReport,
    EmaTracker,
    EngineError,
    EngineOptions,
    GroupScore,
    LengthStats,
    PassRatios,
    PolicyShape,
    QuestionGroup,
    RewardBreakdown,
    RewardConfig,
    RewardMode,
    RolloutRecord,
    SimEnvConfig,
    SimPolicy,
    SimQuestion,
    SimResult,
    StepMetrics,
    TrainerConfig,
    batch_pass_ratio,
    beta_signal,
    bin_by_length,
    bin_report_csv,
    canonicalize,
    combine,
    ema_state_to_string,
    group_advantages,
    group_pass_ratio,
    grpo_update,
    length_reward,
    length_stats,
    make_two_level_bank,
    make_uniform_bank,
    metrics_csv,
    outcome_reward,
    parse_ema_state,
    parse_record_line,
    pass_at_k,
    policy_gradient,
    policy_snapshot,
    record_to_json_line,
    rollout_step,
    run_training,
    score_batch,
    score_group,
    standardize,
    update_ema,
    verify,
)

__version__ = "0.1.0"
