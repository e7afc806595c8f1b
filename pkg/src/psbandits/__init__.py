"""Piecewise-stationary combinatorial semi-bandits.

A small laboratory around one idea: pair a combinatorial UCB policy with
per-arm GLR change-point detectors and restart when a change is found.
The package ships the detector, seven policies, exact m-set oracles,
piecewise-stationary Bernoulli environments, the matching delay/regret
bound calculators, and a Monte Carlo harness with CSV/SVG output.
"""

from .detect import (
    GlrBuffer,
    GlrConfig,
    binary_kl,
    first_detection_time,
    glr_statistic,
    glr_test,
    threshold_beta,
)
from .env import (
    ChangePointReport,
    Environment,
    RewardStream,
    SegmentTable,
    build_hard_instance,
    build_synthetic,
    change_point_report,
    dump_segment_table,
    hard_instance_epsilon,
    load_segment_table,
    sample_rewards,
)
from .errors import (
    CapacityError,
    DegenerateGapsError,
    InsufficientDataError,
    InvalidConfigurationError,
    SegmentTableParseError,
)
from .harness import (
    Aggregate,
    ExperimentConfig,
    RunTrace,
    default_policy_suite,
    emit_svg,
    episode_seed,
    export_csv,
    parse_csv,
    run_episode,
    run_experiment,
)
from .oracle import (
    MSetReward,
    SuperArm,
    enumerate_superarms,
    project,
    reward,
    suboptimality_gaps,
    top_m,
)
from .policies import (
    POLICY_KINDS,
    PolicyEvent,
    PolicyParams,
    default_params,
    forced_arm,
    make_policy,
    ucb_index,
)
from .theory import (
    BoundBreakdown,
    GapCheckRecord,
    GapCheckReport,
    check_gap_assumption,
    delay_bound_d,
    minimax_lower_bound,
    regret_upper_bound,
    tuned_params,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate", "BoundBreakdown", "CapacityError", "ChangePointReport",
    "DegenerateGapsError", "Environment", "ExperimentConfig", "GapCheckRecord",
    "GapCheckReport", "GlrBuffer", "GlrConfig", "InsufficientDataError",
    "InvalidConfigurationError", "MSetReward", "POLICY_KINDS", "PolicyEvent",
    "PolicyParams", "RewardStream", "RunTrace", "SegmentTable",
    "SegmentTableParseError", "SuperArm", "binary_kl", "build_hard_instance",
    "build_synthetic", "change_point_report", "check_gap_assumption",
    "default_params", "default_policy_suite", "delay_bound_d",
    "dump_segment_table", "emit_svg", "enumerate_superarms", "episode_seed",
    "export_csv", "first_detection_time", "forced_arm", "glr_statistic",
    "glr_test", "hard_instance_epsilon", "load_segment_table", "make_policy",
    "minimax_lower_bound", "parse_csv", "project", "regret_upper_bound",
    "reward", "run_episode", "run_experiment", "sample_rewards",
    "suboptimality_gaps", "threshold_beta", "top_m", "tuned_params",
    "ucb_index",
]
