"""Exact DoF bounds, alignment direction sets, and link simulation for the
K-user MxN constant Gaussian interference channel."""

from .alignment import (
    AlignmentReport,
    EnumerationBudgetError,
    ReceiverProfile,
    ReferenceFamily,
    TransmitPlan,
    achievable_dof_gamma,
    build_transmit_directions,
    closed_form_counts,
    expand_received,
    per_antenna_dof_gamma,
    truncate_plan,
    verify_alignment,
)
from .bounds import (
    DofReport,
    PartitionWitness,
    achievable_dof,
    brute_force_upper_bound,
    dof_report,
    dof_upper_bound,
    gou_jafar_reference,
    partition_bound,
    regime_classify,
    solve_partition_balance,
    two_user_dof,
)
from .channel import ChannelRealization, SystemConfig, generate_channel
from .directions import (
    UNIT,
    Direction,
    DirectionSet,
    direction,
    mono_eval,
    mono_mul,
)
from .simulate import (
    DecodeBudgetError,
    InconsistentPlanError,
    MessageMatrix,
    SimConfig,
    SimResult,
    amplitude_scale,
    draw_messages,
    encode,
    min_distance,
    propagate,
    run_link_sim,
    separation_exponent,
    simulate_plan,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentReport",
    "ChannelRealization",
    "DecodeBudgetError",
    "Direction",
    "DirectionSet",
    "DofReport",
    "EnumerationBudgetError",
    "InconsistentPlanError",
    "MessageMatrix",
    "PartitionWitness",
    "ReceiverProfile",
    "ReferenceFamily",
    "SimConfig",
    "SimResult",
    "SystemConfig",
    "TransmitPlan",
    "UNIT",
    "achievable_dof",
    "achievable_dof_gamma",
    "amplitude_scale",
    "brute_force_upper_bound",
    "build_transmit_directions",
    "closed_form_counts",
    "direction",
    "dof_report",
    "dof_upper_bound",
    "draw_messages",
    "encode",
    "expand_received",
    "generate_channel",
    "gou_jafar_reference",
    "min_distance",
    "mono_eval",
    "mono_mul",
    "partition_bound",
    "per_antenna_dof_gamma",
    "propagate",
    "regime_classify",
    "run_link_sim",
    "separation_exponent",
    "simulate_plan",
    "solve_partition_balance",
    "truncate_plan",
    "two_user_dof",
    "verify_alignment",
]
