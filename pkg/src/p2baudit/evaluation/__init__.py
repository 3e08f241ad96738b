"""Agreement between automated verdicts and human labels, plus survey statistics."""

from .agreement import (
    AgreementCount,
    SplitMix64,
    agreement_rate,
    always_yes_baseline,
    pooled_agreement,
    random_baseline,
)
from .labels import (
    ExpertLabel,
    ParticipantRating,
    load_expert_labels,
    load_participant_ratings,
    majority_label,
    majority_labels,
    write_expert_labels,
    write_participant_ratings,
)
from .stats import (
    Alternative,
    Method,
    MwuResult,
    common_language_effect_size,
    exact_p_value,
    mann_whitney_u,
    rank_biserial,
    rankdata,
    u_distribution,
)
from .survey import CellSummary, compare_platforms, duration_filtered_means, threshold_sweep

__all__ = [
    "AgreementCount", "SplitMix64", "agreement_rate", "always_yes_baseline", "pooled_agreement",
    "random_baseline", "ExpertLabel", "ParticipantRating", "load_expert_labels",
    "load_participant_ratings", "majority_label", "majority_labels", "write_expert_labels",
    "write_participant_ratings", "Alternative", "Method", "MwuResult", "common_language_effect_size",
    "exact_p_value", "mann_whitney_u", "rank_biserial", "rankdata", "u_distribution", "CellSummary",
    "compare_platforms", "duration_filtered_means", "threshold_sweep",
]
