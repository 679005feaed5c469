"""Online submodular coordination of multiple agents with tracking-regret
guarantees, plus a multi-robot target-tracking simulator."""
from .baselines import PolicyKind, brute_force_opt, sg_hat_select, sg_select
from .core import (EMPTY_PROFILE, ActionId, ActionProfile, CountingOracle, CoverageOracle,
                   FunctionOracle, ObjectiveOracle, TableOracle,
                   check_normalized_monotone_submodular, marginal_gain)
from .forecaster import FixedShareForecaster
from .metrics import (StepRecord, Trace, adversarial_effect, best_expert_switches,
                      regret_bound_rhs, tracking_regret_half)
from .osg import OnlineSequentialGreedy

__all__ = [
    "EMPTY_PROFILE", "ActionId", "ActionProfile", "CountingOracle", "CoverageOracle",
    "FixedShareForecaster", "FunctionOracle", "ObjectiveOracle", "OnlineSequentialGreedy",
    "PolicyKind", "StepRecord", "TableOracle", "Trace", "adversarial_effect",
    "best_expert_switches", "brute_force_opt", "check_normalized_monotone_submodular",
    "marginal_gain", "regret_bound_rhs", "sg_hat_select", "sg_select",
    "tracking_regret_half",
]
