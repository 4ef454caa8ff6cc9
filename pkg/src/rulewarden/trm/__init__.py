# ruff: noqa: F401
from .helpers import (
    aggregate_rule_trust,
    byzantine_threshold,
    decide_validity,
    direct_reputation,
    evaluate_votes,
    reputation_bounds,
    rule_trust_bounds,
    update_reputation,
    validate_validator_count,
    within_reputation_bounds,
    within_rule_bounds,
)
from .params import (
    VALID_SCORE_CUTOFF,
    ContributorReputation,
    RuleTrust,
    TrmParams,
    VoteScore,
)
