"""Trust and reputation arithmetic.

Everything here is a pure function of its arguments. Sums go through `math.fsum`,
which is correctly rounded and therefore independent of the order of the votes.
"""

import math
from typing import Sequence

import numpy as np

from rulewarden.errors import ConfigError, ContractViolation, DomainError

from .params import (
    VALID_SCORE_CUTOFF,
    ContributorReputation,
    RuleTrust,
    TrmParams,
    VoteScore,
)

# Absolute slack for inclusive bounds, covering binary64 rounding.
BOUND_SLACK = 1e-12
# Fewest validators a network may have, whatever its byzantine budget.
MIN_VALIDATORS = 4


def _check_votes(votes: Sequence[VoteScore], params: TrmParams):
    if len(votes) != params.n_validators:
        raise ContractViolation(
            f"Expected {params.n_validators} votes, got {len(votes)}"
        )
    for vote in votes:
        if not isinstance(vote, VoteScore):
            raise DomainError(f"Expected a VoteScore, got {type(vote).__name__}")
        if not 0.0 <= vote.s <= 1.0:
            raise DomainError(f"Score outside [0, 1]: {vote.s}")


def aggregate_rule_trust(votes: Sequence[VoteScore], params: TrmParams) -> float:
    """Aggregated trust t of a single rule, the delta-weighted mean of the scores."""
    _check_votes(votes, params)
    weighted = (
        vote.s
        * (params.delta_val if vote.s >= VALID_SCORE_CUTOFF else params.delta_inv)
        for vote in votes
    )
    return math.fsum(weighted) / params.n_validators


def decide_validity(votes: Sequence[VoteScore], params: TrmParams) -> int:
    """Weighted majority decision: +1 iff mean(s * phi) >= q_threshold.

    Equality accepts the rule.
    """
    _check_votes(votes, params)
    mean = math.fsum(vote.s * vote.phi for vote in votes) / params.n_validators
    return 1 if mean >= params.q_threshold else -1


def evaluate_votes(votes: Sequence[VoteScore], params: TrmParams) -> RuleTrust:
    return RuleTrust(
        t=aggregate_rule_trust(votes, params),
        decision=decide_validity(votes, params),
        vote_count=len(votes),
    )


def update_reputation(
    current: ContributorReputation, new_t: float, params: TrmParams
) -> ContributorReputation:
    """Fold one more rule trust value into a contributor's reputation.

    Uses the recurrence T_m = gamma * T_{m-1} + (1 - gamma) * t_m, which equals the
    decayed sum computed by `direct_reputation`.
    """
    if not isinstance(new_t, (int, float)) or math.isnan(new_t):
        raise DomainError(f"Rule trust must be a real number, got {new_t!r}")
    if not within_rule_bounds(new_t, params):
        lower, upper = rule_trust_bounds(params)
        raise DomainError(f"Rule trust {new_t} outside [{lower}, {upper}]")
    gamma = params.gamma
    return ContributorReputation(
        contributor=current.contributor,
        m=current.m + 1,
        T=gamma * current.T + (1 - gamma) * new_t,
        history=current.history + (float(new_t),),
    )


def direct_reputation(history: Sequence[float], gamma: float) -> float:
    """Reputation as the literal decayed sum (1 - gamma) sum_j gamma^(m-j) t_j."""
    m = len(history)
    if m == 0:
        return 0.0
    weights = gamma ** np.arange(m - 1, -1, -1, dtype=np.float64)
    return float((1 - gamma) * np.dot(weights, np.asarray(history, dtype=np.float64)))


def rule_trust_bounds(params: TrmParams) -> tuple[float, float]:
    if params.narrow_invalid_weight:
        return 0.0, params.delta_val
    return 0.0, params.delta_inv / 2


def reputation_bounds(params: TrmParams, m: int) -> tuple[float, float]:
    """Lower and upper bound of a reputation after m contributions.

    The upper bound is exclusive when delta_inv >= 2 delta_val (see
    `within_reputation_bounds`).
    """
    if m < 0:
        raise DomainError(f"Contribution count must be non-negative, got {m}")
    scale = 1 - params.gamma**m
    if params.narrow_invalid_weight:
        return 0.0, scale * params.delta_val
    return 0.0, scale * params.delta_inv / 2


def _upper_is_exclusive(params: TrmParams) -> bool:
    # At delta_inv == 2 delta_val a unanimous S=1 vote reaches delta_inv / 2 exactly,
    # so the strict inequality only holds once delta_inv exceeds 2 delta_val.
    return params.delta_inv > 2 * params.delta_val


def _within(value: float, upper: float, exclusive: bool) -> bool:
    if value < -BOUND_SLACK:
        return False
    if exclusive:
        return value < upper
    return value <= upper + BOUND_SLACK


def within_rule_bounds(t: float, params: TrmParams) -> bool:
    _, upper = rule_trust_bounds(params)
    return _within(t, upper, _upper_is_exclusive(params))


def within_reputation_bounds(T: float, params: TrmParams, m: int) -> bool:
    _, upper = reputation_bounds(params, m)
    return _within(T, upper, _upper_is_exclusive(params) and m > 0)


def validate_validator_count(n: int, byzantine_budget: int):
    if byzantine_budget < 0:
        raise ConfigError(f"Byzantine budget must be >= 0, got {byzantine_budget}")
    if n < MIN_VALIDATORS:
        raise ConfigError(
            f"At least {MIN_VALIDATORS} validators are required, got {n}"
        )
    if byzantine_budget >= 1 and n != 3 * byzantine_budget + 1:
        raise ConfigError(
            f"Tolerating {byzantine_budget} faulty validator(s) requires exactly "
            f"{3 * byzantine_budget + 1} validators, got {n}"
        )


def byzantine_threshold(n: int, byzantine_budget: int) -> float:
    """Largest q for which byzantine_budget worst-case flipped votes cannot reject
    a rule that all honest validators score at S=1."""
    honest = n - byzantine_budget
    return (honest - VALID_SCORE_CUTOFF * byzantine_budget) / n
