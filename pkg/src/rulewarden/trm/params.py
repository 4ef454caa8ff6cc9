from __future__ import annotations

import math
from dataclasses import dataclass, field

from rulewarden.errors import ConfigError, DomainError

# Scores at or above this value count as a vote for a valid rule.
VALID_SCORE_CUTOFF = 0.5


@dataclass(frozen=True)
class TrmParams:
    delta_val: float = 0.85  # Weight of votes in the valid band
    delta_inv: float = 0.9  # Weight of votes in the invalid band
    gamma: float = 0.85  # Decay constant of the contributor reputation
    q_threshold: float = 0.5  # Acceptance threshold of the weighted majority
    n_validators: int = 4

    def __post_init__(self):
        if not 0 < self.delta_val < self.delta_inv <= 1:
            raise ConfigError(
                "Trust weights must satisfy 0 < delta_val < delta_inv <= 1, got "
                f"delta_val={self.delta_val}, delta_inv={self.delta_inv}"
            )
        if not 0 < self.gamma <= 1:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0 < self.q_threshold <= 1:
            raise ConfigError(
                f"q_threshold must be in (0, 1], got {self.q_threshold}"
            )
        if not isinstance(self.n_validators, int) or self.n_validators < 1:
            raise ConfigError(
                f"n_validators must be a positive integer, got {self.n_validators}"
            )

    @property
    def narrow_invalid_weight(self) -> bool:
        """True in the first regime of the trust bounds (delta_inv < 2 delta_val)."""
        return self.delta_inv < 2 * self.delta_val

    def to_dict(self) -> dict:
        return {
            "delta_val": self.delta_val,
            "delta_inv": self.delta_inv,
            "gamma": self.gamma,
            "q_threshold": self.q_threshold,
            "n_validators": self.n_validators,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TrmParams:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown TRM parameters: {sorted(unknown)}")
        return cls(**data)


def _check_score(s: float):
    if not isinstance(s, (int, float)) or math.isnan(s) or not 0.0 <= s <= 1.0:
        raise DomainError(f"Score must be a real number in [0, 1], got {s!r}")


@dataclass(frozen=True)
class VoteScore:
    """One validator's verdict: validation result phi and quality score s.

    The sign of phi and the band of s encode the same verdict, so a mismatch is
    rejected at construction.
    """

    phi: int
    s: float
    validator_index: int = 0

    def __post_init__(self):
        _check_score(self.s)
        if self.phi == 1:
            if self.s < VALID_SCORE_CUTOFF:
                raise DomainError(f"phi=+1 requires s in [0.5, 1], got {self.s}")
        elif self.phi == -1:
            if self.s >= VALID_SCORE_CUTOFF:
                raise DomainError(f"phi=-1 requires s in [0, 0.5), got {self.s}")
        else:
            raise DomainError(f"phi must be +1 or -1, got {self.phi!r}")

    @classmethod
    def from_score(cls, s: float, validator_index: int = 0) -> VoteScore:
        _check_score(s)
        phi = 1 if s >= VALID_SCORE_CUTOFF else -1
        return cls(phi=phi, s=float(s), validator_index=validator_index)


@dataclass(frozen=True)
class RuleTrust:
    t: float
    decision: int
    vote_count: int

    @property
    def accepted(self) -> bool:
        return self.decision == 1

    def to_dict(self) -> dict:
        return {"t": self.t, "decision": self.decision, "vote_count": self.vote_count}


@dataclass(frozen=True)
class ContributorReputation:
    contributor: str  # hex-encoded public key
    m: int = 0
    T: float = 0.0
    history: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        assert self.m == len(self.history), (self.m, len(self.history))
        assert self.m > 0 or self.T == 0.0, "An empty history must have T = 0"

    @classmethod
    def empty(cls, contributor: str) -> ContributorReputation:
        return cls(contributor=contributor)

    def to_dict(self) -> dict:
        return {
            "contributor": self.contributor,
            "m": self.m,
            "T": self.T,
            "history": list(self.history),
        }
