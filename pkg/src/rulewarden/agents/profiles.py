from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from rulewarden.errors import ConfigError
from rulewarden.trm import VALID_SCORE_CUTOFF


class Role(Enum):
    VALIDATOR = "validator"
    CONTRIBUTOR = "contributor"
    REGULAR = "regular"


class Behavior(Enum):
    HONEST = "honest"
    TURNCOAT = "turncoat"
    ALWAYS_MALICIOUS = "always_malicious"
    SELF_PROMOTER = "self_promoter"
    BAD_MOUTHER = "bad_mouther"
    BALLOT_STUFFER = "ballot_stuffer"
    WHITEWASHER = "whitewasher"
    BYZANTINE = "byzantine"


# Which behaviors make sense for which role.
ROLE_BEHAVIORS = {
    Role.VALIDATOR: {Behavior.HONEST, Behavior.BAD_MOUTHER, Behavior.BYZANTINE},
    Role.CONTRIBUTOR: {
        Behavior.HONEST,
        Behavior.TURNCOAT,
        Behavior.ALWAYS_MALICIOUS,
        Behavior.SELF_PROMOTER,
        Behavior.BALLOT_STUFFER,
        Behavior.WHITEWASHER,
    },
    Role.REGULAR: {Behavior.HONEST},
}


class Rationale(Enum):
    MATCHES_GROUND_TRUTH = "matches_ground_truth"
    CONTRADICTS_GROUND_TRUTH = "contradicts_ground_truth"
    DUPLICATE_DETECTED = "duplicate_detected"
    ADVERSARIAL_OVERRIDE = "adversarial_override"


@dataclass(frozen=True)
class ValidationVerdict:
    phi: int
    s: float
    rationale: Rationale


@dataclass(frozen=True)
class ScorePolicy:
    """Distribution of the quality score a validator attaches to its verdict.

    Scores are drawn uniformly from the band matching the verdict; a band with
    equal ends is a constant score.
    """

    valid: tuple[float, float] = (0.9, 1.0)
    invalid: tuple[float, float] = (0.0, 0.1)

    def __post_init__(self):
        object.__setattr__(self, "valid", tuple(float(x) for x in self.valid))
        object.__setattr__(self, "invalid", tuple(float(x) for x in self.invalid))
        lo, hi = self.valid
        if not VALID_SCORE_CUTOFF <= lo <= hi <= 1.0:
            raise ConfigError(
                f"Valid score band must lie in [0.5, 1], got {self.valid}"
            )
        lo, hi = self.invalid
        if not 0.0 <= lo <= hi < VALID_SCORE_CUTOFF:
            raise ConfigError(
                f"Invalid score band must lie in [0, 0.5), got {self.invalid}"
            )

    @classmethod
    def constant(cls, valid: float = 1.0, invalid: float = 0.0) -> ScorePolicy:
        return cls(valid=(valid, valid), invalid=(invalid, invalid))

    @classmethod
    def uniform(
        cls,
        valid: tuple[float, float] = (0.9, 1.0),
        invalid: tuple[float, float] = (0.0, 0.1),
    ) -> ScorePolicy:
        return cls(valid=valid, invalid=invalid)

    def draw(self, phi: int, rng: np.random.Generator) -> float:
        lo, hi = self.valid if phi == 1 else self.invalid
        if lo == hi:
            return lo
        return float(rng.uniform(lo, hi))

    def to_dict(self) -> dict:
        return {"valid": list(self.valid), "invalid": list(self.invalid)}

    @classmethod
    def from_dict(cls, data: dict) -> ScorePolicy:
        return cls(valid=tuple(data["valid"]), invalid=tuple(data["invalid"]))


@dataclass(frozen=True, kw_only=True)
class AgentProfile:
    """Declarative description of one simulated node.

    Args:
        name: unique, human-readable identifier used in logs and CSV files.
        role: validator, contributor or regular node.
        behavior: one of `Behavior`; must be allowed for the role.
        key_seed: label the node's key pair is derived from.
        score_policy: score distribution, only used by validators.
        switch_at: last round in which a turncoat submits valid rules.
        rejoin_at: round in which a whitewasher assumes a fresh identity.
        target: name of the contributor a bad-mouther votes against.
        register: False leaves the node unregistered, to exercise access control.
    """

    name: str
    role: Role
    behavior: Behavior = Behavior.HONEST
    key_seed: int | str | None = None
    score_policy: ScorePolicy = ScorePolicy()
    switch_at: int | None = None
    rejoin_at: int | None = None
    target: str | None = None
    register: bool = True

    def __post_init__(self):
        if not isinstance(self.role, Role):
            object.__setattr__(self, "role", Role(self.role))
        if not isinstance(self.behavior, Behavior):
            object.__setattr__(self, "behavior", Behavior(self.behavior))
        if self.key_seed is None:
            object.__setattr__(self, "key_seed", self.name)
        if not self.name:
            raise ConfigError("Agents need a non-empty name")
        if self.behavior not in ROLE_BEHAVIORS[self.role]:
            raise ConfigError(
                f"Agent {self.name}: behavior {self.behavior.value} is not available "
                f"to {self.role.value} nodes"
            )
        if self.behavior is Behavior.TURNCOAT:
            if self.switch_at is None or self.switch_at < 1:
                raise ConfigError(f"Turncoat {self.name} needs switch_at >= 1")
        if self.behavior is Behavior.WHITEWASHER:
            if self.rejoin_at is None or self.rejoin_at < 2:
                raise ConfigError(f"Whitewasher {self.name} needs rejoin_at >= 2")
        if self.behavior is Behavior.BAD_MOUTHER and not self.target:
            raise ConfigError(f"Bad-mouther {self.name} needs a target")
        if self.role is Role.VALIDATOR and not self.register:
            raise ConfigError(f"Validator {self.name} is registered at genesis")

    @property
    def adversarial(self) -> bool:
        return self.behavior is not Behavior.HONEST

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "role": self.role.value,
            "behavior": self.behavior.value,
            "key_seed": self.key_seed,
            "register": self.register,
        }
        if self.role is Role.VALIDATOR:
            data["score_policy"] = self.score_policy.to_dict()
        for key in ("switch_at", "rejoin_at", "target"):
            if getattr(self, key) is not None:
                data[key] = getattr(self, key)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> AgentProfile:
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"Unknown agent fields: {sorted(unknown)}")
        if "score_policy" in data:
            data["score_policy"] = ScorePolicy.from_dict(data["score_policy"])
        try:
            return cls(**data)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid agent {data.get('name')!r}: {e}") from e
