from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from rulewarden.errors import ConfigError
from rulewarden.identity import ContentAddress
from rulewarden.trm import (
    ContributorReputation,
    RuleTrust,
    TrmParams,
    VoteScore,
    validate_validator_count,
)
from rulewarden.utils import canonical_json


@dataclass(frozen=True)
class Genesis:
    validators: tuple[str, ...]  # hex-encoded public keys, in validator-index order
    byzantine_budget: int
    params: TrmParams

    def __post_init__(self):
        if len(set(self.validators)) != len(self.validators):
            raise ConfigError("Validator keys must be distinct")
        if len(self.validators) != self.params.n_validators:
            raise ConfigError(
                f"Genesis lists {len(self.validators)} validators but "
                f"n_validators={self.params.n_validators}"
            )
        validate_validator_count(len(self.validators), self.byzantine_budget)

    def to_dict(self) -> dict:
        return {
            "validators": list(self.validators),
            "byzantine_budget": self.byzantine_budget,
            "params": self.params.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Genesis:
        return cls(
            validators=tuple(data["validators"]),
            byzantine_budget=int(data["byzantine_budget"]),
            params=TrmParams.from_dict(data["params"]),
        )

    def save(self, path: Path | str):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: Path | str) -> Genesis:
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed genesis file {path}: {e}") from e


@dataclass
class PendingRule:
    contributor: str
    votes: dict[str, VoteScore] = field(default_factory=dict)
    r_count: int = 0


@dataclass(frozen=True)
class DecisionRecord:
    address: ContentAddress
    contributor: str
    votes: tuple[VoteScore, ...]  # in validator-index order
    trust: RuleTrust

    @property
    def vote_vector(self) -> str:
        return ";".join(f"{v.phi:+d}:{v.s!r}" for v in self.votes)


@dataclass
class TrustLedgerState:
    validator_set: tuple[str, ...]
    byzantine_budget: int
    registry: dict[str, str] = field(default_factory=dict)  # key -> role
    pending_rules: dict[ContentAddress, PendingRule] = field(default_factory=dict)
    reputations: dict[str, ContributorReputation] = field(default_factory=dict)
    rule_trusts: dict[ContentAddress, RuleTrust] = field(default_factory=dict)
    r_db: dict[ContentAddress, float] = field(default_factory=dict)

    @classmethod
    def from_genesis(cls, genesis: Genesis) -> TrustLedgerState:
        return cls(
            validator_set=genesis.validators,
            byzantine_budget=genesis.byzantine_budget,
            registry={key: "validator" for key in genesis.validators},
        )

    def validator_index(self, key: str) -> int:
        return self.validator_set.index(key)

    def to_dict(self) -> dict:
        return {
            "validator_set": list(self.validator_set),
            "byzantine_budget": self.byzantine_budget,
            "registry": dict(sorted(self.registry.items())),
            "pending_rules": {
                address.hex: {
                    "contributor": pending.contributor,
                    "r_count": pending.r_count,
                    "votes": {
                        k: [v.phi, v.s] for k, v in sorted(pending.votes.items())
                    },
                }
                for address, pending in sorted(
                    self.pending_rules.items(), key=lambda x: x[0].hex
                )
            },
            "reputations": {
                k: v.to_dict() for k, v in sorted(self.reputations.items())
            },
            "rule_trusts": {
                a.hex: trust.to_dict()
                for a, trust in sorted(self.rule_trusts.items(), key=lambda x: x[0].hex)
            },
            "r_db": {
                a.hex: t for a, t in sorted(self.r_db.items(), key=lambda x: x[0].hex)
            },
        }

    def state_hash(self) -> str:
        encoded = canonical_json(self.to_dict())
        return hashlib.sha256(encoded.encode("utf-8")).hexdigest()
