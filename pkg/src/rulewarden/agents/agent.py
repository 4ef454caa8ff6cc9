from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from rulewarden.chain import Ledger, RegistrationRequest, RegistrationResponse
from rulewarden.errors import TransactionRejected
from rulewarden.identity import NodeKeyPair, derive_seed, generate_keypair
from rulewarden.rulestore import BundleStore, RuleCorpus, RuleDispenser

from .profiles import AgentProfile, Role


@dataclass(frozen=True)
class RejectionRecord:
    round: int
    agent: str
    kind: str  # transaction kind, or "store" for bundle store access
    reason: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "agent": self.agent,
            "kind": self.kind,
            "reason": self.reason,
        }


@dataclass
class SimulationContext:
    """Everything the agents of one scenario run share.

    Logical time is a single counter that every created transaction advances, so
    timestamps are unique and follow submission order.
    """

    ledger: Ledger
    store: BundleStore
    corpus: RuleCorpus
    dispenser: RuleDispenser
    regular_threshold: float = 0.5
    round: int = 0
    clock: int = 0
    rejections: list[RejectionRecord] = field(default_factory=list)
    # hex public key -> agent name, for every identity an agent has used
    identities: dict[str, str] = field(default_factory=dict)
    _approvals: int = 0

    def tick(self) -> int:
        self.clock += 1
        return self.clock

    def next_approver(self) -> str:
        validators = self.ledger.state.validator_set
        approver = validators[self._approvals % len(validators)]
        self._approvals += 1
        return approver


class Agent(ABC):
    """Base class for simulated nodes.

    An agent owns its key pair(s), its random generator and its local state.
    Everything it does to the shared world goes through the ledger and the bundle
    store of its `SimulationContext`.

    Args:
        profile: what kind of node this is and how it behaves.
        context: the shared simulation state.
        rng: the agent's own random generator.
    """

    role: Role

    def __init__(
        self,
        profile: AgentProfile,
        context: SimulationContext,
        rng: np.random.Generator,
    ):
        if profile.role is not self.role:
            raise TypeError(
                f"{type(self).__name__} needs a {self.role.value} profile, "
                f"got {profile.role.value}"
            )
        self.profile = profile
        self.context = context
        self.rng = rng
        self.key = generate_keypair(derive_seed(profile.key_seed))
        self.identities: list[NodeKeyPair] = [self.key]
        context.identities[self.key.public_hex] = profile.name

    @property
    def name(self) -> str:
        return self.profile.name

    @property
    def ledger(self) -> Ledger:
        return self.context.ledger

    @property
    def store(self) -> BundleStore:
        return self.context.store

    @abstractmethod
    def attach(self):
        """Subscribe to the ledger events this agent reacts to."""

    def register(self) -> RegistrationResponse | None:
        """Ask a validator to register the current identity on the ledger."""
        if not self.profile.register or self.role is Role.VALIDATOR:
            return None
        request = RegistrationRequest.create(
            self.key,
            role=self.role.value,
            attributes={"name": self.name},
            timestamp=self.context.tick(),
        )
        try:
            response = self.ledger.register_node(
                request, approver=self.context.next_approver()
            )
        except TransactionRejected as e:
            self.record_rejection("registration", e)
            return None
        logger.debug(f"{self.name} registered as {self.role.value}")
        return response

    def new_identity(self, label: str) -> NodeKeyPair:
        """Switch to a fresh key pair derived from the agent's seed and `label`."""
        self.key = generate_keypair(derive_seed(f"{self.profile.key_seed}:{label}"))
        self.identities.append(self.key)
        self.context.identities[self.key.public_hex] = self.name
        return self.key

    def record_rejection(self, kind: str, error: Exception):
        reason = (
            error.reason.value
            if isinstance(error, TransactionRejected)
            else type(error).__name__
        )
        record = RejectionRecord(
            round=self.context.round,
            agent=self.name,
            kind=kind,
            reason=reason,
            detail=str(error),
        )
        self.context.rejections.append(record)
        logger.warning(f"Round {record.round}: {self.name} {kind} refused ({error})")

    def __repr__(self):
        return (
            f"{type(self).__name__}({self.name!r}, "
            f"behavior={self.profile.behavior.value}, key={self.key.public_hex[:12]})"
        )
