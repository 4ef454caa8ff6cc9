from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Union

from rulewarden.errors import DomainError
from rulewarden.identity import (
    ContentAddress,
    NodeKeyPair,
    canonical_encode,
    sign_message,
    verify_signature,
)

# Simulated handles of the two contracts and the storage bootstrap node.
TRM_CONTRACT = hashlib.sha256(b"SC_trm").hexdigest()[:40]
STR_CONTRACT = hashlib.sha256(b"SC_str").hexdigest()[:40]
STORAGE_ENDPOINT = "sim://bundle-store"
STORAGE_BOOTSTRAP = hashlib.sha256(b"bundle-store-bootstrap").hexdigest()

REGISTRABLE_ROLES = ("contributor", "regular")


class TxKind(Enum):
    REGISTRATION = "registration"
    RULE_SUBMISSION = "Tx_r"
    VALIDATION_VOTE = "Tx_c"
    RULE_CONFIRMATION = "Tx_f"


class EventKind(Enum):
    NEW_RULE_FOR_VALIDATION = "E^v"
    RULE_CONFIRMED = "E^o"


@dataclass(frozen=True)
class RegistrationPayload:
    role: str
    attributes: tuple[tuple[str, str], ...]
    approver: str

    def signed_fields(self) -> tuple:
        # The approver is picked after the request was signed.
        flat = [item for pair in self.attributes for item in pair]
        return (self.role, *flat)

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "attributes": dict(self.attributes),
            "approver": self.approver,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RegistrationPayload:
        return cls(
            role=data["role"],
            attributes=tuple(sorted(data["attributes"].items())),
            approver=data["approver"],
        )


@dataclass(frozen=True)
class RuleSubmissionPayload:
    address: ContentAddress

    def signed_fields(self) -> tuple:
        return (self.address,)

    def to_dict(self) -> dict:
        return {"address": self.address.hex}

    @classmethod
    def from_dict(cls, data: dict) -> RuleSubmissionPayload:
        return cls(ContentAddress.from_hex(data["address"]))


@dataclass(frozen=True)
class ValidationVotePayload:
    phi: int
    s: float
    address: ContentAddress

    def signed_fields(self) -> tuple:
        return (self.phi, float(self.s), self.address)

    def to_dict(self) -> dict:
        return {"phi": self.phi, "s": self.s, "address": self.address.hex}

    @classmethod
    def from_dict(cls, data: dict) -> ValidationVotePayload:
        return cls(
            phi=int(data["phi"]),
            s=float(data["s"]),
            address=ContentAddress.from_hex(data["address"]),
        )


@dataclass(frozen=True)
class RuleConfirmationPayload:
    address: ContentAddress
    t: float

    def signed_fields(self) -> tuple:
        return (self.address, float(self.t))

    def to_dict(self) -> dict:
        return {"address": self.address.hex, "t": self.t}

    @classmethod
    def from_dict(cls, data: dict) -> RuleConfirmationPayload:
        return cls(ContentAddress.from_hex(data["address"]), float(data["t"]))


Payload = Union[
    RegistrationPayload,
    RuleSubmissionPayload,
    ValidationVotePayload,
    RuleConfirmationPayload,
]

_PAYLOAD_TYPES = {
    TxKind.REGISTRATION: RegistrationPayload,
    TxKind.RULE_SUBMISSION: RuleSubmissionPayload,
    TxKind.VALIDATION_VOTE: ValidationVotePayload,
    TxKind.RULE_CONFIRMATION: RuleConfirmationPayload,
}


@dataclass(frozen=True)
class ChainTransaction:
    kind: TxKind
    payload: Payload
    timestamp: int
    sender: str  # hex-encoded public key, or a contract handle for Tx_f
    signature: bytes = b""

    def __post_init__(self):
        if not isinstance(self.payload, _PAYLOAD_TYPES[self.kind]):
            raise DomainError(
                f"{self.kind.value} carries a {type(self.payload).__name__} payload"
            )

    def signing_bytes(self) -> bytes:
        return canonical_encode(
            self.kind.value, *self.payload.signed_fields(), self.timestamp
        )

    def verify(self) -> bool:
        try:
            public_key = bytes.fromhex(self.sender)
        except ValueError:
            return False
        return verify_signature(public_key, self.signing_bytes(), self.signature)

    @classmethod
    def _signed(
        cls, kind: TxKind, payload: Payload, key: NodeKeyPair, timestamp: int
    ) -> ChainTransaction:
        unsigned = cls(kind, payload, timestamp, key.public_hex)
        signature = sign_message(key, unsigned.signing_bytes())
        return cls(kind, payload, timestamp, key.public_hex, signature)

    @classmethod
    def rule_submission(
        cls, key: NodeKeyPair, address: ContentAddress, timestamp: int
    ) -> ChainTransaction:
        return cls._signed(
            TxKind.RULE_SUBMISSION, RuleSubmissionPayload(address), key, timestamp
        )

    @classmethod
    def validation_vote(
        cls,
        key: NodeKeyPair,
        phi: int,
        s: float,
        address: ContentAddress,
        timestamp: int,
    ) -> ChainTransaction:
        payload = ValidationVotePayload(phi=phi, s=float(s), address=address)
        return cls._signed(TxKind.VALIDATION_VOTE, payload, key, timestamp)

    @classmethod
    def rule_confirmation(
        cls, address: ContentAddress, t: float, timestamp: int
    ) -> ChainTransaction:
        # Originated by the storage contract itself, so there is no node signature.
        return cls(
            TxKind.RULE_CONFIRMATION,
            RuleConfirmationPayload(address, t),
            timestamp,
            STR_CONTRACT,
        )

    @classmethod
    def registration(
        cls, request: RegistrationRequest, approver: str
    ) -> ChainTransaction:
        payload = RegistrationPayload(
            role=request.role, attributes=request.attributes, approver=approver
        )
        return cls(
            TxKind.REGISTRATION,
            payload,
            request.timestamp,
            request.public_key.hex(),
            request.signature,
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "payload": self.payload.to_dict(),
            "timestamp": self.timestamp,
            "sender": self.sender,
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> ChainTransaction:
        kind = TxKind(data["kind"])
        return cls(
            kind=kind,
            payload=_PAYLOAD_TYPES[kind].from_dict(data["payload"]),
            timestamp=int(data["timestamp"]),
            sender=data["sender"],
            signature=bytes.fromhex(data["signature"]),
        )


@dataclass(frozen=True)
class RegistrationRequest:
    """A node's signed request to join the network."""

    public_key: bytes
    role: str
    attributes: tuple[tuple[str, str], ...]
    timestamp: int
    signature: bytes

    @classmethod
    def create(
        cls,
        key: NodeKeyPair,
        role: str,
        attributes: dict[str, str],
        timestamp: int,
    ) -> RegistrationRequest:
        if role not in REGISTRABLE_ROLES:
            raise DomainError(
                f"Nodes can only register as {REGISTRABLE_ROLES}, got {role!r}"
            )
        attrs = tuple(sorted((str(k), str(v)) for k, v in attributes.items()))
        unsigned = ChainTransaction(
            TxKind.REGISTRATION,
            RegistrationPayload(role=role, attributes=attrs, approver=""),
            timestamp,
            key.public_hex,
        )
        signature = sign_message(key, unsigned.signing_bytes())
        return cls(key.public_key, role, attrs, timestamp, signature)


@dataclass(frozen=True)
class RegistrationResponse:
    storage_endpoint: str
    bootstrap_address: str
    trm_contract: str
    str_contract: str


@dataclass(frozen=True)
class ChainEvent:
    kind: EventKind
    rule_address: ContentAddress
    emitted_at: int  # position in the transaction log of the triggering transaction
    sequence: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "rule_address": self.rule_address.hex,
            "emitted_at": self.emitted_at,
            "sequence": self.sequence,
        }
