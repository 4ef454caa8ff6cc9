from __future__ import annotations

import hashlib
from dataclasses import dataclass

from nacl.exceptions import BadSignatureError, CryptoError
from nacl.signing import SigningKey, VerifyKey

from rulewarden.errors import DomainError

SEED_SIZE = 32


@dataclass(frozen=True)
class ContentAddress:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise DomainError(
                f"Content address must be a 32-byte digest, got {len(self.digest)}"
            )

    @property
    def hex(self) -> str:
        return self.digest.hex()

    @classmethod
    def from_hex(cls, value: str) -> ContentAddress:
        try:
            return cls(bytes.fromhex(value))
        except ValueError as e:
            raise DomainError(f"Not a hex-encoded address: {value!r}") from e

    def __str__(self):
        return self.hex


@dataclass(frozen=True)
class NodeKeyPair:
    public_key: bytes
    secret_key: bytes

    @property
    def public_hex(self) -> str:
        return self.public_key.hex()

    def __repr__(self):
        # Don't leak the secret half into logs.
        return f"NodeKeyPair(public_key={self.public_hex[:16]}...)"


def derive_seed(label: int | str | bytes) -> bytes:
    """Turn a human-friendly key seed (as found in scenario files) into 32 bytes."""
    if isinstance(label, int):
        label = f"int:{label}"
    if isinstance(label, str):
        label = label.encode("utf-8")
    return hashlib.sha256(b"rulewarden-key-seed:" + label).digest()


def generate_keypair(seed: bytes) -> NodeKeyPair:
    """Deterministically derive an Ed25519 key pair from a 32-byte seed."""
    if len(seed) != SEED_SIZE:
        raise DomainError(f"Key seed must be {SEED_SIZE} bytes, got {len(seed)}")
    signing_key = SigningKey(seed)
    return NodeKeyPair(
        public_key=bytes(signing_key.verify_key),
        secret_key=bytes(signing_key),
    )


def content_address(bundle_bytes: bytes) -> ContentAddress:
    return ContentAddress(hashlib.sha256(bundle_bytes).digest())


def sign_message(key: NodeKeyPair, payload: bytes) -> bytes:
    """Sign the SHA-256 digest of an (already canonically encoded) payload."""
    signing_key = SigningKey(key.secret_key)
    return signing_key.sign(hashlib.sha256(payload).digest()).signature


def verify_signature(public_key: bytes, payload: bytes, signature: bytes) -> bool:
    try:
        VerifyKey(public_key).verify(hashlib.sha256(payload).digest(), signature)
    except (BadSignatureError, CryptoError, ValueError, TypeError):
        return False
    return True
