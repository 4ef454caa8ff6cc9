# ruff: noqa: F401
from .encoding import canonical_encode
from .keys import (
    ContentAddress,
    NodeKeyPair,
    content_address,
    derive_seed,
    generate_keypair,
    sign_message,
    verify_signature,
)
