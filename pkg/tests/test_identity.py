import hashlib

import pytest

from rulewarden import identity
from rulewarden.errors import DomainError
from rulewarden.identity import ContentAddress, canonical_encode


class TestKeys:
    @staticmethod
    @pytest.fixture
    def key():
        return identity.generate_keypair(identity.derive_seed("cc1"))

    @staticmethod
    def test_deterministic(key):
        again = identity.generate_keypair(identity.derive_seed("cc1"))
        assert again.public_key == key.public_key
        assert len(key.public_key) == 32
        other = identity.generate_keypair(identity.derive_seed("cc2"))
        assert other.public_key != key.public_key

    @staticmethod
    def test_int_and_str_seeds_differ():
        assert identity.derive_seed(1) != identity.derive_seed("1")
        assert identity.derive_seed(b"x") == identity.derive_seed("x")

    @staticmethod
    def test_bad_seed_length():
        with pytest.raises(DomainError):
            identity.generate_keypair(b"short")

    @staticmethod
    def test_repr_hides_secret(key):
        assert key.secret_key.hex() not in repr(key)
        assert key.public_hex[:16] in repr(key)

    @staticmethod
    def test_sign_and_verify(key):
        payload = canonical_encode("Tx_r", key.public_key, 7)
        signature = identity.sign_message(key, payload)
        assert len(signature) == 64
        assert identity.verify_signature(key.public_key, payload, signature)

    @staticmethod
    def test_tampering_is_detected(key):
        payload = canonical_encode("Tx_r", key.public_key, 7)
        signature = identity.sign_message(key, payload)
        tampered = canonical_encode("Tx_r", key.public_key, 8)
        assert not identity.verify_signature(key.public_key, tampered, signature)

        flipped = bytes([signature[0] ^ 1]) + signature[1:]
        assert not identity.verify_signature(key.public_key, payload, flipped)

        other = identity.generate_keypair(identity.derive_seed("cv1"))
        assert not identity.verify_signature(other.public_key, payload, signature)

    @staticmethod
    def test_malformed_inputs_do_not_raise(key):
        payload = b"payload"
        signature = identity.sign_message(key, payload)
        assert not identity.verify_signature(b"\x00" * 5, payload, signature)
        assert not identity.verify_signature(key.public_key, payload, b"\x01" * 10)


class TestContentAddress:
    @staticmethod
    def test_sha256():
        address = identity.content_address(b"bundle")
        assert address.digest == hashlib.sha256(b"bundle").digest()
        assert str(address) == address.hex

    @staticmethod
    def test_from_hex():
        address = identity.content_address(b"bundle")
        assert ContentAddress.from_hex(address.hex) == address
        with pytest.raises(DomainError):
            ContentAddress.from_hex("zz")
        with pytest.raises(DomainError):
            ContentAddress.from_hex("abcd")

    @staticmethod
    def test_hashable():
        a = identity.content_address(b"one")
        b = identity.content_address(b"one")
        assert len({a, b}) == 1


class TestCanonicalEncoding:
    @staticmethod
    def test_field_boundaries_are_unambiguous():
        assert canonical_encode("ab", "c") != canonical_encode("a", "bc")
        assert canonical_encode("abc") != canonical_encode("ab", "c")

    @staticmethod
    def test_types_are_distinguished():
        assert canonical_encode(True) != canonical_encode(1)
        assert canonical_encode(1) != canonical_encode(1.0)

    @staticmethod
    def test_addresses_encode_as_digest():
        address = identity.content_address(b"bundle")
        assert canonical_encode(address) == canonical_encode(address.digest)

    @staticmethod
    def test_unsupported_type():
        with pytest.raises(TypeError):
            canonical_encode(object())
