import struct
from typing import Any


def _field_bytes(value: Any) -> bytes:
    # bool is an int subclass; keep it distinct from 0/1 integers
    if isinstance(value, bool):
        return b"\x01" if value else b"\x00"
    if isinstance(value, (bytes, bytearray)):
        return bytes(value)
    if isinstance(value, str):
        return value.encode("utf-8")
    if isinstance(value, int):
        return value.to_bytes(8, "big", signed=True)
    if isinstance(value, float):
        return struct.pack(">d", value)
    digest = getattr(value, "digest", None)
    if isinstance(digest, bytes):
        return digest
    raise TypeError(f"Cannot canonically encode value of type {type(value)}")


def canonical_encode(*fields: Any) -> bytes:
    """Length-prefixed concatenation of the given fields, in the given order.

    Each field is written as a 4-byte big-endian length followed by its bytes, so
    that no two distinct field sequences share an encoding.
    """
    parts = []
    for value in fields:
        data = _field_bytes(value)
        parts.append(len(data).to_bytes(4, "big"))
        parts.append(data)
    return b"".join(parts)
