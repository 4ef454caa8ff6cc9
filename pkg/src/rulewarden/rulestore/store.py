from __future__ import annotations

from pathlib import Path

from loguru import logger

from rulewarden.errors import AccessDenied, DomainError, InvariantViolation, NotFound
from rulewarden.identity import ContentAddress, content_address

from .rules import RuleBundle

BUNDLE_SUFFIX = ".bundle"


class AccessRegistry:
    """Which keys may write to and read from the store.

    Maintained by the ledger's registration decisions; validators are granted
    at genesis.
    """

    def __init__(self):
        self._registered: set[str] = set()
        self._subscribed: set[str] = set()

    def grant(self, key: str, subscribed: bool = False):
        self._registered.add(key)
        if subscribed:
            self._subscribed.add(key)

    def is_registered(self, key: str) -> bool:
        return key in self._registered

    def is_subscribed(self, key: str) -> bool:
        return key in self._subscribed


class BundleStore:
    """Content-addressed, append-only store of serialized rule bundles."""

    def __init__(self, access: AccessRegistry | None = None):
        self.access = access or AccessRegistry()
        self._bundles: dict[ContentAddress, bytes] = {}

    def __len__(self):
        return len(self._bundles)

    def __contains__(self, address: ContentAddress) -> bool:
        return address in self._bundles

    def addresses(self) -> list[ContentAddress]:
        return list(self._bundles)

    def put_bundle(self, bundle: RuleBundle, caller: str) -> ContentAddress:
        if not self.access.is_registered(caller):
            raise AccessDenied(f"Key {caller[:16]}... is not registered")
        data = bundle.serialize()
        address = content_address(data)
        if address not in self._bundles:
            self._bundles[address] = data
            logger.debug(f"Stored bundle {address.hex[:16]} ({len(data)} bytes)")
        return address

    def get_bundle_bytes(self, address: ContentAddress, caller: str) -> bytes:
        if not self.access.is_registered(caller):
            raise AccessDenied(f"Key {caller[:16]}... is not registered")
        if not self.access.is_subscribed(caller):
            raise AccessDenied(f"Key {caller[:16]}... is not subscribed")
        try:
            return self._bundles[address]
        except KeyError:
            raise NotFound(f"No bundle at address {address.hex}") from None

    def get_bundle(self, address: ContentAddress, caller: str) -> RuleBundle:
        return RuleBundle.deserialize(self.get_bundle_bytes(address, caller))

    def peek(self, address: ContentAddress) -> RuleBundle:
        """Read a bundle without access control, for contract-side checks."""
        try:
            return RuleBundle.deserialize(self._bundles[address])
        except KeyError:
            raise NotFound(f"No bundle at address {address.hex}") from None

    def audit(self) -> int:
        """Re-hash every stored bundle and compare it with its catalogue key.

        Returns the number of bundles checked.
        """
        for address, data in self._bundles.items():
            actual = content_address(data)
            if actual != address:
                raise InvariantViolation(
                    f"Bundle catalogued at {address.hex} hashes to {actual.hex}"
                )
        return len(self._bundles)

    def save(self, directory: Path | str):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for address, data in self._bundles.items():
            (directory / f"{address.hex}{BUNDLE_SUFFIX}").write_bytes(data)
        logger.debug(f"Wrote {len(self._bundles)} bundles to {directory}")

    @classmethod
    def load(
        cls, directory: Path | str, access: AccessRegistry | None = None
    ) -> BundleStore:
        """Load bundles from disk, keyed by their file names (not re-hashed)."""
        directory = Path(directory)
        if not directory.is_dir():
            raise FileNotFoundError(f"Bundle directory {directory} does not exist")
        store = cls(access)
        for path in sorted(directory.glob(f"*{BUNDLE_SUFFIX}")):
            try:
                address = ContentAddress.from_hex(path.stem)
            except DomainError as e:
                raise InvariantViolation(f"Bad bundle file name {path.name}") from e
            store._bundles[address] = path.read_bytes()
        return store
