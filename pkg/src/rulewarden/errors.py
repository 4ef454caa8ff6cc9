from enum import Enum


class RulewardenError(Exception):
    """Base class for all errors raised by rulewarden."""


class ConfigError(RulewardenError, ValueError):
    pass


class ContractViolation(RulewardenError, ValueError):
    pass


class DomainError(RulewardenError, ValueError):
    pass


class AccessDenied(RulewardenError, PermissionError):
    pass


class NotFound(RulewardenError, KeyError):
    pass


class InvariantViolation(RulewardenError, AssertionError):
    pass


class RejectReason(Enum):
    DUPLICATE = "rejected-duplicate"
    AUTH = "rejected-auth"
    MISSING_BUNDLE = "rejected-missing-bundle"
    DOUBLE_VOTE = "rejected-double-vote"
    MISSING = "rejected-missing"
    KNOWN_IDENTITY = "rejected-known-identity"


class TransactionRejected(RulewardenError):
    """Raised by the ledger when a transaction fails its preconditions.

    Rejected transactions never reach the log, so they cannot mutate ledger state.
    """

    def __init__(self, reason: RejectReason, message: str = ""):
        self.reason = reason
        super().__init__(f"{reason.value}: {message}" if message else reason.value)


# CLI exit codes, one per failure category.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_IO = 4
