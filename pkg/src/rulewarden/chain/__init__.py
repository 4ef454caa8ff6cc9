# ruff: noqa: F401
from .ledger import Ledger, load_log
from .state import DecisionRecord, Genesis, PendingRule, TrustLedgerState
from .transactions import (
    REGISTRABLE_ROLES,
    STORAGE_BOOTSTRAP,
    STORAGE_ENDPOINT,
    STR_CONTRACT,
    TRM_CONTRACT,
    ChainEvent,
    ChainTransaction,
    EventKind,
    RegistrationRequest,
    RegistrationResponse,
    TxKind,
)
