from __future__ import annotations

import json
import threading
from collections import defaultdict, deque
from pathlib import Path
from typing import Callable, Iterable

from loguru import logger

from rulewarden.errors import (
    DomainError,
    InvariantViolation,
    NotFound,
    RejectReason,
    TransactionRejected,
)
from rulewarden.identity import ContentAddress
from rulewarden.rulestore import BundleStore
from rulewarden.trm import (
    ContributorReputation,
    RuleTrust,
    VoteScore,
    evaluate_votes,
    update_reputation,
)
from rulewarden.utils import canonical_json

from .state import DecisionRecord, Genesis, PendingRule, TrustLedgerState
from .transactions import (
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

EventCallback = Callable[[ChainEvent], None]


class Ledger:
    """Permissioned ledger hosting the trust-management and storage contracts.

    Transactions are applied one at a time, in submission order, through a single
    re-entrant lock. Only transactions that pass every precondition are appended
    to `log`; the ledger state is a pure fold over that log, see `replay()`.

    Events are delivered synchronously and exactly once, in sequence order, after
    the transaction that emitted them has been fully applied. Subscriber
    callbacks may submit further transactions.

    Args:
        genesis: validator keys, byzantine budget and TRM parameters.
        store: the bundle store. Registrations grant store access, and rule
            submissions are checked against it. Without a store (e.g. when
            replaying a bare log) the bundle checks are skipped.
    """

    def __init__(self, genesis: Genesis, store: BundleStore | None = None):
        self.genesis = genesis
        self.params = genesis.params
        self.store = store
        self.state = TrustLedgerState.from_genesis(genesis)
        self.log: list[ChainTransaction] = []
        self.events: list[ChainEvent] = []
        self.decisions: dict[ContentAddress, DecisionRecord] = {}

        self._subscribers: dict[EventKind, list[EventCallback]] = defaultdict(list)
        self._outbox: deque[ChainEvent] = deque()
        self._dispatching = False
        self._lock = threading.RLock()

        if store is not None:
            for key in genesis.validators:
                store.access.grant(key, subscribed=True)

    @property
    def n(self) -> int:
        return self.params.n_validators

    def subscribe(self, kind: EventKind, callback: EventCallback):
        self._subscribers[kind].append(callback)

    # ------------------------------------------------------------------
    # Public transaction interface
    # ------------------------------------------------------------------

    def register_node(
        self, request: RegistrationRequest, approver: str
    ) -> RegistrationResponse:
        return self._run(ChainTransaction.registration(request, approver))

    def submit_rule(self, tx: ChainTransaction) -> ChainEvent:
        if tx.kind is not TxKind.RULE_SUBMISSION:
            raise DomainError(f"submit_rule expects Tx_r, got {tx.kind.value}")
        return self._run(tx)

    def submit_vote(self, tx: ChainTransaction) -> ChainEvent | None:
        if tx.kind is not TxKind.VALIDATION_VOTE:
            raise DomainError(f"submit_vote expects Tx_c, got {tx.kind.value}")
        return self._run(tx)

    def apply(self, tx: ChainTransaction):
        """Apply any externally originated transaction."""
        return self._run(tx)

    def query_trust(
        self, subject: ContentAddress | str | bytes
    ) -> RuleTrust | ContributorReputation:
        """Read-only snapshot of a rule's trust or a contributor's reputation."""
        with self._lock:
            if isinstance(subject, ContentAddress):
                try:
                    return self.state.rule_trusts[subject]
                except KeyError:
                    raise NotFound(f"No decided rule at {subject.hex}") from None
            if isinstance(subject, bytes):
                subject = subject.hex()
            if subject in self.state.reputations:
                return self.state.reputations[subject]
            if self.state.registry.get(subject) == "contributor":
                return ContributorReputation.empty(subject)
            raise NotFound(f"No contributor with key {subject[:16]}...")

    # ------------------------------------------------------------------
    # Transaction application
    # ------------------------------------------------------------------

    def _run(self, tx: ChainTransaction):
        with self._lock:
            if tx.kind is TxKind.REGISTRATION:
                result = self._apply_registration(tx)
            elif tx.kind is TxKind.RULE_SUBMISSION:
                result = self._apply_submission(tx)
            elif tx.kind is TxKind.VALIDATION_VOTE:
                result = self._apply_vote(tx)
            else:
                raise TransactionRejected(
                    RejectReason.AUTH, "Tx_f can only be issued by the contract"
                )
            self._deliver()
            return result

    def _emit(self, kind: EventKind, address: ContentAddress) -> ChainEvent:
        event = ChainEvent(
            kind=kind,
            rule_address=address,
            emitted_at=len(self.log) - 1,
            sequence=len(self.events),
        )
        self.events.append(event)
        self._outbox.append(event)
        return event

    def _deliver(self):
        if self._dispatching:
            # An outer call is already draining the outbox.
            return
        self._dispatching = True
        try:
            while self._outbox:
                event = self._outbox.popleft()
                for callback in list(self._subscribers[event.kind]):
                    callback(event)
        finally:
            self._dispatching = False

    def _apply_registration(self, tx: ChainTransaction) -> RegistrationResponse:
        payload = tx.payload
        if not tx.verify():
            raise TransactionRejected(RejectReason.AUTH, "bad registration signature")
        if payload.approver not in self.state.validator_set:
            raise TransactionRejected(
                RejectReason.AUTH, "registrations must be approved by a validator"
            )
        if tx.sender in self.state.registry:
            raise TransactionRejected(
                RejectReason.KNOWN_IDENTITY, f"key {tx.sender[:16]}... is known"
            )

        self.log.append(tx)
        self.state.registry[tx.sender] = payload.role
        if self.store is not None:
            self.store.access.grant(tx.sender, subscribed=payload.role == "regular")
        logger.debug(f"Registered {payload.role} {tx.sender[:16]}")
        return RegistrationResponse(
            storage_endpoint=STORAGE_ENDPOINT,
            bootstrap_address=STORAGE_BOOTSTRAP,
            trm_contract=TRM_CONTRACT,
            str_contract=STR_CONTRACT,
        )

    def _apply_submission(self, tx: ChainTransaction) -> ChainEvent:
        address = tx.payload.address
        if not tx.verify():
            raise TransactionRejected(RejectReason.AUTH, "bad Tx_r signature")
        if self.state.registry.get(tx.sender) != "contributor":
            raise TransactionRejected(
                RejectReason.AUTH, "only registered contributors may submit rules"
            )
        if self.store is not None:
            if address not in self.store:
                raise TransactionRejected(
                    RejectReason.MISSING_BUNDLE, f"no bundle at {address.hex}"
                )
            if self.store.peek(address).contributor != tx.sender:
                raise TransactionRejected(
                    RejectReason.AUTH, "bundle was authored by a different key"
                )
        if address in self.state.pending_rules or address in self.state.r_db:
            raise TransactionRejected(
                RejectReason.DUPLICATE, f"rule {address.hex[:16]} already submitted"
            )

        self.log.append(tx)
        self.state.pending_rules[address] = PendingRule(contributor=tx.sender)
        logger.debug(f"Rule {address.hex[:16]} pending validation")
        return self._emit(EventKind.NEW_RULE_FOR_VALIDATION, address)

    def _apply_vote(self, tx: ChainTransaction) -> ChainEvent | None:
        payload = tx.payload
        address = payload.address
        if not tx.verify():
            raise TransactionRejected(RejectReason.AUTH, "bad Tx_c signature")
        if tx.sender not in self.state.validator_set:
            raise TransactionRejected(
                RejectReason.AUTH, "only validators may vote on rules"
            )
        pending = self.state.pending_rules.get(address)
        if pending is None:
            raise TransactionRejected(
                RejectReason.MISSING, f"rule {address.hex[:16]} is not pending"
            )
        if tx.sender in pending.votes:
            raise TransactionRejected(
                RejectReason.DOUBLE_VOTE,
                f"validator {tx.sender[:16]} already voted on {address.hex[:16]}",
            )
        vote = VoteScore(
            phi=payload.phi,
            s=payload.s,
            validator_index=self.state.validator_index(tx.sender),
        )

        self.log.append(tx)
        if pending.r_count < self.n - 1:
            pending.votes[tx.sender] = vote
            pending.r_count += 1
            return None

        # All validations received.
        pending.votes[tx.sender] = vote
        votes = tuple(sorted(pending.votes.values(), key=lambda v: v.validator_index))
        trust = evaluate_votes(votes, self.params)
        current = self.state.reputations.get(
            pending.contributor, ContributorReputation.empty(pending.contributor)
        )
        self.state.reputations[pending.contributor] = update_reputation(
            current, trust.t, self.params
        )
        self.state.rule_trusts[address] = trust
        del self.state.pending_rules[address]
        self.decisions[address] = DecisionRecord(
            address=address,
            contributor=pending.contributor,
            votes=votes,
            trust=trust,
        )
        logger.debug(
            f"Rule {address.hex[:16]} decided {trust.decision:+d} with t={trust.t:.4f}"
        )
        if not trust.accepted:
            return None

        self.log.append(
            ChainTransaction.rule_confirmation(address, trust.t, tx.timestamp)
        )
        self.state.r_db[address] = trust.t
        return self._emit(EventKind.RULE_CONFIRMED, address)

    # ------------------------------------------------------------------
    # Log export and replay
    # ------------------------------------------------------------------

    def state_hash(self) -> str:
        return self.state.state_hash()

    def export_log(self, path: Path | str):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for tx in self.log:
                f.write(canonical_json(tx.to_dict()))
                f.write("\n")

    @classmethod
    def replay(
        cls,
        genesis: Genesis,
        transactions: Iterable[ChainTransaction],
        store: BundleStore | None = None,
    ) -> Ledger:
        """Fold a transaction log from genesis into a fresh ledger.

        Confirmations are regenerated by the contract, so logged Tx_f entries are
        skipped on input and the regenerated log must match the given one exactly.
        """
        transactions = list(transactions)
        ledger = cls(genesis, store=store)
        for i, tx in enumerate(transactions):
            if tx.kind is TxKind.RULE_CONFIRMATION:
                continue
            try:
                ledger.apply(tx)
            except (TransactionRejected, DomainError) as e:
                raise InvariantViolation(
                    f"Logged transaction #{i} ({tx.kind.value}) rejected on replay: {e}"
                ) from e
        if ledger.log != transactions:
            mismatch = next(
                (
                    i
                    for i, (a, b) in enumerate(zip(ledger.log, transactions))
                    if a != b
                ),
                min(len(ledger.log), len(transactions)),
            )
            raise InvariantViolation(
                f"Replayed log diverges from the recorded log at entry #{mismatch}"
            )
        return ledger


def load_log(path: Path | str) -> list[ChainTransaction]:
    transactions = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                transactions.append(ChainTransaction.from_dict(json.loads(line)))
            except (KeyError, TypeError, ValueError) as e:
                raise InvariantViolation(
                    f"Unreadable transaction at {path}:{lineno}: {e!r}"
                ) from e
    return transactions
