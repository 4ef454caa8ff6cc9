from __future__ import annotations

import numpy as np

from rulewarden.chain import ChainEvent, ChainTransaction, EventKind
from rulewarden.errors import AccessDenied, TransactionRejected
from rulewarden.identity import ContentAddress
from rulewarden.rulestore import DetectionRule, RuleBundle, RuleMetadata, Severity

from .agent import Agent
from .profiles import Behavior, Role

_SEVERITY_BY_CLASSTYPE = {
    "attempted-admin": Severity.HIGH,
    "trojan-activity": Severity.HIGH,
    "web-application-attack": Severity.MEDIUM,
    "misc-activity": Severity.LOW,
}


class ContributorAgent(Agent):
    """A node that contributes detection rules, honestly or not."""

    role = Role.CONTRIBUTOR

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.submitted: list[RuleBundle] = []
        self.accepted: list[ContentAddress] = []

    def attach(self):
        if self.profile.behavior is Behavior.SELF_PROMOTER:
            self.ledger.subscribe(EventKind.NEW_RULE_FOR_VALIDATION, self._promote)

    def wants_valid_rule(self, round: int) -> bool:
        behavior = self.profile.behavior
        if behavior is Behavior.HONEST:
            return True
        if behavior is Behavior.TURNCOAT:
            return round <= self.profile.switch_at
        # Ballot stuffers build on one good rule, see `next_bundle`.
        return behavior is Behavior.BALLOT_STUFFER

    def next_bundle(
        self, round: int, rng: np.random.Generator | None = None
    ) -> RuleBundle | None:
        """The bundle this contributor submits in the given round."""
        rng = self.rng if rng is None else rng
        if self.profile.behavior is Behavior.BALLOT_STUFFER and self.submitted:
            first = self.submitted[0]
            if len(self.submitted) % 2 == 0:
                # Verbatim resubmission: same bytes, same content address.
                return first
            return self._bundle(first.rule.cosmetic_variant(rng))

        kind = "valid" if self.wants_valid_rule(round) else "invalid"
        return self._bundle(self.context.dispenser.draw(kind, rng))

    def _bundle(self, rule: DetectionRule) -> RuleBundle:
        classtype = rule.options.get("classtype", "unknown")
        metadata = RuleMetadata(
            classification=classtype,
            severity=_SEVERITY_BY_CLASSTYPE.get(classtype, Severity.MEDIUM),
            description=rule.msg or f"rule {rule.sid}",
            created_at=self.context.clock,
            analyzer_id=self.name,
        )
        return RuleBundle(rule=rule, metadata=metadata, contributor=self.key.public_hex)

    def contribute(self, round: int) -> ContentAddress | None:
        """Run one round: pick a bundle, store it and submit it for validation.

        Returns the rule's content address if the ledger accepted the submission.
        """
        if (
            self.profile.behavior is Behavior.WHITEWASHER
            and round == self.profile.rejoin_at
        ):
            self.new_identity("rejoin")
            self.register()

        bundle = self.next_bundle(round)
        if bundle is None:
            return None
        self.submitted.append(bundle)
        try:
            address = self.store.put_bundle(bundle, caller=self.key.public_hex)
        except AccessDenied as e:
            self.record_rejection("store", e)
            return None

        tx = ChainTransaction.rule_submission(self.key, address, self.context.tick())
        try:
            self.ledger.submit_rule(tx)
        except TransactionRejected as e:
            self.record_rejection(tx.kind.value, e)
            return None
        self.accepted.append(address)
        return address

    def _promote(self, event: ChainEvent):
        # Try to vote for our own rules; the contract only counts validators.
        bundle = self.store.peek(event.rule_address)
        if bundle.contributor != self.key.public_hex:
            return
        tx = ChainTransaction.validation_vote(
            self.key, 1, 1.0, event.rule_address, self.context.tick()
        )
        try:
            self.ledger.submit_vote(tx)
        except TransactionRejected as e:
            self.record_rejection(tx.kind.value, e)


def contributor_step(
    agent: ContributorAgent, round: int, rng: np.random.Generator | None = None
) -> RuleBundle | None:
    return agent.next_bundle(round, rng)
