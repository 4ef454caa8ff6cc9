from __future__ import annotations

import math

import numpy as np
from loguru import logger

from rulewarden.chain import ChainEvent, ChainTransaction, EventKind
from rulewarden.errors import AccessDenied, NotFound, TransactionRejected
from rulewarden.rulestore import RuleBundle, is_duplicate
from rulewarden.trm import VALID_SCORE_CUTOFF

from .agent import Agent
from .profiles import Behavior, Rationale, Role, ValidationVerdict

# Scores a byzantine validator uses to push the weighted majority as far as a
# band-consistent vote allows.
WORST_CASE_VALID_SCORE = 1.0
WORST_CASE_INVALID_SCORE = math.nextafter(VALID_SCORE_CUTOFF, 0.0)


class ValidatorAgent(Agent):
    """A validator checking submitted rules against its local ground truth.

    The ground truth is the corpus' set of valid canonical forms; a rule whose
    canonical form the validator has already judged is a duplicate.
    """

    role = Role.VALIDATOR

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.seen: set[str] = set()
        self.verdicts: list[ValidationVerdict] = []

    def attach(self):
        self.ledger.subscribe(EventKind.NEW_RULE_FOR_VALIDATION, self.on_new_rule)

    def honest_verdict(self, bundle: RuleBundle) -> tuple[int, Rationale]:
        if is_duplicate(bundle.rule, self.seen):
            return -1, Rationale.DUPLICATE_DETECTED
        if bundle.rule.canonical_form in self.context.corpus.valid_forms:
            return 1, Rationale.MATCHES_GROUND_TRUTH
        return -1, Rationale.CONTRADICTS_GROUND_TRUTH

    def judge(
        self, bundle: RuleBundle, rng: np.random.Generator | None = None
    ) -> ValidationVerdict:
        rng = self.rng if rng is None else rng
        policy = self.profile.score_policy
        phi, rationale = self.honest_verdict(bundle)
        self.seen.add(bundle.rule.canonical_form)

        behavior = self.profile.behavior
        if behavior is Behavior.BYZANTINE:
            phi = -phi
            s = WORST_CASE_VALID_SCORE if phi == 1 else WORST_CASE_INVALID_SCORE
            return ValidationVerdict(phi, s, Rationale.ADVERSARIAL_OVERRIDE)
        if (
            behavior is Behavior.BAD_MOUTHER
            and self.context.identities.get(bundle.contributor) == self.profile.target
        ):
            return ValidationVerdict(
                -1, policy.draw(-1, rng), Rationale.ADVERSARIAL_OVERRIDE
            )
        return ValidationVerdict(phi, policy.draw(phi, rng), rationale)

    def on_new_rule(self, event: ChainEvent):
        try:
            bundle = self.store.get_bundle(event.rule_address, self.key.public_hex)
        except (AccessDenied, NotFound) as e:
            logger.warning(f"{self.name} could not fetch {event.rule_address}: {e}")
            return
        verdict = self.judge(bundle)
        self.verdicts.append(verdict)
        tx = ChainTransaction.validation_vote(
            self.key, verdict.phi, verdict.s, event.rule_address, self.context.tick()
        )
        try:
            self.ledger.submit_vote(tx)
        except TransactionRejected as e:
            self.record_rejection(tx.kind.value, e)


def validator_step(
    agent: ValidatorAgent, rule: RuleBundle, rng: np.random.Generator | None = None
) -> ValidationVerdict:
    return agent.judge(rule, rng)
