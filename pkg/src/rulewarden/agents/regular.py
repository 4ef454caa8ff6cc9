from __future__ import annotations

from loguru import logger

from rulewarden.chain import ChainEvent, EventKind
from rulewarden.errors import AccessDenied, NotFound
from rulewarden.identity import ContentAddress
from rulewarden.rulestore import DetectionRule

from .agent import Agent
from .profiles import Role


class RegularAgent(Agent):
    """A passive node that keeps a local subset of the confirmed rules."""

    role = Role.REGULAR

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.r_loc: dict[ContentAddress, DetectionRule] = {}
        self.skipped: list[ContentAddress] = []

    def attach(self):
        self.ledger.subscribe(EventKind.RULE_CONFIRMED, self.on_rule_confirmed)

    def on_rule_confirmed(self, event: ChainEvent):
        self.consider(event, self.context.regular_threshold)

    def consider(self, event: ChainEvent, threshold: float) -> bool:
        """Include the confirmed rule if both it and its contributor are trusted
        enough. Returns whether the rule was included."""
        address = event.rule_address
        try:
            bundle = self.store.get_bundle(address, self.key.public_hex)
        except (AccessDenied, NotFound) as e:
            logger.warning(f"{self.name} could not retrieve {address}: {e}")
            return False

        rule_trust = self.ledger.query_trust(address)
        reputation = self.ledger.query_trust(bundle.contributor)
        if rule_trust.t >= threshold and reputation.T >= threshold:
            self.r_loc[address] = bundle.rule
            return True
        logger.debug(
            f"{self.name} skips {address.hex[:16]} (t={rule_trust.t:.3f}, "
            f"T={reputation.T:.3f}, threshold={threshold})"
        )
        self.skipped.append(address)
        return False


def regular_step(agent: RegularAgent, event: ChainEvent, threshold: float) -> bool:
    return agent.consider(event, threshold)
