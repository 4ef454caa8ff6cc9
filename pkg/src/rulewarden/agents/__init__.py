# ruff: noqa: F401
from .agent import Agent, RejectionRecord, SimulationContext
from .contributor import ContributorAgent, contributor_step
from .profiles import (
    AgentProfile,
    Behavior,
    Rationale,
    Role,
    ScorePolicy,
    ValidationVerdict,
)
from .regular import RegularAgent, regular_step
from .validator import (
    WORST_CASE_INVALID_SCORE,
    WORST_CASE_VALID_SCORE,
    ValidatorAgent,
    validator_step,
)

AGENT_CLASSES = {
    Role.VALIDATOR: ValidatorAgent,
    Role.CONTRIBUTOR: ContributorAgent,
    Role.REGULAR: RegularAgent,
}


def make_agent(profile: AgentProfile, context: SimulationContext, rng) -> Agent:
    return AGENT_CLASSES[profile.role](profile, context, rng)
