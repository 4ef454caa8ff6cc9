from __future__ import annotations

from dataclasses import dataclass, field

from rulewarden.agents import (
    Agent,
    ContributorAgent,
    RegularAgent,
    RejectionRecord,
)
from rulewarden.chain import DecisionRecord, Genesis, Ledger, TxKind
from rulewarden.rulestore import BundleStore, RuleCorpus
from rulewarden.scenarios import ScenarioConfig


@dataclass(frozen=True)
class TrajectoryPoint:
    round: int
    t: float  # trust of the rule validated in this round
    T: float  # contributor reputation right after it


@dataclass
class TrustTrajectory:
    contributor: str  # hex-encoded public key
    name: str
    series: list[TrajectoryPoint] = field(default_factory=list)

    def __len__(self):
        return len(self.series)

    @property
    def final_T(self) -> float:
        return self.series[-1].T if self.series else 0.0

    def T_at(self, round: int) -> float:
        """Reputation after the last validation in or before `round`."""
        T = 0.0
        for point in self.series:
            if point.round > round:
                break
            T = point.T
        return T


@dataclass
class RunArtifacts:
    config: ScenarioConfig
    genesis: Genesis
    ledger: Ledger
    store: BundleStore
    corpus: RuleCorpus
    agents: list[Agent]
    trajectories: dict[str, TrustTrajectory]  # keyed by contributor key
    rejections: list[RejectionRecord]

    @property
    def decisions(self) -> list[DecisionRecord]:
        return list(self.ledger.decisions.values())

    @property
    def contributors(self) -> list[ContributorAgent]:
        return [a for a in self.agents if isinstance(a, ContributorAgent)]

    @property
    def regulars(self) -> list[RegularAgent]:
        return [a for a in self.agents if isinstance(a, RegularAgent)]

    def agent(self, name: str) -> Agent:
        for agent in self.agents:
            if agent.name == name:
                return agent
        raise KeyError(name)

    def trajectories_of(self, name: str) -> list[TrustTrajectory]:
        """All trajectories of an agent, one per identity it used."""
        return [t for t in self.trajectories.values() if t.name == name]

    def trajectory(self, name: str) -> TrustTrajectory:
        """The trajectory of the agent's first identity."""
        agent = self.agent(name)
        return self.trajectories[agent.identities[0].public_hex]

    @property
    def r_loc(self) -> dict[str, set]:
        return {agent.name: set(agent.r_loc) for agent in self.regulars}

    def summary(self) -> list[tuple[str, str, str, object]]:
        """Rows of (metric, subject, key, value)."""
        rows = []
        for agent in self.contributors:
            for key in agent.identities:
                reputation = self.ledger.state.reputations.get(key.public_hex)
                T, m = (reputation.T, reputation.m) if reputation else (0.0, 0)
                rows.append(("final_T", agent.name, key.public_hex, T))
                rows.append(("contributions", agent.name, key.public_hex, m))
        for agent in self.regulars:
            key = agent.key.public_hex
            rows.append(("r_loc_size", agent.name, key, len(agent.r_loc)))
        n_confirmations = sum(
            tx.kind is TxKind.RULE_CONFIRMATION for tx in self.ledger.log
        )
        rows += [
            ("r_db_size", "ledger", "", len(self.ledger.state.r_db)),
            ("confirmations", "ledger", "", n_confirmations),
            ("decisions", "ledger", "", len(self.ledger.decisions)),
            ("rejections", "ledger", "", len(self.rejections)),
            ("transactions", "ledger", "", len(self.ledger.log)),
            ("state_hash", "ledger", "", self.ledger.state_hash()),
        ]
        return rows
