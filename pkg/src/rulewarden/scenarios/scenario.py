from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from loguru import logger

from rulewarden.agents import AgentProfile, Behavior, Role
from rulewarden.errors import ConfigError
from rulewarden.rulestore import RuleCorpus
from rulewarden.trm import TrmParams, validate_validator_count

MAX_SEED = 2**64


@dataclass(kw_only=True)
class ScenarioConfig:
    """A complete, reproducible description of one simulation run.

    Args:
        seed: master seed; every agent draws from its own generator spawned from it.
        trm: parameters of the trust management contract.
        byzantine_budget: number of faulty validators the network must tolerate.
        agents: every node of the network. Validators are listed in validator-index
            order and must number exactly `trm.n_validators`.
        rounds: how many submit-validate-confirm cycles each contributor runs.
        corpus_path: directory with `valid/` and `invalid/` rule files. If None,
            a synthetic corpus just large enough for the scenario is generated.
        output_path: where `emit_csv` writes artifacts, see `default_output_dir`.
        regular_threshold: minimum rule trust and contributor reputation for a
            regular node to include a confirmed rule locally.
        name: label used in logs and as sub-directory in sweeps.
        plot: also render the trust trajectories as a PDF.
    """

    seed: int = 0
    trm: TrmParams = field(default_factory=TrmParams)
    byzantine_budget: int = 1
    agents: list[AgentProfile]
    rounds: int = 55
    corpus_path: Path | None = None
    output_path: Path | None = None
    regular_threshold: float = 0.5
    name: str = "scenario"
    plot: bool = False

    def __post_init__(self):
        if self.corpus_path is not None:
            self.corpus_path = Path(self.corpus_path)
        if self.output_path is not None:
            self.output_path = Path(self.output_path)

        if not isinstance(self.seed, int) or not 0 <= self.seed < MAX_SEED:
            raise ConfigError(
                f"seed must be a 64-bit unsigned integer, got {self.seed}"
            )
        if not isinstance(self.rounds, int) or self.rounds < 1:
            raise ConfigError(f"rounds must be a positive integer, got {self.rounds}")
        if not 0.0 <= self.regular_threshold <= 1.0:
            raise ConfigError(
                f"regular_threshold must be in [0, 1], got {self.regular_threshold}"
            )

        names = [agent.name for agent in self.agents]
        if len(set(names)) != len(names):
            raise ConfigError("Agent names must be unique")
        seeds = [str(agent.key_seed) for agent in self.agents]
        if len(set(seeds)) != len(seeds):
            raise ConfigError("Agent key seeds must be unique")

        n_validators = len(self.validators)
        if n_validators != self.trm.n_validators:
            raise ConfigError(
                f"Scenario has {n_validators} validators, but the TRM parameters "
                f"expect n_validators={self.trm.n_validators}"
            )
        validate_validator_count(n_validators, self.byzantine_budget)
        if not self.contributors:
            raise ConfigError("Scenario needs at least one contributor")

        contributor_names = {agent.name for agent in self.contributors}
        for agent in self.validators:
            if agent.target is not None and agent.target not in contributor_names:
                raise ConfigError(
                    f"{agent.name} targets {agent.target!r}, which is not a "
                    "contributor"
                )
        faulty = sum(agent.adversarial for agent in self.validators)
        if faulty > self.byzantine_budget:
            logger.warning(
                f"{faulty} adversarial validators exceed the byzantine budget "
                f"of {self.byzantine_budget}"
            )

    def _by_role(self, role: Role) -> list[AgentProfile]:
        return [agent for agent in self.agents if agent.role is role]

    @property
    def validators(self) -> list[AgentProfile]:
        return self._by_role(Role.VALIDATOR)

    @property
    def contributors(self) -> list[AgentProfile]:
        return self._by_role(Role.CONTRIBUTOR)

    @property
    def regulars(self) -> list[AgentProfile]:
        return self._by_role(Role.REGULAR)

    def rule_demand(self) -> tuple[int, int]:
        """Number of (valid, invalid) corpus rules the scenario can draw at most."""
        n_valid = n_invalid = 0
        for agent in self.contributors:
            behavior = agent.behavior
            if behavior is Behavior.HONEST:
                n_valid += self.rounds
            elif behavior is Behavior.TURNCOAT:
                honest_rounds = min(self.rounds, agent.switch_at)
                n_valid += honest_rounds
                n_invalid += self.rounds - honest_rounds
            elif behavior is Behavior.BALLOT_STUFFER:
                n_valid += 1
            else:
                n_invalid += self.rounds
        return n_valid, n_invalid

    def load_corpus(self) -> RuleCorpus:
        n_valid, n_invalid = self.rule_demand()
        if self.corpus_path is None:
            return RuleCorpus.synthesize(n_valid, n_invalid, seed=self.seed)
        if not self.corpus_path.is_dir():
            raise ConfigError(f"Corpus directory {self.corpus_path} does not exist")
        corpus = RuleCorpus.from_directory(self.corpus_path)
        if len(corpus.valid) < n_valid or len(corpus.invalid) < n_invalid:
            raise ConfigError(
                f"Scenario {self.name} needs {n_valid} valid and {n_invalid} invalid "
                f"rules, corpus {self.corpus_path} has {len(corpus.valid)} and "
                f"{len(corpus.invalid)}"
            )
        return corpus

    def replace(self, **changes) -> ScenarioConfig:
        """Copy with some fields changed; None values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "trm": self.trm.to_dict(),
            "byzantine_budget": self.byzantine_budget,
            "agents": [agent.to_dict() for agent in self.agents],
            "rounds": self.rounds,
            "corpus_path": str(self.corpus_path) if self.corpus_path else None,
            "output_path": str(self.output_path) if self.output_path else None,
            "regular_threshold": self.regular_threshold,
            "plot": self.plot,
        }

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> ScenarioConfig:
        """Build a config from parsed scenario data.

        Relative paths are resolved against `base_dir` (the scenario file's
        directory) if given.
        """
        data = dict(data)
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"Unknown scenario fields: {sorted(unknown)}")
        if "agents" not in data:
            raise ConfigError("Scenario must list its agents")
        if not isinstance(data["agents"], list):
            raise ConfigError("Scenario field 'agents' must be a list")
        data["agents"] = [AgentProfile.from_dict(agent) for agent in data["agents"]]
        if "trm" in data:
            data["trm"] = TrmParams.from_dict(data["trm"])
        for key in ("corpus_path", "output_path"):
            if data.get(key) is not None:
                path = Path(data[key])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                data[key] = path
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(f"Invalid scenario: {e}") from e

    @classmethod
    def from_file(cls, path: Path | str) -> ScenarioConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"Scenario file {path} does not exist") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Scenario file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Scenario file {path} must contain a JSON object")
        return cls.from_dict(data, base_dir=path.parent)
