from pathlib import Path

import numpy as np
from loguru import logger
from tqdm.auto import tqdm

from rulewarden.agents import (
    ContributorAgent,
    RegularAgent,
    Role,
    SimulationContext,
    ValidatorAgent,
    make_agent,
)
from rulewarden.chain import EventKind, Genesis, Ledger, TxKind
from rulewarden.errors import InvariantViolation
from rulewarden.identity import derive_seed, generate_keypair
from rulewarden.rulestore import BundleStore, RuleDispenser
from rulewarden.scenarios import ScenarioConfig

from ._shared import RunArtifacts, TrajectoryPoint, TrustTrajectory
from .emit_csv import main as emit_csv


def make_genesis(config: ScenarioConfig) -> Genesis:
    keys = tuple(
        generate_keypair(derive_seed(profile.key_seed)).public_hex
        for profile in config.validators
    )
    return Genesis(
        validators=keys, byzantine_budget=config.byzantine_budget, params=config.trm
    )


def check_conservation(ledger: Ledger):
    """Every confirmation shows up once as event, as Tx_f and in the rule database."""
    confirmed_events = sum(e.kind is EventKind.RULE_CONFIRMED for e in ledger.events)
    confirmations = [
        tx.payload.address
        for tx in ledger.log
        if tx.kind is TxKind.RULE_CONFIRMATION
    ]
    if len(set(confirmations)) != len(confirmations):
        raise InvariantViolation("A rule was confirmed more than once")
    if not confirmed_events == len(confirmations) == len(ledger.state.r_db):
        raise InvariantViolation(
            f"{confirmed_events} confirmation events, {len(confirmations)} Tx_f "
            f"and {len(ledger.state.r_db)} rules in the rule database"
        )


def main(
    config: ScenarioConfig,
    save_path: Path | str | None = None,
    pbar: bool = False,
) -> RunArtifacts:
    """Run a scenario: registration, then `config.rounds` rounds in which every
    contributor submits one rule that is validated and, if accepted, confirmed.

    If `save_path` is given, the artifacts are written there with `emit_csv`.
    """
    corpus = config.load_corpus()
    genesis = make_genesis(config)
    store = BundleStore()
    ledger = Ledger(genesis, store=store)
    context = SimulationContext(
        ledger=ledger,
        store=store,
        corpus=corpus,
        dispenser=RuleDispenser(corpus),
        regular_threshold=config.regular_threshold,
    )

    seeds = np.random.SeedSequence(config.seed).spawn(len(config.agents))
    agents = [
        make_agent(profile, context, np.random.default_rng(seed))
        for profile, seed in zip(config.agents, seeds)
    ]
    contributors = [a for a in agents if isinstance(a, ContributorAgent)]
    validators = [a for a in agents if isinstance(a, ValidatorAgent)]
    regulars = [a for a in agents if isinstance(a, RegularAgent)]
    # Contributors go first so a self-promoter hears about its rule before the
    # validators have decided it.
    for agent in [*contributors, *validators, *regulars]:
        agent.attach()

    logger.info(
        f"Running {config.name}: {len(validators)} validators, "
        f"{len(contributors)} contributors, {len(regulars)} regular nodes, "
        f"{config.rounds} rounds, seed {config.seed}"
    )
    for agent in agents:
        if agent.role is not Role.VALIDATOR:
            agent.register()

    trajectories: dict[str, TrustTrajectory] = {}
    for round in tqdm(range(1, config.rounds + 1), disable=not pbar, desc=config.name):
        context.round = round
        for agent in contributors:
            address = agent.contribute(round)
            if address is None or address not in ledger.decisions:
                continue
            key = agent.key.public_hex
            trajectory = trajectories.setdefault(
                key, TrustTrajectory(contributor=key, name=agent.name)
            )
            trajectory.series.append(
                TrajectoryPoint(
                    round=round,
                    t=ledger.decisions[address].trust.t,
                    T=ledger.state.reputations[key].T,
                )
            )

    check_conservation(ledger)
    logger.info(
        f"Finished {config.name}: {len(ledger.decisions)} rules decided, "
        f"{len(ledger.state.r_db)} confirmed, {len(context.rejections)} "
        "transactions refused"
    )

    artifacts = RunArtifacts(
        config=config,
        genesis=genesis,
        ledger=ledger,
        store=store,
        corpus=corpus,
        agents=agents,
        trajectories=trajectories,
        rejections=context.rejections,
    )
    if save_path is not None:
        emit_csv(artifacts, save_path)
    return artifacts
