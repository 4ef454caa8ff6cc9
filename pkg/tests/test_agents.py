import dataclasses

import numpy as np
import pytest

from rulewarden.agents import (
    WORST_CASE_INVALID_SCORE,
    AgentProfile,
    Behavior,
    ContributorAgent,
    Rationale,
    Role,
    ScorePolicy,
    SimulationContext,
    ValidatorAgent,
    contributor_step,
    make_agent,
    regular_step,
    validator_step,
)
from rulewarden.chain import EventKind, Genesis, Ledger, TxKind
from rulewarden.errors import ConfigError
from rulewarden.identity import derive_seed, generate_keypair
from rulewarden.rulestore import BundleStore, RuleDispenser
from rulewarden.trm import TrmParams


def validator_profiles(last: Behavior = Behavior.HONEST, target=None):
    profiles = [
        AgentProfile(
            name=f"cv{i}", role=Role.VALIDATOR, score_policy=ScorePolicy.constant()
        )
        for i in range(1, 4)
    ]
    profiles.append(
        AgentProfile(
            name="cv4",
            role=Role.VALIDATOR,
            behavior=last,
            target=target,
            score_policy=ScorePolicy.constant(),
        )
    )
    return profiles


def build_world(corpus, profiles, seed=0):
    validators = [p for p in profiles if p.role is Role.VALIDATOR]
    genesis = Genesis(
        validators=tuple(
            generate_keypair(derive_seed(p.key_seed)).public_hex for p in validators
        ),
        byzantine_budget=1,
        params=TrmParams(),
    )
    store = BundleStore()
    ledger = Ledger(genesis, store=store)
    context = SimulationContext(
        ledger=ledger, store=store, corpus=corpus, dispenser=RuleDispenser(corpus)
    )
    agents = {
        p.name: make_agent(p, context, np.random.default_rng([seed, i]))
        for i, p in enumerate(profiles)
    }
    for role in (Role.CONTRIBUTOR, Role.VALIDATOR, Role.REGULAR):
        for agent in agents.values():
            if agent.role is role:
                agent.attach()
    for agent in agents.values():
        agent.register()
    return context, agents


def contributor(name, behavior=Behavior.HONEST, **kwargs):
    return AgentProfile(name=name, role=Role.CONTRIBUTOR, behavior=behavior, **kwargs)


REGULAR = AgentProfile(name="cr1", role=Role.REGULAR)


class TestScorePolicy:
    @staticmethod
    @pytest.mark.parametrize(
        "valid, invalid",
        [
            ((0.4, 1.0), (0.0, 0.1)),
            ((0.9, 1.1), (0.0, 0.1)),
            ((1.0, 0.9), (0.0, 0.1)),
            ((0.9, 1.0), (0.0, 0.5)),
            ((0.9, 1.0), (-0.1, 0.1)),
        ],
    )
    def test_invalid_bands(valid, invalid):
        with pytest.raises(ConfigError):
            ScorePolicy(valid=valid, invalid=invalid)

    @staticmethod
    def test_constant():
        policy = ScorePolicy.constant(1.0, 0.05)
        rng = np.random.default_rng(0)
        assert policy.draw(1, rng) == 1.0
        assert policy.draw(-1, rng) == 0.05

    @staticmethod
    def test_uniform_stays_in_band():
        policy = ScorePolicy.uniform()
        rng = np.random.default_rng(0)
        for _ in range(1000):
            assert 0.9 <= policy.draw(1, rng) <= 1.0
            assert 0.0 <= policy.draw(-1, rng) <= 0.1

    @staticmethod
    def test_dict_form():
        policy = ScorePolicy(valid=(0.6, 0.8), invalid=(0.2, 0.3))
        assert ScorePolicy.from_dict(policy.to_dict()) == policy


class TestAgentProfile:
    @staticmethod
    def test_defaults():
        profile = AgentProfile(name="cc1", role="contributor")
        assert profile.role is Role.CONTRIBUTOR
        assert profile.behavior is Behavior.HONEST
        assert profile.key_seed == "cc1"
        assert not profile.adversarial

    @staticmethod
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"name": "", "role": Role.REGULAR},
            {"name": "x", "role": Role.REGULAR, "behavior": Behavior.TURNCOAT},
            {"name": "x", "role": Role.VALIDATOR, "behavior": Behavior.WHITEWASHER},
            {"name": "x", "role": Role.CONTRIBUTOR, "behavior": Behavior.BYZANTINE},
            {"name": "x", "role": Role.CONTRIBUTOR, "behavior": Behavior.TURNCOAT},
            {
                "name": "x",
                "role": Role.CONTRIBUTOR,
                "behavior": Behavior.WHITEWASHER,
                "rejoin_at": 1,
            },
            {"name": "x", "role": Role.VALIDATOR, "behavior": Behavior.BAD_MOUTHER},
            {"name": "x", "role": Role.VALIDATOR, "register": False},
        ],
    )
    def test_invalid(kwargs):
        with pytest.raises(ConfigError):
            AgentProfile(**kwargs)

    @staticmethod
    def test_from_dict():
        profile = AgentProfile.from_dict(
            {
                "name": "cv1",
                "role": "validator",
                "score_policy": {"valid": [1.0, 1.0], "invalid": [0.0, 0.0]},
            }
        )
        assert profile.score_policy == ScorePolicy.constant()
        assert AgentProfile.from_dict(profile.to_dict()) == profile

    @staticmethod
    @pytest.mark.parametrize(
        "data",
        [
            {"name": "x", "role": "validator", "colour": "red"},
            {"name": "x", "role": "miner"},
            {"name": "x", "role": "contributor", "behavior": "sneaky"},
            {"role": "contributor"},
        ],
    )
    def test_from_dict_errors(data):
        with pytest.raises(ConfigError):
            AgentProfile.from_dict(data)


class TestHonestFlow:
    @staticmethod
    @pytest.fixture
    def world(corpus):
        profiles = validator_profiles() + [
            contributor("cc1"),
            contributor("cc2", Behavior.ALWAYS_MALICIOUS),
            REGULAR,
        ]
        return build_world(corpus, profiles)

    @staticmethod
    def test_role_mismatch(world):
        context, _ = world
        with pytest.raises(TypeError):
            ValidatorAgent(contributor("cc9"), context, np.random.default_rng(0))

    @staticmethod
    def test_registration(world):
        context, agents = world
        registry = context.ledger.state.registry
        assert registry[agents["cc1"].key.public_hex] == "contributor"
        assert registry[agents["cr1"].key.public_hex] == "regular"
        assert context.identities[agents["cv1"].key.public_hex] == "cv1"

    @staticmethod
    def test_valid_rule_is_accepted(world):
        context, agents = world
        address = agents["cc1"].contribute(1)
        record = context.ledger.decisions[address]
        assert record.trust.accepted
        assert record.trust.t == pytest.approx(0.85)
        assert all(
            v.rationale is Rationale.MATCHES_GROUND_TRUTH
            for name in ("cv1", "cv2", "cv3", "cv4")
            for v in agents[name].verdicts
        )
        rep = context.ledger.query_trust(agents["cc1"].key.public_hex)
        assert rep.T == pytest.approx(0.1275)

    @staticmethod
    def test_invalid_rule_is_rejected(world):
        context, agents = world
        address = agents["cc2"].contribute(1)
        record = context.ledger.decisions[address]
        assert record.trust.decision == -1
        assert record.trust.t == 0.0
        assert address not in context.ledger.state.r_db

    @staticmethod
    def test_regular_threshold(world):
        context, agents = world
        address = agents["cc1"].contribute(1)
        regular = agents["cr1"]
        # T = 0.1275 after a single rule
        assert regular.skipped == [address]
        assert not regular.r_loc

        event = next(
            e for e in context.ledger.events if e.kind is EventKind.RULE_CONFIRMED
        )
        assert regular_step(regular, event, threshold=0.1)
        assert address in regular.r_loc

    @staticmethod
    def test_second_registration_is_refused(world):
        context, agents = world
        assert agents["cc1"].register() is None
        record = context.rejections[-1]
        assert record.to_dict() == {
            "round": 0,
            "agent": "cc1",
            "kind": "registration",
            "reason": "rejected-known-identity",
        }

    @staticmethod
    def test_logical_clock(world):
        context, agents = world
        for round in range(1, 4):
            context.round = round
            agents["cc1"].contribute(round)
            agents["cc2"].contribute(round)
        log = context.ledger.log
        stamps = [tx.timestamp for tx in log]
        assert stamps == sorted(stamps)
        node_stamps = [
            tx.timestamp for tx in log if tx.kind is not TxKind.RULE_CONFIRMATION
        ]
        assert len(set(node_stamps)) == len(node_stamps)


class TestValidatorBehaviors:
    @staticmethod
    def test_duplicate_is_voted_down(corpus):
        context, agents = build_world(
            corpus, validator_profiles() + [contributor("cc1")]
        )
        bundle = contributor_step(agents["cc1"], 1)
        validator = agents["cv1"]
        first = validator_step(validator, bundle)
        assert (first.phi, first.rationale) == (1, Rationale.MATCHES_GROUND_TRUTH)
        again = validator_step(validator, bundle)
        assert (again.phi, again.rationale) == (-1, Rationale.DUPLICATE_DETECTED)

    @staticmethod
    def test_cosmetic_variant_is_voted_down(corpus):
        context, agents = build_world(
            corpus, validator_profiles() + [contributor("cc1")]
        )
        bundle = contributor_step(agents["cc1"], 1)
        validator = agents["cv1"]
        validator_step(validator, bundle)
        variant = dataclasses.replace(
            bundle, rule=bundle.rule.cosmetic_variant(np.random.default_rng(0))
        )
        assert variant.rule.rule_text != bundle.rule.rule_text
        verdict = validator.judge(variant)
        assert (verdict.phi, verdict.rationale) == (-1, Rationale.DUPLICATE_DETECTED)

    @staticmethod
    def test_byzantine(corpus):
        context, agents = build_world(
            corpus, validator_profiles(Behavior.BYZANTINE) + [contributor("cc1")]
        )
        address = agents["cc1"].contribute(1)
        verdict = agents["cv4"].verdicts[0]
        assert verdict.phi == -1
        assert verdict.s == WORST_CASE_INVALID_SCORE
        assert verdict.rationale is Rationale.ADVERSARIAL_OVERRIDE
        assert context.ledger.decisions[address].trust.accepted

    @staticmethod
    def test_bad_mouther_only_hits_target(corpus):
        profiles = validator_profiles(Behavior.BAD_MOUTHER, target="cc1") + [
            contributor("cc1"),
            contributor("cc2"),
        ]
        context, agents = build_world(corpus, profiles)
        target_rule = agents["cc1"].contribute(1)
        other_rule = agents["cc2"].contribute(1)
        against, neutral = agents["cv4"].verdicts
        assert against.phi == -1
        assert against.rationale is Rationale.ADVERSARIAL_OVERRIDE
        assert neutral.phi == 1
        decisions = context.ledger.decisions
        assert decisions[target_rule].trust.t == pytest.approx(0.6375)
        assert decisions[target_rule].trust.accepted
        assert decisions[other_rule].trust.t == pytest.approx(0.85)


class TestContributorBehaviors:
    @staticmethod
    def test_turncoat(corpus):
        context, agents = build_world(
            corpus,
            validator_profiles()
            + [contributor("cc2", Behavior.TURNCOAT, switch_at=2)],
        )
        agent = agents["cc2"]
        valid = corpus.valid_forms
        kinds = [
            contributor_step(agent, round).rule.canonical_form in valid
            for round in range(1, 5)
        ]
        assert kinds == [True, True, False, False]

    @staticmethod
    def test_self_promoter(corpus):
        context, agents = build_world(
            corpus,
            validator_profiles() + [contributor("sp", Behavior.SELF_PROMOTER)],
        )
        address = agents["sp"].contribute(1)
        rejection = context.rejections[-1]
        assert (rejection.agent, rejection.kind, rejection.reason) == (
            "sp",
            "Tx_c",
            "rejected-auth",
        )
        record = context.ledger.decisions[address]
        assert record.trust.decision == -1
        assert len(record.votes) == 4

    @staticmethod
    def test_ballot_stuffer(corpus):
        context, agents = build_world(
            corpus,
            validator_profiles() + [contributor("stuffer", Behavior.BALLOT_STUFFER)],
        )
        stuffer = agents["stuffer"]
        first = stuffer.contribute(1)
        assert context.ledger.decisions[first].trust.accepted

        variant = stuffer.contribute(2)
        assert variant is not None and variant != first
        assert context.ledger.decisions[variant].trust.decision == -1
        assert agents["cv1"].verdicts[-1].rationale is Rationale.DUPLICATE_DETECTED

        assert stuffer.contribute(3) is None
        assert context.rejections[-1].reason == "rejected-duplicate"
        assert stuffer.submitted[2] == stuffer.submitted[0]

    @staticmethod
    def test_whitewasher(corpus):
        context, agents = build_world(
            corpus,
            validator_profiles()
            + [contributor("washer", Behavior.WHITEWASHER, rejoin_at=2)],
        )
        washer = agents["washer"]
        old_key = washer.key.public_hex
        washer.contribute(1)
        second = washer.contribute(2)
        new_key = washer.key.public_hex

        assert new_key != old_key
        assert [k.public_hex for k in washer.identities] == [old_key, new_key]
        assert context.identities[new_key] == "washer"
        assert context.ledger.state.registry[new_key] == "contributor"
        assert context.ledger.decisions[second].contributor == new_key
        assert context.ledger.query_trust(new_key).m == 1
        assert context.ledger.query_trust(old_key).m == 1

    @staticmethod
    def test_unregistered_contributor(corpus):
        context, agents = build_world(
            corpus, validator_profiles() + [contributor("ghost", register=False)]
        )
        assert agents["ghost"].contribute(1) is None
        rejection = context.rejections[-1]
        assert (rejection.kind, rejection.reason) == ("store", "AccessDenied")
        assert not context.ledger.decisions

    @staticmethod
    def test_repr(corpus):
        _, agents = build_world(corpus, validator_profiles() + [contributor("cc1")])
        assert isinstance(agents["cc1"], ContributorAgent)
        assert "cc1" in repr(agents["cc1"])
        assert "honest" in repr(agents["cc1"])
