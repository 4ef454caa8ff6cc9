import json
from pathlib import Path

import pytest

from rulewarden import scenarios, scripts
from rulewarden.agents import AgentProfile, Behavior, Role, ScorePolicy
from rulewarden.errors import ConfigError
from rulewarden.scenarios import ScenarioConfig
from rulewarden.trm import direct_reputation, within_reputation_bounds

CONFIGS = Path(__file__).parents[1] / "configs"


def minimal_scenario(**overrides) -> dict:
    data = {
        "name": "minimal",
        "rounds": 3,
        "agents": [
            *({"name": f"cv{i}", "role": "validator"} for i in range(1, 5)),
            {"name": "cc1", "role": "contributor"},
        ],
    }
    data.update(overrides)
    return data


class TestScenarioConfig:
    @staticmethod
    def test_from_dict():
        config = ScenarioConfig.from_dict(minimal_scenario(trm={"gamma": 0.8}))
        assert config.trm.gamma == 0.8
        assert [a.name for a in config.validators] == ["cv1", "cv2", "cv3", "cv4"]
        assert [a.name for a in config.contributors] == ["cc1"]
        assert config.regulars == []
        assert config.rule_demand() == (3, 0)

    @staticmethod
    @pytest.mark.parametrize(
        "overrides",
        [
            {"rounds": 0},
            {"seed": -1},
            {"seed": 2**64},
            {"regular_threshold": 1.5},
            {"trm": {"n_validators": 7}},
            {"byzantine_budget": 2},
            {"colour": "red"},
            {"agents": {"cv1": "validator"}},
            {"agents": [{"name": "cc1", "role": "contributor"}]},
            {
                "agents": [
                    *({"name": f"cv{i}", "role": "validator"} for i in range(1, 5)),
                    {"name": "cr1", "role": "regular"},
                ]
            },
            {
                "agents": [
                    *({"name": f"cv{i}", "role": "validator"} for i in range(1, 5)),
                    {"name": "cc1", "role": "contributor"},
                    {"name": "cc1", "role": "regular"},
                ]
            },
            {
                "agents": [
                    *({"name": f"cv{i}", "role": "validator"} for i in range(1, 5)),
                    {"name": "cc1", "role": "contributor", "key_seed": "cv1"},
                ]
            },
            {
                "agents": [
                    *({"name": f"cv{i}", "role": "validator"} for i in range(1, 4)),
                    {
                        "name": "cv4",
                        "role": "validator",
                        "behavior": "bad_mouther",
                        "target": "nobody",
                    },
                    {"name": "cc1", "role": "contributor"},
                ]
            },
        ],
    )
    def test_invalid(overrides):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_dict(minimal_scenario(**overrides))

    @staticmethod
    def test_missing_agents():
        with pytest.raises(ConfigError):
            ScenarioConfig.from_dict({"rounds": 3})

    @staticmethod
    def test_over_budget_is_allowed():
        data = minimal_scenario()
        for i in (2, 3):
            data["agents"][i]["behavior"] = "byzantine"
        config = ScenarioConfig.from_dict(data)
        assert sum(a.adversarial for a in config.validators) == 2

    @staticmethod
    def test_from_file(tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(minimal_scenario(corpus_path="corpus")))
        config = ScenarioConfig.from_file(path)
        assert config.corpus_path == tmp_path / "corpus"

    @staticmethod
    def test_from_file_errors(tmp_path):
        with pytest.raises(ConfigError, match="does not exist"):
            ScenarioConfig.from_file(tmp_path / "missing.json")
        (tmp_path / "broken.json").write_text("{")
        with pytest.raises(ConfigError, match="not valid JSON"):
            ScenarioConfig.from_file(tmp_path / "broken.json")
        (tmp_path / "list.json").write_text("[]")
        with pytest.raises(ConfigError):
            ScenarioConfig.from_file(tmp_path / "list.json")

    @staticmethod
    def test_dict_form_is_stable():
        config = scenarios.bad_mouthing(rounds=4)
        again = ScenarioConfig.from_dict(config.to_dict())
        assert again.to_dict() == config.to_dict()
        assert again.validators[-1].behavior is Behavior.BAD_MOUTHER

    @staticmethod
    def test_replace():
        config = ScenarioConfig.from_dict(minimal_scenario())
        changed = config.replace(seed=9, output_path=None, plot=None)
        assert changed.seed == 9
        assert changed.output_path is None and not changed.plot
        assert config.seed == 0

    @staticmethod
    def test_corpus(corpus_path, tmp_path):
        config = ScenarioConfig.from_dict(minimal_scenario(corpus_path=corpus_path))
        assert len(config.load_corpus().valid) == 12
        with pytest.raises(ConfigError, match="does not exist"):
            config.replace(corpus_path=tmp_path / "missing").load_corpus()
        with pytest.raises(ConfigError, match="needs"):
            config.replace(rounds=13).load_corpus()

    @staticmethod
    def test_synthetic_corpus_fits_demand():
        config = scenarios.mixed_contributors()
        corpus = config.load_corpus()
        assert config.rule_demand() == (80, 85)
        assert (len(corpus.valid), len(corpus.invalid)) == (80, 85)


class TestPresets:
    @staticmethod
    @pytest.mark.parametrize("name", sorted(scenarios.PRESETS))
    def test_presets_are_valid(name):
        config = scenarios.PRESETS[name]()
        assert config.rounds >= 1
        assert len(config.validators) == config.trm.n_validators

    @staticmethod
    def test_validator_profiles():
        profiles = scenarios.validator_profiles(7, byzantine=2, bad_mouther_target="x")
        behaviors = [p.behavior for p in profiles]
        assert behaviors == [Behavior.HONEST] * 4 + [
            Behavior.BAD_MOUTHER,
            Behavior.BYZANTINE,
            Behavior.BYZANTINE,
        ]
        assert profiles[4].target == "x"


class TestConfigFiles:
    @staticmethod
    @pytest.mark.parametrize(
        "path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem
    )
    def test_example_scenarios_load(path):
        config = ScenarioConfig.from_file(path)
        assert config.name == path.stem
        n_valid, n_invalid = config.rule_demand()
        corpus = config.load_corpus()
        assert len(corpus.valid) >= n_valid and len(corpus.invalid) >= n_invalid


class TestRuns:
    @staticmethod
    def test_honest_only(corpus_path):
        config = scenarios.honest_only(rounds=5).replace(corpus_path=corpus_path)
        artifacts = scripts.run_scenario(config)
        assert len(artifacts.decisions) == 5
        assert all(d.trust.decision == 1 for d in artifacts.decisions)
        assert len(artifacts.trajectory("cc1")) == 5
        assert not artifacts.rejections

    @staticmethod
    def test_trajectory_bounds():
        artifacts = scripts.run_scenario(scenarios.mixed_contributors(rounds=20))
        params = artifacts.config.trm
        for trajectory in artifacts.trajectories.values():
            for m, point in enumerate(trajectory.series, start=1):
                assert within_reputation_bounds(point.T, params, m)
        assert scripts.check_ledger(artifacts.ledger).ok

    @staticmethod
    def test_closed_form_convergence():
        config = scenarios.honest_only(rounds=55, score_policy=ScorePolicy.constant())
        artifacts = scripts.run_scenario(config)
        trajectory = artifacts.trajectory("cc1")
        history = [point.t for point in trajectory.series]
        assert len(history) == 55
        assert trajectory.final_T == pytest.approx((1 - 0.85**55) * 0.85, abs=1e-9)
        assert trajectory.final_T == pytest.approx(
            direct_reputation(history, 0.85), abs=1e-9
        )
        assert trajectory.final_T == pytest.approx(0.85, abs=1e-3)

    @staticmethod
    def test_gamma_sweep(tmp_path):
        gammas = (0.8, 0.85, 0.9)
        results = scripts.run_sweep(scenarios.gamma_sweep(gammas), save_path=tmp_path)
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            f"gamma_{gamma}" for gamma in gammas
        ]

        finals, rounds_to_99 = [], []
        for gamma, artifacts in zip(gammas, results):
            trajectory = artifacts.trajectory("cc1")
            # The closed form leaves a gap of 0.85 * gamma^55 to the limit.
            assert trajectory.final_T == pytest.approx(
                (1 - gamma**55) * 0.85, abs=1e-9
            )
            finals.append(trajectory.final_T)
            rounds_to_99.append(
                next(p.round for p in trajectory.series if p.T >= 0.99 * 0.85)
            )
        assert max(finals) - min(finals) < 3e-3
        assert finals[0] == pytest.approx(finals[1], abs=1e-3)
        assert rounds_to_99 == sorted(rounds_to_99)
        assert len(set(rounds_to_99)) == 3

    @staticmethod
    def test_sweep_needs_distinct_names():
        config = scenarios.honest_only(rounds=1)
        with pytest.raises(ConfigError):
            scripts.run_sweep([config, config])


class TestMixedContributors:
    @staticmethod
    @pytest.fixture(scope="class")
    def constant_run():
        config = scenarios.mixed_contributors(
            score_policy=ScorePolicy.constant(1.0, 0.05)
        )
        return scripts.run_scenario(config)

    @staticmethod
    @pytest.fixture(scope="class")
    def default_run():
        return scripts.run_scenario(scenarios.mixed_contributors())

    @staticmethod
    def test_turncoat_tracks_honest_until_switch(constant_run):
        T1 = constant_run.trajectory("cc1").T_at(25)
        T2 = constant_run.trajectory("cc2").T_at(25)
        assert T1 == pytest.approx((1 - 0.85**25) * 0.85)
        assert abs(T1 - T2) < 0.02

    @staticmethod
    def test_turncoat_falls_to_malicious_level(constant_run):
        T2 = constant_run.trajectory("cc2")
        T3 = constant_run.trajectory("cc3")
        assert abs(T2.final_T - T3.final_T) < 0.05
        assert T2.T_at(26) < T2.T_at(25)

    @staticmethod
    @pytest.mark.parametrize("run", ["constant_run", "default_run"])
    def test_separation(run, request):
        artifacts = request.getfixturevalue(run)
        T1 = artifacts.trajectory("cc1")
        T3 = artifacts.trajectory("cc3")
        assert T1.final_T - T3.final_T >= 0.4
        assert all(point.T < 0.15 for point in T3.series)
        assert len(T1) == len(T3) == 55

    @staticmethod
    def test_regular_node_follows_reputation(constant_run):
        regular = constant_run.agent("cr1")
        cc1 = constant_run.agent("cc1").key.public_hex
        included = {
            constant_run.ledger.decisions[address].contributor
            for address in regular.r_loc
        }
        assert included == {cc1, constant_run.agent("cc2").key.public_hex}
        # T of cc1 crosses 0.5 after 6 rules
        assert len(regular.skipped) >= 5
        assert constant_run.r_loc["cr1"] <= set(constant_run.ledger.state.r_db)

    @staticmethod
    def test_conservation(constant_run):
        ledger = constant_run.ledger
        scripts.check_conservation(ledger)
        # 55 rules of cc1 and 25 of cc2
        assert len(ledger.state.r_db) == 80


class TestThreatModels:
    @staticmethod
    @pytest.mark.slow
    @pytest.mark.parametrize("budget", [1, 2])
    def test_byzantine_tolerance(budget):
        for seed in range(100):
            artifacts = scripts.run_scenario(
                scenarios.byzantine_tolerance(budget, rounds=5, seed=seed)
            )
            honest = artifacts.agent("cc1").key.public_hex
            assert len(artifacts.decisions) == 10
            for record in artifacts.decisions:
                assert record.trust.accepted == (record.contributor == honest)

    @staticmethod
    def test_byzantine_tolerance_single_run():
        artifacts = scripts.run_scenario(scenarios.byzantine_tolerance(2, rounds=10))
        assert artifacts.ledger.n == 7
        honest = artifacts.agent("cc1").key.public_hex
        for record in artifacts.decisions:
            assert record.trust.accepted == (record.contributor == honest)
            assert sum(v.phi == -1 for v in record.votes) in (2, 5)

    @staticmethod
    def test_self_promotion():
        attack = scripts.run_scenario(scenarios.self_promotion(rounds=10))
        baseline = scripts.run_scenario(
            scenarios.self_promotion(rounds=10, promote=False)
        )
        assert [p.T for p in attack.trajectory("promoter").series] == [
            p.T for p in baseline.trajectory("promoter").series
        ]
        reasons = {(r.agent, r.kind, r.reason) for r in attack.rejections}
        assert reasons == {("promoter", "Tx_c", "rejected-auth")}
        assert len(attack.rejections) == 10
        assert not baseline.rejections

    @staticmethod
    def test_ballot_stuffing():
        config = scenarios.ballot_stuffing(
            rounds=10, score_policy=ScorePolicy.constant()
        )
        artifacts = scripts.run_scenario(config)
        stuffer = artifacts.trajectory("stuffer")
        # Round 1 is accepted, even rounds are voted down as duplicates and odd
        # rounds are refused on-chain.
        assert [p.round for p in stuffer.series] == [1, 2, 4, 6, 8, 10]
        T = [p.T for p in stuffer.series]
        assert all(later < earlier for earlier, later in zip(T, T[1:]))
        refused = [r for r in artifacts.rejections if r.agent == "stuffer"]
        assert [r.round for r in refused] == [3, 5, 7, 9]
        assert {r.reason for r in refused} == {"rejected-duplicate"}

        key = artifacts.agent("stuffer").key.public_hex
        confirmed = [
            a
            for a in artifacts.ledger.state.r_db
            if artifacts.ledger.decisions[a].contributor == key
        ]
        assert len(confirmed) == 1

    @staticmethod
    def test_bad_mouthing():
        attack = scripts.run_scenario(scenarios.bad_mouthing(rounds=10))
        baseline = scripts.run_scenario(
            scenarios.bad_mouthing(rounds=10, attack=False)
        )
        attacked = attack.trajectory("target").series
        clean = baseline.trajectory("target").series
        assert len(attacked) == len(clean) == 10
        assert all(a.t < c.t for a, c in zip(attacked, clean))
        assert all(d.trust.accepted for d in attack.decisions)
        assert [p.t for p in attack.trajectory("bystander").series] == [
            p.t for p in baseline.trajectory("bystander").series
        ]

    @staticmethod
    def test_whitewashing():
        artifacts = scripts.run_scenario(scenarios.whitewashing(rounds=10, rejoin_at=6))
        old, new = artifacts.trajectories_of("washer")
        assert [p.round for p in old.series] == [1, 2, 3, 4, 5]
        assert [p.round for p in new.series] == [6, 7, 8, 9, 10]
        assert new.series[0].T == pytest.approx(0.15 * new.series[0].t)
        reputations = artifacts.ledger.state.reputations
        assert reputations[old.contributor].m == 5
        assert reputations[new.contributor].m == 5
        assert reputations[old.contributor].T == old.final_T

    @staticmethod
    def test_unregistered_contributor():
        config = ScenarioConfig(
            rounds=2,
            agents=[
                *scenarios.validator_profiles(4),
                AgentProfile(name="cc1", role=Role.CONTRIBUTOR),
                AgentProfile(name="ghost", role=Role.CONTRIBUTOR, register=False),
            ],
        )
        artifacts = scripts.run_scenario(config)
        ghost = [r for r in artifacts.rejections if r.agent == "ghost"]
        assert [(r.kind, r.reason) for r in ghost] == [("store", "AccessDenied")] * 2
        assert artifacts.trajectories_of("ghost") == []


def test_determinism():
    config = scenarios.mixed_contributors(rounds=10, seed=123)
    first = scripts.run_scenario(config)
    second = scripts.run_scenario(config)
    assert first.ledger.state_hash() == second.ledger.state_hash()
    for key, trajectory in first.trajectories.items():
        assert [p.T for p in trajectory.series] == [
            p.T for p in second.trajectories[key].series
        ]
    other = scripts.run_scenario(config.replace(seed=124))
    assert other.ledger.state_hash() != first.ledger.state_hash()

