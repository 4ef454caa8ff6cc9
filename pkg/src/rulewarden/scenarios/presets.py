"""Ready-made scenarios for the experiments and threat models rulewarden covers."""

from __future__ import annotations

from typing import Sequence

from rulewarden.agents import AgentProfile, Behavior, Role, ScorePolicy
from rulewarden.trm import TrmParams

from .scenario import ScenarioConfig


def validator_profiles(
    n: int,
    score_policy: ScorePolicy | None = None,
    byzantine: int = 0,
    bad_mouther_target: str | None = None,
) -> list[AgentProfile]:
    """n validators; the last `byzantine` of them invert their verdicts, and if a
    target is given the last honest one bad-mouths it instead."""
    policy = score_policy or ScorePolicy()
    profiles = []
    for i in range(n):
        behavior = Behavior.BYZANTINE if i >= n - byzantine else Behavior.HONEST
        target = None
        if bad_mouther_target and i == n - byzantine - 1:
            behavior, target = Behavior.BAD_MOUTHER, bad_mouther_target
        profiles.append(
            AgentProfile(
                name=f"cv{i + 1}",
                role=Role.VALIDATOR,
                behavior=behavior,
                score_policy=policy,
                target=target,
            )
        )
    return profiles


def _regular(name: str = "cr1") -> AgentProfile:
    return AgentProfile(name=name, role=Role.REGULAR)


def _contributor(name: str, behavior=Behavior.HONEST, **kwargs) -> AgentProfile:
    return AgentProfile(name=name, role=Role.CONTRIBUTOR, behavior=behavior, **kwargs)


def mixed_contributors(
    rounds: int = 55,
    switch_at: int = 25,
    score_policy: ScorePolicy | None = None,
    trm: TrmParams | None = None,
    seed: int = 0,
) -> ScenarioConfig:
    """Honest, turncoat and always-malicious contributors side by side."""
    trm = trm or TrmParams(delta_val=0.85, delta_inv=0.9, gamma=0.85, n_validators=4)
    return ScenarioConfig(
        name="mixed_contributors",
        seed=seed,
        trm=trm,
        byzantine_budget=1,
        rounds=rounds,
        agents=[
            *validator_profiles(trm.n_validators, score_policy),
            _contributor("cc1"),
            _contributor("cc2", Behavior.TURNCOAT, switch_at=switch_at),
            _contributor("cc3", Behavior.ALWAYS_MALICIOUS),
            _regular(),
        ],
    )


def honest_only(
    rounds: int = 55,
    n_contributors: int = 1,
    score_policy: ScorePolicy | None = None,
    trm: TrmParams | None = None,
    seed: int = 0,
    name: str = "honest_only",
) -> ScenarioConfig:
    trm = trm or TrmParams()
    return ScenarioConfig(
        name=name,
        seed=seed,
        trm=trm,
        byzantine_budget=(trm.n_validators - 1) // 3,
        rounds=rounds,
        agents=[
            *validator_profiles(trm.n_validators, score_policy),
            *(_contributor(f"cc{i + 1}") for i in range(n_contributors)),
            _regular(),
        ],
    )


def gamma_sweep(
    gammas: Sequence[float] = (0.8, 0.85, 0.9),
    rounds: int = 55,
    score_policy: ScorePolicy | None = None,
    seed: int = 0,
) -> list[ScenarioConfig]:
    """One honest-only scenario per decay constant, scored at a constant S=1 by
    default so every run sees the same per-rule trust."""
    policy = score_policy or ScorePolicy.constant(1.0)
    return [
        honest_only(
            rounds=rounds,
            score_policy=policy,
            trm=TrmParams(gamma=gamma),
            seed=seed,
            name=f"gamma_{gamma}",
        )
        for gamma in gammas
    ]


def byzantine_tolerance(
    byzantine_budget: int = 1,
    rounds: int = 10,
    seed: int = 0,
    score_policy: ScorePolicy | None = None,
) -> ScenarioConfig:
    """n = 3l + 1 validators of which l invert every verdict."""
    n = 3 * byzantine_budget + 1
    return ScenarioConfig(
        name=f"byzantine_n{n}",
        seed=seed,
        trm=TrmParams(n_validators=n),
        byzantine_budget=byzantine_budget,
        rounds=rounds,
        agents=[
            *validator_profiles(n, score_policy, byzantine=byzantine_budget),
            _contributor("cc1"),
            _contributor("cc2", Behavior.ALWAYS_MALICIOUS),
        ],
    )


def self_promotion(
    rounds: int = 20, seed: int = 0, promote: bool = True
) -> ScenarioConfig:
    """A contributor of poor rules that also votes for them.

    With `promote=False` the same node only submits, which gives the baseline
    its reputation must match.
    """
    behavior = Behavior.SELF_PROMOTER if promote else Behavior.ALWAYS_MALICIOUS
    return ScenarioConfig(
        name="self_promotion" if promote else "self_promotion_baseline",
        seed=seed,
        rounds=rounds,
        agents=[
            *validator_profiles(4),
            _contributor("promoter", behavior),
            _contributor("cc1"),
        ],
    )


def ballot_stuffing(
    rounds: int = 10, seed: int = 0, score_policy: ScorePolicy | None = None
) -> ScenarioConfig:
    """A contributor that keeps resubmitting its first accepted rule, alternating
    verbatim copies with cosmetic rewrites."""
    return ScenarioConfig(
        name="ballot_stuffing",
        seed=seed,
        rounds=rounds,
        agents=[
            *validator_profiles(4, score_policy),
            _contributor("stuffer", Behavior.BALLOT_STUFFER),
            _contributor("cc1"),
            _regular(),
        ],
    )


def bad_mouthing(
    rounds: int = 20,
    seed: int = 0,
    score_policy: ScorePolicy | None = None,
    attack: bool = True,
) -> ScenarioConfig:
    """One of four validators votes against every rule of contributor `target`."""
    return ScenarioConfig(
        name="bad_mouthing" if attack else "bad_mouthing_baseline",
        seed=seed,
        rounds=rounds,
        agents=[
            *validator_profiles(
                4, score_policy, bad_mouther_target="target" if attack else None
            ),
            _contributor("target"),
            _contributor("bystander"),
            _regular(),
        ],
    )


def whitewashing(
    rounds: int = 30, rejoin_at: int = 15, seed: int = 0
) -> ScenarioConfig:
    return ScenarioConfig(
        name="whitewashing",
        seed=seed,
        rounds=rounds,
        agents=[
            *validator_profiles(4),
            _contributor("washer", Behavior.WHITEWASHER, rejoin_at=rejoin_at),
            _contributor("cc1"),
        ],
    )


PRESETS = {
    "mixed_contributors": mixed_contributors,
    "honest_only": honest_only,
    "byzantine_tolerance": byzantine_tolerance,
    "self_promotion": self_promotion,
    "ballot_stuffing": ballot_stuffing,
    "bad_mouthing": bad_mouthing,
    "whitewashing": whitewashing,
}
