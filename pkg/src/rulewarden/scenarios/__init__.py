# ruff: noqa: F401
from .presets import (
    PRESETS,
    bad_mouthing,
    ballot_stuffing,
    byzantine_tolerance,
    gamma_sweep,
    honest_only,
    mixed_contributors,
    self_promotion,
    validator_profiles,
    whitewashing,
)
from .scenario import ScenarioConfig
