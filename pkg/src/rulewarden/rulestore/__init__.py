# ruff: noqa: F401
from .corpus import RuleCorpus, RuleDispenser
from .rules import (
    DetectionRule,
    RuleBundle,
    RuleMetadata,
    Severity,
    is_duplicate,
    split_options,
)
from .store import AccessRegistry, BundleStore
