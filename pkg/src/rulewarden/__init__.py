from . import (
    agents,
    analysis,
    chain,
    identity,
    rulestore,
    scenarios,
    scripts,
    trm,
    utils,
)

__all__ = [
    "trm",
    "identity",
    "rulestore",
    "chain",
    "agents",
    "scenarios",
    "scripts",
    "analysis",
    "utils",
]
