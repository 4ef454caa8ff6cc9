# ruff: noqa: F401
from .plots import plot_trust_evolution
