from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

from matplotlib import pyplot as plt
from matplotlib.figure import Figure

if TYPE_CHECKING:
    from rulewarden.scripts import TrustTrajectory


def plot_trust_evolution(
    trajectories: Iterable[TrustTrajectory],
    title: str | None = None,
    show_rule_trust: bool = False,
) -> Figure:
    """Reputation of each contributor identity over the rounds of a run.

    With `show_rule_trust`, the trust of each individual rule is drawn as faint
    markers behind the reputation curves.
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    for trajectory in trajectories:
        if not trajectory.series:
            continue
        rounds = [p.round for p in trajectory.series]
        label = f"{trajectory.name} ({trajectory.contributor[:8]})"
        (line,) = ax.plot(rounds, [p.T for p in trajectory.series], label=label)
        if show_rule_trust:
            ax.scatter(
                rounds,
                [p.t for p in trajectory.series],
                color=line.get_color(),
                alpha=0.3,
                s=8,
            )
    ax.set_xlabel("Round")
    ax.set_ylabel("Reputation T")
    ax.set_ylim(0, 1)
    ax.grid(alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig
