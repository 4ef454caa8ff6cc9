import csv
from pathlib import Path
from typing import Iterable, Sequence

from loguru import logger
from matplotlib import pyplot as plt

from rulewarden import utils
from rulewarden.analysis import plot_trust_evolution

from ._shared import RunArtifacts

TRAJECTORY_COLUMNS = ("round", "contributor", "t", "T")
DECISION_COLUMNS = ("rule_address", "contributor", "decision", "vote_vector")
SUMMARY_COLUMNS = ("metric", "subject", "key", "value")
REJECTION_COLUMNS = ("round", "agent", "kind", "reason")


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def main(artifacts: RunArtifacts, save_path: Path | str) -> Path:
    """Write the artifacts of a finished run to `save_path`.

    Output is a pure function of the run, so rerunning a scenario with the same
    seed produces byte-identical files.
    """
    save_path = Path(save_path)
    save_path.mkdir(parents=True, exist_ok=True)
    ledger = artifacts.ledger

    trajectory_rows = sorted(
        (
            (point.round, trajectory.contributor, point.t, point.T)
            for trajectory in artifacts.trajectories.values()
            for point in trajectory.series
        ),
        key=lambda row: (row[0], row[1]),
    )
    _write_csv(
        save_path / "trust_trajectories.csv", TRAJECTORY_COLUMNS, trajectory_rows
    )

    _write_csv(
        save_path / "decisions.csv",
        DECISION_COLUMNS,
        (
            (d.address.hex, d.contributor, d.trust.decision, d.vote_vector)
            for d in artifacts.decisions
        ),
    )
    _write_csv(save_path / "summary.csv", SUMMARY_COLUMNS, artifacts.summary())
    _write_csv(
        save_path / "rejections.csv",
        REJECTION_COLUMNS,
        (
            tuple(record.to_dict()[c] for c in REJECTION_COLUMNS)
            for record in artifacts.rejections
        ),
    )

    ledger.export_log(save_path / "txlog.jsonl")
    artifacts.genesis.save(save_path / "genesis.json")
    config = artifacts.config.to_dict()
    # The output directory is not part of what was simulated.
    config.pop("output_path")
    utils.save_json(config, save_path / "config.json")
    artifacts.store.save(save_path / "bundles")

    if artifacts.config.plot:
        fig = plot_trust_evolution(artifacts.trajectories.values())
        fig.savefig(
            save_path / "trust_evolution.pdf", metadata={"CreationDate": None}
        )
        plt.close(fig)

    logger.info(f"Wrote artifacts of {artifacts.config.name} to {save_path}")
    return save_path
