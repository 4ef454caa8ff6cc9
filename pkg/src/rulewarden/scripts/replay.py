import csv
from pathlib import Path

from loguru import logger

from rulewarden.chain import Genesis, Ledger, load_log
from rulewarden.errors import InvariantViolation
from rulewarden.rulestore import BundleStore


def recorded_state_hash(run_dir: Path) -> str | None:
    summary = run_dir / "summary.csv"
    if not summary.exists():
        return None
    with open(summary, newline="") as f:
        for row in csv.DictReader(f):
            if row["metric"] == "state_hash":
                return row["value"]
    return None


def main(
    txlog_path: Path | str,
    genesis_path: Path | str | None = None,
    expected_hash: str | None = None,
) -> Ledger:
    """Fold a transaction log from genesis and check it reproduces the run.

    `genesis_path` defaults to `genesis.json` next to the log. If the run's
    `bundles/` directory is there too, bundle checks are replayed as well. The
    resulting state hash is compared against `expected_hash`, or against the one
    recorded in the run's `summary.csv` if there is one.
    """
    txlog_path = Path(txlog_path)
    run_dir = txlog_path.parent
    genesis = Genesis.load(genesis_path or run_dir / "genesis.json")
    store = None
    if (run_dir / "bundles").is_dir():
        store = BundleStore.load(run_dir / "bundles")

    transactions = load_log(txlog_path)
    ledger = Ledger.replay(genesis, transactions, store=store)
    state_hash = ledger.state_hash()

    expected_hash = expected_hash or recorded_state_hash(run_dir)
    if expected_hash is not None and expected_hash != state_hash:
        raise InvariantViolation(
            f"Replayed state hash {state_hash} differs from recorded {expected_hash}"
        )
    logger.info(
        f"Replayed {len(transactions)} transactions from {txlog_path}, "
        f"state hash {state_hash}"
    )
    return ledger
