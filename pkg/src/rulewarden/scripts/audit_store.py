from pathlib import Path

from loguru import logger

from rulewarden.chain import TxKind, load_log
from rulewarden.errors import InvariantViolation
from rulewarden.rulestore import BundleStore


def main(run_dir: Path | str) -> int:
    """Re-hash every stored bundle of a run and check that every submitted rule
    address is backed by a bundle. Returns the number of bundles audited."""
    run_dir = Path(run_dir)
    store = BundleStore.load(run_dir / "bundles")
    n_bundles = store.audit()

    txlog = run_dir / "txlog.jsonl"
    if txlog.exists():
        missing = [
            tx.payload.address.hex
            for tx in load_log(txlog)
            if tx.kind is TxKind.RULE_SUBMISSION and tx.payload.address not in store
        ]
        if missing:
            raise InvariantViolation(
                f"{len(missing)} submitted rule(s) have no bundle, e.g. {missing[0]}"
            )
    logger.info(f"Audited {n_bundles} bundles in {run_dir}")
    return n_bundles
