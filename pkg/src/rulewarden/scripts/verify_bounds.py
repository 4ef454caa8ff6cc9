from dataclasses import dataclass, field
from pathlib import Path

from loguru import logger

from rulewarden.chain import Genesis, Ledger, TxKind, load_log
from rulewarden.errors import InvariantViolation
from rulewarden.trm import (
    direct_reputation,
    within_reputation_bounds,
    within_rule_bounds,
)

# Tolerance between the recurrence and the literal decayed sum.
SUM_TOLERANCE = 1e-9


@dataclass
class BoundReport:
    rules_checked: int = 0
    reputations_checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_ledger(ledger: Ledger) -> BoundReport:
    """Check every recorded rule trust and every reputation along each
    contributor's history against their bounds."""
    params = ledger.params
    report = BoundReport()

    for address, trust in ledger.state.rule_trusts.items():
        report.rules_checked += 1
        if not within_rule_bounds(trust.t, params):
            report.violations.append(f"rule {address.hex}: t={trust.t!r}")

    for tx in ledger.log:
        if tx.kind is not TxKind.RULE_CONFIRMATION:
            continue
        recorded = ledger.state.rule_trusts[tx.payload.address].t
        if tx.payload.t != recorded:
            report.violations.append(
                f"Tx_f for {tx.payload.address.hex} carries t={tx.payload.t!r}, "
                f"contract computed {recorded!r}"
            )

    for contributor, reputation in ledger.state.reputations.items():
        T = 0.0
        for m, t in enumerate(reputation.history, start=1):
            T = params.gamma * T + (1 - params.gamma) * t
            report.reputations_checked += 1
            if not within_reputation_bounds(T, params, m):
                report.violations.append(f"contributor {contributor[:16]}: T_{m}={T!r}")
        direct = direct_reputation(reputation.history, params.gamma)
        if abs(direct - reputation.T) > SUM_TOLERANCE:
            report.violations.append(
                f"contributor {contributor[:16]}: recurrence gives {reputation.T!r}, "
                f"decayed sum gives {direct!r}"
            )
    return report


def main(
    txlog_path: Path | str, genesis_path: Path | str | None = None
) -> BoundReport:
    txlog_path = Path(txlog_path)
    genesis = Genesis.load(genesis_path or txlog_path.parent / "genesis.json")
    ledger = Ledger.replay(genesis, load_log(txlog_path))
    report = check_ledger(ledger)
    if not report.ok:
        for violation in report.violations:
            logger.error(f"Bound violated: {violation}")
        raise InvariantViolation(f"{len(report.violations)} bound violation(s)")
    logger.info(
        f"All bounds hold: {report.rules_checked} rule trusts, "
        f"{report.reputations_checked} reputations"
    )
    return report
