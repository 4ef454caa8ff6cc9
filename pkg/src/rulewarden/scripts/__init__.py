# ruff: noqa: F401
from ._shared import RunArtifacts, TrajectoryPoint, TrustTrajectory
from .audit_store import main as audit_store
from .emit_csv import main as emit_csv
from .replay import main as replay_log
from .run_scenario import check_conservation, make_genesis
from .run_scenario import main as run_scenario
from .run_sweep import main as run_sweep
from .verify_bounds import BoundReport, check_ledger
from .verify_bounds import main as verify_bounds
