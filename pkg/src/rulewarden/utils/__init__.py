import json
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Union

OUTPUT_DIR_ENV = "RULEWARDEN_OUTPUT_DIR"


def log_path(base="runs", time=True):
    if time:
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    else:
        timestamp = datetime.now().strftime("%Y-%m-%d")
    return Path(base) / timestamp


def default_output_dir(name: str | None = None) -> Path:
    """Where runs go when neither the scenario nor the CLI names a directory.

    `$RULEWARDEN_OUTPUT_DIR/<name>` if the variable is set, else a timestamped
    directory under `runs/`.
    """
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base:
        return Path(base) / name if name else Path(base)
    path = log_path("runs")
    return path / name if name else path


def canonical_json(data: Any) -> str:
    """Compact JSON with sorted keys; equal data always gives equal text."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def save_json(data: Any, path: Union[str, Path]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def load_json(path: Union[str, Path]) -> Any:
    with open(path) as f:
        return json.load(f)
