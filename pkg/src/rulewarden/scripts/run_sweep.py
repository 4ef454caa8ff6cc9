from pathlib import Path
from typing import Sequence

from tqdm.auto import tqdm

from rulewarden.errors import ConfigError
from rulewarden.scenarios import ScenarioConfig

from ._shared import RunArtifacts
from .run_scenario import main as run_scenario


def main(
    configs: Sequence[ScenarioConfig],
    save_path: Path | str | None = None,
    pbar: bool = False,
) -> list[RunArtifacts]:
    """Run independent scenarios one after the other, each with its own ledger.

    With `save_path`, each run's artifacts go to `save_path / config.name`.
    """
    names = [config.name for config in configs]
    if len(set(names)) != len(names):
        raise ConfigError("Scenarios in a sweep need distinct names")
    results = []
    for config in tqdm(configs, disable=not pbar, desc="sweep"):
        run_dir = Path(save_path) / config.name if save_path is not None else None
        results.append(run_scenario(config, save_path=run_dir))
    return results
