# core/registry.py v1.0.0
import re
from pathlib import Path
from typing import Dict, List, Optional

from core.config import EXPERIMENTS_DIR
from core.errors import ConfigError
from core.experiment_config import ExperimentConfig, load_config
from core.logger import logger


class ExperimentRegistry:
    """
    Scans the experiments directory and keeps one validated ExperimentConfig
    per `exp<ID>.cfg` file. Broken files are logged and skipped so one bad
    config never hides the others.
    """
    NAME_REGEX = re.compile(r"^exp([A-Za-z0-9_-]+)$")

    def __init__(self, experiments_root: str = EXPERIMENTS_DIR):
        self.root_path = Path(experiments_root).resolve()
        self.configs: Dict[str, ExperimentConfig] = {}
        self.paths: Dict[str, Path] = {}

    def load_all(self, only_id: Optional[str] = None) -> "ExperimentRegistry":
        logger.info(f"Scanning experiment configs in: {self.root_path}")
        if not self.root_path.is_dir():
            logger.warning(f"Directory {self.root_path} not found; registry is empty.")
            return self

        configs, paths = {}, {}
        for path in sorted(self.root_path.glob("*.cfg")):
            match = self.NAME_REGEX.match(path.stem)
            if not match:
                logger.error(f"INVALID CONFIG NAME: '{path.name}'. Skipping...")
                continue
            exp_id = match.group(1).upper()
            if only_id and exp_id != only_id.upper():
                continue
            try:
                configs[exp_id] = load_config(str(path))
                paths[exp_id] = path
            except ConfigError as e:
                logger.error(f"Config [{path.name}] rejected: {e}")

        # Swap in one step so readers never see a half-filled registry.
        self.configs, self.paths = configs, paths
        logger.info(f"Registry updated. Experiments: {', '.join(self.configs) or 'none'}")
        return self

    def get(self, exp_id: str) -> ExperimentConfig:
        config = self.configs.get(exp_id.upper())
        if config is None:
            raise ConfigError(f"no experiment config registered for {exp_id!r} in {self.root_path}")
        return config

    def get_all_ids(self) -> List[str]:
        return list(self.configs)

    def __repr__(self):
        return f"<ExperimentRegistry experiments={len(self.configs)} root='{self.root_path}'>"
