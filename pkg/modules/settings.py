# modules/settings.py
# Workbench defaults, overridable from the environment and the command line

import logging
import os
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from modules.errors import ValidationError

logger = logging.getLogger(__name__)

SEED_VARIABLE = "MOREXT_SEED"


@dataclass(frozen=True)
class WorkbenchSettings:
    """Knobs shared by the classifier, the transport report and the CLI"""

    seed: int = 20160401
    power_samples: int = 64
    power_max: int = 8
    trivial_budget: int = 4096
    output_dir: str = "./output"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "WorkbenchSettings":
        environ = os.environ if environ is None else environ
        settings = cls()
        raw = environ.get(SEED_VARIABLE)
        if raw:
            try:
                settings = replace(settings, seed=int(raw))
            except ValueError as exc:
                raise ValidationError(f"{SEED_VARIABLE} must be an integer, got {raw!r}") from exc
            logger.debug("sampling seed %d taken from %s", settings.seed, SEED_VARIABLE)
        return settings

    def override(self, **changes) -> "WorkbenchSettings":
        """Copy with every non-None keyword applied"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
