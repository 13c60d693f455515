# ENTBOUND Configuration Management
import os
import json
import logging
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_FILE = "entbound_config.json"
TOLERANCE_ENV = "ENTBOUND_TOL"


class Tolerances(BaseModel):
    """Every numeric tolerance used by the toolkit, in one record"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # hermiticity accepted on operation inputs / required of builder outputs
    hermitian_check: float = Field(1e-10, gt=0, le=1e-2)
    hermitian_strict: float = Field(1e-12, gt=0, le=1e-2)
    trace: float = Field(1e-12, gt=0, le=1e-2)
    # eigenvalues in [-psd_clamp, 0) are roundoff and clamped to zero
    psd_clamp: float = Field(1e-10, gt=0, le=1e-2)
    psd_error: float = Field(1e-8, gt=0, le=1e-2)
    jacobi_offdiag: float = Field(1e-12, gt=0, le=1e-2)
    jacobi_max_sweeps: int = Field(100, ge=1, le=10_000)
    x_form: float = Field(1e-10, gt=0, le=1e-2)
    atol: float = Field(1e-10, gt=0, le=1e-2)
    golden_xtol: float = Field(1e-10, gt=0, le=1e-3)
    theta_grid: int = Field(1024, ge=8, le=1_000_000)
    eig_method: Literal["eigh", "jacobi"] = "eigh"


class EntboundConfig:
    """Centralized configuration: defaults, optional JSON file, then ENTBOUND_TOL"""

    def __init__(self, config_file: str = CONFIG_FILE, environ: Optional[Dict[str, str]] = None):
        self.config_file = config_file
        self.environ = os.environ if environ is None else environ
        self.tolerances = self._load_tolerances()

    def _load_tolerances(self) -> Tolerances:
        values: Dict[str, Any] = Tolerances().model_dump()

        if os.path.exists(self.config_file):
            try:
                with open(self.config_file, "r", encoding="utf-8") as f:
                    file_config = json.load(f)
                values.update(file_config.get("tolerances", {}))
            except (OSError, ValueError, AttributeError) as e:
                logger.warning(f"⚠️ Could not load config file {self.config_file}: {e}")

        raw = self.environ.get(TOLERANCE_ENV, "").strip()
        if raw:
            values.update(self._parse_env_override(raw))

        try:
            return Tolerances(**values)
        except ValidationError as e:
            raise ConfigError(f"invalid tolerance configuration: {e}") from e

    @staticmethod
    def _parse_env_override(raw: str) -> Dict[str, Any]:
        try:
            parsed = json.loads(raw)
        except ValueError as e:
            raise ConfigError(f"{TOLERANCE_ENV} is neither a number nor a JSON object: {raw!r}") from e

        if isinstance(parsed, bool):
            raise ConfigError(f"{TOLERANCE_ENV} must be a number or a JSON object")
        if isinstance(parsed, (int, float)):
            return {"atol": float(parsed)}
        if isinstance(parsed, dict):
            return parsed
        raise ConfigError(f"{TOLERANCE_ENV} must be a number or a JSON object")

    def save_config(self):
        """Save current tolerances to the config file"""
        with open(self.config_file, "w", encoding="utf-8") as f:
            json.dump({"tolerances": self.tolerances.model_dump()}, f, indent=2)


# Global configuration instance; a broken environment surfaces again on reload_config()
try:
    entbound_config = EntboundConfig()
except ConfigError as e:
    logger.warning(f"⚠️ Falling back to default tolerances: {e}")
    entbound_config = EntboundConfig(environ={})


def get_tolerances() -> Tolerances:
    return entbound_config.tolerances


def reload_config(config_file: str = CONFIG_FILE, environ: Optional[Dict[str, str]] = None) -> Tolerances:
    """Re-read file and environment; used by the CLI once arguments are parsed"""
    global entbound_config
    entbound_config = EntboundConfig(config_file, environ)
    return entbound_config.tolerances
