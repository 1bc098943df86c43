"""Sweep recipe: axes, Monte-Carlo budget, GA budget and cache location.

Recipes are flat key=value files (lists comma-separated, # comments) or YAML
mappings when the file ends in .yaml/.yml. Keys are SweepConfig field names;
dashes are accepted in place of underscores.

Example recipe:
    n_list = 16, 17, 32, 48, 96
    beta_inv_list = 1.25, 1.5, 1.75
    p_list = 0.25, 0.5, 0.75
    snr_db = 10
    trials = 1000
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from hadaframe.capacity.montecarlo import IidMode

DEFAULT_N_LIST = [16, 17, 24, 32, 40, 48, 56, 64, 72, 80, 88, 96]
DEFAULT_BETA_INV_LIST = [1.25, 1.5, 1.75]
DEFAULT_P_LIST = [0.25, 0.5, 0.75]

LIST_KEYS = frozenset({"n_list", "beta_inv_list", "p_list"})


class SweepConfig(BaseModel):
    """Capacity sweep configuration.

    Attributes:
        n_list: Frame lengths N to sweep
        beta_inv_list: Requested M/K ratios
        p_list: Requested load K/N
        snr_db: SNR in dB for every curve
        trials: Monte-Carlo K-subsets per point
        seed: Master seed; every (point, curve) derives its own
        cache: GDS cache file (None uses HADAFRAME_GDS_CACHE or the default)
        population_size: GA population for cache misses
        max_generations: GA generation budget for cache misses
        jobs: Worker threads
        no_search: Do not run the GA on cache misses
        iid_mode: iid baseline sampling mode
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_list: List[int] = Field(default_factory=lambda: list(DEFAULT_N_LIST), min_length=1)
    beta_inv_list: List[float] = Field(
        default_factory=lambda: list(DEFAULT_BETA_INV_LIST), min_length=1
    )
    p_list: List[float] = Field(default_factory=lambda: list(DEFAULT_P_LIST), min_length=1)
    snr_db: float = 10.0
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    cache: Optional[Path] = None
    population_size: int = Field(default=100, gt=0)
    max_generations: int = Field(default=2000, gt=0)
    jobs: int = Field(default=1, ge=1)
    no_search: bool = False
    iid_mode: IidMode = IidMode.FRESH_FRAME_PER_TRIAL

    @field_validator("n_list")
    @classmethod
    def _n_at_least_two(cls, value: List[int]) -> List[int]:
        bad = [n for n in value if n < 2]
        if bad:
            raise ValueError(f"every N must be >= 2, got {bad}")
        return value

    @field_validator("beta_inv_list")
    @classmethod
    def _beta_inv_at_least_one(cls, value: List[float]) -> List[float]:
        bad = [b for b in value if b < 1.0]
        if bad:
            raise ValueError(f"beta_inv must be >= 1 (K <= M), got {bad}")
        return value

    @field_validator("p_list")
    @classmethod
    def _p_in_unit_interval(cls, value: List[float]) -> List[float]:
        bad = [p for p in value if not 0.0 < p <= 1.0]
        if bad:
            raise ValueError(f"p must lie in (0, 1], got {bad}")
        return value


def _normalize_key(key: str) -> str:
    return key.strip().replace("-", "_")


def parse_key_value(text: str) -> Dict[str, Any]:
    """Parse flat key=value text; list keys are split on commas.

    Raises:
        ValueError: On a line without '='
    """
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = _normalize_key(key)
        value = value.strip()
        if key in LIST_KEYS:
            values[key] = [item.strip() for item in value.split(",") if item.strip()]
        else:
            values[key] = value
    return values


def read_recipe(path: Path) -> Dict[str, Any]:
    """Read a recipe file into raw key/value pairs.

    Raises:
        ValueError: If a YAML recipe is not a mapping, or a key=value line is malformed
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{path}: YAML recipe must be a mapping")
        return {_normalize_key(str(k)): v for k, v in data.items()}
    return parse_key_value(text)


def load_sweep_config(
    path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None
) -> SweepConfig:
    """Build a SweepConfig from an optional recipe file; non-None overrides win.

    Raises:
        ValueError: On a malformed recipe
        pydantic.ValidationError: On unknown keys or invalid values
    """
    values: Dict[str, Any] = read_recipe(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[_normalize_key(key)] = value
    return SweepConfig(**values)
