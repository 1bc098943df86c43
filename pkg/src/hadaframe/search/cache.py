"""Append-only cache of discovered generalized difference sets.

One JSON object per line (UTF-8). Every record is re-scored on load, and a
record whose stored fitness no longer recomputes is rejected.

Example:
    cache = GdsCache(Path("gds_cache.jsonl"))
    cache.append(GdsRecord.from_result(shape, result, cfg))
    record = cache.best(n_users=16, m_rows=6)
"""

import json
import logging
import os
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from hadaframe import __version__
from hadaframe.core.spectra import difference_spectrum, gds_target, spectrum_residual
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.search.config import GaConfig
from hadaframe.search.gds import GaResult, fitness

logger = logging.getLogger(__name__)

CACHE_ENV_VAR = "HADAFRAME_GDS_CACHE"
DEFAULT_CACHE_PATH = Path("gds_cache.jsonl")

# Allowed drift between stored and recomputed fitness.
FITNESS_TOLERANCE = 1e-9


class CacheIntegrityError(RuntimeError):
    """A cached record is malformed or its fitness does not recompute."""


class RecordNotFoundError(LookupError):
    """No cached record for the requested shape."""


def default_cache_path() -> Path:
    """Cache path from HADAFRAME_GDS_CACHE, or gds_cache.jsonl in the working directory."""
    return Path(os.environ.get(CACHE_ENV_VAR, str(DEFAULT_CACHE_PATH)))


@dataclass(frozen=True)
class GdsRecord:
    """Persisted GA outcome."""

    n_users: int
    m_rows: int
    n_plus: int
    indices: List[int]
    fitness: float
    peak_residual: float
    rng_seed: int
    generations_run: int
    weight_peak: float
    weight_rest: float
    version: str
    timestamp: str

    @property
    def shape(self) -> FrameShape:
        return FrameShape(n_users=self.n_users, m_rows=self.m_rows)

    def index_set(self) -> IndexSet:
        """The stored indices as a validated IndexSet."""
        return IndexSet.of(self.indices, self.shape)

    @classmethod
    def from_result(
        cls,
        shape: FrameShape,
        result: GaResult,
        cfg: GaConfig,
        timestamp: Optional[str] = None,
    ) -> "GdsRecord":
        """Build a record from a GA result."""
        residual = spectrum_residual(difference_spectrum(result.best_set), gds_target(shape))
        return cls(
            n_users=shape.n_users,
            m_rows=shape.m_rows,
            n_plus=shape.n_plus,
            indices=list(result.best_set.indices),
            fitness=result.best_fitness,
            peak_residual=float(residual[shape.n_minus]),
            rng_seed=cfg.rng_seed,
            generations_run=result.generations_run,
            weight_peak=cfg.weight_peak,
            weight_rest=cfg.weight_rest,
            version=__version__,
            timestamp=timestamp or datetime.now(timezone.utc).isoformat(),
        )

    def recompute_fitness(self) -> float:
        """Fitness of the stored indices under the stored weights."""
        cfg = GaConfig(weight_peak=self.weight_peak, weight_rest=self.weight_rest)
        return fitness(difference_spectrum(self.index_set()), gds_target(self.shape), cfg)

    def validate(self) -> None:
        """Check shape, indices and fitness consistency.

        Raises:
            CacheIntegrityError: If anything fails to recompute
        """
        try:
            shape = self.shape
            self.index_set()
        except (TypeError, ValueError) as e:
            raise CacheIntegrityError(f"Invalid record for N={self.n_users}: {e}") from e
        if shape.n_plus != self.n_plus:
            raise CacheIntegrityError(
                f"Stored n_plus {self.n_plus} != {shape.n_plus} for N={self.n_users}"
            )
        try:
            recomputed = self.recompute_fitness()
            mismatch = not abs(recomputed - self.fitness) <= FITNESS_TOLERANCE
        except (TypeError, ValueError) as e:
            raise CacheIntegrityError(
                f"Non-numeric field for (N={self.n_users}, M={self.m_rows}): {e}"
            ) from e
        if isinstance(self.fitness, bool) or mismatch:
            raise CacheIntegrityError(
                f"Fitness mismatch for (N={self.n_users}, M={self.m_rows}): "
                f"stored {self.fitness!r}, recomputed {recomputed!r}"
            )

    def to_json(self) -> str:
        """Serialize to one JSON line (keys sorted)."""
        return json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "GdsRecord":
        """Parse one JSON line."""
        data: Dict[str, Any] = json.loads(line)
        return cls(**data)


class GdsCache:
    """Line-delimited JSON store of GdsRecords."""

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = Path(path) if path is not None else default_cache_path()

    def append(self, record: GdsRecord) -> None:
        """Append one record."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(record.to_json() + "\n")
        logger.info(
            "Cached GDS for N=%d M=%d (fitness %.6g) in %s",
            record.n_users, record.m_rows, record.fitness, self.path,
        )

    def records(self) -> List[GdsRecord]:
        """Load and validate every record.

        Raises:
            CacheIntegrityError: On a malformed line or a failed fitness check
        """
        if not self.path.exists():
            return []
        loaded: List[GdsRecord] = []
        with open(self.path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    record = GdsRecord.from_json(line)
                except (json.JSONDecodeError, TypeError) as e:
                    raise CacheIntegrityError(f"{self.path}:{lineno}: {e}") from e
                record.validate()
                loaded.append(record)
        logger.info("Loaded %d GDS records from %s", len(loaded), self.path)
        return loaded

    def find(self, n_users: int, m_rows: int) -> List[GdsRecord]:
        """All records for (N, M), in file order."""
        return [r for r in self.records() if r.n_users == n_users and r.m_rows == m_rows]

    def best_by_shape(self) -> Dict[Tuple[int, int], GdsRecord]:
        """Lowest-fitness record per (N, M); the earliest wins ties."""
        best: Dict[Tuple[int, int], GdsRecord] = {}
        for record in self.records():
            key = (record.n_users, record.m_rows)
            if key not in best or record.fitness < best[key].fitness:
                best[key] = record
        return best

    def best(self, n_users: int, m_rows: int) -> GdsRecord:
        """Lowest-fitness record for (N, M); the earliest wins ties.

        Raises:
            RecordNotFoundError: If no record exists
        """
        record = self.best_by_shape().get((n_users, m_rows))
        if record is None:
            raise RecordNotFoundError(
                f"No GDS record for N={n_users}, M={m_rows} in {self.path}"
            )
        return record
