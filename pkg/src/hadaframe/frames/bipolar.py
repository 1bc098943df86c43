"""Bipolar frames: Hadamard row selections and iid ±1 baselines."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import numpy.typing as npt

from hadaframe.core.gf2 import hadamard_rows
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.csvio import emit_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BipolarFrame:
    """M x N frame with entries ±1/√M (unit-norm columns).

    Provenance is either the Hadamard row indices or the iid seed.

    Attributes:
        signs: Raw ±1 sign pattern, shape (M, N)
        shape: Frame shape
        row_indices: Selected Hadamard rows, for constructed frames
        iid_seed: Generator seed, for random frames
    """

    signs: npt.NDArray[np.int8]
    shape: FrameShape
    row_indices: Optional[IndexSet] = None
    iid_seed: Optional[int] = None

    def __post_init__(self) -> None:
        expected = (self.shape.m_rows, self.shape.n_users)
        if self.signs.shape != expected:
            raise ValueError(f"Sign matrix shape {self.signs.shape} != {expected}")
        if not np.all(np.abs(self.signs) == 1):
            raise ValueError("Sign matrix entries must be +1 or -1")
        if (self.row_indices is None) == (self.iid_seed is None):
            raise ValueError("Exactly one of row_indices and iid_seed must be set")
        self.signs.setflags(write=False)

    @property
    def entries(self) -> npt.NDArray[np.float64]:
        """Scaled entries ±1/√M."""
        return self.signs.astype(np.float64) / np.sqrt(self.shape.m_rows)

    @property
    def provenance(self) -> str:
        if self.row_indices is not None:
            return "hadamard"
        return "iid"

    def gram(self) -> npt.NDArray[np.float64]:
        """N x N column Gram matrix (unit diagonal)."""
        f = self.entries
        return f.T @ f

    def row_gram(self) -> npt.NDArray[np.float64]:
        """M x M row Gram FFᵀ; equals (N/M) I for a tight frame."""
        f = self.entries
        return f @ f.T

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "n_users": self.shape.n_users,
            "m_rows": self.shape.m_rows,
            "provenance": self.provenance,
            "row_indices": list(self.row_indices.indices) if self.row_indices else None,
            "iid_seed": self.iid_seed,
        }


def build_frame(s: IndexSet) -> BipolarFrame:
    """Rows u_m of the N⁺ Hadamard matrix, first N columns, scaled by 1/√M."""
    shape = s.shape
    signs = hadamard_rows(s.indices, shape.n_plus, shape.n_users)
    return BipolarFrame(signs=signs, shape=shape, row_indices=s)


def random_bipolar_frame(shape: FrameShape, seed: int) -> BipolarFrame:
    """iid uniform ±1 signs, deterministic in seed."""
    rng = np.random.default_rng(seed)
    return BipolarFrame(
        signs=random_signs(rng, shape.m_rows, shape.n_users), shape=shape, iid_seed=seed
    )


def random_signs(rng: np.random.Generator, m_rows: int, n_cols: int) -> npt.NDArray[np.int8]:
    """Draw an m_rows x n_cols matrix of iid ±1 signs."""
    bits = rng.integers(0, 2, size=(m_rows, n_cols), dtype=np.int8)
    return (2 * bits - 1).astype(np.int8)


def export_csv(frame: BipolarFrame, path: Path) -> None:
    """Write raw ±1 signs, M rows x N columns, no header (atomic replace)."""
    emit_csv(Path(path), None, frame.signs.tolist())
    logger.info("Exported %dx%d frame to %s", frame.shape.m_rows, frame.shape.n_users, path)
