"""Shared data types for frame construction."""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Tuple

import numpy as np
import numpy.typing as npt


@dataclass(frozen=True)
class FrameShape:
    """Arithmetic context (N, M, L, N⁺, N⁻) for all constructions.

    Attributes:
        n_users: Number of frame columns N
        m_rows: Number of frame rows M
        l_bits: L = ceil(log2 N)
        n_plus: Least power of two >= N
        n_minus: n_plus / 2

    Example:
        shape = FrameShape(n_users=6, m_rows=3)
        shape.n_plus, shape.n_minus  # (8, 4)
    """

    n_users: int
    m_rows: int
    l_bits: int = field(init=False)
    n_plus: int = field(init=False)
    n_minus: int = field(init=False)

    def __post_init__(self) -> None:
        if self.n_users < 2:
            raise ValueError(f"n_users must be >= 2, got {self.n_users}")
        if not 1 <= self.m_rows <= self.n_users:
            raise ValueError(
                f"m_rows must satisfy 1 <= M <= N, got M={self.m_rows}, N={self.n_users}"
            )
        l_bits = (self.n_users - 1).bit_length()
        object.__setattr__(self, "l_bits", l_bits)
        object.__setattr__(self, "n_plus", 1 << l_bits)
        object.__setattr__(self, "n_minus", 1 << (l_bits - 1))

    @property
    def gamma(self) -> float:
        """Resources-to-users ratio M/N."""
        return self.m_rows / self.n_users

    @property
    def is_power_of_two(self) -> bool:
        """True when N = N⁺ (the pure-ETF regime)."""
        return self.n_users == self.n_plus

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "n_users": self.n_users,
            "m_rows": self.m_rows,
            "l_bits": self.l_bits,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
        }


@dataclass(frozen=True)
class IndexSet:
    """M distinct Hadamard row indices in [0, N⁺), sorted.

    This is a candidate (generalized) difference set and the GA's individual.
    """

    indices: Tuple[int, ...]
    shape: FrameShape

    def __post_init__(self) -> None:
        ordered = tuple(sorted(int(i) for i in self.indices))
        if len(set(ordered)) != len(ordered):
            raise ValueError(f"Indices must be distinct: {ordered}")
        if len(ordered) != self.shape.m_rows:
            raise ValueError(
                f"Expected {self.shape.m_rows} indices, got {len(ordered)}"
            )
        if ordered and (ordered[0] < 0 or ordered[-1] >= self.shape.n_plus):
            raise ValueError(
                f"Indices must lie in [0, {self.shape.n_plus}), got {ordered}"
            )
        object.__setattr__(self, "indices", ordered)

    @classmethod
    def of(cls, indices: Iterable[int], shape: FrameShape) -> "IndexSet":
        """Build from any iterable of integers."""
        return cls(tuple(int(i) for i in indices), shape)

    @classmethod
    def from_mask(cls, mask: npt.ArrayLike, shape: FrameShape) -> "IndexSet":
        """Build from the N⁺-bit binary string with ones at member indices."""
        bits = np.asarray(mask).astype(bool)
        if bits.shape != (shape.n_plus,):
            raise ValueError(f"Mask must have length {shape.n_plus}, got {bits.shape}")
        return cls.of(np.flatnonzero(bits), shape)

    def mask(self) -> npt.NDArray[np.int8]:
        """Binary-string representation: ones at member indices."""
        bits = np.zeros(self.shape.n_plus, dtype=np.int8)
        bits[list(self.indices)] = 1
        return bits

    def as_array(self) -> npt.NDArray[np.int64]:
        """Indices as an int64 array."""
        return np.asarray(self.indices, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.indices)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "n_users": self.shape.n_users,
            "m_rows": self.shape.m_rows,
            "indices": list(self.indices),
        }
