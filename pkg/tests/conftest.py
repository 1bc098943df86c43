"""Pytest fixtures for hadaframe tests."""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.search.cache import GdsCache


def bent_support(l_bits: int) -> List[int]:
    """Indices x whose high and low halves have odd inner product.

    For even L this is a difference set in GF(2)^L with
    M = 2^(L-1) - 2^(L/2-1), e.g. (16, 6, 2) for L = 4 and (256, 120, 56) for L = 8.
    """
    half = l_bits // 2
    low_mask = (1 << half) - 1
    return [x for x in range(1 << l_bits) if ((x >> half) & x & low_mask).bit_count() & 1]


@pytest.fixture
def shape_4_3() -> FrameShape:
    return FrameShape(n_users=4, m_rows=3)


@pytest.fixture
def ds_4_3(shape_4_3: FrameShape) -> IndexSet:
    """Difference set {1, 2, 3} in GF(2)^2."""
    return IndexSet.of([1, 2, 3], shape_4_3)


@pytest.fixture
def ds_8_7() -> IndexSet:
    """Complement of {0} in GF(2)^3."""
    return IndexSet.of(range(1, 8), FrameShape(n_users=8, m_rows=7))


@pytest.fixture
def ds_16_6() -> IndexSet:
    """Bent-function difference set (16, 6, 2)."""
    return IndexSet.of(bent_support(4), FrameShape(n_users=16, m_rows=6))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def cache_path(tmp_path: Path) -> Path:
    """Return a path for a fresh GDS cache file."""
    return tmp_path / "gds_cache.jsonl"


@pytest.fixture
def cache(cache_path: Path) -> GdsCache:
    return GdsCache(cache_path)
