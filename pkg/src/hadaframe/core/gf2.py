"""Index arithmetic over GF(2)^L and Sylvester-Hadamard synthesis.

Indices are 0-based integers in [0, N⁺). Subtraction and addition are both XOR,
and the Hadamard entry for (i, j) is (-1) raised to the parity of i AND j.
"""

from functools import lru_cache
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.linalg import hadamard


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def binary_inner(i: int, j: int) -> int:
    """Inner product of the binary expansions of i and j, mod 2."""
    return (i & j).bit_count() & 1


def hadamard_entry(i: int, j: int) -> int:
    """Sylvester-Hadamard entry h(i, j) = (-1)^<i, j>."""
    return -1 if binary_inner(i, j) else 1


def xor_diff(a: int, b: int) -> int:
    """Group difference over GF(2)^L (bitwise XOR)."""
    return a ^ b


@lru_cache(maxsize=16)
def _hadamard_cached(n_plus: int) -> npt.NDArray[np.int8]:
    matrix = hadamard(n_plus).astype(np.int8)
    matrix.setflags(write=False)
    return matrix


def hadamard_matrix(n_plus: int) -> npt.NDArray[np.int8]:
    """Full N⁺ x N⁺ Sylvester-Hadamard matrix (read-only, cached).

    Raises:
        ValueError: If n_plus is not a power of two
    """
    if not _is_power_of_two(n_plus):
        raise ValueError(f"Hadamard order must be a power of two, got {n_plus}")
    return _hadamard_cached(n_plus)


def hadamard_rows(
    indices: Sequence[int], n_plus: int, n_cols: int
) -> npt.NDArray[np.int8]:
    """Select rows of the N⁺ Hadamard matrix, truncated to the first n_cols columns."""
    matrix = hadamard_matrix(n_plus)
    return np.array(matrix[np.asarray(indices, dtype=np.int64), :n_cols])


def walsh_hadamard_transform(v: npt.ArrayLike) -> npt.NDArray[np.generic]:
    """Fast Walsh-Hadamard transform along the last axis (natural order).

    out[k] = sum_l v[l] * (-1)^<k, l>. Applying it twice scales by N⁺.
    Integer inputs stay integer, so the result is exact.

    Raises:
        ValueError: If the length is not a power of two
    """
    a = np.asarray(v)
    dtype = np.int64 if np.issubdtype(a.dtype, np.integer) else np.float64
    a = np.array(a, dtype=dtype)
    n = a.shape[-1] if a.ndim else 0
    if not _is_power_of_two(n):
        raise ValueError(f"Transform length must be a power of two, got {n}")

    lead = a.shape[:-1]
    h = 1
    while h < n:
        blocks = a.reshape(*lead, n // (2 * h), 2, h)
        upper = blocks[..., 0, :]
        lower = blocks[..., 1, :]
        a = np.stack((upper + lower, upper - lower), axis=-2).reshape(*lead, n)
        h *= 2
    return a


def walsh_hadamard_transform_direct(v: npt.ArrayLike) -> npt.NDArray[np.generic]:
    """Reference O(N⁺²) transform as a matrix product with the Hadamard matrix."""
    a = np.asarray(v)
    dtype = np.int64 if np.issubdtype(a.dtype, np.integer) else np.float64
    a = a.astype(dtype)
    n = a.shape[-1] if a.ndim else 0
    matrix = hadamard_matrix(n).astype(dtype)
    return a @ matrix
