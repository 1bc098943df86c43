"""Monte-Carlo NOMA capacity for random K-column subframes.

Capacity is computed from Gram eigenvalues, never by simulating a decoder:

    C   = sum_i log2(1 + SNR λ_i)
    C_p = sum_i log2(SNR λ_i)        (-inf on a singular Gram)

Every trial draws its randomness from a generator seeded with
(seed, trial_index), so estimates do not depend on batching or ordering.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from hadaframe.frames.bipolar import BipolarFrame, random_bipolar_frame

logger = logging.getLogger(__name__)

# Eigenvalues with magnitude below this are exact zeros (rank deficiency).
ZERO_EIGEN_TOL = 1e-10

# Trials per batched eigen-solve.
TRIAL_BATCH = 64

FloatOrArray = Union[float, npt.NDArray[np.float64]]


class IidMode(str, Enum):
    """How iid baselines are sampled across trials."""

    FIXED_FRAME = "fixed_frame"
    FRESH_FRAME_PER_TRIAL = "fresh_frame_per_trial"


class CapacityConfig(BaseModel):
    """Monte-Carlo capacity settings.

    Attributes:
        k_active: Active users per trial (K)
        snr: Linear SNR
        trials: Number of independent K-subsets
        seed: Master seed
        iid_mode: Redraw iid frames per trial, or keep the given one
        epsilon_floor: Eigenvalue floor for practical capacity (0 keeps -inf)
    """

    model_config = ConfigDict(frozen=True)

    k_active: int = Field(gt=0)
    snr: float = Field(default=10.0, gt=0.0)
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    iid_mode: IidMode = IidMode.FRESH_FRAME_PER_TRIAL
    epsilon_floor: float = Field(default=0.0, ge=0.0)

    @classmethod
    def from_db(cls, snr_db: float, **kwargs: Any) -> "CapacityConfig":
        """Build with the SNR given in dB."""
        return cls(snr=db_to_linear(snr_db), **kwargs)


def db_to_linear(snr_db: float) -> float:
    """10^(dB/10)."""
    return float(10.0 ** (snr_db / 10.0))


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo mean and standard error of capacity and practical capacity.

    mean_practical is -inf whenever any trial hit a singular Gram; its
    standard error is then nan.
    """

    mean_capacity: float
    mean_practical: float
    stderr_capacity: float
    stderr_practical: float
    k_active: int
    m_rows: int
    trials: int
    singular_trial_count: int

    @property
    def capacity_per_user(self) -> float:
        return self.mean_capacity / self.k_active

    @property
    def capacity_per_user_stderr(self) -> float:
        return self.stderr_capacity / self.k_active

    @property
    def practical_per_user(self) -> float:
        return self.mean_practical / self.k_active

    @property
    def practical_per_user_stderr(self) -> float:
        return self.stderr_practical / self.k_active

    @property
    def capacity_per_resource(self) -> float:
        return self.mean_capacity / self.m_rows

    @property
    def practical_per_resource(self) -> float:
        return self.mean_practical / self.m_rows

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "mean_capacity": self.mean_capacity,
            "mean_practical": self.mean_practical,
            "stderr_capacity": self.stderr_capacity,
            "stderr_practical": self.stderr_practical,
            "capacity_per_user": self.capacity_per_user,
            "practical_per_user": self.practical_per_user,
            "capacity_per_resource": self.capacity_per_resource,
            "practical_per_resource": self.practical_per_resource,
            "trials": self.trials,
            "singular_trial_count": self.singular_trial_count,
        }


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent generator for one trial, derived from (seed, trial_index)."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial_index]))


def sample_subframe(
    f: BipolarFrame, k_active: int, rng: np.random.Generator
) -> npt.NDArray[np.int64]:
    """Uniform K-subset of the N columns, without replacement, sorted.

    Raises:
        ValueError: If K > N
    """
    n = f.shape.n_users
    if not 1 <= k_active <= n:
        raise ValueError(f"K must satisfy 1 <= K <= N={n}, got {k_active}")
    return np.sort(rng.choice(n, size=k_active, replace=False)).astype(np.int64)


def _subframe_eigenvalues(blocks: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Gram eigenvalues of (..., M, K) unit-norm blocks, descending, padded to K."""
    m, k = blocks.shape[-2], blocks.shape[-1]
    if k <= m:
        gram = np.swapaxes(blocks, -1, -2) @ blocks
        eigs = np.linalg.eigvalsh(gram)
    else:
        # Same nonzero spectrum on the smaller side; the rest are K - M zeros.
        gram = blocks @ np.swapaxes(blocks, -1, -2)
        nonzero = np.linalg.eigvalsh(gram)
        pad = np.zeros(nonzero.shape[:-1] + (k - m,))
        eigs = np.concatenate((pad, nonzero), axis=-1)
    eigs = np.where(np.abs(eigs) < ZERO_EIGEN_TOL, 0.0, eigs)
    eigs = np.clip(eigs, 0.0, None)
    return np.asarray(eigs[..., ::-1])


def gram_eigenvalues(f: BipolarFrame, cols: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Eigenvalues of the K x K Gram of the selected columns, descending, >= 0."""
    idx = np.asarray(cols, dtype=np.int64)
    if len(np.unique(idx)) != len(idx):
        raise ValueError("Column indices must be distinct")
    return _subframe_eigenvalues(f.entries[:, idx])


def _reduce(values: npt.NDArray[np.float64]) -> FloatOrArray:
    return float(values) if values.ndim == 0 else values


def capacity(eigs: npt.ArrayLike, snr: float) -> FloatOrArray:
    """sum_i log2(1 + snr λ_i) over the last axis."""
    lam = np.asarray(eigs, dtype=np.float64)
    return _reduce(np.sum(np.log2(1.0 + snr * lam), axis=-1))


def practical_capacity(eigs: npt.ArrayLike, snr: float, epsilon_floor: float = 0.0) -> FloatOrArray:
    """sum_i log2(snr max(λ_i, floor)); -inf if any eigenvalue is zero and floor is 0."""
    lam = np.maximum(np.asarray(eigs, dtype=np.float64), epsilon_floor)
    with np.errstate(divide="ignore"):
        return _reduce(np.sum(np.log2(snr * lam), axis=-1))


def _mean_stderr(values: npt.NDArray[np.float64]) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def monte_carlo(f: BipolarFrame, cfg: CapacityConfig) -> CapacityEstimate:
    """Average capacity and practical capacity over cfg.trials random K-subsets.

    iid frames are redrawn every trial in fresh_frame_per_trial mode;
    Hadamard-built frames are always used as given.

    Raises:
        ValueError: If K > N
    """
    shape = f.shape
    k = cfg.k_active
    if k > shape.n_users:
        raise ValueError(f"K={k} exceeds N={shape.n_users}")
    fresh = f.iid_seed is not None and cfg.iid_mode is IidMode.FRESH_FRAME_PER_TRIAL
    scale = 1.0 / math.sqrt(shape.m_rows)

    caps = np.empty(cfg.trials, dtype=np.float64)
    pcaps = np.empty(cfg.trials, dtype=np.float64)
    for start in range(0, cfg.trials, TRIAL_BATCH):
        stop = min(start + TRIAL_BATCH, cfg.trials)
        blocks = []
        for t in range(start, stop):
            rng = trial_rng(cfg.seed, t)
            frame = f
            if fresh:
                frame = random_bipolar_frame(shape, int(rng.integers(0, 2**63)))
            cols = sample_subframe(frame, k, rng)
            blocks.append(frame.signs[:, cols])
        eigs = _subframe_eigenvalues(np.stack(blocks).astype(np.float64) * scale)
        caps[start:stop] = capacity(eigs, cfg.snr)
        pcaps[start:stop] = practical_capacity(eigs, cfg.snr, cfg.epsilon_floor)

    singular = int(np.count_nonzero(np.isneginf(pcaps)))
    mean_cap, se_cap = _mean_stderr(caps)
    if singular:
        mean_pcap, se_pcap = float("-inf"), float("nan")
    else:
        mean_pcap, se_pcap = _mean_stderr(pcaps)

    logger.debug(
        "Monte-Carlo %s N=%d M=%d K=%d trials=%d: C=%.6g Cp=%.6g singular=%d",
        f.provenance, shape.n_users, shape.m_rows, k, cfg.trials, mean_cap, mean_pcap, singular,
    )
    return CapacityEstimate(
        mean_capacity=mean_cap,
        mean_practical=mean_pcap,
        stderr_capacity=se_cap,
        stderr_practical=se_pcap,
        k_active=k,
        m_rows=shape.m_rows,
        trials=cfg.trials,
        singular_trial_count=singular,
    )
