"""Capacity sweeps over (N, β⁻¹, p): AETF, iid, Marchenko-Pastur and Manova curves.

A sweep runs in two phases. First every distinct (N, M) without a cached GDS
is searched with the GA (unless no_search is set) and appended to the cache
in sorted order. Then every point is evaluated on a worker thread. Rows are
returned in plan order whatever the completion order, and every curve at
every point draws its seed from (seed, N, M, K, curve), so output does not
depend on the number of workers.
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, cast

import anyio
import anyio.to_thread
import numpy as np

from hadaframe.capacity.montecarlo import (
    CapacityConfig,
    CapacityEstimate,
    db_to_linear,
    monte_carlo,
)
from hadaframe.core.types import FrameShape
from hadaframe.csvio import Cell
from hadaframe.frames.bipolar import build_frame, random_bipolar_frame
from hadaframe.search.cache import GdsCache, GdsRecord
from hadaframe.search.config import GaConfig
from hadaframe.search.gds import GaResult, run_ga
from hadaframe.sweep.config import SweepConfig
from hadaframe.theory.laws import (
    law_capacity_per_user,
    law_practical_capacity_per_user,
    manova_law,
    mp_law,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")

SWEEP_COLUMNS = [
    "curve",
    "N",
    "M",
    "K",
    "beta_inv_req",
    "p_req",
    "beta_inv",
    "gamma",
    "p",
    "snr_db",
    "trials",
    "cap_per_user",
    "cap_per_user_stderr",
    "pcap_per_user",
    "pcap_per_user_stderr",
    "singular_trials",
]

CROSSOVER_COLUMNS = ["beta_inv", "p", "status", "from_n", "label"]

# Requested γ may exceed 1 by float noise only.
GAMMA_SLACK = 1e-12


class Curve(str, Enum):
    """Curves emitted per sweep point, in output order."""

    AETF = "aetf"
    IID = "iid"
    MP = "mp"
    MANOVA = "manova"


# Seed stream identifiers; fixed so seeds survive reordering of Curve.
_STREAM_GDS = 0
_STREAM_AETF = 1
_STREAM_IID_TRIALS = 2
_STREAM_IID_FRAME = 3


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit seed from a master seed and integer keys."""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SweepPoint:
    """One (N, M, K) to evaluate, with the requested ratios it came from.

    Attributes:
        n_users: N
        m_rows: M = round(p β⁻¹ N), clamped to [1, N]
        k_active: K = round(M / β⁻¹), clamped to [1, M]
        beta_inv_req: Requested β⁻¹
        p_req: Requested p
        snr_db: SNR in dB
        clamped: True if rounding had to be clamped
    """

    n_users: int
    m_rows: int
    k_active: int
    beta_inv_req: float
    p_req: float
    snr_db: float
    clamped: bool = False

    @property
    def shape(self) -> FrameShape:
        return FrameShape(n_users=self.n_users, m_rows=self.m_rows)

    @property
    def beta(self) -> float:
        return self.k_active / self.m_rows

    @property
    def beta_inv(self) -> float:
        return self.m_rows / self.k_active

    @property
    def gamma(self) -> float:
        return self.m_rows / self.n_users

    @property
    def p(self) -> float:
        return self.k_active / self.n_users

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "n_users": self.n_users,
            "m_rows": self.m_rows,
            "k_active": self.k_active,
            "beta_inv_req": self.beta_inv_req,
            "p_req": self.p_req,
            "beta_inv": self.beta_inv,
            "gamma": self.gamma,
            "p": self.p,
            "snr_db": self.snr_db,
            "clamped": self.clamped,
        }


def plan_point(
    n_users: int, beta_inv: float, p_active: float, snr_db: float
) -> Optional[SweepPoint]:
    """Round (N, β⁻¹, p) to integers; None when the requested γ = p β⁻¹ exceeds 1."""
    gamma_req = p_active * beta_inv
    if gamma_req > 1.0 + GAMMA_SLACK:
        return None
    m_raw = round_half_up(gamma_req * n_users)
    m_rows = min(max(m_raw, 1), n_users)
    k_raw = round_half_up(m_rows / beta_inv)
    k_active = min(max(k_raw, 1), m_rows)
    clamped = m_rows != m_raw or k_active != k_raw
    if clamped:
        logger.warning(
            "Clamped sweep point N=%d beta_inv=%g p=%g: M %d -> %d, K %d -> %d",
            n_users, beta_inv, p_active, m_raw, m_rows, k_raw, k_active,
        )
    return SweepPoint(
        n_users=n_users,
        m_rows=m_rows,
        k_active=k_active,
        beta_inv_req=beta_inv,
        p_req=p_active,
        snr_db=snr_db,
        clamped=clamped,
    )


def plan_sweep(cfg: SweepConfig) -> Tuple[List[SweepPoint], List[Tuple[float, float]]]:
    """Points in (β⁻¹, p, N) order, plus the (β⁻¹, p) pairs skipped for γ > 1."""
    points: List[SweepPoint] = []
    skipped: List[Tuple[float, float]] = []
    for beta_inv in cfg.beta_inv_list:
        for p_active in cfg.p_list:
            if p_active * beta_inv > 1.0 + GAMMA_SLACK:
                logger.warning(
                    "Skipping beta_inv=%g p=%g: gamma=%g exceeds 1",
                    beta_inv, p_active, p_active * beta_inv,
                )
                skipped.append((beta_inv, p_active))
                continue
            for n_users in cfg.n_list:
                point = plan_point(n_users, beta_inv, p_active, cfg.snr_db)
                if point is not None:
                    points.append(point)
    return points, skipped


@dataclass(frozen=True)
class SweepRow:
    """One curve at one point; None cells are written empty."""

    curve: Curve
    point: SweepPoint
    trials: Optional[int] = None
    cap_per_user: Optional[float] = None
    cap_per_user_stderr: Optional[float] = None
    pcap_per_user: Optional[float] = None
    pcap_per_user_stderr: Optional[float] = None
    singular_trials: Optional[int] = None

    @classmethod
    def from_estimate(cls, curve: Curve, point: SweepPoint, est: CapacityEstimate) -> "SweepRow":
        return cls(
            curve=curve,
            point=point,
            trials=est.trials,
            cap_per_user=est.capacity_per_user,
            cap_per_user_stderr=est.capacity_per_user_stderr,
            pcap_per_user=est.practical_per_user,
            pcap_per_user_stderr=est.practical_per_user_stderr,
            singular_trials=est.singular_trial_count,
        )

    def cells(self) -> List[Cell]:
        """Values in SWEEP_COLUMNS order."""
        pt = self.point
        return [
            self.curve.value,
            pt.n_users,
            pt.m_rows,
            pt.k_active,
            pt.beta_inv_req,
            pt.p_req,
            pt.beta_inv,
            pt.gamma,
            pt.p,
            pt.snr_db,
            self.trials,
            self.cap_per_user,
            self.cap_per_user_stderr,
            self.pcap_per_user,
            self.pcap_per_user_stderr,
            self.singular_trials,
        ]


@dataclass(frozen=True)
class CrossoverEntry:
    """Where AETF practical capacity starts to beat iid for one (β⁻¹, p).

    status is "all" (every swept N), "from" (every N >= from_n), "never",
    or "skipped" (γ > 1).
    """

    beta_inv: float
    p_active: float
    status: str
    from_n: Optional[int] = None

    @property
    def label(self) -> str:
        if self.status == "all":
            return "all N"
        if self.status == "from":
            return f"N >= {self.from_n}"
        if self.status == "skipped":
            return "--"
        return "never"

    def cells(self) -> List[Cell]:
        """Values in CROSSOVER_COLUMNS order."""
        return [self.beta_inv, self.p_active, self.status, self.from_n, self.label]


@dataclass
class SweepResult:
    """Everything a sweep produced."""

    points: List[SweepPoint]
    rows: List[SweepRow]
    skipped: List[Tuple[float, float]] = field(default_factory=list)
    records: Dict[Tuple[int, int], Optional[GdsRecord]] = field(default_factory=dict)

    def crossover(self, cfg: SweepConfig) -> List[CrossoverEntry]:
        return crossover_table(self.rows, cfg, self.skipped)


def _ga_config(cfg: SweepConfig, shape: FrameShape) -> GaConfig:
    return GaConfig(
        population_size=cfg.population_size,
        max_generations=cfg.max_generations,
        rng_seed=derive_seed(cfg.seed, shape.n_users, shape.m_rows, _STREAM_GDS),
    )


def _search(shape: FrameShape, ga_cfg: GaConfig) -> GaResult:
    return run_ga(shape, ga_cfg)


async def run_in_threads(jobs: Sequence[Callable[[], T]], limit: int) -> List[T]:
    """Run blocking callables on worker threads; results keep the input order."""
    limiter = anyio.CapacityLimiter(limit)
    results: List[Optional[T]] = [None] * len(jobs)

    async def _run(i: int, job: Callable[[], T]) -> None:
        results[i] = await anyio.to_thread.run_sync(job, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for i, job in enumerate(jobs):
            tg.start_soon(_run, i, job)
    return cast(List[T], results)


async def discover_gds(
    points: Sequence[SweepPoint], cfg: SweepConfig, cache: GdsCache
) -> Dict[Tuple[int, int], Optional[GdsRecord]]:
    """Best cached record per distinct (N, M); GA search for misses unless no_search."""
    keys = sorted({(pt.n_users, pt.m_rows) for pt in points})
    cached = cache.best_by_shape()
    found: Dict[Tuple[int, int], Optional[GdsRecord]] = {k: cached.get(k) for k in keys}
    misses = [k for k in keys if found[k] is None]
    if not misses:
        return found
    if cfg.no_search:
        for n_users, m_rows in misses:
            logger.warning("No cached GDS for N=%d M=%d; AETF cells left empty", n_users, m_rows)
        return found

    logger.info("Searching GDS for %d shapes", len(misses))
    shapes = [FrameShape(n_users=n, m_rows=m) for n, m in misses]
    configs = [_ga_config(cfg, shape) for shape in shapes]
    results = await run_in_threads(
        [functools.partial(_search, shape, ga_cfg) for shape, ga_cfg in zip(shapes, configs)],
        cfg.jobs,
    )
    for key, shape, ga_cfg, result in zip(misses, shapes, configs, results):
        if not result.converged:
            logger.info(
                "GDS search for N=%d M=%d stopped at fitness %.6g",
                shape.n_users, shape.m_rows, result.best_fitness,
            )
        record = GdsRecord.from_result(shape, result, ga_cfg)
        cache.append(record)
        found[key] = record
    return found


def _law_row(curve: Curve, point: SweepPoint, snr: float) -> SweepRow:
    try:
        if curve is Curve.MP:
            law = mp_law(point.beta)
        else:
            law = manova_law(point.beta, point.gamma)
    except ValueError as e:
        logger.warning("No %s reference at N=%d M=%d K=%d: %s",
                       curve.value, point.n_users, point.m_rows, point.k_active, e)
        return SweepRow(curve=curve, point=point)
    return SweepRow(
        curve=curve,
        point=point,
        cap_per_user=law_capacity_per_user(law, snr),
        pcap_per_user=law_practical_capacity_per_user(law, snr),
    )


def evaluate_point(
    point: SweepPoint, cfg: SweepConfig, record: Optional[GdsRecord]
) -> List[SweepRow]:
    """Rows for every curve at one point, in Curve order."""
    shape = point.shape
    snr = db_to_linear(point.snr_db)
    keys = (point.n_users, point.m_rows, point.k_active)

    def capacity_config(stream: int) -> CapacityConfig:
        return CapacityConfig(
            k_active=point.k_active,
            snr=snr,
            trials=cfg.trials,
            seed=derive_seed(cfg.seed, *keys, stream),
            iid_mode=cfg.iid_mode,
        )

    rows: List[SweepRow] = []
    if record is None:
        rows.append(SweepRow(curve=Curve.AETF, point=point))
    else:
        aetf = build_frame(record.index_set())
        estimate = monte_carlo(aetf, capacity_config(_STREAM_AETF))
        rows.append(SweepRow.from_estimate(Curve.AETF, point, estimate))

    iid = random_bipolar_frame(shape, derive_seed(cfg.seed, *keys, _STREAM_IID_FRAME))
    estimate = monte_carlo(iid, capacity_config(_STREAM_IID_TRIALS))
    rows.append(SweepRow.from_estimate(Curve.IID, point, estimate))
    rows.append(_law_row(Curve.MP, point, snr))
    rows.append(_law_row(Curve.MANOVA, point, snr))
    return rows


async def run_sweep(cfg: SweepConfig, cache: Optional[GdsCache] = None) -> SweepResult:
    """Plan, discover missing GDSs, then evaluate every point."""
    points, skipped = plan_sweep(cfg)
    cache = cache if cache is not None else GdsCache(cfg.cache)
    records = await discover_gds(points, cfg, cache)
    groups = await run_in_threads(
        [
            functools.partial(evaluate_point, pt, cfg, records.get((pt.n_users, pt.m_rows)))
            for pt in points
        ],
        cfg.jobs,
    )
    rows = [row for group in groups for row in group]
    logger.info(
        "Sweep finished: %d points, %d rows, %d skipped", len(points), len(rows), len(skipped)
    )
    return SweepResult(points=points, rows=rows, skipped=skipped, records=records)


def _aetf_wins(aetf: Optional[float], iid: Optional[float]) -> bool:
    if aetf is None or iid is None or math.isnan(aetf) or math.isnan(iid):
        return False
    # Two singular curves are a tie, not a win.
    if aetf == -math.inf:
        return False
    return aetf >= iid


def crossover_table(
    rows: Sequence[SweepRow],
    cfg: SweepConfig,
    skipped: Sequence[Tuple[float, float]] = (),
) -> List[CrossoverEntry]:
    """Smallest swept N from which AETF practical capacity stays >= iid, per (β⁻¹, p)."""
    pcap: Dict[Tuple[float, float, int, Curve], Optional[float]] = {}
    for row in rows:
        if row.curve in (Curve.AETF, Curve.IID):
            pt = row.point
            pcap[(pt.beta_inv_req, pt.p_req, pt.n_users, row.curve)] = row.pcap_per_user

    skipped_set = set(skipped)
    entries: List[CrossoverEntry] = []
    for beta_inv in cfg.beta_inv_list:
        for p_active in cfg.p_list:
            if (beta_inv, p_active) in skipped_set:
                entries.append(CrossoverEntry(beta_inv, p_active, "skipped"))
                continue
            ns = sorted(
                {n for (b, p, n, _c) in pcap if b == beta_inv and p == p_active}
            )
            wins = [
                _aetf_wins(
                    pcap.get((beta_inv, p_active, n, Curve.AETF)),
                    pcap.get((beta_inv, p_active, n, Curve.IID)),
                )
                for n in ns
            ]
            start = len(ns)
            while start > 0 and wins[start - 1]:
                start -= 1
            if not ns or start == len(ns):
                entries.append(CrossoverEntry(beta_inv, p_active, "never"))
            elif start == 0:
                entries.append(CrossoverEntry(beta_inv, p_active, "all", ns[0]))
            else:
                entries.append(CrossoverEntry(beta_inv, p_active, "from", ns[start]))
    return entries
