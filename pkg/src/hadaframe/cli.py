"""Command-line interface for hadaframe."""

import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Any, List, NoReturn, Optional, Sequence

import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from hadaframe.capacity.montecarlo import CapacityConfig, IidMode, db_to_linear, monte_carlo
from hadaframe.core.types import FrameShape, IndexSet
from hadaframe.csvio import Cell, emit_csv
from hadaframe.frames.bipolar import BipolarFrame, build_frame, export_csv, random_bipolar_frame
from hadaframe.frames.verify import ProfileReport, WelchReport, verify_profile, welch_metrics
from hadaframe.search.cache import CACHE_ENV_VAR, CacheIntegrityError, GdsCache, GdsRecord
from hadaframe.search.config import GaConfig
from hadaframe.search.gds import GaResult, exhaustive_search, run_ga
from hadaframe.sweep.config import load_sweep_config
from hadaframe.sweep.plot import render_figure, write_figure, write_figures
from hadaframe.sweep.runner import (
    CROSSOVER_COLUMNS,
    SWEEP_COLUMNS,
    CrossoverEntry,
    crossover_table,
    run_sweep,
)
from hadaframe.theory import (
    SpectralLaw,
    density_grid,
    get_law,
    law_capacity_per_user,
    law_practical_capacity_per_user,
)

app = typer.Typer(
    name="hadaframe",
    help="Bipolar AETFs from Hadamard rows and generalized difference sets, "
    "with NOMA capacity analysis",
)
# CSV goes to stdout; everything for humans goes to stderr.
console = Console(stderr=True)

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV_VAR = "HADAFRAME_LOG_LEVEL"
LOG_FILE_ENV_VAR = "HADAFRAME_LOG_FILE"

# Errors that mean bad input or a bad cache, reported with exit code 1.
INPUT_ERRORS = (ValueError, LookupError, CacheIntegrityError, OSError)

SIMULATE_COLUMNS = [
    "frame_type",
    "N",
    "M",
    "K",
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

THEORY_COLUMNS = [
    "law",
    "beta_inv",
    "gamma",
    "snr_db",
    "cap_per_user",
    "pcap_per_user",
    "atom_mass",
    "lambda_minus",
    "lambda_plus",
]

VERIFY_COLUMNS = [
    "N",
    "M",
    "classification",
    "i_ms",
    "i_max",
    "welch_bound",
    "tightness_residual",
    "max_dev_etf",
    "max_dev_lower",
    "max_dev_upper",
    "upper_level",
]

_log_handler: Optional[logging.Handler] = None


def _configure_logging(verbose: bool) -> None:
    """Attach one handler to the package logger (stderr or HADAFRAME_LOG_FILE)."""
    global _log_handler
    log_level = logging.DEBUG if verbose else logging.WARNING
    log_level_str = os.environ.get(LOG_LEVEL_ENV_VAR, "").upper()
    if not verbose and log_level_str in ("DEBUG", "INFO", "WARNING", "ERROR"):
        log_level = getattr(logging, log_level_str)

    log_file = os.environ.get(LOG_FILE_ENV_VAR)
    if log_file:
        handler: logging.Handler = logging.FileHandler(log_file)
    else:
        handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )

    package_logger = logging.getLogger("hadaframe")
    if _log_handler is not None:
        package_logger.removeHandler(_log_handler)
        _log_handler.close()
    package_logger.addHandler(handler)
    package_logger.setLevel(log_level)
    _log_handler = handler


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable debug logging"),
) -> None:
    """Bipolar AETF construction and NOMA capacity analysis."""
    _configure_logging(verbose)


def _fail(message: str) -> NoReturn:
    console.print(f"[red]Error: {message}[/red]")
    raise typer.Exit(1)


def _parse_indices(text: str) -> List[int]:
    try:
        return [int(item) for item in text.replace(" ", "").split(",") if item]
    except ValueError:
        raise ValueError(f"Indices must be comma-separated integers, got {text!r}") from None


def _split_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [item.strip() for item in text.split(",") if item.strip()]


def _select_index_set(
    n_users: int, m_rows: int, gds: Optional[Path], indices: Optional[str]
) -> IndexSet:
    """IndexSet from inline indices, or the best cached record for (N, M)."""
    shape = FrameShape(n_users=n_users, m_rows=m_rows)
    if indices is not None:
        return IndexSet.of(_parse_indices(indices), shape)
    record = GdsCache(gds).best(n_users, m_rows)
    return record.index_set()


def _cache_option() -> Any:
    return typer.Option(
        None,
        "--cache",
        "--gds",
        help="GDS cache file",
        envvar=CACHE_ENV_VAR,
    )


# ============================================================================
# GDS search
# ============================================================================


def _print_record(record: GdsRecord, converged: bool) -> None:
    table = Table(show_header=False, box=None)
    table.add_row("N / M / N⁺", f"{record.n_users} / {record.m_rows} / {record.n_plus}")
    table.add_row("fitness", f"{record.fitness:.6g}")
    table.add_row("peak residual", f"{record.peak_residual:.6g}")
    table.add_row("generations", str(record.generations_run))
    table.add_row("seed", str(record.rng_seed))
    table.add_row("indices", ", ".join(str(i) for i in record.indices))
    status = "[green]converged[/green]" if converged else "[yellow]best effort[/yellow]"
    console.print(Panel(table, title=f"[bold blue]GDS search[/bold blue] {status}"))


@app.command(name="search-gds")
def search_gds(
    n_users: int = typer.Option(..., "--n", help="Number of users N"),
    m_rows: int = typer.Option(..., "--m", help="Number of resources M"),
    population: int = typer.Option(100, "--pop", help="GA population size (even)"),
    generations: int = typer.Option(2000, "--generations", help="GA generation budget"),
    seed: int = typer.Option(0, "--seed", help="GA seed"),
    crossover_prob: float = typer.Option(0.9, "--crossover-prob"),
    mutation_prob: float = typer.Option(0.1, "--mutation-prob"),
    weight_peak: float = typer.Option(1.0, "--weight-peak", help="Weight on the N⁻ entry"),
    weight_rest: float = typer.Option(1e-4, "--weight-rest", help="Weight on the full distance"),
    cache: Optional[Path] = typer.Option(
        None, "--out", "--cache", help="GDS cache file to append to", envvar=CACHE_ENV_VAR
    ),
    exhaustive: bool = typer.Option(
        False, "--exhaustive", help="Score every M-subset instead (N⁺ <= 16)"
    ),
) -> None:
    """Search for a generalized difference set and append it to the cache.

    Exits 0 when the target is reached, 2 when only a best-effort set was found.
    """
    try:
        shape = FrameShape(n_users=n_users, m_rows=m_rows)
        cfg = GaConfig(
            population_size=population,
            max_generations=generations,
            crossover_prob=crossover_prob,
            mutation_prob=mutation_prob,
            weight_peak=weight_peak,
            weight_rest=weight_rest,
            rng_seed=seed,
        )
        if exhaustive:
            best_set, best_fitness = exhaustive_search(shape, cfg)[0]
            result = GaResult(
                best_set=best_set,
                best_fitness=best_fitness,
                fitness_history=[best_fitness],
                generations_run=0,
                converged=best_fitness <= cfg.success_threshold,
            )
        else:
            result = run_ga(shape, cfg)
        record = GdsRecord.from_result(shape, result, cfg)
        GdsCache(cache).append(record)
    except INPUT_ERRORS as e:
        _fail(str(e))

    _print_record(record, result.converged)
    if not result.converged:
        raise typer.Exit(2)


# ============================================================================
# Verification
# ============================================================================


def _verify_cells(shape: FrameShape, report: ProfileReport, welch: WelchReport) -> List[Cell]:
    return [
        shape.n_users,
        shape.m_rows,
        report.classification.value,
        welch.i_ms,
        welch.i_max,
        welch.welch_bound,
        welch.tightness_residual,
        report.max_dev_etf,
        report.max_dev_lower,
        report.max_dev_upper,
        report.upper_level,
    ]


@app.command()
def verify(
    n_users: int = typer.Option(..., "--n", help="Number of users N"),
    m_rows: int = typer.Option(..., "--m", help="Number of resources M"),
    gds: Optional[Path] = _cache_option(),
    indices: Optional[str] = typer.Option(
        None, "--indices", help="Comma-separated Hadamard row indices"
    ),
    tol: float = typer.Option(1e-12, "--tol", help="Tolerance for the exact classes"),
    csv_path: Optional[Path] = typer.Option(None, "--csv", help="Write a one-row report CSV"),
) -> None:
    """Classify a frame as exact-ETF, exact-AETF or approximate."""
    try:
        s = _select_index_set(n_users, m_rows, gds, indices)
        frame = build_frame(s)
        report = verify_profile(s, tol)
        welch = welch_metrics(frame)
    except INPUT_ERRORS as e:
        _fail(str(e))

    table = Table(title=f"Frame N={n_users} M={m_rows}")
    table.add_column("metric")
    table.add_column("value", justify="right")
    table.add_row("rows", ", ".join(str(i) for i in s.indices))
    table.add_row("Welch bound", f"{welch.welch_bound:.12g}")
    table.add_row("I_ms", f"{welch.i_ms:.12g}")
    table.add_row("I_max", f"{welch.i_max:.12g}")
    table.add_row("tightness residual", f"{welch.tightness_residual:.3g}")
    table.add_row("max dev (ETF)", f"{report.max_dev_etf:.3g}")
    table.add_row("max dev k < N⁻", f"{report.max_dev_lower:.3g}")
    table.add_row("max dev k >= N⁻", f"{report.max_dev_upper:.3g}")
    console.print(table)
    console.print(f"[bold]classification:[/bold] {report.classification.value}")

    if csv_path is not None:
        try:
            emit_csv(csv_path, VERIFY_COLUMNS, [_verify_cells(s.shape, report, welch)])
        except OSError as e:
            _fail(str(e))


# ============================================================================
# Capacity
# ============================================================================


def _simulate_cells(
    frame_type: str, frame: BipolarFrame, cfg: CapacityConfig, snr_db: float
) -> List[Cell]:
    est = monte_carlo(frame, cfg)
    shape = frame.shape
    k = cfg.k_active
    return [
        frame_type,
        shape.n_users,
        shape.m_rows,
        k,
        shape.m_rows / k,
        shape.gamma,
        k / shape.n_users,
        snr_db,
        est.trials,
        est.capacity_per_user,
        est.capacity_per_user_stderr,
        est.practical_per_user,
        est.practical_per_user_stderr,
        est.singular_trial_count,
    ]


@app.command()
def simulate(
    n_users: int = typer.Option(..., "--n", help="Number of users N"),
    m_rows: int = typer.Option(..., "--m", help="Number of resources M"),
    k_active: int = typer.Option(..., "--k", help="Active users per trial K"),
    gds: Optional[Path] = _cache_option(),
    indices: Optional[str] = typer.Option(
        None, "--indices", help="Comma-separated Hadamard row indices"
    ),
    aetf: bool = typer.Option(False, "--aetf", help="Simulate the cached AETF for (N, M)"),
    iid: bool = typer.Option(False, "--iid", help="Simulate an iid ±1 frame"),
    snr_db: float = typer.Option(10.0, "--snr-db", help="SNR in dB"),
    trials: int = typer.Option(1000, "--trials", help="Random K-subsets"),
    seed: int = typer.Option(0, "--seed", help="Monte-Carlo seed"),
    iid_mode: IidMode = typer.Option(IidMode.FRESH_FRAME_PER_TRIAL, "--iid-mode"),
    epsilon_floor: float = typer.Option(
        0.0, "--epsilon-floor", help="Eigenvalue floor for practical capacity (0 keeps -inf)"
    ),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (default stdout)"),
) -> None:
    """Monte-Carlo capacity per user of an AETF and/or an iid frame."""
    use_aetf = aetf or indices is not None or (gds is not None and not iid)
    if not (use_aetf or iid):
        _fail("Select a frame with --aetf, --indices, --gds or --iid")
    try:
        shape = FrameShape(n_users=n_users, m_rows=m_rows)
        if k_active > n_users:
            raise ValueError(f"K={k_active} exceeds N={n_users}")
        cfg = CapacityConfig.from_db(
            snr_db,
            k_active=k_active,
            trials=trials,
            seed=seed,
            iid_mode=iid_mode,
            epsilon_floor=epsilon_floor,
        )
        rows: List[List[Cell]] = []
        if use_aetf:
            frame = build_frame(_select_index_set(n_users, m_rows, gds, indices))
            rows.append(_simulate_cells("aetf", frame, cfg, snr_db))
        if iid:
            rows.append(_simulate_cells("iid", random_bipolar_frame(shape, seed), cfg, snr_db))
        emit_csv(out, SIMULATE_COLUMNS, rows)
    except INPUT_ERRORS as e:
        _fail(str(e))


@app.command()
def theory(
    beta_inv: float = typer.Option(..., "--beta-inv", help="M/K"),
    gamma: Optional[float] = typer.Option(None, "--gamma", help="M/N"),
    p_active: Optional[float] = typer.Option(None, "--p", help="K/N (gamma = p * beta_inv)"),
    snr_db: float = typer.Option(10.0, "--snr-db", help="SNR in dB"),
    laws: Optional[List[str]] = typer.Option(
        None, "--law", help="mp or manova (repeatable, default manova)"
    ),
    density: bool = typer.Option(
        False, "--density", help="Write the continuous densities on an x-grid instead"
    ),
    points: int = typer.Option(400, "--points", help="Grid points for --density"),
    svg: Optional[Path] = typer.Option(None, "--svg", help="Density figure (with --density)"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (default stdout)"),
) -> None:
    """Capacity per user under the Marchenko-Pastur and Manova laws."""
    if gamma is not None and p_active is not None:
        _fail("Give --gamma or --p, not both")
    if svg is not None and not density:
        _fail("--svg needs --density")
    if gamma is None and p_active is not None:
        gamma = p_active * beta_inv
    snr = db_to_linear(snr_db)
    names = [name.lower() for name in laws or ["manova"]]
    try:
        if beta_inv <= 0.0:
            raise ValueError(f"beta_inv must be positive, got {beta_inv}")
        selected = [get_law(name, 1.0 / beta_inv, gamma) for name in names]
        if density:
            _emit_density(names, selected, points, beta_inv, gamma, out, svg)
            return
        rows: List[List[Cell]] = []
        for name, law in zip(names, selected):
            rows.append([
                name,
                beta_inv,
                gamma,
                snr_db,
                law_capacity_per_user(law, snr),
                law_practical_capacity_per_user(law, snr),
                law.atom_mass,
                law.lambda_minus,
                law.lambda_plus,
            ])
        emit_csv(out, THEORY_COLUMNS, rows)
    except INPUT_ERRORS as e:
        _fail(str(e))


def _emit_density(
    names: List[str],
    selected: List[SpectralLaw],
    points: int,
    beta_inv: float,
    gamma: Optional[float],
    out: Optional[Path],
    svg: Optional[Path],
) -> None:
    xs, densities = density_grid(selected, points)
    rows: List[List[Cell]] = [
        [float(x), *(float(d) for d in densities[:, i])] for i, x in enumerate(xs)
    ]
    emit_csv(out, ["x", *names], rows)
    if svg is not None:
        title = f"Eigenvalue density (beta_inv={beta_inv:g}"
        title += f", gamma={gamma:g})" if gamma is not None else ")"
        series = {name: list(zip(xs.tolist(), d.tolist())) for name, d in zip(names, densities)}
        write_figure(render_figure(title, "x", "density", series), svg)
        console.print(f"[green]Wrote density figure to {svg}[/green]")


# ============================================================================
# Sweep
# ============================================================================


def _print_crossover(entries: Sequence[CrossoverEntry]) -> None:
    betas = sorted({e.beta_inv for e in entries})
    ps = sorted({e.p_active for e in entries})
    table = Table(title="AETF practical capacity >= iid")
    table.add_column("beta_inv")
    for p in ps:
        table.add_column(f"p={p:g}", justify="center")
    lookup = {(e.beta_inv, e.p_active): e.label for e in entries}
    for b in betas:
        table.add_row(f"{b:g}", *[lookup.get((b, p), "") for p in ps])
    console.print(table)


@app.command()
def sweep(
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Recipe file (key=value or YAML)"
    ),
    n_list: Optional[str] = typer.Option(None, "--n-list", help="Comma-separated N values"),
    beta_inv_list: Optional[str] = typer.Option(None, "--beta-inv-list"),
    p_list: Optional[str] = typer.Option(None, "--p-list"),
    snr_db: Optional[float] = typer.Option(None, "--snr-db"),
    trials: Optional[int] = typer.Option(None, "--trials"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    cache: Optional[Path] = typer.Option(
        None, "--cache", help="GDS cache file", envvar=CACHE_ENV_VAR
    ),
    population: Optional[int] = typer.Option(None, "--pop"),
    generations: Optional[int] = typer.Option(None, "--generations"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Worker threads"),
    no_search: Optional[bool] = typer.Option(
        None, "--no-search/--search", help="Skip the GA on cache misses"
    ),
    iid_mode: Optional[IidMode] = typer.Option(None, "--iid-mode"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (default stdout)"),
    svg: Optional[Path] = typer.Option(None, "--svg", help="Directory for SVG figures"),
) -> None:
    """Capacity per user of AETF, iid, Marchenko-Pastur and Manova over a sweep grid."""
    overrides = {
        "n_list": _split_list(n_list),
        "beta_inv_list": _split_list(beta_inv_list),
        "p_list": _split_list(p_list),
        "snr_db": snr_db,
        "trials": trials,
        "seed": seed,
        "cache": cache,
        "population_size": population,
        "max_generations": generations,
        "jobs": jobs,
        "no_search": no_search,
        "iid_mode": iid_mode,
    }
    try:
        cfg = load_sweep_config(config, overrides)
    except INPUT_ERRORS as e:
        _fail(str(e))
    logger.info("Sweep config: %s", cfg.model_dump())

    try:
        result = asyncio.run(run_sweep(cfg))
    except Exception as e:
        _fail(f"Sweep failed: {e}")

    entries = crossover_table(result.rows, cfg, result.skipped)
    try:
        emit_csv(out, SWEEP_COLUMNS, [row.cells() for row in result.rows])
        if out is not None:
            crossover_path = out.with_name(f"{out.stem}.crossover.csv")
            emit_csv(crossover_path, CROSSOVER_COLUMNS, [e.cells() for e in entries])
        if svg is not None:
            written = write_figures(result.rows, svg)
            console.print(f"[green]Wrote {len(written)} figures to {svg}[/green]")
    except INPUT_ERRORS as e:
        _fail(str(e))

    _print_crossover(entries)
    missing = sorted(k for k, v in result.records.items() if v is None)
    if missing:
        shapes = ", ".join(f"(N={n}, M={m})" for n, m in missing)
        console.print(f"[yellow]No GDS for {shapes}; AETF cells left empty[/yellow]")


# ============================================================================
# Export
# ============================================================================


@app.command(name="export-frame")
def export_frame(
    n_users: int = typer.Option(..., "--n", help="Number of users N"),
    m_rows: int = typer.Option(..., "--m", help="Number of resources M"),
    out: Path = typer.Option(..., "--out", help="CSV file for the ±1 signs"),
    gds: Optional[Path] = _cache_option(),
    indices: Optional[str] = typer.Option(
        None, "--indices", help="Comma-separated Hadamard row indices"
    ),
    iid_seed: Optional[int] = typer.Option(
        None, "--iid-seed", help="Export an iid frame with this seed instead"
    ),
) -> None:
    """Write a frame's ±1 signs as M rows of N comma-separated values."""
    try:
        if iid_seed is not None:
            frame = random_bipolar_frame(FrameShape(n_users=n_users, m_rows=m_rows), iid_seed)
        else:
            frame = build_frame(_select_index_set(n_users, m_rows, gds, indices))
        export_csv(frame, out)
    except INPUT_ERRORS as e:
        _fail(str(e))
    console.print(f"[green]Wrote {frame.provenance} frame {m_rows}x{n_users} to {out}[/green]")


@app.command()
def version() -> None:
    """Show version information."""
    from hadaframe import __version__
    console.print(f"[bold blue]hadaframe[/bold blue] v{__version__}")


if __name__ == "__main__":
    app()
