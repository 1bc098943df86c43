"""Capacity sweeps, sweep recipes and figures."""

from hadaframe.sweep.config import SweepConfig, load_sweep_config, parse_key_value, read_recipe
from hadaframe.sweep.plot import (
    figures_vs_beta_inv,
    figures_vs_n,
    render_figure,
    write_figure,
    write_figures,
)
from hadaframe.sweep.runner import (
    CROSSOVER_COLUMNS,
    SWEEP_COLUMNS,
    CrossoverEntry,
    Curve,
    SweepPoint,
    SweepResult,
    SweepRow,
    crossover_table,
    derive_seed,
    discover_gds,
    evaluate_point,
    plan_point,
    plan_sweep,
    run_in_threads,
    run_sweep,
)

__all__ = [
    "SweepConfig",
    "load_sweep_config",
    "parse_key_value",
    "read_recipe",
    "figures_vs_beta_inv",
    "figures_vs_n",
    "render_figure",
    "write_figure",
    "write_figures",
    "CROSSOVER_COLUMNS",
    "SWEEP_COLUMNS",
    "CrossoverEntry",
    "Curve",
    "SweepPoint",
    "SweepResult",
    "SweepRow",
    "crossover_table",
    "derive_seed",
    "discover_gds",
    "evaluate_point",
    "plan_point",
    "plan_sweep",
    "run_in_threads",
    "run_sweep",
]
