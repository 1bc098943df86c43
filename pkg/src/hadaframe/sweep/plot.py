"""Line plots of sweep results and law densities, saved as SVG.

One figure per (β⁻¹, p) against N, and one per (N, p) against β⁻¹, with a
line per curve. Non-finite values (e.g. -inf practical capacity) are left
out of the line.
"""

import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from matplotlib.figure import Figure

from hadaframe.csvio import atomic_writer
from hadaframe.sweep.runner import Curve, SweepRow

logger = logging.getLogger(__name__)

FIGSIZE = (6.4, 4.2)

CURVE_STYLES: Dict[str, Dict[str, str]] = {
    Curve.AETF.value: {"color": "tab:red", "marker": "o", "linestyle": "-"},
    Curve.IID.value: {"color": "tab:blue", "marker": "s", "linestyle": "-"},
    Curve.MP.value: {"color": "tab:green", "marker": "", "linestyle": "--"},
    Curve.MANOVA.value: {"color": "tab:purple", "marker": "", "linestyle": "--"},
}

METRICS: Dict[str, str] = {
    "cap": "Capacity per user [bits]",
    "pcap": "Practical capacity per user [bits]",
}

Series = Mapping[str, Sequence[Tuple[float, float]]]


def render_figure(title: str, x_label: str, y_label: str, series: Series) -> Figure:
    """Figure with one line per series, finite points only."""
    fig = Figure(figsize=FIGSIZE, layout="tight")
    ax = fig.add_subplot()
    ax.set_title(title)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.3, linestyle="--")

    plotted = 0
    for name, pts in series.items():
        ordered = sorted((x, y) for x, y in pts if math.isfinite(x) and math.isfinite(y))
        if not ordered:
            continue
        xs, ys = zip(*ordered)
        ax.plot(xs, ys, label=name, **CURVE_STYLES.get(name, {}))
        plotted += 1

    if plotted:
        ax.legend(loc="best")
    else:
        ax.text(0.5, 0.5, "no data", ha="center", va="center", color="gray",
                transform=ax.transAxes)
    return fig


def _metric(row: SweepRow, metric: str) -> Optional[float]:
    return row.cap_per_user if metric == "cap" else row.pcap_per_user


def _collect(
    rows: Sequence[SweepRow], metric: str, group_key: str
) -> Dict[Tuple[float, float], Dict[str, List[Tuple[float, float]]]]:
    groups: Dict[Tuple[float, float], Dict[str, List[Tuple[float, float]]]] = defaultdict(
        lambda: defaultdict(list)
    )
    for row in rows:
        value = _metric(row, metric)
        if value is None:
            continue
        pt = row.point
        if group_key == "n":
            groups[(pt.beta_inv_req, pt.p_req)][row.curve.value].append((pt.n_users, value))
        else:
            groups[(pt.n_users, pt.p_req)][row.curve.value].append((pt.beta_inv_req, value))
    return groups


def figures_vs_n(rows: Sequence[SweepRow], metric: str = "cap") -> Dict[str, Figure]:
    """Figure name -> Figure, one per (β⁻¹, p), capacity against N."""
    figures: Dict[str, Figure] = {}
    for (beta_inv, p_active), series in sorted(_collect(rows, metric, "n").items()):
        name = f"{metric}_vs_n_binv{beta_inv:g}_p{p_active:g}"
        title = f"{METRICS[metric]} vs N (beta_inv={beta_inv:g}, p={p_active:g})"
        figures[name] = render_figure(title, "N", METRICS[metric], series)
    return figures


def figures_vs_beta_inv(rows: Sequence[SweepRow], metric: str = "cap") -> Dict[str, Figure]:
    """Figure name -> Figure, one per (N, p), capacity against β⁻¹."""
    figures: Dict[str, Figure] = {}
    for (n_users, p_active), series in sorted(_collect(rows, metric, "beta_inv").items()):
        name = f"{metric}_vs_beta_inv_n{int(n_users)}_p{p_active:g}"
        title = f"{METRICS[metric]} vs beta_inv (N={int(n_users)}, p={p_active:g})"
        figures[name] = render_figure(title, "beta_inv", METRICS[metric], series)
    return figures


def write_figure(fig: Figure, path: Path) -> Path:
    """Save one figure as SVG, atomically."""
    path = Path(path)
    with atomic_writer(path) as f:
        fig.savefig(f, format="svg")
    return path


def write_figures(
    rows: Sequence[SweepRow], out_dir: Path, metrics: Sequence[str] = ("cap", "pcap")
) -> List[Path]:
    """Write every figure for every metric as <out_dir>/<name>.svg."""
    out_dir = Path(out_dir)
    written: List[Path] = []
    for metric in metrics:
        if metric not in METRICS:
            raise ValueError(f"Unknown metric: {metric}. Supported: {', '.join(METRICS)}")
        figures = {**figures_vs_n(rows, metric), **figures_vs_beta_inv(rows, metric)}
        for name, fig in figures.items():
            written.append(write_figure(fig, out_dir / f"{name}.svg"))
    logger.info("Wrote %d figures to %s", len(written), out_dir)
    return written
