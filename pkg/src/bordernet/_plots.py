"""SVG figure rendering from emitted CSV files.

Every renderer is a pure function of CSV content: it parses the file,
groups rows, and draws — no simulation state leaks in, so plots can be
regenerated offline from the CSV alone. Output is deterministic
(fixed hash salt, no embedded timestamps), so re-running a seeded
experiment reproduces the SVG bytes as well as the CSV bytes.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from typing import Callable, Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "render_connection",
    "render_rate",
    "render_density",
    "render_heatmap",
]

_COLORS = plt.get_cmap("tab10").colors


def _read_rows(csv_path: str) -> List[Dict[str, str]]:
    with open(csv_path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def _group_by(rows: Sequence[Dict[str, str]], key: str) -> Dict[float, List[Dict[str, str]]]:
    grouped: Dict[float, List[Dict[str, str]]] = {}
    for row in rows:
        grouped.setdefault(float(row[key]), []).append(row)
    return grouped


def _fmt_theta(value: float) -> str:
    for label, target in (("pi/2", math.pi / 2), ("pi", math.pi), ("2pi", 2 * math.pi)):
        if abs(value - target) <= 1e-9:
            return f"theta = {label}"
    return f"theta = {value:.4g}"


def _new_figure():
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
    return fig, ax


def _save(fig, svg_path: str) -> None:
    """Write the figure atomically with reproducible SVG ids and no date."""
    fig.tight_layout()
    directory = os.path.dirname(os.path.abspath(svg_path))
    fd, tmp = tempfile.mkstemp(suffix=".svg", dir=directory)
    os.close(fd)
    try:
        with plt.rc_context({"svg.hashsalt": "bordernet"}):
            fig.savefig(tmp, format="svg", metadata={"Date": None})
        os.replace(tmp, svg_path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)


def _errorbar(ax, xs, means, errs, color, label: Optional[str] = None) -> None:
    ax.errorbar(
        xs, means, yerr=[3 * e for e in errs], fmt="o", markersize=3.5,
        color=color, ecolor=color, elinewidth=0.8, capsize=2, linestyle="none",
        label=label,
    )


def render_connection(csv_path: str, svg_path: str) -> None:
    """Connection probability vs distance: analytic curves, MC points (3
    standard-error bars), and the infinite-network benchmark, log y-axis."""
    groups = _group_by(_read_rows(csv_path), "theta")
    fig, ax = _new_figure()
    for i, theta in enumerate(sorted(groups)):
        rows = sorted(groups[theta], key=lambda r: float(r["d_ij"]))
        color = _COLORS[i % len(_COLORS)]
        xs = [float(r["d_ij"]) for r in rows]
        ax.plot(
            xs, [float(r["analytic_H"]) for r in rows],
            color=color, linewidth=1.5, label=_fmt_theta(theta),
        )
        ax.plot(
            xs, [float(r["benchmark_H_infinite"]) for r in rows],
            color=color, linewidth=1.0, linestyle="--", alpha=0.6,
        )
        _errorbar(
            ax, xs, [float(r["mc_mean"]) for r in rows],
            [float(r["mc_stderr"]) for r in rows], color,
        )
    ax.set_yscale("log")
    ax.set_xlabel("link distance d")
    ax.set_ylabel("connection probability H")
    ax.legend(loc="best", fontsize=9, title="solid: finite domain / dashed: R->inf")
    _save(fig, svg_path)


def render_rate(csv_path: str, mean_svg_path: str, variance_svg_path: str) -> None:
    """Mean rate and rate variance vs distance, one SVG each."""
    groups = _group_by(_read_rows(csv_path), "theta")

    def panel(svg_path, analytic_col, mc_col, err_col, ylabel):
        fig, ax = _new_figure()
        for i, theta in enumerate(sorted(groups)):
            rows = sorted(groups[theta], key=lambda r: float(r["d_ij"]))
            color = _COLORS[i % len(_COLORS)]
            xs = [float(r["d_ij"]) for r in rows]
            ax.plot(
                xs, [float(r[analytic_col]) for r in rows],
                color=color, linewidth=1.5, label=_fmt_theta(theta),
            )
            _errorbar(
                ax, xs, [float(r[mc_col]) for r in rows],
                [float(r[err_col]) for r in rows], color,
            )
        ax.set_xlabel("link distance d")
        ax.set_ylabel(ylabel)
        ax.legend(loc="best", fontsize=9)
        _save(fig, svg_path)

    panel(mean_svg_path, "analytic_rate", "mc_rate", "mc_rate_stderr",
          "mean rate (nats/Hz)")
    panel(variance_svg_path, "analytic_variance", "mc_variance",
          "mc_variance_stderr", "rate variance")


def render_density(
    csv_path: str, svg_path_for: Callable[[float], str]
) -> List[str]:
    """Success density vs transmitter intensity, one SVG per epsilon value.

    ``svg_path_for`` maps an epsilon value to its output path; the list of
    written paths is returned.
    """
    by_eps = _group_by(_read_rows(csv_path), "epsilon")
    written = []
    for eps in sorted(by_eps):
        groups = _group_by(by_eps[eps], "theta")
        fig, ax = _new_figure()
        for i, theta in enumerate(sorted(groups)):
            rows = sorted(groups[theta], key=lambda r: float(r["rho_t"]))
            color = _COLORS[i % len(_COLORS)]
            xs = [float(r["rho_t"]) for r in rows]
            ax.plot(
                xs, [float(r["analytic_mu"]) for r in rows],
                color=color, linewidth=1.5, label=_fmt_theta(theta),
            )
            closed = [
                (x, float(r["closed_form_mu"]))
                for x, r in zip(xs, rows) if r["closed_form_mu"]
            ]
            if closed:
                ax.plot(
                    [c[0] for c in closed], [c[1] for c in closed],
                    color=color, linewidth=1.0, linestyle=":", alpha=0.7,
                )
            _errorbar(
                ax, xs, [float(r["mc_mean"]) for r in rows],
                [float(r["mc_stderr"]) for r in rows], color,
            )
        ax.set_xlabel("transmitter intensity rho_t")
        ax.set_ylabel("success density mu")
        ax.set_title(f"epsilon = {eps:g}")
        ax.legend(loc="best", fontsize=9)
        path = svg_path_for(eps)
        _save(fig, path)
        written.append(path)
    return written


def render_heatmap(csv_path: str, svg_path: str) -> None:
    """Spatial outage heatmap: one colored cell per receiver position."""
    rows = _read_rows(csv_path)
    xs = sorted({float(r["x"]) for r in rows})
    ys = sorted({float(r["y"]) for r in rows})
    x_index = {v: i for i, v in enumerate(xs)}
    y_index = {v: i for i, v in enumerate(ys)}
    grid = [[math.nan] * len(xs) for _ in ys]
    for r in rows:
        grid[y_index[float(r["y"])]][x_index[float(r["x"])]] = float(r["outage_mean"])
    # Cell centres are uniformly spaced; recover the cell size for extents.
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    fig, ax = _new_figure()
    image = ax.imshow(
        grid,
        origin="lower",
        extent=(xs[0] - dx / 2, xs[-1] + dx / 2, ys[0] - dy / 2, ys[-1] + dy / 2),
        aspect="equal",
        cmap="viridis",
    )
    fig.colorbar(image, ax=ax, label="outage probability")
    ax.set_xlabel("receiver x")
    ax.set_ylabel("receiver y")
    _save(fig, svg_path)
