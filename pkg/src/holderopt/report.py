"""Figure rendering for experiment outputs: decay curves from trace CSVs and
rate plots from sweep summaries, written as PNG files next to the data."""

from __future__ import annotations

import glob
import json
import os
from typing import List, Optional

from .experiments import parse_csv


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_trace_figure(trace_path: str, out_path: Optional[str] = None) -> Optional[str]:
    """Plot suboptimality (when present) and regret against queries for one trace."""
    with open(trace_path, "r", encoding="utf-8") as handle:
        rows = parse_csv(handle.read())
    queries = [r[1] for r in rows]
    subopt = [r[2] for r in rows]
    regret = [r[3] for r in rows]
    has_subopt = any(v is not None and v > 0 for v in subopt)
    has_regret = any(v is not None for v in regret)
    if not has_subopt and not has_regret:
        return None

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    if has_subopt:
        pairs = [(q, v) for q, v in zip(queries, subopt) if v is not None and v > 0]
        ax.loglog([p[0] for p in pairs], [p[1] for p in pairs], label="suboptimality")
        ax.set_ylabel("suboptimality gap")
    if has_regret:
        pairs = [(q, v) for q, v in zip(queries, regret) if v is not None and v > 0]
        if pairs:
            ax.loglog([p[0] for p in pairs], [p[1] for p in pairs], label="regret", linestyle="--")
    ax.set_xlabel("oracle queries")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    out_path = out_path or os.path.splitext(trace_path)[0] + ".png"
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_sweep_figure(summary_glob: str, out_path: str) -> Optional[str]:
    """Plot final suboptimality against budget across a sweep's summary files."""
    points = []
    for path in sorted(glob.glob(summary_glob)):
        with open(path, "r", encoding="utf-8") as handle:
            summary = json.load(handle)
        final = summary.get("final_suboptimality")
        budget = summary.get("total_queries")
        if isinstance(final, (int, float)) and final > 0 and isinstance(budget, int) and budget:
            points.append((budget, final))
    if len(points) < 2:
        return None
    points.sort()
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog([p[0] for p in points], [p[1] for p in points], marker="o")
    ax.set_xlabel("oracle query budget")
    ax.set_ylabel("final suboptimality gap")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_directory(directory: str) -> List[str]:
    """Render figures for every trace CSV in a directory plus a sweep plot."""
    written = []
    for trace_path in sorted(glob.glob(os.path.join(directory, "*.csv"))):
        out = render_trace_figure(trace_path)
        if out:
            written.append(out)
    sweep_out = render_sweep_figure(
        os.path.join(directory, "*.json"), os.path.join(directory, "sweep_rates.png")
    )
    if sweep_out:
        written.append(sweep_out)
    return written
