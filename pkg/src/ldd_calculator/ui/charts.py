from __future__ import annotations

import math
from typing import Dict, List, Sequence

import plotly.graph_objects as go

from ldd_calculator.utils.io_utils import ensure_parent_dir

COLORS = [
    "rgb(0, 114, 178)",
    "rgb(213, 94, 0)",
    "rgb(0, 158, 115)",
    "rgb(204, 121, 167)",
    "rgb(230, 159, 0)",
    "rgb(86, 180, 233)",
    "rgb(0, 0, 0)",
]


def fidelity_curves_figure(rows: Sequence[Sequence], title: str) -> go.Figure:
    """Infidelity against p, one trace per strategy; rows follow the fidelity CSV columns."""
    series: Dict[str, List[tuple[float, float]]] = {}
    for strategy, p, _p_dd, _p_qec, _p_qed, F, _pa in rows:
        eps = 1 - float(F)
        if float(p) > 0 and eps > 0:
            series.setdefault(strategy, []).append((float(p), eps))

    fig = go.Figure()
    for i, (strategy, points) in enumerate(series.items()):
        points.sort()
        fig.add_trace(
            go.Scatter(
                x=[p for p, _ in points],
                y=[e for _, e in points],
                mode="lines+markers",
                name=strategy,
                line=dict(color=COLORS[i % len(COLORS)], width=2),
            )
        )
    fig.update_layout(
        title=dict(text=title, x=0.5, font=dict(size=16)),
        xaxis=dict(title="p", type="log"),
        yaxis=dict(title="1 - F", type="log"),
        showlegend=True,
        height=500,
    )
    return fig


def advantage_heatmap_figure(rows: Sequence[Sequence], title: str) -> go.Figure:
    """R over the (p_dd, p_qec) plane; rows follow the sweep CSV columns at a single p."""
    p_dd = sorted({float(r[1]) for r in rows})
    p_qec = sorted({float(r[2]) for r in rows})
    grid = [[None] * len(p_dd) for _ in p_qec]
    for _p, d, q, _comparator, R, _degenerate in rows:
        value = float(R)
        grid[p_qec.index(float(q))][p_dd.index(float(d))] = value if math.isfinite(value) else None

    fig = go.Figure(
        go.Heatmap(
            x=p_dd,
            y=p_qec,
            z=grid,
            colorscale="RdBu",
            zmid=0,
            colorbar=dict(title="R"),
        )
    )
    fig.update_layout(
        title=dict(text=title, x=0.5, font=dict(size=16)),
        xaxis=dict(title="p_dd"),
        yaxis=dict(title="p_qec"),
        height=500,
    )
    return fig


def write_chart(fig: go.Figure, filepath: str, div_id: str) -> None:
    """Self-contained HTML; a fixed div id keeps reruns byte-identical."""
    ensure_parent_dir(filepath)
    fig.write_html(filepath, include_plotlyjs=True, full_html=True, div_id=div_id)
