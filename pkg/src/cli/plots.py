"""
circloyd plots

Static SVG figures for the experiment outputs, drawn with matplotlib's
object API (no pyplot state). The hash salt is fixed and the date left
out, so the same PlotSpec always gives the same bytes.
"""

import logging
import math
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from matplotlib import rc_context
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

SVG_HASHSALT = "circloyd"


class PlotKind(str, Enum):
    SCATTER = "scatter"
    LINE = "line"


class PlotSeries(BaseModel):
    label: str = ""
    x: List[float] = Field(default_factory=list)
    y: List[float] = Field(default_factory=list)


class ReferenceLine(BaseModel):
    """Horizontal line y = value, e.g. the -1 stability boundary."""
    y: float
    label: str = ""


class PlotSpec(BaseModel):
    kind: PlotKind = PlotKind.SCATTER
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    series: List[PlotSeries] = Field(default_factory=list)
    references: List[ReferenceLine] = Field(default_factory=list)
    log_y: bool = False


class PlotSummary(BaseModel):
    path: str
    points_drawn: int
    points_dropped: int


def _usable(x: float, y: float, log_y: bool) -> bool:
    if not (math.isfinite(x) and math.isfinite(y)):
        return False
    return y > 0.0 or not log_y


def emit_svg(spec: PlotSpec, path: Union[str, Path]) -> PlotSummary:
    """
    Render spec to a standalone SVG file.

    Non-finite points, and non-positive ones on a log axis, are dropped and
    counted. Series groups carry gid series-<i>, reference lines reference-<i>.
    """
    fig = Figure(figsize=(6.4, 4.8))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(1, 1, 1)

    drawn = dropped = 0
    for i, series in enumerate(spec.series):
        points = [(x, y) for x, y in zip(series.x, series.y) if _usable(x, y, spec.log_y)]
        dropped += len(series.x) - len(points)
        drawn += len(points)
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        if spec.kind == PlotKind.SCATTER:
            ax.scatter(xs, ys, s=2.0, label=series.label or None, gid=f"series-{i}")
        else:
            ax.plot(xs, ys, linewidth=1.0, label=series.label or None, gid=f"series-{i}")

    for i, ref in enumerate(spec.references):
        ax.axhline(ref.y, linestyle="--", color="black", linewidth=0.8,
                   label=ref.label or None, gid=f"reference-{i}")

    if spec.log_y and drawn:
        ax.set_yscale("log")
    ax.set_title(spec.title)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if any(s.label for s in spec.series) or any(r.label for r in spec.references):
        ax.legend(loc="best", fontsize="small")

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with rc_context({"svg.hashsalt": SVG_HASHSALT, "svg.fonttype": "path"}):
        fig.savefig(target, format="svg", metadata={"Date": None})
    if dropped:
        logger.warning("%d non-plottable point(s) dropped from %s", dropped, target)
    logger.info("wrote %s (%d points)", target, drawn)
    return PlotSummary(path=str(target), points_drawn=drawn, points_dropped=dropped)


def sweep_plot(records, n: int) -> PlotSpec:
    """
    Stability diagram: post-transient angles against κ.

    Columns flagged as alternating get their own labelled series, since
    they show two rotated copies of one settled configuration.
    """
    usable = [r for r in records if not r.is_marker]
    settled = [r for r in usable if not r.alternating]
    hopping = [r for r in usable if r.alternating]
    series = [PlotSeries(label="settled" if hopping else "",
                         x=[r.kappa for r in settled], y=[r.angle for r in settled])]
    if hopping:
        series.append(PlotSeries(label="alternating (rotated copies)",
                                 x=[r.kappa for r in hopping], y=[r.angle for r in hopping]))
    return PlotSpec(
        kind=PlotKind.SCATTER,
        title=f"Lloyd stability diagram, n={n}",
        xlabel="kappa",
        ylabel="codepoint angle (rad)",
        series=series,
    )


def eigen_plot(records, n: int) -> PlotSpec:
    """λ_min against κ with the flip boundary at -1 and the neutral level at +1."""
    return PlotSpec(
        kind=PlotKind.LINE,
        title=f"smallest eigenvalue at the symmetric quantizer, n={n}",
        xlabel="kappa",
        ylabel="lambda_min",
        series=[PlotSeries(label="lambda_min", x=[r.kappa for r in records],
                           y=[r.lambda_min for r in records])],
        references=[ReferenceLine(y=-1.0, label="flip boundary"), ReferenceLine(y=1.0)],
    )


def lyapunov_plot(reports, n: int) -> PlotSpec:
    kappas = [r.kappa for r in reports]
    return PlotSpec(
        kind=PlotKind.LINE,
        title=f"largest Lyapunov exponent, n={n}",
        xlabel="kappa",
        ylabel="exponent (nats/iteration)",
        series=[
            PlotSeries(label="full", x=kappas, y=[r.max_exponent for r in reports]),
            PlotSeries(label="transverse", x=kappas, y=[r.max_transverse for r in reports]),
        ],
        references=[ReferenceLine(y=0.0)],
    )


def trace_plot(rows, title: Optional[str] = None) -> PlotSpec:
    return PlotSpec(
        kind=PlotKind.LINE,
        title=title or "SALA residuals",
        xlabel="iteration",
        ylabel="residual (rad)",
        series=[PlotSeries(label="residual", x=[float(r["t"]) for r in rows],
                           y=[r["residual"] for r in rows])],
        log_y=True,
    )
