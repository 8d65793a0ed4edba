"""SVG heatmaps of depth-1 parameter landscapes."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "copula-qaoa"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from copula_qaoa.domain.entities import GridCell, GridSearchResult  # noqa: E402
from copula_qaoa.domain.errors import InvalidArgumentError  # noqa: E402

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeatmapSummary:
    """What was drawn on a heatmap.

    Attributes
    ----------
        path: Written SVG file
        red_dots: Number of cells marked as beating the baseline
        star: Cell marked as the best
        top_cells: Cells circled as the three best

    """

    path: Path
    red_dots: int
    star: GridCell
    top_cells: Tuple[GridCell, ...]


def _edges(centers: Sequence[float]) -> np.ndarray:
    centers = np.asarray(centers, dtype=float)
    if len(centers) == 1:
        return np.array([centers[0] - 0.5, centers[0] + 0.5])
    mids = (centers[1:] + centers[:-1]) / 2
    return np.concatenate(
        [[centers[0] - (mids[0] - centers[0])], mids, [centers[-1] + (centers[-1] - mids[-1])]]
    )


def rank_cells(result: GridSearchResult) -> Tuple[GridCell, ...]:
    """Cells by best value descending; smaller gamma, then smaller beta, first on ties."""
    return tuple(sorted(result.cells, key=lambda c: (-c.best_value, c.gamma, c.beta)))


def emit_heatmap_svg(
    result: GridSearchResult,
    path: Union[str, Path],
    baseline_value: Optional[float] = None,
    title: str = "best observed value, p = 1",
) -> HeatmapSummary:
    """Render the best-observed-value landscape as SVG.

    Cells beating the baseline get a red dot, the argmax a star and the top
    three cells an open circle.

    Args:
    ----
        result: Grid search output
        path: Destination SVG file
        baseline_value: Value to beat; defaults to the (0, 0) cell's best value
        title: Figure title

    Returns:
    -------
        Summary of the marks drawn

    """
    if not result.cells:
        raise InvalidArgumentError("cannot draw an empty heatmap")
    baseline = result.baseline_value if baseline_value is None else baseline_value
    grid = np.array(result.best_value_grid())
    ranked = rank_cells(result)
    star, top = ranked[0], ranked[:3]
    dots = [c for c in result.cells if c.best_value > baseline]

    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh(_edges(result.betas), _edges(result.gammas), grid, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="best feasible value")
    if dots:
        ax.scatter(
            [c.beta for c in dots], [c.gamma for c in dots], s=6, c="red", label="beats baseline"
        )
    ax.scatter(
        [c.beta for c in top],
        [c.gamma for c in top],
        s=120,
        facecolors="none",
        edgecolors="white",
        linewidths=1.2,
        label="top 3",
    )
    ax.scatter([star.beta], [star.gamma], s=160, marker="*", c="gold", edgecolors="black")
    ax.set_xlabel("beta")
    ax.set_ylabel("gamma")
    ax.set_title(title)
    fig.tight_layout()
    target = Path(path)
    fig.savefig(target, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("wrote heatmap %s with %d red dots", target, len(dots))
    return HeatmapSummary(target, len(dots), star, tuple(top))
