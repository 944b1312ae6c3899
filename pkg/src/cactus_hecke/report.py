"""Matplotlib figures written next to the tabular CLI output.

Everything renders through the Agg canvas so the module works headless, and
PNG metadata is stripped so repeated runs give identical bytes.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .coxeter import CoxGroup

_PNG_META = {"Software": None}


def _save(fig: Figure, path: Path) -> Path:
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    return path


def _index(cells: Sequence[Sequence[int]], n: int) -> np.ndarray:
    out = np.zeros(n, dtype=int)
    for k, cell in enumerate(cells):
        out[list(cell)] = k
    return out


def cell_heatmap(group: CoxGroup, left: Sequence[Sequence[int]], right: Sequence[Sequence[int]], path: Path) -> Path:
    """Grid of (left cell, right cell) incidence; each occupied square is one element."""
    n = len(group)
    li, ri = _index(left, n), _index(right, n)
    grid = np.zeros((len(left), len(right)), dtype=int)
    for x in range(n):
        grid[li[x], ri[x]] += 1
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot()
    im = ax.imshow(grid, cmap="viridis", interpolation="nearest")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel("right cell")
    ax.set_ylabel("left cell")
    ax.set_title(f"{group.label}: elements per left/right cell pair")
    fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, path)


def a_histogram(group: CoxGroup, a: Sequence[int], path: Path) -> Path:
    values = np.asarray(a)
    bins = np.arange(values.max() + 2) - 0.5
    fig = Figure(figsize=(5, 3.5))
    ax = fig.add_subplot()
    ax.hist(values, bins=bins, color="0.4", edgecolor="white")
    ax.set_xlabel("a(w)")
    ax.set_ylabel("number of elements")
    ax.set_title(f"{group.label}: a-function")
    return _save(fig, path)


def conjecture_grid(rows: Sequence[dict], path: Path) -> Path:
    """Subsets against parts; a cell is green when every check in it passed."""
    subsets = list(dict.fromkeys(r["I"] for r in rows))
    parts = list(dict.fromkeys(r["part"] for r in rows))
    ok = np.ones((len(subsets), len(parts)))
    seen = np.zeros_like(ok)
    for r in rows:
        i, j = subsets.index(r["I"]), parts.index(r["part"])
        seen[i, j] = 1
        if r["pass"] != "pass":
            ok[i, j] = 0
    ok[seen == 0] = np.nan
    fig = Figure(figsize=(1.2 * len(parts) + 2, 0.35 * len(subsets) + 1.5))
    ax = fig.add_subplot()
    ax.imshow(ok, cmap="RdYlGn", vmin=0, vmax=1, aspect="auto", interpolation="nearest")
    ax.set_xticks(range(len(parts)), parts)
    ax.set_yticks(range(len(subsets)), subsets)
    ax.set_title("conjecture checks (green = all pass)")
    fig.tight_layout()
    return _save(fig, path)


def orbit_sizes(group: CoxGroup, orbits: dict[str, Sequence[Sequence[int]]], path: Path) -> Path:
    fig = Figure(figsize=(5, 3.5))
    ax = fig.add_subplot()
    for k, (side, orbs) in enumerate(sorted(orbits.items())):
        sizes = sorted((len(o) for o in orbs), reverse=True)
        ax.plot(range(1, len(sizes) + 1), sizes, "o-", label=side, alpha=0.8, markersize=3 + k)
    ax.set_xlabel("orbit (by size)")
    ax.set_ylabel("size")
    ax.set_title(f"{group.label}: cactus orbits on the t-basis")
    ax.legend()
    return _save(fig, path)
