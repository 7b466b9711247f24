"""Report figures rendered to files with the Agg canvas (no display needed)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Circle as CirclePatch
from matplotlib.patches import Rectangle


def _save(fig: Figure, path, metadata: dict | None) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=110, metadata=metadata or {})
    return path


def zeta_grid_figure(rows: Sequence[Sequence[float]], path, title: str = "",
                     metadata: dict | None = None) -> Path:
    """Heat map of ``log10|ζ|`` over the sampled grid."""
    arr = np.asarray(rows, dtype=float)
    xs, ys = np.unique(arr[:, 0]), np.unique(arr[:, 1])
    grid = np.full((ys.size, xs.size), np.nan)
    ix = np.searchsorted(xs, arr[:, 0])
    iy = np.searchsorted(ys, arr[:, 1])
    grid[iy, ix] = arr[:, 4]
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    extent = (xs[0], xs[-1], ys[0], ys[-1]) if xs.size > 1 and ys.size > 1 else None
    im = ax.imshow(grid, origin="lower", aspect="auto", extent=extent, cmap="viridis")
    fig.colorbar(im, ax=ax, label="log10 |zeta|")
    ax.set_xlabel("Re s")
    ax.set_ylabel("Im s")
    ax.set_title(title)
    return _save(fig, path, metadata)


def zeros_figure(report: dict, path, title: str = "", metadata: dict | None = None) -> Path:
    """Located zeros inside the search region, sized by multiplicity."""
    fig = Figure(figsize=(5.5, 4.5))
    ax = fig.add_subplot()
    region = report["region"]
    if region["kind"] == "disk":
        (cx, cy), r = region["center"], region["radius"]
        ax.add_patch(CirclePatch((cx, cy), r, fill=False, lw=1.2))
        ax.set_xlim(cx - 1.1 * r, cx + 1.1 * r)
        ax.set_ylim(cy - 1.1 * r, cy + 1.1 * r)
    else:
        w = region["x1"] - region["x0"]
        h = region["y1"] - region["y0"]
        ax.add_patch(Rectangle((region["x0"], region["y0"]), w, h, fill=False, lw=1.2))
        ax.set_xlim(region["x0"] - 0.05 * w, region["x1"] + 0.05 * w)
        ax.set_ylim(region["y0"] - 0.05 * h, region["y1"] + 0.05 * h)
    zs = report["zeros"]
    if zs:
        ax.scatter([z["re"] for z in zs], [z["im"] for z in zs],
                   s=[30 * z["multiplicity"] for z in zs], color="crimson", zorder=3)
    ax.axvline(0.5, color="grey", lw=0.8, ls=":")
    ax.set_xlabel("Re s")
    ax.set_ylabel("Im s")
    ax.set_title(title or f"{len(zs)} zeros, winding {report['counts']['argument_principle']}")
    return _save(fig, path, metadata)


def block_growth_figure(taus: Sequence[float], sizes: Sequence[int], slope: float,
                        intercept: float, path, delta: float | None = None,
                        metadata: dict | None = None) -> Path:
    """``log #B(τ)`` against ``log(1/τ)`` with the least-squares line."""
    x = np.log(1 / np.asarray(taus))
    fig = Figure(figsize=(5.5, 4))
    ax = fig.add_subplot()
    ax.plot(x, np.log(sizes), "o", label="blocks")
    xx = np.linspace(x.min(), x.max(), 50)
    ax.plot(xx, slope * xx + intercept, "-", label=f"fit, slope {slope:.3f}")
    if delta is not None:
        ax.plot(xx, delta * (xx - x.mean()) + np.log(sizes).mean(), "--",
                label=f"slope {delta:.3f} (growth exponent)")
    ax.set_xlabel("log(1/tau)")
    ax.set_ylabel("log #B(tau)")
    ax.legend()
    return _save(fig, path, metadata)


def bucket_figure(rows: Sequence[Sequence], path, title: str = "",
                  metadata: dict | None = None) -> Path:
    """Pair counts per ``(a, c)`` bucket."""
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    if rows:
        a = np.array([r[0] for r in rows])
        c = np.array([r[1] for r in rows])
        grid = np.zeros((c.max() + 1, a.max() + 1))
        for ai, ci, k, _ in rows:
            grid[ci, ai] = k
        im = ax.imshow(grid, origin="lower", cmap="magma")
        fig.colorbar(im, ax=ax, label="pairs")
    else:
        ax.text(0.5, 0.5, "no off-diagonal pairs", ha="center", va="center")
    ax.set_xlabel("a")
    ax.set_ylabel("c")
    ax.set_title(title)
    return _save(fig, path, metadata)


def count_figure(witnesses: Sequence[Sequence[int]], n: int, R: float, path,
                 metadata: dict | None = None) -> Path:
    """Cumulative count of level-n lattice points by norm, with the bound shape."""
    norms = np.sort([math.sqrt(a * a + b * b + c * c + d * d) for a, b, c, d in witnesses])
    fig = Figure(figsize=(5.5, 4))
    ax = fig.add_subplot()
    if norms.size:
        ax.step(norms, np.arange(1, norms.size + 1), where="post", label="count")
    rr = np.linspace(max(1.0, norms[0] if norms.size else 1.0), R, 100)
    shape = (rr / n) ** 0.1 * (rr**2 / n**3 + rr / n + 1)
    scale = norms.size / shape[-1] if norms.size else 1.0
    ax.plot(rr, scale * shape, "--", label="bound shape (scaled)")
    ax.set_xlabel("norm bound")
    ax.set_ylabel("count")
    ax.legend()
    return _save(fig, path, metadata)


def pipeline_figure(report: dict, path, metadata: dict | None = None) -> Path:
    """Pointwise-bound scan over the center grid next to the Jensen circle."""
    s = report["summary"]
    fig = Figure(figsize=(10, 4))
    ax1, ax2 = fig.subplots(1, 2)
    grid = report["c_grid"]
    ax1.semilogy([g["c"] for g in grid], [max(abs(g["minus_log_abs"]), 1e-300) for g in grid], "o-")
    ax1.axhline(s["pointwise_bound"], color="crimson", ls="--", label="tau * index")
    ax1.set_xlabel("c")
    ax1.set_ylabel("|log|zeta(c)||")
    ax1.legend()
    c, R, r = s["c"], s["jensen_radius"], s["target_radius"]
    ax2.add_patch(CirclePatch((c, 0), R, fill=False, lw=1.2, label="Jensen circle"))
    ax2.add_patch(CirclePatch((c, 0), r, fill=False, ls="--", lw=1.0, label="target disk"))
    zs = report["zeros"]
    if zs:
        ax2.scatter([z["re"] for z in zs], [z["im"] for z in zs], color="crimson", zorder=3)
    ax2.axvline(0.5, color="grey", lw=0.8, ls=":")
    ax2.set_xlim(c - 1.1 * R, c + 1.1 * R)
    ax2.set_ylim(-1.1 * R, 1.1 * R)
    ax2.set_aspect("equal")
    ax2.set_xlabel("Re s")
    ax2.legend(loc="upper right")
    return _save(fig, path, metadata)
