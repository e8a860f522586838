"""Figure rendering for reports, written to files next to the data outputs."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_spectrum", "render_scan", "render_trend"]

_FIGSIZE = (6.4, 4.2)


def render_spectrum(report, path) -> None:
    """Sphere representatives in the (re, im_radius) half-plane, marker area
    scaled by multiplicity, with the norm ball boundary for context."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    res = [e.sphere.re for e in report.spheres]
    rads = [e.sphere.im_radius for e in report.spheres]
    mults = [e.multiplicity for e in report.spheres]
    ax.scatter(res, rads, s=[40 * m for m in mults], c="tab:blue", zorder=3,
               label="spheres (area ~ multiplicity)")
    b = report.norm_bound
    th = np.linspace(0, np.pi, 200)
    ax.plot(b * np.cos(th), b * np.sin(th), "--", c="gray", lw=1,
            label=f"norm ball, radius {b:.3g}")
    ax.axhline(0.0, c="black", lw=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("|Im|")
    ax.set_ylim(bottom=-0.05 * max(b, 1.0))
    ax.legend(loc="best", fontsize=8)
    ax.set_title("similarity spheres of the spectrum")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scan(grid, path) -> None:
    """Two-panel log10 heatmap of the sigma_min fields over the half-slice."""
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0), sharey=True)
    floor = 1e-300
    for ax, data, name in (
        (axes[0], grid.sigma_min_t_lambda, "sigma_min(T_lambda)"),
        (axes[1], grid.sigma_min_delta, "sigma_min(Delta_lambda)"),
    ):
        z = np.log10(np.maximum(data, floor))
        pm = ax.pcolormesh(grid.xs, grid.ys, z, shading="nearest", cmap="viridis")
        fig.colorbar(pm, ax=ax, label=f"log10 {name}")
        iy, ix = np.unravel_index(np.argmin(data), data.shape)
        ax.plot(grid.xs[ix], grid.ys[iy], "r+", ms=10)
        ax.set_xlabel("Re")
        ax.set_title(name)
    axes[0].set_ylabel("|Im|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trend(report, path) -> None:
    """sigma_min against truncation size on log axes."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    vals = np.maximum(np.asarray(report.sigma_min_values, dtype=float), 1e-300)
    ax.loglog(report.sizes, vals, "o-", c="tab:blue")
    ax.set_xlabel("truncation size N")
    ax.set_ylabel("sigma_min(T_lambda at N)")
    ax.set_title(f"trend verdict: {report.verdict}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
