"""Figures written next to the CSV and JSON reports.

SVG output is made byte-stable: a fixed hash salt and no date metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "svg.hashsalt": "costreg",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)


def plot_profit_contour(grid, path, break_even=None, title="Model net profit"):
    """Filled contour of profit over (beta, price) with the zero level drawn.

    ``break_even`` is an optional (betas, prices) curve overlaid dashed.
    """
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        levels = np.linspace(grid.values.min(), grid.values.max(), 11)
        filled = ax.contourf(grid.beta_axis, grid.price_axis, grid.values.T,
                             levels=levels, cmap="RdYlGn")
        if grid.values.min() < 0 < grid.values.max():
            ax.contour(grid.beta_axis, grid.price_axis, grid.values.T, levels=[0.0],
                       colors="black", linewidths=2.0)
        if break_even is not None:
            ax.plot(*break_even, "k--", linewidth=1.0, label="break-even price")
            ax.legend(loc="upper left", frameon=False)
        ax.set_xlabel("false-positive probability beta")
        ax.set_ylabel("price C")
        ax.set_ylim(grid.price_axis[0], grid.price_axis[-1])
        ax.set_title(title)
        fig.colorbar(filled, ax=ax, label="profit")
        _save(fig, path)


def plot_cv_curve(result, path):
    """Mean held-out loss against lam on a log axis, folds as faint dots."""
    scores = sorted(result.scores, key=lambda s: s.lam)
    lams = np.array([s.lam for s in scores])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for s in scores:
            ax.plot([s.lam] * len(s.fold_scores), s.fold_scores, ".", color="0.7", markersize=3)
        ax.plot(lams, [s.mean for s in scores], "o-", color="C0", markersize=3,
                label="mean held-out loss")
        ax.axvline(result.best_lambda, color="C3", linestyle=":",
                   label=f"best lambda = {result.best_lambda:.4g}")
        ax.set_xscale("log")
        ax.set_xlabel("lambda")
        ax.set_ylabel("held-out loss")
        ax.legend(frameon=False)
        _save(fig, path)
