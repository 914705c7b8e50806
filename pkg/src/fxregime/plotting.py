"""Render sweep tables to figure files (headless matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_CURVE_STYLE = {
    "double_exponential": dict(color="tab:blue", marker="o", label="double exponential"),
    "normal": dict(color="tab:green", marker="s", label="normal"),
    "no_jump": dict(color="tab:red", marker="^", label="no jumps"),
}


def render_price_sweep(rows, path, title: str | None = None) -> None:
    """Plot price against S/K, one line per curve, and save to ``path``."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for curve in dict.fromkeys(row.curve for row in rows):
        pts = [(row.s_over_k, row.price) for row in rows if row.curve == curve]
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, markersize=4, **_CURVE_STYLE.get(curve, dict(label=curve)))
    ax.set_xlabel("S/K")
    ax.set_ylabel("option price")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_theta_sweep(rows, path, title: str | None = None) -> None:
    """Plot price against theta1, one line per theta2 value, and save to ``path``."""
    good = [row for row in rows if not row.error]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for t2 in dict.fromkeys(row.theta2 for row in good):
        pts = sorted((row.theta1, row.price) for row in good if row.theta2 == t2)
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", markersize=4, label=f"theta2 = {t2:g}")
    ax.set_xlabel("theta1")
    ax.set_ylabel("option price at S/K = 1")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if good:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
