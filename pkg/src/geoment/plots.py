"""Figure rendering for scan and fit outputs.

Each CLI report that writes delimited data can also drop a PNG next to it;
these helpers do the drawing and stay import-safe on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_scan(rows, path, family_label: str, asymptotic_label: str | None = None):
    """Entanglement versus qubit number, with the bound and model curves.

    `rows` are (n, e_g, bound, asymptotic-or-None) tuples as emitted by the
    scan command.
    """
    n = np.array([row[0] for row in rows], dtype=float)
    e_g = np.array([row[1] for row in rows])
    bound = np.array([row[2] for row in rows])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.fill_between(n, bound, 1.0, color="0.85", label="excluded by the bound")
    ax.plot(n, bound, color="0.4", lw=1.0)
    ax.plot(n, e_g, "o", ms=4, color="tab:blue", label=family_label)
    asym = [row[3] for row in rows]
    if any(a is not None for a in asym):
        mask = np.array([a is not None for a in asym])
        ax.plot(
            n[mask],
            np.array([a for a in asym if a is not None]),
            "--",
            color="tab:red",
            lw=1.2,
            label=asymptotic_label or "asymptotic model",
        )
    ax.set_xlabel("number of qubits N")
    ax.set_ylabel("geometric entanglement")
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fit(rows, fit, path):
    """Data with the fitted scaling curve on top, residuals below."""
    n = np.array([row[0] for row in rows], dtype=float)
    e_g = np.array([row[1] for row in rows])
    model = np.array([fit.predict(int(v)) for v in n])

    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(6.0, 5.0), sharex=True, height_ratios=[3, 1]
    )
    ax1.plot(n, e_g, "o", ms=4, color="tab:blue", label="data")
    ax1.plot(n, model, "-", color="tab:red", lw=1.2,
             label=f"{fit.model}, constant {fit.constant:.4g}")
    ax1.set_ylabel("geometric entanglement")
    ax1.legend(loc="lower right", fontsize=9)
    ax2.axhline(0.0, color="0.5", lw=0.8)
    ax2.plot(n, e_g - model, "o", ms=3, color="tab:green")
    ax2.set_xlabel("number of qubits N")
    ax2.set_ylabel("residual")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
