"""Matplotlib report figures rendered next to the CSV output.

The CSV files are the machine contract; these figures are the
human-readable view of the same data.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.savefig(path, dpi=130, metadata={"Software": None})
    plt.close(fig)


def render_history(path, history):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    its = [h.iteration for h in history]
    res = [max(h.residual, 1e-300) for h in history]
    ax.semilogy(its, res, "-", lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative residual")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_profile(path, problem, columns):
    if problem.kind == "couette":
        fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.6), sharex=True)
        x = columns["x"]
        for ax, name in zip(axes.flat, ("rho", "theta", "u2", "q1")):
            ax.plot(x, columns[name], lw=1.2)
            ax.set_ylabel(name)
            ax.grid(alpha=0.3)
        for ax in axes[1]:
            ax.set_xlabel("x")
    elif problem.kind == "shock":
        fig, ax = plt.subplots(figsize=(5.6, 4.0))
        x = columns["x"]
        for name, style in (("rho_norm", "-"), ("u1_norm", "--"),
                            ("theta_norm", ":")):
            ax.plot(x, columns[name], style, lw=1.4, label=name)
        ax.set_xlabel("x")
        ax.set_ylabel("normalized profile")
        ax.legend()
        ax.grid(alpha=0.3)
    else:  # cavity
        n1 = np.unique(columns["x"]).size
        n2 = np.unique(columns["y"]).size
        th = np.asarray(columns["theta"]).reshape(n1, n2)
        u1 = np.asarray(columns["u1"]).reshape(n1, n2)
        u2 = np.asarray(columns["u2"]).reshape(n1, n2)
        fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0))
        im = axes[0].imshow(th.T, origin="lower", extent=(0, 1, 0, 1),
                            aspect="equal", cmap="viridis")
        fig.colorbar(im, ax=axes[0], label="theta")
        axes[0].set_title("temperature")
        speed = np.hypot(u1, u2)
        xs = np.unique(columns["x"])
        ys = np.unique(columns["y"])
        axes[1].streamplot(xs, ys, u1.T, u2.T, color=speed.T, density=1.1,
                           linewidth=0.8, cmap="magma")
        axes[1].set_xlim(0, 1)
        axes[1].set_ylim(0, 1)
        axes[1].set_aspect("equal")
        axes[1].set_title("velocity streamlines")
    fig.tight_layout()
    _save(fig, path)
