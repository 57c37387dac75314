"""Figure rendering for the report paths (written next to the CSV/JSON)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import ode


def flow_figure(traj, params, report, path):
    """Four panels: b(t) and a(t), volume, Lambda(t), (T-t) Lambda(t)."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5))
    ts = np.array(traj.times)
    bs = np.array(traj.bs)
    a_s = np.array(traj.a_series())

    ax = axes[0, 0]
    ax.plot(ts, bs, label="b(t)")
    ax.plot(ts, a_s, label="a(t)")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title(f"scales (A={params.A:g}, eps={params.epsilon:g})")

    ax = axes[0, 1]
    ax.plot(ts, np.array(traj.volume_series()))
    ax.set_xlabel("t")
    ax.set_ylabel("relative volume a b^6")

    lam = np.array([ode.lambda_t(s, params) for s in traj.states()])
    ax = axes[1, 0]
    ax.plot(ts, lam)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("Lambda(t)")

    ax = axes[1, 1]
    T = report.get("T_max", math.inf)
    if math.isfinite(T):
        mask = ts < T
        ax.plot(ts[mask], (T - ts[mask]) * lam[mask])
        ax.set_ylabel("(T - t) Lambda(t)")
    else:
        ax.text(0.5, 0.5, "no finite-time singularity", ha="center", va="center")
    ax.set_xlabel("t")

    fig.suptitle(
        f"regime {report.get('condition')}: {report.get('outcome')}"
        + (f", type {report.get('singularity_type')}" if report.get("singularity_type") else "")
    )
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def verify_figure(results, path):
    """Horizontal residual bars on a log axis with tolerance markers."""
    names = [r.check_id for r in results]
    residuals = [max(r.residual, 1e-18) for r in results]
    tols = [max(r.tolerance, 1e-18) for r in results]
    colors = ["tab:green" if r.status == "pass" else "tab:red" for r in results]

    fig, ax = plt.subplots(figsize=(8, 0.32 * len(names) + 1.4))
    y = np.arange(len(names))
    ax.barh(y, residuals, color=colors)
    ax.scatter(tols, y, marker="|", color="k", s=80, label="tolerance", zorder=3)
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xscale("log")
    ax.set_xlabel("residual (floor 1e-18)")
    ax.invert_yaxis()
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def sweep_figure(rows, path):
    """(A, eps) scatter colored by regime."""
    regimes = sorted({row["regime"]["condition"] for row in rows})
    cmap = plt.get_cmap("viridis", max(len(regimes), 2))
    color = {r: cmap(i) for i, r in enumerate(regimes)}

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for r in regimes:
        xs = [row["params"]["A"] for row in rows if row["regime"]["condition"] == r]
        ys = [row["params"]["epsilon"] for row in rows if row["regime"]["condition"] == r]
        ax.scatter(xs, ys, label=r, color=color[r], s=36)
    ax.set_xlabel("A")
    ax.set_ylabel("epsilon")
    ax.legend(fontsize=8)
    ax.set_title("regime classification")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
