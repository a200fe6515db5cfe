"""Figure rendering for the CLI report path.

Every run mode can emit a matplotlib figure next to its CSV output.  The
plots are diagnostic companions to the datasets, not publication artwork.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def profile_figure(profile, config, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(profile.x, np.maximum(profile.occupation, 1e-30), lw=0.8)
    for site in config.contacts:
        ax.axvline(site, color="crimson", ls=":", lw=0.8, alpha=0.6)
    ax.set_xlabel("site x / dx")
    ax.set_ylabel("|f_x|^2")
    ax.set_title("ground-state photon cloud")
    return _save(fig, path)


def diagram_figure(diagram, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.pcolormesh(diagram.x_grid, diagram.alpha_grid, diagram.delta_r,
                       shading="nearest", cmap="viridis", vmin=0.0, vmax=1.0)
    fig.colorbar(im, ax=ax, label="Delta_r / Delta")
    ax.set_xlabel("contact spacing x / dx")
    ax.set_ylabel("alpha")
    ax.set_title("renormalized splitting")
    return _save(fig, path)


def markov_figure(rows, path):
    x = [r["x"] for r in rows]
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(6.5, 5.5))
    axes[0].plot(x, [r["gamma_r_normalized"] for r in rows], "o-", ms=3)
    axes[0].set_ylabel("gamma_r / J_Ohm(Delta_r)")
    axes[1].plot(x, [r["lamb_shift"] for r in rows], "s-", ms=3, color="darkorange")
    axes[1].set_ylabel("Lamb shift")
    axes[1].set_xlabel("contact spacing x / dx")
    return _save(fig, path)


def trajectory_figure(traj, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(traj.times, traj.p_e, lw=1.0, label="P_e (lab)")
    ax.axhline(traj.p_e_gs, color="k", ls=":", lw=0.8, label="P_e^GS")
    ax.set_xlabel("t * Delta")
    ax.set_ylabel("P_e")
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    return _save(fig, path)


def dde_figure(t, c, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, np.abs(c) ** 2, lw=1.0)
    ax.set_xlabel("t * Delta")
    ax.set_ylabel("|c|^2")
    ax.set_title("reduced-model amplitude")
    return _save(fig, path)


def snapshot_figure(x, occupations, times, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    for n, t in zip(occupations, times):
        ax.plot(x, n, lw=0.8, label=f"t = {t:g}")
    ax.set_xlabel("site x / dx")
    ax.set_ylabel("n(x)")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def bound_scan_figure(reports, path):
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for r in reports:
        marker = "*" if r.coexisting else "o"
        ax.plot(r.alpha, r.n, marker, ms=10 if r.coexisting else 5,
                color="crimson" if r.coexisting else "steelblue")
    ax.set_xlabel("alpha at root")
    ax.set_ylabel("pole index n")
    ax.set_title("bound-state condition roots (stars: coexisting)")
    return _save(fig, path)
