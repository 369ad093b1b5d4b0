"""Matplotlib rendering for the figure-reproduction path.

The CSV tables are the primary artifact; these renderers turn the same
in-memory arrays into quick-look PNGs next to them.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def render_phase_map(path, couplings, grid, matrix, title=""):
    """Heatmap of P(phi) over (coupling, phi)."""
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    mesh = ax.pcolormesh(couplings, grid, matrix.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$P(\varphi)$")
    ax.set_xlabel(r"$V/\gamma_1$")
    ax.set_ylabel(r"$\varphi$")
    ax.set_yticks([0, np.pi, 2 * np.pi], ["0", r"$\pi$", r"$2\pi$"])
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_phase_map_pair(path, couplings, grid, matrices):
    fig, axes = plt.subplots(1, len(matrices), figsize=(5.2 * len(matrices), 4.0))
    for ax, (tag, matrix) in zip(np.atleast_1d(axes), matrices.items()):
        mesh = ax.pcolormesh(couplings, grid, matrix.T, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=r"$P(\varphi)$")
        ax.set_xlabel(r"$V/\gamma_1$")
        ax.set_ylabel(r"$\varphi$")
        ax.set_yticks([0, np.pi, 2 * np.pi], ["0", r"$\pi$", r"$2\pi$"])
        ax.set_title(tag, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_curve_panels(path, grid, panels):
    """2x3 grid of curve families; panels maps name -> (x label, column, curves)."""
    fig, axes = plt.subplots(2, 3, figsize=(12.5, 6.5), sharex=True)
    for ax, (name, (scan, column, curves)) in zip(axes.flat, panels.items()):
        for label, values in curves.items():
            ax.plot(grid, values, lw=1.2, label=label.rsplit("_", 1)[-1])
        ax.set_title(f"{name}: {column}", fontsize=9)
        ax.set_xlabel(rf"$\{scan[:-1]}_{scan[-1]}/\gamma_1$")
        ax.set_ylabel(column)
    axes.flat[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_map_panels(path, panels):
    """2x3 grid of heatmaps; panels maps name -> (x, y, Z, x name, y name, column)."""
    fig, axes = plt.subplots(2, 3, figsize=(13.0, 7.0))
    for ax, (name, (xs, ys, values, x_name, y_name, column)) in zip(
        axes.flat, panels.items()
    ):
        mesh = ax.pcolormesh(xs, ys, values.T, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=column)
        ax.set_title(name, fontsize=9)
        ax.set_xlabel(x_name)
        ax.set_ylabel(y_name)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
