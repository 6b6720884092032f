"""Figures written next to the CSV output (non-interactive backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return path


def field_panels(path, xgrid, fields: dict, title=""):
    """One image per named scalar field, laid out in a row."""
    n = len(fields)
    fig, axes = plt.subplots(1, n, figsize=(3.6 * n, 3.2), squeeze=False)
    ext = (xgrid.ax, xgrid.bx, xgrid.ay, xgrid.by)
    for ax, (name, f) in zip(axes[0], fields.items()):
        im = ax.imshow(np.asarray(f).T, origin="lower", extent=ext, aspect="auto", cmap="viridis")
        ax.set_title(name)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.colorbar(im, ax=ax, shrink=0.8)
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def velocity_slice(path, vgrid, g, title=""):
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    ext = (vgrid.v[0], vgrid.v[-1], vgrid.v[0], vgrid.v[-1])
    im = ax.imshow(np.asarray(g).T, origin="lower", extent=ext, aspect="equal", cmap="magma")
    ax.set_xlabel("v")
    ax.set_ylabel("w")
    ax.set_title(title or "g at a fixed spatial node")
    fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, path)


def diagnostics(path, header, rows):
    """Time series of the deviation from equilibrium and the conservation drift."""
    cols = {h: i for i, h in enumerate(header)}

    def column(name):
        return np.array([float(r[cols[name]]) if r[cols[name]] != "" else np.nan for r in rows])

    t = column("time")
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4))
    dev = column("max_dev")
    if np.any(np.isfinite(dev)) and np.nanmax(dev) > 0:
        axes[0].semilogy(t, np.where(dev > 0, dev, np.nan))
        axes[0].set_ylabel("max |g - 1|")
    else:
        axes[0].plot(t, column("min_rho"))
        axes[0].set_ylabel("min rho")
    axes[0].set_xlabel("t")
    mass = column("mass")
    scale = abs(mass[0]) if mass.size and mass[0] else 1.0
    for name in ("mass", "mom_x", "mom_y"):
        q = column(name)
        if q.size:
            axes[1].plot(t, (q - q[0]) / scale, label=name)
    axes[1].set_xlabel("t")
    axes[1].set_ylabel("drift / initial mass")
    axes[1].legend()
    fig.tight_layout()
    return _save(fig, path)
