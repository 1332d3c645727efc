"""Offline PNG figures rendered next to the delimited exports.

Figures are drawn with the object-oriented Agg canvas only (no pyplot),
so rendering is safe from worker threads and carries no global state.
PNG metadata that would vary between runs is suppressed, keeping the
bytes reproducible for the manifest hashes.
"""

from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .core import FieldPair, GridSpec
from .equilibrium import RadialProfiles
from .pde import SimTrace
from .stochastic import PathBundle

_SAVE = dict(dpi=110, metadata={"Software": None})


def _new_fig(width: float = 7.0, height: float = 4.5) -> Figure:
    fig = Figure(figsize=(width, height))
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path: str) -> None:
    fig.savefig(path, format="png", **_SAVE)


def fig_traces(traces: dict[float, SimTrace], path: str) -> None:
    """Spatial averages over time, one curve pair per tax rate."""
    fig = _new_fig()
    ax_v, ax_k = fig.subplots(1, 2)
    for tau in sorted(traces):
        tr = traces[tau]
        ax_v.plot(tr.times, tr.mean_v, label=f"tau={tau:g}")
        ax_k.plot(tr.times, tr.mean_k, label=f"tau={tau:g}")
    ax_v.set_xlabel("t")
    ax_v.set_ylabel("mean V")
    ax_k.set_xlabel("t")
    ax_k.set_ylabel("mean K")
    ax_v.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def fig_bifurcation(taus, v_final, k_final, path: str) -> None:
    fig = _new_fig()
    ax = fig.subplots()
    ax.plot(taus, v_final, "o-", label="final mean V")
    ax.plot(taus, k_final, "s-", label="final mean K")
    ax.set_xlabel("tau")
    ax.set_ylabel("final spatial average")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def fig_fields(gs: GridSpec, state: FieldPair, path: str, label: str = "") -> None:
    """Filled contours of V and K side by side."""
    fig = _new_fig(8.0, 3.6)
    ax_v, ax_k = fig.subplots(1, 2)
    x, y = gs.x_coords(), gs.y_coords()
    for ax, fld, name in ((ax_v, state.v, "V"), (ax_k, state.k, "K")):
        m = ax.contourf(x, y, fld.T, levels=21)
        fig.colorbar(m, ax=ax)
        ax.set_title(f"{name} {label}".strip(), fontsize=9)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    fig.tight_layout()
    _save(fig, path)


def fig_radial(rp: RadialProfiles, path: str, label: str = "") -> None:
    fig = _new_fig()
    ax_s, ax_m = fig.subplots(1, 2)
    ax_s.plot(rp.distances, rp.v_star, label="V*")
    ax_s.plot(rp.distances, rp.k_star, label="K*")
    ax_s.set_xlabel("d")
    ax_s.set_ylabel("steady level")
    ax_s.legend(fontsize=8)
    ax_m.plot(rp.distances, rp.margin, label="tau - tau_c")
    ax_m.axhline(0.0, color="k", lw=0.8)
    if rp.d_threshold is not None:
        ax_m.axvline(rp.d_threshold, color="r", lw=0.8, ls="--")
    ax_m.set_xlabel("d")
    ax_m.set_ylabel("existence margin")
    ax_m.legend(fontsize=8)
    if label:
        fig.suptitle(label, fontsize=10)
    fig.tight_layout()
    _save(fig, path)


def fig_criticality(curves: dict[str, tuple[np.ndarray, np.ndarray]], path: str) -> None:
    """Margin curves tau - tau_c(d) per profile name."""
    fig = _new_fig()
    ax = fig.subplots()
    for name in sorted(curves):
        d, margin = curves[name]
        ax.plot(d, margin, label=name)
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("d")
    ax.set_ylabel("tau - tau_c")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def fig_lorenz(points: np.ndarray, gini: float, path: str) -> None:
    fig = _new_fig(4.8, 4.5)
    ax = fig.subplots()
    ax.plot(points[:, 0], points[:, 1], label=f"Lorenz (Gini={gini:.4f})")
    ax.plot([0, 1], [0, 1], "k--", lw=0.8)
    ax.set_xlabel("population share")
    ax.set_ylabel("attractiveness share")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def fig_paths(bundle: PathBundle, path: str, max_paths: int = 20) -> None:
    """Sample paths of V and K with the ensemble mean overlaid."""
    fig = _new_fig()
    ax_v, ax_k = fig.subplots(1, 2)
    n = min(max_paths, bundle.paths.shape[0])
    for i in range(n):
        ax_v.plot(bundle.times, bundle.paths[i, :, 2], lw=0.5, alpha=0.4)
        ax_k.plot(bundle.times, bundle.paths[i, :, 3], lw=0.5, alpha=0.4)
    ax_v.plot(bundle.times, bundle.mean_v, "k", lw=1.5, label="mean")
    ax_k.plot(bundle.times, bundle.mean_k, "k", lw=1.5, label="mean")
    ax_v.set_xlabel("t")
    ax_v.set_ylabel("V")
    ax_k.set_xlabel("t")
    ax_k.set_ylabel("K")
    ax_v.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def fig_rings(fine_d, fine_v, fine_k, mids, ring_v, ring_k, path: str) -> None:
    fig = _new_fig()
    ax = fig.subplots()
    ax.plot(fine_d, fine_v, label="continuum V*")
    ax.plot(fine_d, fine_k, label="continuum K*")
    ax.plot(mids, ring_v, "o", ms=4, label="ring V*")
    ax.plot(mids, ring_k, "s", ms=4, label="ring K*")
    ax.set_xlabel("d")
    ax.set_ylabel("steady level")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
