"""Delimited and raster exports shared by the command-line harness.

Every CSV is comma-separated with a mandatory header row, '.' decimal
separator, newline-terminated rows, and floats rendered by repr() so a
reader recovers the exact binary value. Heatmaps are binary PGM (P5),
min-max normalized to the 0..255 gray range, written row-major in array
order: image rows run along the x axis (first index), columns along y.
The manifest lists every produced file as 'relative-path<TAB>sha-256',
sorted by path, with any failed sweep members recorded as trailing
comment lines.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

from .core import FieldPair, GridSpec
from .equilibrium import RadialProfiles
from .indicators import IndicatorSeries
from .pde import SimTrace
from .stochastic import PathBundle


def fmt(x) -> str:
    """Exact, locale-independent rendering of one CSV cell."""
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: str, header: list[str], rows, footer: str | None = None) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(c) for c in row))
    if footer is not None:
        lines.append(footer)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def snapshot_csv(path: str, gs: GridSpec, state: FieldPair) -> None:
    x = gs.x_coords()
    y = gs.y_coords()
    rows = (
        (i, j, x[i], y[j], state.v[i, j], state.k[i, j])
        for i in range(gs.nx)
        for j in range(gs.ny)
    )
    write_csv(path, ["i", "j", "x", "y", "V", "K"], rows)


def trace_csv(path: str, trace: SimTrace) -> None:
    rows = zip(trace.times, trace.mean_v, trace.mean_k)
    write_csv(path, ["t", "mean_V", "mean_K"], rows)


def indicators_csv(path: str, ser: IndicatorSeries) -> None:
    rows = zip(ser.times, ser.r_tax, ser.r_tax_ad, ser.v_bar, ser.r_kv, ser.r_kv_adj, ser.y_adj_bar, ser.npv_bar)
    write_csv(path, ["t", "R_tax", "R_tax_AD", "V_bar", "R_KV", "R_KV_adj", "Y_adj_bar", "NPV_bar"], rows)


def lorenz_csv(path: str, points: np.ndarray, gini: float) -> None:
    write_csv(path, ["pop_share", "psi_share"], points, footer=f"gini={fmt(gini)}")


def scan_csv(path: str, rows) -> None:
    """Bifurcation scan rows: (tau, mu, A, EquilibriumPoint)."""
    out = []
    for tau, mu, a, ep in rows:
        out.append((tau, mu, a, ep.exists, ep.v_star, ep.k_star, ep.trace_j, ep.det_j, ep.classification))
    write_csv(path, ["tau", "mu", "A", "exists", "V_star", "K_star", "trace_J", "det_J", "classification"], out)


def radial_csv(path: str, rp: RadialProfiles) -> None:
    rows = zip(rp.distances, rp.a, rp.mu, rp.tau_c, rp.margin, rp.v_star, rp.k_star)
    write_csv(path, ["d", "A", "mu", "tau_c", "margin", "V_star", "K_star"], rows)


def paths_csv(path: str, bundle: PathBundle, thin: int = 1, max_paths: int | None = None) -> None:
    """Long-form path export, optionally thinned in time and path count."""
    if thin < 1:
        raise ValueError("thin must be >= 1")
    n_paths = bundle.paths.shape[0] if max_paths is None else min(max_paths, bundle.paths.shape[0])
    n_times = bundle.paths.shape[1]
    idx = list(range(0, n_times, thin))
    if idx[-1] != n_times - 1:
        idx.append(n_times - 1)
    rows = (
        (pth, bundle.times[ti], *bundle.paths[pth, ti, :])
        for pth in range(n_paths)
        for ti in idx
    )
    write_csv(path, ["path", "t", "A", "mu", "V", "K"], rows)


def summary_csv(path: str, bundle: PathBundle) -> None:
    rows = zip(
        bundle.times,
        bundle.mean_v,
        bundle.var_v,
        bundle.q05_v,
        bundle.q95_v,
        bundle.mean_k,
        bundle.var_k,
        bundle.q05_k,
        bundle.q95_k,
    )
    write_csv(path, ["t", "mean_V", "var_V", "q05_V", "q95_V", "mean_K", "var_K", "q05_K", "q95_K"], rows)


def rings_csv(path: str, midpoints, ring_v, ring_k, cont_v, cont_k, rel_dev_v, rel_dev_k) -> None:
    rows = zip(midpoints, ring_v, ring_k, cont_v, cont_k, rel_dev_v, rel_dev_k)
    write_csv(path, ["d_mid", "ring_V_star", "ring_K_star", "cont_V_star", "cont_K_star", "rel_dev_V", "rel_dev_K"], rows)


def heatmap_name(field_name: str, tau: float, t: float, ext: str = "pgm") -> str:
    return f"{field_name}_{tau:g}_{t:g}.{ext}"


def pgm_heatmap(path: str, field: np.ndarray) -> None:
    """8-bit binary PGM of a grid field, min-max normalized; flat field -> 0."""
    arr = np.asarray(field, dtype=float)
    if arr.ndim != 2:
        raise ValueError("heatmap field must be 2d")
    if not np.isfinite(arr).all():
        raise ValueError("heatmap field must be finite")
    lo, hi = float(arr.min()), float(arr.max())
    if hi > lo:
        gray = np.round((arr - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        gray = np.zeros_like(arr, dtype=np.uint8)
    height, width = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(gray.tobytes(order="C"))


def sha256_of(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(root: str, failures: list[tuple[str, str]] | None = None) -> str:
    """Hash every file under root into root/manifest.txt; returns its path.

    Failure records (label, message) are appended as comment lines so a
    partially failed sweep is visible in the manifest itself.
    """
    entries = []
    for dirpath, _dirnames, filenames in os.walk(root):
        for name in filenames:
            if name == "manifest.txt":
                continue
            full = os.path.join(dirpath, name)
            rel = os.path.relpath(full, root).replace(os.sep, "/")
            entries.append((rel, sha256_of(full)))
    entries.sort()
    lines = [f"{rel}\t{digest}" for rel, digest in entries]
    for label, message in failures or []:
        lines.append(f"# FAILED {label}: {' '.join(str(message).split())}")
    manifest = os.path.join(root, "manifest.txt")
    with open(manifest, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    return manifest


def read_manifest(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            rel, digest = line.split("\t")
            out[rel] = digest
    return out
