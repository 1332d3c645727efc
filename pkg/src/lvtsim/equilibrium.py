"""Closed-form equilibria, stability, and the tax-rate bifurcation.

Writing alpha = r + tau - mu and theta = kappa + delta / i_0, the
pointwise system has an interior fixed point only when alpha > theta:

    (K*)^beta = c_b alpha theta / (A (alpha - theta))
    V*        = c_b theta / (alpha - theta)

Its Jacobian satisfies tr(J) = -alpha + beta (i_0 kappa + delta) and
det(J) = beta i_0 theta (theta - alpha) < 0, so every interior point is
a saddle. Existence flips at the critical rate tau_c = theta - r + mu,
a transcritical exchange with the boundary state (V, K) = (0, 0).
Diffusion shifts the trace of the mode-q linearization by -D_V q^2 and
leaves the determinant unchanged. In the heavy-tax limit V* -> 0 while
(K*)^beta -> c_b theta / A: the built stock settles on a plateau that
taxation does not erode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import ModelParams, SpatialProfile, theta

SADDLE = "Saddle"
STABLE_NODE = "StableNode"
UNSTABLE_NODE = "UnstableNode"
STABLE_FOCUS = "StableFocus"
UNSTABLE_FOCUS = "UnstableFocus"
BOUNDARY_ONLY = "BoundaryOnly"
NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class EquilibriumPoint:
    v_star: float | None
    k_star: float | None
    exists: bool
    trace_j: float | None
    det_j: float | None
    classification: str


def classify(trace_j: float, det_j: float) -> str:
    """Standard planar trace-determinant chart.

    Only the saddle branch is reachable from the model's closed forms;
    the finer labels cover direct calls with arbitrary (tr, det).
    """
    if det_j < 0:
        return SADDLE
    if det_j == 0 or trace_j == 0:
        return NON_HYPERBOLIC
    disc = trace_j * trace_j - 4.0 * det_j
    if trace_j < 0:
        return STABLE_NODE if disc >= 0 else STABLE_FOCUS
    return UNSTABLE_NODE if disc >= 0 else UNSTABLE_FOCUS


def fixed_point(
    a: float,
    alpha: float,
    th: float,
    c_b: float,
    beta: float,
    i_0: float | None = None,
) -> EquilibriumPoint:
    """Interior fixed point when alpha > theta, boundary marker otherwise.

    The trace requires i_0; without it trace_j is None but the
    classification is still exact (det < 0 follows from alpha > theta).
    """
    if a <= 0 or th <= 0 or c_b <= 0 or not 0.0 < beta < 1.0:
        raise ValueError("need a > 0, theta > 0, c_b > 0, beta in (0, 1)")
    if alpha == th:
        det_j = 0.0
        trace_j = None if i_0 is None else -alpha + beta * (i_0 * th)
        return EquilibriumPoint(None, None, False, trace_j, det_j, NON_HYPERBOLIC)
    if alpha < th:
        return EquilibriumPoint(None, None, False, None, None, BOUNDARY_ONLY)
    v_star = c_b * th / (alpha - th)
    k_star = (c_b * alpha * th / (a * (alpha - th))) ** (1.0 / beta)
    if i_0 is None:
        trace_j = None
        det_j = None
    else:
        trace_j = -alpha + beta * (i_0 * th)  # i_0 kappa + delta = i_0 theta
        det_j = beta * i_0 * th * (th - alpha)
    return EquilibriumPoint(v_star, k_star, True, trace_j, det_j, SADDLE)


def jacobian_summary(p: ModelParams, a: float, alpha: float) -> tuple[float, float, str]:
    """Closed-form (tr J, det J, classification); requires alpha >= theta.

    The trace and determinant do not involve A; the argument is kept so
    scans can pass the full local triple (tau implied by p, mu, A).
    """
    th = theta(p)
    if alpha < th:
        raise ValueError(f"no interior fixed point: alpha = {alpha} < theta = {th}")
    trace_j = -alpha + p.beta * (p.i_0 * p.kappa + p.delta)
    det_j = p.beta * p.i_0 * th * (th - alpha)
    if alpha == th:
        return trace_j, det_j, NON_HYPERBOLIC
    return trace_j, det_j, classify(trace_j, det_j)


def dispersion_trace(trace_j: float, d_v: float, q: float) -> float:
    """Trace of the mode-q linearization: tr(J) - D_V q^2 (det unchanged)."""
    if d_v < 0:
        raise ValueError("d_v must be >= 0")
    return trace_j - d_v * q * q


def tau_critical(p: ModelParams, mu):
    """Critical tax rate tau_c = theta - r + mu at which existence flips."""
    return theta(p) - p.r + np.asarray(mu, dtype=float)


@dataclass
class RadialProfiles:
    """Steady-state levels and criticality along a radial ray."""

    distances: np.ndarray
    a: np.ndarray
    mu: np.ndarray
    tau_c: np.ndarray
    margin: np.ndarray
    v_star: np.ndarray
    k_star: np.ndarray
    d_threshold: float | None


@dataclass
class CriticalityProfile:
    """tau_c(d) and the margin tau - tau_c(d) for one profile and rate."""

    distances: np.ndarray
    tau_c: np.ndarray
    margin: np.ndarray


def criticality_profile(p: ModelParams, prof: SpatialProfile, distances, tau_of_d=None) -> CriticalityProfile:
    d = np.asarray(distances, dtype=float)
    mu = prof.centrality(p, d)
    tc = tau_critical(p, mu)
    tau = p.tau if tau_of_d is None else np.asarray(tau_of_d(d), dtype=float)
    return CriticalityProfile(distances=d, tau_c=tc, margin=tau - tc)


def radial_steady_profiles(
    p: ModelParams,
    prof: SpatialProfile,
    distances,
    tau_of_d=None,
) -> RadialProfiles:
    """Evaluate the fixed point along sorted distances; locate the front.

    Points without an interior equilibrium report the boundary state
    (0, 0). d_threshold is the smallest distance where the existence
    margin tau - tau_c(d) changes sign, refined by bisection between the
    bracketing samples; None when the margin has one sign throughout.
    """
    d = np.asarray(distances, dtype=float)
    if d.ndim != 1 or len(d) < 2:
        raise ValueError("distances must be a 1d array with at least two samples")
    if not (np.diff(d) > 0).all():
        raise ValueError("distances must be sorted ascending")
    a = np.asarray(prof.productivity(p, d), dtype=float)
    mu = np.asarray(prof.centrality(p, d), dtype=float)
    tc = tau_critical(p, mu)
    tau = np.full_like(d, p.tau) if tau_of_d is None else np.asarray(tau_of_d(d), dtype=float)
    margin = tau - tc
    th = theta(p)

    v_star = np.zeros_like(d)
    k_star = np.zeros_like(d)
    for idx in range(len(d)):
        ep = fixed_point(a[idx], p.r + tau[idx] - mu[idx], th, p.c_b, p.beta, p.i_0)
        if ep.exists:
            v_star[idx] = ep.v_star
            k_star[idx] = ep.k_star

    def margin_at(dd: float) -> float:
        t = p.tau if tau_of_d is None else float(tau_of_d(dd))
        return t - float(tau_critical(p, prof.centrality(p, dd)))

    d_threshold = None
    signs = np.sign(margin)
    for idx in range(len(d) - 1):
        if signs[idx] == 0:
            d_threshold = float(d[idx])
            break
        if signs[idx] * signs[idx + 1] < 0:
            d_threshold = float(bisect(margin_at, d[idx], d[idx + 1], xtol=1e-8))
            break
    else:
        if len(signs) and signs[-1] == 0:
            d_threshold = float(d[-1])
    return RadialProfiles(
        distances=d,
        a=a,
        mu=mu,
        tau_c=tc,
        margin=margin,
        v_star=v_star,
        k_star=k_star,
        d_threshold=d_threshold,
    )
