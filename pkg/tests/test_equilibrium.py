"""Closed-form fixed points, saddle classification, critical tax, radial fronts."""

import numpy as np
import pytest
from dataclasses import replace

from lvtsim import (
    BOUNDARY_ONLY,
    NON_HYPERBOLIC,
    SADDLE,
    STABLE_FOCUS,
    STABLE_NODE,
    UNSTABLE_NODE,
    ExponentialBaseline,
    ModelParams,
    classify,
    criticality_profile,
    dispersion_trace,
    fixed_point,
    jacobian_summary,
    radial_steady_profiles,
    tau_critical,
    theta,
)

# interior point at the center under tau = 0.12: alpha = 0.12, theta = 0.1,
# so V* = c_b theta / (alpha - theta) = 5 and (K*)^2beta... with beta = 1/2,
# (K*)^0.5 = alpha theta c_b / (A (alpha - theta)) = 0.6, K* = 0.36
CENTER_TAU = 0.12
CENTER_ALPHA = 0.12


def test_fixed_point_closed_form_values():
    p = ModelParams(tau=CENTER_TAU)
    fp = fixed_point(p.a_0, CENTER_ALPHA, theta(p), p.c_b, p.beta, p.i_0)
    assert fp.exists
    assert abs(fp.v_star - 5.0) < 1e-12
    assert abs(fp.k_star - 0.36) < 1e-12
    assert fp.classification == SADDLE
    assert fp.det_j < 0


def test_fixed_point_below_threshold_is_boundary_only():
    p = ModelParams()  # tau = 0.01 keeps alpha below theta at the center
    alpha = p.r + p.tau - p.mu_0
    fp = fixed_point(p.a_0, alpha, theta(p), p.c_b, p.beta, p.i_0)
    assert not fp.exists
    assert fp.v_star is None and fp.k_star is None
    assert fp.classification == BOUNDARY_ONLY


def test_fixed_point_input_validation():
    with pytest.raises(ValueError):
        fixed_point(0.0, 0.12, 0.1, 1.0, 0.5)
    with pytest.raises(ValueError):
        fixed_point(1.0, 0.12, 0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        fixed_point(1.0, 0.12, -0.1, 1.0, 0.5)


def test_jacobian_closed_form_matches_finite_differences():
    # differentiate the point ODE right-hand side numerically at (V*, K*)
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = ModelParams(
            r=float(rng.uniform(0.02, 0.1)),
            tau=float(rng.uniform(0.05, 0.3)),
            beta=float(rng.uniform(0.3, 0.7)),
            c_b=float(rng.uniform(0.5, 2.0)),
            i_0=float(rng.uniform(0.5, 2.0)),
            kappa=float(rng.uniform(0.02, 0.1)),
            delta=float(rng.uniform(0.02, 0.1)),
        )
        mu = float(rng.uniform(0.0, 0.04))
        alpha = p.r + p.tau - mu
        th = theta(p)
        if alpha <= th:
            continue
        fp = fixed_point(p.a_0, alpha, th, p.c_b, p.beta, p.i_0)
        v0, k0 = fp.v_star, fp.k_star

        def rhs(v, k):
            dv = -alpha * v + p.a_0 * k**p.beta
            pi = p.a_0 * k**p.beta / (v + p.c_b)
            dk = p.i_0 * (pi - p.kappa) * k - p.delta * k
            return np.array([dv, dk])

        eps = 1e-6
        j = np.column_stack(
            [
                (rhs(v0 + eps, k0) - rhs(v0 - eps, k0)) / (2 * eps),
                (rhs(v0, k0 + eps) - rhs(v0, k0 - eps)) / (2 * eps),
            ]
        )
        tr, det, cls = jacobian_summary(p, p.a_0, alpha)
        assert abs(tr - np.trace(j)) < 1e-5 * max(1.0, abs(tr))
        assert abs(det - np.linalg.det(j)) < 1e-5 * max(1.0, abs(det))
        assert cls == SADDLE


def test_jacobian_summary_rejects_subcritical():
    p = ModelParams()
    with pytest.raises(ValueError):
        jacobian_summary(p, p.a_0, 0.05)


def test_classify_branches():
    assert classify(-1.0, -0.5) == SADDLE
    assert classify(-1.0, 0.1) == STABLE_NODE  # tr^2 - 4 det = 0.6 > 0
    assert classify(-1.0, 5.0) == STABLE_FOCUS
    assert classify(1.0, 0.1) == UNSTABLE_NODE
    assert classify(0.0, 1.0) == NON_HYPERBOLIC


def test_tau_critical_formula():
    p = ModelParams()
    assert abs(float(tau_critical(p, 0.05)) - 0.1) < 1e-15
    mu = np.array([0.0, 0.02, 0.05])
    assert np.allclose(tau_critical(p, mu), theta(p) - p.r + mu)


def test_dispersion_trace_diffusion_is_stabilizing():
    # adding D_V q^2 to the local decay lowers the perturbation trace
    tr0 = dispersion_trace(-0.07, 0.1, 0.0)
    assert tr0 == -0.07
    assert dispersion_trace(-0.07, 0.1, 2.0) < tr0
    assert dispersion_trace(-0.07, 0.1, 2.0) == -0.07 - 0.1 * 4.0


def test_radial_profiles_front_matches_analytic_inverse():
    # exponential centrality: tau = tau_c(d) at
    # d = -ln((tau - theta + r) / mu_0) / lam
    p = ModelParams(tau=0.08)
    prof = ExponentialBaseline()
    d = np.linspace(0.0, 5.0, 401)
    rp = radial_steady_profiles(p, prof, d)
    analytic = -np.log((0.08 - 0.05) / 0.05) / 0.3
    assert abs(rp.d_threshold - analytic) < 1e-6
    # interior equilibrium exists beyond the front, boundary state inside
    inside = rp.distances < rp.d_threshold
    assert (rp.v_star[inside] == 0.0).all()
    outside = rp.distances > rp.d_threshold + 0.05
    assert (rp.v_star[outside] > 0).all()
    assert (rp.margin[outside] > 0).all()
    # V* decreases toward the periphery as the margin widens
    v_live = rp.v_star[outside]
    assert (np.diff(v_live) < 0).all()


def test_radial_profiles_subcritical_everywhere():
    p = ModelParams(tau=0.01)
    rp = radial_steady_profiles(p, ExponentialBaseline(), np.linspace(0.0, 5.0, 51))
    assert rp.d_threshold is None
    assert (rp.v_star == 0.0).all() and (rp.k_star == 0.0).all()
    assert (rp.margin < 0).all()


def test_radial_profiles_spatial_tax():
    # a radially increasing tax pulls the activation front inward
    p = ModelParams(tau=0.08)
    prof = ExponentialBaseline()
    d = np.linspace(0.0, 5.0, 401)
    uniform = radial_steady_profiles(p, prof, d)
    graded = radial_steady_profiles(p, prof, d, tau_of_d=lambda dd: 0.08 + 0.01 * dd)
    assert graded.d_threshold < uniform.d_threshold


def test_criticality_profile_margin():
    p = ModelParams(tau=0.07)
    d = np.linspace(0.0, 5.0, 11)
    cp = criticality_profile(p, ExponentialBaseline(), d)
    assert np.allclose(cp.tau_c, 0.05 + 0.05 * np.exp(-0.3 * d))
    assert np.allclose(cp.margin, 0.07 - cp.tau_c)
    assert (np.diff(cp.margin) > 0).all()
