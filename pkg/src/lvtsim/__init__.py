"""Spatial-dynamic land value tax simulator.

A land value tax interacts with urban structure through three coupled
layers, each exposed here as a subpackage-level API:

- core / pde: the reaction-diffusion dynamics of land value V and built
  capital K over a 2D city, with zero-flux edges and explicit stepping;
- equilibrium: closed-form fixed points, saddle classification, and the
  critical tax rate at which the interior equilibrium appears;
- indicators: fiscal revenue, value and investment aggregates, and the
  Lorenz/Gini distribution of spatial attractiveness;
- stochastic: Euler-Maruyama Monte Carlo for the mean-reverting shock
  extension, with counter-based per-path streams;
- incidence: linearized partial-equilibrium tax incidence and the
  fixed-factor capitalization identity;
- config / harness / cli: YAML scenarios, swept runs with manifest
  hashing, and the `lvtsim` command.
"""

from .config import (
    INITIAL_KINDS,
    TAX_MODE_KINDS,
    ConfigError,
    OutputConfig,
    RadialLinearTax,
    Scenario,
    UniformTax,
    default_scenario,
    dump_config,
    load_config,
    save_config,
    scenario_from_dict,
    scenario_to_dict,
)
from .core import (
    PROFILE_KINDS,
    ExponentialBaseline,
    FieldPair,
    GridSpec,
    ModelParams,
    Polycentric,
    SpatialProfile,
    SuburbanFlat,
    alpha_field,
    distance_grid,
    eval_profiles,
    nonpositive_alpha_count,
    profitability,
    psi_field,
    radial_distance,
    theta,
)
from .equilibrium import (
    BOUNDARY_ONLY,
    NON_HYPERBOLIC,
    SADDLE,
    STABLE_FOCUS,
    STABLE_NODE,
    UNSTABLE_FOCUS,
    UNSTABLE_NODE,
    CriticalityProfile,
    EquilibriumPoint,
    RadialProfiles,
    classify,
    criticality_profile,
    dispersion_trace,
    fixed_point,
    jacobian_summary,
    radial_steady_profiles,
    tau_critical,
)
from .harness import (
    RingComparison,
    RingDiscretization,
    RobustnessReport,
    ScenarioResult,
    bifurcation_scan,
    mid_sweep_tau,
    radial_distances,
    rings_vs_continuum,
    robustness_suite,
    run_rings,
    run_scenario,
    run_stochastic,
)
from .incidence import (
    IncidenceInputs,
    advalorem_incidence,
    deadweight_loss,
    lvt_capitalization,
    pass_through,
    unit_tax_incidence,
)
from .indicators import (
    IndicatorSeries,
    WeightSet,
    adjusted_profitability,
    adjusted_profitability_mean,
    indicator_series,
    integrate,
    kv_ratio,
    kv_ratio_adjusted,
    lorenz_gini,
    npv_local,
    npv_mean,
    tax_revenue,
    tax_revenue_dynamic,
    trapezoid_weights,
    weighted_mean_value,
)
from .pde import (
    CustomInitial,
    GaussianPeak,
    NonFiniteStateError,
    SimConfig,
    SimTrace,
    StabilityError,
    UniformConstant,
    check_stability,
    initial_state,
    laplacian,
    run,
    stability_limit,
    step,
)
from .stochastic import (
    PathBundle,
    PathError,
    StochasticParams,
    em_step,
    initial_point,
    path_normals,
    simulate_paths,
    strong_order_probe,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_ONLY",
    "ConfigError",
    "CriticalityProfile",
    "CustomInitial",
    "EquilibriumPoint",
    "ExponentialBaseline",
    "FieldPair",
    "GaussianPeak",
    "GridSpec",
    "INITIAL_KINDS",
    "IncidenceInputs",
    "IndicatorSeries",
    "ModelParams",
    "NON_HYPERBOLIC",
    "NonFiniteStateError",
    "OutputConfig",
    "PROFILE_KINDS",
    "PathBundle",
    "PathError",
    "Polycentric",
    "RadialLinearTax",
    "RadialProfiles",
    "RingComparison",
    "RingDiscretization",
    "RobustnessReport",
    "SADDLE",
    "STABLE_FOCUS",
    "STABLE_NODE",
    "Scenario",
    "ScenarioResult",
    "SimConfig",
    "SimTrace",
    "SpatialProfile",
    "StabilityError",
    "StochasticParams",
    "SuburbanFlat",
    "TAX_MODE_KINDS",
    "UNSTABLE_FOCUS",
    "UNSTABLE_NODE",
    "UniformConstant",
    "UniformTax",
    "WeightSet",
    "adjusted_profitability",
    "adjusted_profitability_mean",
    "advalorem_incidence",
    "alpha_field",
    "bifurcation_scan",
    "check_stability",
    "classify",
    "criticality_profile",
    "deadweight_loss",
    "default_scenario",
    "dispersion_trace",
    "distance_grid",
    "dump_config",
    "em_step",
    "eval_profiles",
    "fixed_point",
    "indicator_series",
    "initial_point",
    "initial_state",
    "integrate",
    "jacobian_summary",
    "kv_ratio",
    "kv_ratio_adjusted",
    "laplacian",
    "load_config",
    "lorenz_gini",
    "lvt_capitalization",
    "mid_sweep_tau",
    "nonpositive_alpha_count",
    "npv_local",
    "npv_mean",
    "pass_through",
    "path_normals",
    "profitability",
    "psi_field",
    "radial_distance",
    "radial_distances",
    "radial_steady_profiles",
    "rings_vs_continuum",
    "robustness_suite",
    "run",
    "run_rings",
    "run_scenario",
    "run_stochastic",
    "save_config",
    "scenario_from_dict",
    "scenario_to_dict",
    "simulate_paths",
    "stability_limit",
    "step",
    "strong_order_probe",
    "tau_critical",
    "tax_revenue",
    "tax_revenue_dynamic",
    "theta",
    "trapezoid_weights",
    "unit_tax_incidence",
    "weighted_mean_value",
]
