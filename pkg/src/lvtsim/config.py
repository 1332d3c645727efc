"""Scenario configuration: typed sections, YAML round-trip, fail-fast keys.

A scenario bundles everything one study needs: the grid, the scalar
parameters, the spatial profile, the integration settings, the tax
sweep, the tax geometry (uniform or rising linearly with distance from
the center), indicator weights, optional Monte Carlo settings, and the
output products to write.

The on-disk format is a YAML mapping whose sections mirror the type
names. Unknown keys anywhere are errors, not warnings: a misspelled
parameter must never silently fall back to its default. Loading a
dumped scenario reproduces it field for field.
"""

from __future__ import annotations

import typing
from dataclasses import asdict, dataclass, field, fields as dc_fields, replace

import numpy as np
import yaml

from .core import PROFILE_KINDS, GridSpec, ModelParams, SpatialProfile, ExponentialBaseline, distance_grid
from .indicators import WeightSet
from .pde import GaussianPeak, SimConfig, UniformConstant
from .stochastic import StochasticParams


class ConfigError(ValueError):
    """Invalid configuration: unknown key, bad value, or unreadable file."""


@dataclass(frozen=True)
class UniformTax:
    """One flat rate everywhere; the sweep replaces tau0 member by member."""

    tau0: float = 0.0
    kind: str = field(default="uniform", init=False)

    def __post_init__(self) -> None:
        if self.tau0 < 0:
            raise ValueError("tau0 must be >= 0")

    def with_tau0(self, tau0: float) -> "UniformTax":
        return UniformTax(tau0=float(tau0))

    def tau_at(self, d):
        return np.full_like(np.asarray(d, dtype=float), self.tau0)

    def tau_grid(self, gs: GridSpec):
        return None  # uniform: the scalar ModelParams.tau path applies


@dataclass(frozen=True)
class RadialLinearTax:
    """Rate rising with distance from the center: tau(d) = tau0 + eta d.

    A positive eta surcharges the periphery, pushing the activation
    front inward relative to a flat tau0.
    """

    tau0: float = 0.0
    eta: float = 0.0
    kind: str = field(default="radial_linear", init=False)

    def __post_init__(self) -> None:
        if self.tau0 < 0:
            raise ValueError("tau0 must be >= 0")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")

    def with_tau0(self, tau0: float) -> "RadialLinearTax":
        return RadialLinearTax(tau0=float(tau0), eta=self.eta)

    def tau_at(self, d):
        return self.tau0 + self.eta * np.asarray(d, dtype=float)

    def tau_grid(self, gs: GridSpec) -> np.ndarray:
        return self.tau0 + self.eta * distance_grid(gs)


TAX_MODE_KINDS = {"uniform": UniformTax, "radial_linear": RadialLinearTax}
INITIAL_KINDS = {"gaussian_peak": GaussianPeak, "uniform": UniformConstant}


@dataclass(frozen=True)
class OutputConfig:
    """Where results go and which products to write."""

    directory: str = "out"
    write_snapshots: bool = True
    write_heatmaps: bool = True
    write_figures: bool = True
    write_paths: bool = False
    path_thin: int = 1
    equilibrium_only: bool = False
    indicator_horizon: float | None = None  # None: the full run length

    def __post_init__(self) -> None:
        if not self.directory:
            raise ValueError("output directory must be non-empty")
        if self.path_thin < 1:
            raise ValueError("path_thin must be >= 1")
        if self.indicator_horizon is not None and self.indicator_horizon <= 0:
            raise ValueError("indicator_horizon must be > 0")


@dataclass(frozen=True)
class Scenario:
    """One complete, runnable study description."""

    name: str = "default"
    grid: GridSpec = field(default_factory=GridSpec)
    params: ModelParams = field(default_factory=ModelParams)
    profile: SpatialProfile = field(default_factory=ExponentialBaseline)
    sim: SimConfig = field(default_factory=SimConfig)
    tau_values: tuple[float, ...] = (0.0, 0.005, 0.01, 0.02)
    tax_mode: object = field(default_factory=UniformTax)
    weights: WeightSet = field(default_factory=WeightSet)
    stochastic: StochasticParams | None = None
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        if len(self.tau_values) == 0:
            raise ValueError("tau_values must be non-empty")
        if any(t < 0 for t in self.tau_values):
            raise ValueError("tau_values must all be >= 0")
        if not isinstance(self.tax_mode, (UniformTax, RadialLinearTax)):
            raise ValueError("tax_mode must be UniformTax or RadialLinearTax")


def default_scenario() -> Scenario:
    return Scenario()


def _coerce(cls, kwargs: dict, path: str) -> dict:
    """Align YAML scalar types with the dataclass annotations (int -> float)."""
    hints = typing.get_type_hints(cls)
    out = {}
    for key, value in kwargs.items():
        target = hints.get(key)
        members = typing.get_args(target) or (target,)
        if float in members and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if bool in members and not isinstance(value, bool) and value is not None:
            raise ConfigError(f"{path}.{key} must be a boolean, got {value!r}")
        out[key] = value
    return out


def _build(cls, section, path: str, *, exclude: tuple[str, ...] = ()):
    """Instantiate a dataclass from a config mapping, rejecting unknown keys."""
    if section is None:
        section = {}
    if not isinstance(section, dict):
        raise ConfigError(f"section {path!r} must be a mapping, got {type(section).__name__}")
    allowed = {f.name for f in dc_fields(cls) if f.init and f.name not in exclude}
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {path!r}; allowed: {sorted(allowed)}")
    try:
        return cls(**_coerce(cls, section, path))
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {path!r} section: {e}") from None


def _build_kinded(kinds: dict, section, path: str, default_kind: str):
    if section is None:
        section = {}
    if not isinstance(section, dict):
        raise ConfigError(f"section {path!r} must be a mapping, got {type(section).__name__}")
    section = dict(section)
    kind = section.pop("kind", default_kind)
    if kind not in kinds:
        raise ConfigError(f"{path}.kind must be one of {sorted(kinds)}, got {kind!r}")
    return _build(kinds[kind], section, f"{path}({kind})")


_TOP_LEVEL = ("name", "grid", "params", "profile", "sim", "tau_values", "tax_mode", "weights", "stochastic", "outputs")


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = sorted(set(data) - set(_TOP_LEVEL))
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {unknown}; allowed: {sorted(_TOP_LEVEL)}")

    name = data.get("name", "default")
    if not isinstance(name, str):
        raise ConfigError("name must be a string")

    grid = _build(GridSpec, data.get("grid"), "grid")
    params = _build(ModelParams, data.get("params"), "params")
    profile = _build_kinded(PROFILE_KINDS, data.get("profile"), "profile", "exponential")

    sim_section = data.get("sim")
    if sim_section is None:
        sim_section = {}
    if not isinstance(sim_section, dict):
        raise ConfigError("section 'sim' must be a mapping")
    sim_section = dict(sim_section)
    initial_section = sim_section.pop("initial", None)
    initial = _build_kinded(INITIAL_KINDS, initial_section, "sim.initial", "gaussian_peak")
    sim = _build(SimConfig, sim_section, "sim", exclude=("initial",))
    sim = replace(sim, initial=initial)

    tau_values = data.get("tau_values", (0.0, 0.005, 0.01, 0.02))
    if not isinstance(tau_values, (list, tuple)):
        raise ConfigError("tau_values must be a list of rates")
    try:
        tau_values = tuple(float(t) for t in tau_values)
    except (TypeError, ValueError):
        raise ConfigError("tau_values must be a list of numbers") from None

    tax_mode = _build_kinded(TAX_MODE_KINDS, data.get("tax_mode"), "tax_mode", "uniform")
    weights = _build(WeightSet, data.get("weights"), "weights")

    stochastic_section = data.get("stochastic")
    stochastic = None if stochastic_section is None else _build(StochasticParams, stochastic_section, "stochastic")

    outputs = _build(OutputConfig, data.get("outputs"), "outputs")

    try:
        return Scenario(
            name=name,
            grid=grid,
            params=params,
            profile=profile,
            sim=sim,
            tau_values=tau_values,
            tax_mode=tax_mode,
            weights=weights,
            stochastic=stochastic,
            outputs=outputs,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None


def scenario_to_dict(sc: Scenario) -> dict:
    """Plain mapping with YAML-safe leaves; inverse of scenario_from_dict."""
    for f in dc_fields(WeightSet):
        if np.ndim(getattr(sc.weights, f.name)) != 0:
            raise ConfigError("grid-valued weights cannot be stored in a config file")
    if not isinstance(sc.sim.initial, (GaussianPeak, UniformConstant)):
        raise ConfigError("custom initial conditions cannot be stored in a config file")
    initial_kind = "gaussian_peak" if isinstance(sc.sim.initial, GaussianPeak) else "uniform"
    sim = asdict(sc.sim)
    sim["initial"] = {"kind": initial_kind, **asdict(sc.sim.initial)}
    profile = asdict(sc.profile)
    profile = {"kind": profile.pop("kind"), **profile}
    tax_mode = asdict(sc.tax_mode)
    tax_mode = {"kind": tax_mode.pop("kind"), **tax_mode}
    weights = {k: float(v) for k, v in asdict(sc.weights).items()}
    return {
        "name": sc.name,
        "grid": asdict(sc.grid),
        "params": asdict(sc.params),
        "profile": profile,
        "sim": sim,
        "tau_values": list(sc.tau_values),
        "tax_mode": tax_mode,
        "weights": weights,
        "stochastic": None if sc.stochastic is None else asdict(sc.stochastic),
        "outputs": asdict(sc.outputs),
    }


def dump_config(sc: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(sc), sort_keys=False, default_flow_style=False)


def save_config(sc: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_config(sc))


def load_config(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed config {path!r}: {e}") from None
    if data is None:
        data = {}
    return scenario_from_dict(data)
