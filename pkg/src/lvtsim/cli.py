"""Command-line surface: config-driven scenario runs and quick calculators.

Every subcommand accepts --config (YAML scenario), --out (override the
output directory), --seed (override the Monte Carlo seed), and
--threads (worker pool size). Exit codes: 0 full success, 2 partial
sweep or suite failure, 1 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .config import ConfigError, Scenario, default_scenario, dump_config, load_config
from .core import theta
from .equilibrium import fixed_point, tau_critical
from .exports import fmt
from .harness import bifurcation_scan, robustness_suite, run_rings, run_scenario, run_stochastic
from .incidence import IncidenceInputs, advalorem_incidence, deadweight_loss, lvt_capitalization, pass_through, unit_tax_incidence
from .stochastic import StochasticParams


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="scenario YAML file (defaults used when omitted)")
    parser.add_argument("--out", metavar="DIR", help="override the output directory")
    parser.add_argument("--seed", type=int, metavar="N", help="override the Monte Carlo seed")
    parser.add_argument("--threads", type=int, default=1, metavar="N", help="worker pool size (default 1)")


def _load_scenario(args) -> Scenario:
    sc = load_config(args.config) if args.config else default_scenario()
    if args.out:
        sc = replace(sc, outputs=replace(sc.outputs, directory=args.out))
    if args.seed is not None:
        sp = sc.stochastic if sc.stochastic is not None else StochasticParams()
        sc = replace(sc, stochastic=replace(sp, seed=int(args.seed)))
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return sc


def _report_sweep(res) -> int:
    for tau in sorted(res.members):
        m = res.members[tau]
        if m.trace is not None:
            print(f"tau={tau:g}: final mean V = {m.trace.mean_v[-1]:.6g}, final mean K = {m.trace.mean_k[-1]:.6g}, gini = {m.gini:.4f}")
        else:
            print(f"tau={tau:g}: closed-form products only, gini = {m.gini:.4f}")
    for label, message in res.failures:
        print(f"FAILED {label}: {message}", file=sys.stderr)
    print(f"outputs: {res.root}")
    return 0 if res.ok else 2


def cmd_simulate(args) -> int:
    sc = _load_scenario(args)
    return _report_sweep(run_scenario(sc, threads=args.threads))


def cmd_indicators(args) -> int:
    sc = _load_scenario(args)
    sc = replace(sc, outputs=replace(sc.outputs, write_snapshots=False, write_heatmaps=False))
    return _report_sweep(run_scenario(sc, threads=args.threads))


def cmd_equilibrium(args) -> int:
    sc = _load_scenario(args)
    p = sc.params
    d = args.distance
    a = float(sc.profile.productivity(p, d))
    mu = float(sc.profile.centrality(p, d))
    th = theta(p)
    print(f"location d={d:g}: A={a:.6g}, mu={mu:.6g}, theta={th:.6g}, tau_c={float(tau_critical(p, mu)):.6g}")
    print("tau,alpha,exists,V_star,K_star,trace_J,det_J,classification")
    for tau in sc.tau_values:
        alpha = p.r + tau - mu
        ep = fixed_point(a, alpha, th, p.c_b, p.beta, p.i_0)
        cells = [tau, alpha, ep.exists, ep.v_star, ep.k_star, ep.trace_j, ep.det_j, ep.classification]
        print(",".join(fmt(c) for c in cells))
    return 0


def cmd_bifurcation(args) -> int:
    import os

    import numpy as np

    from . import exports, figures
    from .harness import _ensure_out_root

    sc = _load_scenario(args)
    p = sc.params
    mu = float(sc.profile.centrality(p, args.distance))
    tc = float(tau_critical(p, mu))
    taus = sorted(set(sc.tau_values) | set(np.linspace(0.0, 1.5 * tc, args.points).tolist()))
    rows = bifurcation_scan(p, sc.profile, args.distance, taus)
    root = _ensure_out_root(sc.outputs.directory, f"{sc.name}-bifurcation")
    exports.scan_csv(os.path.join(root, "scan.csv"), rows)
    if sc.outputs.write_figures:
        v = [r[3].v_star if r[3].exists else 0.0 for r in rows]
        k = [r[3].k_star if r[3].exists else 0.0 for r in rows]
        figures.fig_bifurcation(taus, v, k, os.path.join(root, "bifurcation.png"))
    exports.write_manifest(root)
    n_exist = sum(1 for r in rows if r[3].exists)
    print(f"scanned {len(rows)} rates at d={args.distance:g}: tau_c={tc:.6g}, interior point exists for {n_exist}")
    print(f"outputs: {root}")
    return 0


def cmd_stochastic(args) -> int:
    sc = _load_scenario(args)
    if args.paths is not None:
        sp = sc.stochastic if sc.stochastic is not None else StochasticParams()
        sc = replace(sc, stochastic=replace(sp, n_paths=args.paths))
    bundle, root = run_stochastic(sc, d=args.distance, threads=args.threads)
    print(
        f"{bundle.paths.shape[0]} paths, horizon {bundle.times[-1]:g}: "
        f"final mean V = {bundle.mean_v[-1]:.6g} (q05 {bundle.q05_v[-1]:.6g}, q95 {bundle.q95_v[-1]:.6g}), "
        f"final mean K = {bundle.mean_k[-1]:.6g}"
    )
    print(f"outputs: {root}")
    return 0


def cmd_incidence(args) -> int:
    try:
        inp = IncidenceInputs(
            d_prime=args.d_prime,
            s_prime=args.s_prime,
            p0=args.p0,
            tau_unit=args.tau_unit,
            t_adval=args.t_adval,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    dp_u, seller_u = unit_tax_incidence(inp)
    dp_a, net_a = advalorem_incidence(inp)
    rho = pass_through(inp)
    print("case,buyer_price_change,seller_net_change,pass_through,deadweight_loss")
    print(f"unit_tax,{fmt(dp_u)},{fmt(seller_u)},{fmt(rho)},{fmt(deadweight_loss(inp))}")
    print(f"ad_valorem,{fmt(dp_a)},{fmt(net_a)},{fmt(rho)},{fmt(deadweight_loss(inp, tau=args.t_adval * args.p0))}")
    if args.rent is not None:
        v = lvt_capitalization(args.rent, args.discount, args.tau_v)
        dv = v - lvt_capitalization(args.rent, args.discount, 0.0)
        print(f"lvt_fixed_factor,{fmt(dv)},{fmt(dv)},{fmt(0.0)},{fmt(0.0)}")
        print(f"# capitalized value: {fmt(v)} (rent {args.rent:g} at r={args.discount:g}, tau_v={args.tau_v:g})")
    print(
        "# convention: slopes are signed (D' < 0, S' > 0); pass-through = S'/(S' - D'). "
        "This is the form under which buyer+seller shares add to the tax exactly and "
        "pass-through stays inside (0, 1); a magnitude reading of D' in a D' + S' "
        "denominator yields the same number, but signed D' there would not."
    )
    return 0


def cmd_robustness(args) -> int:
    sc = _load_scenario(args)
    report = robustness_suite(sc, threads=args.threads)
    for row in report.rows:
        status = "ok" if row.crossed else "NO CROSSING"
        thr = "none" if row.d_threshold is None else f"{row.d_threshold:.4f}"
        print(f"{row.profile}: tau_mid={row.tau_mid:.6g}, d_threshold={thr} [{status}]")
    print(f"outputs: {report.root}")
    return 0 if report.all_passed else 2


def cmd_rings(args) -> int:
    sc = _load_scenario(args)
    cmp, root = run_rings(sc, n_rings=args.rings, tau=args.tau)
    print(
        f"{args.rings} rings vs continuum: max relative deviation {cmp.max_rel_dev:.3e}, "
        f"mean {cmp.mean_rel_dev:.3e}, mismatched existence at {cmp.mismatched} midpoints"
    )
    print(f"outputs: {root}")
    return 0


def cmd_defaults(args) -> int:
    print(dump_config(default_scenario()), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvtsim",
        description="Spatial-dynamic land value tax simulator: sweeps, equilibria, indicators, Monte Carlo, incidence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run the tax sweep and write all products")
    _common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("equilibrium", help="print closed-form fixed points at one location")
    _common(sp)
    sp.add_argument("--distance", type=float, default=0.0, help="radial distance d (default 0)")
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("bifurcation", help="scan the fixed point against the tax rate")
    _common(sp)
    sp.add_argument("--distance", type=float, default=0.0, help="radial distance d (default 0)")
    sp.add_argument("--points", type=int, default=61, help="scan resolution (default 61)")
    sp.set_defaults(func=cmd_bifurcation)

    sp = sub.add_parser("indicators", help="run the sweep, writing indicator and Lorenz tables only")
    _common(sp)
    sp.set_defaults(func=cmd_indicators)

    sp = sub.add_parser("stochastic", help="Monte Carlo paths at a representative location")
    _common(sp)
    sp.add_argument("--distance", type=float, default=4.0, help="radial distance d (default 4)")
    sp.add_argument("--paths", type=int, default=None, help="override the ensemble size")
    sp.set_defaults(func=cmd_stochastic)

    sp = sub.add_parser("incidence", help="linearized tax incidence and LVT capitalization table")
    _common(sp)
    sp.add_argument("--d-prime", type=float, default=-1.0, help="demand slope at P0 (< 0)")
    sp.add_argument("--s-prime", type=float, default=1.0, help="supply slope at P0 (> 0)")
    sp.add_argument("--p0", type=float, default=1.0, help="pre-tax price")
    sp.add_argument("--tau-unit", type=float, default=0.2, help="per-unit tax")
    sp.add_argument("--t-adval", type=float, default=0.1, help="ad valorem rate in [0, 1)")
    sp.add_argument("--rent", type=float, default=None, help="annual site rent for the capitalization row")
    sp.add_argument("--discount", type=float, default=0.05, help="discount rate r")
    sp.add_argument("--tau-v", type=float, default=0.05, help="land value tax rate")
    sp.set_defaults(func=cmd_incidence)

    sp = sub.add_parser("robustness", help="criticality crossing check across spatial geometries")
    _common(sp)
    sp.set_defaults(func=cmd_robustness)

    sp = sub.add_parser("rings", help="concentric-ring steady states vs the continuum curve")
    _common(sp)
    sp.add_argument("--rings", type=int, default=18, help="number of rings (default 18)")
    sp.add_argument("--tau", type=float, default=0.12, help="tax rate for the comparison (default 0.12)")
    sp.set_defaults(func=cmd_rings)

    sp = sub.add_parser("defaults", help="print the default configuration")
    _common(sp)
    sp.set_defaults(func=cmd_defaults)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
