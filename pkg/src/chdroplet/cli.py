"""Command-line front end.

Subcommands:
  constants   closed-form vs quadrature values of the model constants
  phi-scan    the reduced droplet energy Phi over the volume fraction
  minimize    one constrained minimization, with diagnostics
  sweep       K-sweep across the droplet transition
  expand      matched-asymptotics construction vs the direct minimizer

Outputs are CSV for tables, JSON for structured reports, and
self-contained SVG polyline plots. Every command writes a manifest
naming its artifacts. Exit codes: 0 success, 2 precondition failure,
3 convergence failure.
"""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, asdict
from pathlib import Path

import numpy as np

from . import analytic, diagnostics, expansion, profile1d
from .analytic import ProblemSpec, Regime
from .energy import free_energy
from .field import Grid, ResolutionError, save_field
from .minimizer import FlowConfig, MinimizeError, minimize, save_trace_csv
from .potential import COMPRESSIBILITY, SURFACE_TENSION

FORMAT_VERSION = 1
OUT_ENV_VAR = "CHDROPLET_OUT"

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_NO_CONVERGENCE = 3


@dataclass
class RunManifest:
    command: str
    parameters: dict
    out_dir: str
    format_version: int = FORMAT_VERSION
    wall_clock_seconds: float = 0.0
    artifacts: list = dc_field(default_factory=list)

    def write(self, out_dir: Path) -> None:
        path = out_dir / "manifest.json"
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Small helpers

def _out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_ENV_VAR) or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _problem_spec(args) -> ProblemSpec:
    if args.n is not None:
        return ProblemSpec(d=args.d, L=args.L, n=args.n)
    K = args.K if args.K is not None else 2.0 * analytic.K_star(args.d)
    return ProblemSpec.from_K(d=args.d, L=args.L, K=K)


def _flow_config(args) -> FlowConfig:
    etas = None
    if args.seeds:
        etas = tuple(float(s) for s in args.seeds.split(","))
    return FlowConfig(step_tau=args.tau, max_iters=args.max_iters,
                      tol_residual=args.tol, engine=args.engine,
                      seed_etas=etas)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _svg_plot(path: Path, series, xlabel: str, ylabel: str, marks=()) -> None:
    """Self-contained SVG line plot. series: list of (label, xs, ys);
    marks: (x, y, label) points drawn as circles."""
    W, H, PAD = 640, 420, 56
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return PAD + (x - x0) / (x1 - x0) * (W - 2 * PAD)

    def sy(y):
        return H - PAD - (y - y0) / (y1 - y0) * (H - 2 * PAD)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
             f'viewBox="0 0 {W} {H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<line x1="{PAD}" y1="{H-PAD}" x2="{W-PAD}" y2="{H-PAD}" stroke="black"/>',
             f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H-PAD}" stroke="black"/>',
             f'<text x="{W/2:.0f}" y="{H-12}" text-anchor="middle" '
             f'font-size="13">{xlabel}</text>',
             f'<text x="16" y="{H/2:.0f}" text-anchor="middle" font-size="13" '
             f'transform="rotate(-90 16 {H/2:.0f})">{ylabel}</text>']
    for tick in np.linspace(x0, x1, 5):
        parts.append(f'<text x="{sx(tick):.1f}" y="{H-PAD+18}" text-anchor="middle" '
                     f'font-size="11">{tick:.4g}</text>')
    for tick in np.linspace(y0, y1, 5):
        parts.append(f'<text x="{PAD-6}" y="{sy(tick)+4:.1f}" text-anchor="end" '
                     f'font-size="11">{tick:.4g}</text>')
    for i, (label, xs, ys) in enumerate(series):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{W-PAD}" y="{PAD + 16*i}" text-anchor="end" '
                     f'font-size="12" fill="{color}">{label}</text>')
    for x, y, label in marks:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" '
                     f'fill="none" stroke="black" stroke-width="1.5"/>')
        parts.append(f'<text x="{sx(x)+6:.1f}" y="{sy(y)-6:.1f}" '
                     f'font-size="11">{label}</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def _diagnostics_dict(diag: diagnostics.DropletDiagnostics) -> dict:
    return {
        "kappa": diag.partition.kappa,
        "vol_plus": diag.partition.vol_plus,
        "vol_minus": diag.partition.vol_minus,
        "vol_interface": diag.partition.vol_interface,
        "R_eff": diag.partition.R_eff,
        "eta_hat": diag.partition.eta_hat,
        "l4_distance": diag.l4_distance,
        "components": diag.components,
        "classification": "Droplet" if diag.is_droplet else "Uniform",
    }


# ---------------------------------------------------------------------------
# Subcommands

def cmd_constants(args) -> int:
    d = args.d
    S_quad = profile1d.surface_tension_quadrature()
    consts = analytic.critical_constants(d)
    eta_def = analytic.eta_star(d)
    # algebraically simplified form that fails to reproduce the defining
    # relation (d C*)^-d; kept visible so the gap is on record
    eta_printed = ((d + 1.0) / 2.0) ** ((d + 1.0) / (2.0 * d))
    rows = [
        ("S (surface tension)", SURFACE_TENSION, S_quad,
         abs(SURFACE_TENSION - S_quad)),
        ("chi (compressibility)", COMPRESSIBILITY, COMPRESSIBILITY, 0.0),
        ("C_star", consts.C_star,
         (1.0 / d) * ((d + 1.0) / 2.0) ** ((d + 1.0) / 2.0), 0.0),
        ("eta_star (defining relation)", eta_def, eta_def, 0.0),
        ("eta_star (simplified printed form, inconsistent)", eta_printed,
         eta_def, abs(eta_printed - eta_def)),
        ("K_star", consts.K_star, consts.K_star, 0.0),
        ("M (excess mass of the profile)", np.pi ** 2 / 6.0,
         profile1d.constant_M(),
         abs(np.pi ** 2 / 6.0 - profile1d.constant_M())),
        ("B (first moment of the profile)", 2.0, profile1d.constant_B(),
         abs(2.0 - profile1d.constant_B())),
    ]
    out = _out_dir(args)
    _write_csv(out / "constants.csv",
               ["name", "closed_form", "quadrature", "gap"], rows)
    print(f"{'name':50s} {'closed form':>16s} {'quadrature':>16s} {'gap':>10s}")
    for name, a, b, gap in rows:
        print(f"{name:50s} {a:16.10f} {b:16.10f} {gap:10.2e}")
    return EXIT_OK, ["constants.csv"]


def cmd_phi_scan(args) -> int:
    spec = _problem_spec(args)
    C = analytic.C_of_n(spec)
    result = analytic.minimize_phi(C, spec.d)
    etas = np.linspace(0.0, 1.0, args.points)
    phis = np.array([analytic.phi_normalized(e, C, spec.d) for e in etas])
    out = _out_dir(args)
    _write_csv(out / "phi_scan.csv", ["eta", "phi_normalized"],
               list(zip(etas.tolist(), phis.tolist())))
    marks = [(0.0, analytic.phi_normalized(0.0, C, spec.d), "uniform")]
    if result.regime is not Regime.UNIFORM:
        marks.append((result.eta_c,
                      analytic.phi_normalized(result.eta_c, C, spec.d), "eta_c"))
    if result.regime is Regime.CRITICAL:
        marks.append((0.0, analytic.phi_normalized(0.0, C, spec.d), "critical"))
    _svg_plot(out / "phi_scan.svg", [("Phi(eta)/S|Gamma0|", etas, phis)],
              "eta", "Phi / (S |Gamma0|)", marks)
    print(f"K = {spec.K:.6f}, C(n) = {C:.6f}, regime = {result.regime.name}, "
          f"eta_c = {result.eta_c:.6f}")
    return EXIT_OK, ["phi_scan.csv", "phi_scan.svg"]


def cmd_minimize(args) -> int:
    spec = _problem_spec(args)
    grid = Grid(d=args.d, N=args.N, L=args.L)
    out = _out_dir(args)
    report = minimize(spec, grid, _flow_config(args))
    diag = diagnostics.classify(report.best_field, spec)
    save_field(report.best_field, out / "field.bin", n=spec.n, tag="minimizer")
    save_trace_csv(report, out / "trace.csv")
    payload = {
        "n": spec.n, "K": spec.K, "d": spec.d, "L": spec.L, "N": grid.N,
        "energy_total": report.energy.total,
        "energy_gradient": report.energy.gradient_part,
        "energy_potential": report.energy.potential_part,
        "mu_hat": report.mu_hat,
        "residual": report.residual,
        "iterations": report.iterations,
        "best_seed": report.best_seed,
        "tie": report.tie,
        "diagnostics": _diagnostics_dict(diag),
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"energy = {report.energy.total:.8f} (seed {report.best_seed}, "
          f"{report.iterations} iterations, residual {report.residual:.2e})")
    print(f"classification = {payload['diagnostics']['classification']}, "
          f"eta_hat = {diag.partition.eta_hat:.6f}")
    return EXIT_OK, ["field.bin", "trace.csv", "report.json"]


def _sweep_point(task):
    """One K point; module-level so it can cross a process boundary."""
    d, L, N, K, tol, max_iters, engine = task
    spec = ProblemSpec.from_K(d=d, L=L, K=K)
    grid = Grid(d=d, N=N, L=L)
    cfg = FlowConfig(max_iters=max_iters, tol_residual=tol, engine=engine)
    report = minimize(spec, grid, cfg)
    diag = diagnostics.classify(report.best_field, spec)
    geo = analytic.geometry(spec)
    gamma0 = analytic.sphere_area_constant(d) * geo.r0 ** (d - 1)
    pheno = analytic.minimize_phi(analytic.C_of_n(spec), d)
    excess = report.energy.total - analytic.uniform_energy(spec)
    return {
        "K": K, "n": spec.n,
        "f_numeric": report.energy.total,
        "excess_over_uniform": excess,
        "excess_normalized": excess / (SURFACE_TENSION * gamma0) if gamma0 else 0.0,
        "phi_min_normalized": pheno.Phi_min,
        "eta_hat": diag.partition.eta_hat,
        "eta_c": pheno.eta_c,
        "classification": "Droplet" if diag.is_droplet else "Uniform",
        "best_seed": report.best_seed,
        "iterations": report.iterations,
    }


def cmd_sweep(args) -> int:
    K_lo, K_hi = args.K_min, args.K_max
    Kstar = analytic.K_star(args.d)
    if not K_lo < Kstar < K_hi:
        raise ValueError(
            f"sweep range [{K_lo}, {K_hi}] must bracket K_star = {Kstar:.6f}")
    Ks = np.linspace(K_lo, K_hi, args.count)
    tasks = [(args.d, args.L, args.N, float(K), args.tol, args.max_iters,
              args.engine) for K in Ks]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]

    flips = [i for i in range(1, len(rows))
             if rows[i - 1]["classification"] != rows[i]["classification"]]
    transition = None
    if len(flips) == 1:
        i = flips[0]
        transition = 0.5 * (rows[i - 1]["K"] + rows[i]["K"])

    out = _out_dir(args)
    header = ["K", "n", "f_numeric", "excess_over_uniform", "excess_normalized",
              "phi_min_normalized", "eta_hat", "eta_c", "classification",
              "best_seed", "iterations"]
    _write_csv(out / "sweep.csv", header, [[r[k] for k in header] for r in rows])
    summary = {
        "K_star_analytic": Kstar,
        "transition_K_estimate": transition,
        "flip_count": len(flips),
        "monotone": len(flips) <= 1,
    }
    (out / "sweep_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _svg_plot(out / "sweep.svg",
              [("numeric excess / S|Gamma0|", Ks,
                [r["excess_normalized"] for r in rows]),
               ("analytic min Phi / S|Gamma0|", Ks,
                [r["phi_min_normalized"] for r in rows])],
              "K", "normalized excess free energy",
              [(Kstar, 0.0, "K_star")])
    for r in rows:
        print(f"K={r['K']:.4f} f={r['f_numeric']:.6f} eta_hat={r['eta_hat']:.4f} "
              f"eta_c={r['eta_c']:.4f} {r['classification']}")
    if transition is not None:
        print(f"transition near K = {transition:.6f} (analytic K_star = {Kstar:.6f})")
    else:
        print(f"no single flip found ({len(flips)} flips)")
    return EXIT_OK, ["sweep.csv", "sweep_summary.json", "sweep.svg"]


def cmd_expand(args) -> int:
    if args.d != 2:
        raise ValueError("expand supports d = 2 only")
    spec = _problem_spec(args)
    grid = Grid(d=args.d, N=args.N, L=args.L)
    state = expansion.expansion_state(spec)
    if isinstance(state, expansion.NoDroplet):
        print("subcritical: the radius equation has no positive root")
        return EXIT_PRECONDITION, []
    constructed, _ = expansion.first_order_solution(spec, grid)
    e_constructed = free_energy(constructed).total
    report = minimize(spec, grid, _flow_config(args))
    payload = {
        "state": json.loads(state.to_json()),
        "r1": state.r1,
        "r2_correction": state.r2,
        "second_order_radius": expansion.second_order_radius(state),
        "mu1": state.mu1,
        "phi1": state.phi1,
        "sqrt_eta_c": float(np.sqrt(
            analytic.minimize_phi(analytic.C_of_n(spec), spec.d).eta_c)),
        "energy_constructed": e_constructed,
        "energy_minimizer": report.energy.total,
        "energy_gap": e_constructed - report.energy.total,
        "el_residual_analytic": expansion.radial_el_residual(spec),
        "reduced_free_energy": expansion.reduced_free_energy(
            state.r1, state.lam, spec.L),
        "mass_defect_order1": expansion.mass_defect(spec, 1),
        "mass_defect_order2": expansion.mass_defect(spec, 2),
    }
    out = _out_dir(args)
    (out / "expand.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"r1 = {state.r1:.8f} (sqrt(eta_c) = {payload['sqrt_eta_c']:.8f})")
    print(f"r2 correction = {state.r2:.8f}, second-order radius = "
          f"{payload['second_order_radius']:.8f}")
    print(f"mu1 = {state.mu1:.8f}, phi1 = {state.phi1:.8f}")
    print(f"energy: constructed {e_constructed:.8f} >= minimizer "
          f"{report.energy.total:.8f} (gap {payload['energy_gap']:.2e})")
    print(f"analytic EL residual of the construction: "
          f"{payload['el_residual_analytic']:.3e}")
    return EXIT_OK, ["expand.json"]


# ---------------------------------------------------------------------------
# Entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chdroplet",
        description="droplet formation in the mass-constrained "
                    "Cahn-Hilliard free energy on a periodic torus")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=2, choices=(2, 3))
    common.add_argument("--L", type=float, default=200.0)
    common.add_argument("--N", type=int, default=1024)
    group = common.add_mutually_exclusive_group()
    group.add_argument("--K", type=float, default=None,
                       help="criticality coordinate; n = -1 + K L^(-d/(d+1))")
    group.add_argument("--n", type=float, default=None,
                       help="mass constraint value directly")
    common.add_argument("--out", type=str, default=None,
                        help=f"output directory (default ${OUT_ENV_VAR} or ./out)")
    common.add_argument("--seeds", type=str, default=None,
                        help="comma-separated volume fractions for seed droplets")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--max-iters", type=int, default=200_000)
    common.add_argument("--tau", type=float, default=None,
                        help="explicit-engine step size (default h^2/(4d))")
    common.add_argument("--engine", type=str, default="preconditioned",
                        choices=("preconditioned", "explicit"))
    common.add_argument("--threads", type=int, default=1)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common]).set_defaults(fn=cmd_constants)
    p = sub.add_parser("phi-scan", parents=[common])
    p.add_argument("--points", type=int, default=1001)
    p.set_defaults(fn=cmd_phi_scan)
    sub.add_parser("minimize", parents=[common]).set_defaults(fn=cmd_minimize)
    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--K-min", type=float, required=True)
    p.add_argument("--K-max", type=float, required=True)
    p.add_argument("--count", type=int, default=11)
    p.set_defaults(fn=cmd_sweep)
    sub.add_parser("expand", parents=[common]).set_defaults(fn=cmd_expand)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        code, artifacts = args.fn(args)
    except (ResolutionError, ValueError) as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MinimizeError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    out = _out_dir(args)
    params = {k: v for k, v in vars(args).items()
              if k not in ("fn", "out") and not callable(v)}
    manifest = RunManifest(command=args.command, parameters=params,
                           out_dir=str(out),
                           wall_clock_seconds=round(time.time() - started, 3),
                           artifacts=artifacts)
    manifest.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
