"""Batch front-end: ``scatter``, ``glm`` and ``evolve`` subcommands writing CSV tables and reports.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 requested times beyond the reflection-free range of the truncated lattice.
"""
from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

import numpy as np

from ._grid import theta_grid
from .config import ConfigError, NormSpec, RunConfig, load_config
from .evolution import (NormKind, TruncatedOperator, TruncationWarning, decay_fit, geometric_grid, kernel_scan,
                        propagator_exact, spectral_kernel, t_max)
from .glm import glm_kernel, glm_residual, t_at_origin
from .fourier_series import default_k_max, series_coefficients
from .jost import Edge, NumericalFailure, Side, bound_states, detect_resonance, scattering_coefficients
from .potential import InvalidPotentialError, Potential
from .spectral_map import Band, kappa

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TRUNCATION = 0, 2, 3, 4
CROSS_ROUTE_TIMES = (0.0, 10.0, 100.0)
CROSS_ROUTE_WINDOW = (-10, 10)


class TruncationError(RuntimeError):
    pass


def fmt(x) -> str:
    return format(float(x) + 0.0, ".17g")


def write_csv(path: Path, cfg: RunConfig, header: list[str], rows) -> None:
    """Comment line with the config hash, a header naming units, then rows at 17 significant digits."""
    with path.open("w", newline="") as fh:
        fh.write(f"# config_hash={cfg.hash}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _edge_reports(pot: Potential) -> list:
    return [detect_resonance(pot, e, b) for b in (Band.POSITIVE, Band.NEGATIVE) for e in (Edge.LOWER, Edge.UPPER)]


def _resonance_lines(reports) -> list[str]:
    out = []
    for r in reports:
        verdict = "resonant" if r.is_resonant else "non-resonant"
        out.append(f"edge lambda={fmt(r.witness.lam)} band={r.band.name.lower()} theta={r.edge.value}: "
                   f"{verdict} |W|={fmt(r.abs_W)} tolerance={fmt(r.tolerance)}")
    return out


# --------------------------------------------------------------------------- scatter


def cmd_scatter(cfg: RunConfig) -> dict:
    pot = cfg.potential_obj()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    theta = theta_grid(cfg.grid_log2)
    rows = []
    worst = 0.0
    for band in (Band.POSITIVE, Band.NEGATIVE):
        s = scattering_coefficients(pot, theta, band)
        defect = s.unitarity_defect()
        worst = max(worst, float(defect.max()))
        for i, th in enumerate(theta):
            rows.append([band.name.lower(), th, s.T[i].real, s.T[i].imag, s.R_plus[i].real, s.R_plus[i].imag,
                         s.R_minus[i].real, s.R_minus[i].imag, defect[i]])
    write_csv(out / "scattering.csv", cfg,
              ["band", "theta[rad]", "T_re[1]", "T_im[1]", "Rplus_re[1]", "Rplus_im[1]", "Rminus_re[1]",
               "Rminus_im[1]", "unitarity_defect[1]"], rows)
    states = bound_states(pot)
    write_csv(out / "bound_states.csv", cfg,
              ["lambda[m-units]", "z[1]", "gamma_plus[1]", "gamma_minus[1]", "norm_plus[1]", "norm_minus[1]"],
              [[s.lam, s.z, s.gamma_plus, s.gamma_minus, s.norm_plus, s.norm_minus] for s in states])
    reports = _edge_reports(pot)
    (out / "resonance.txt").write_text(f"config_hash={cfg.hash}\n" + "\n".join(_resonance_lines(reports)) + "\n")
    summary = f"scatter: max unitarity defect {worst:.3e}, {len(states)} bound states"
    return {"summary": summary, "unitarity": worst, "bound_states": len(states)}


# --------------------------------------------------------------------------- glm


def cmd_glm(cfg: RunConfig) -> dict:
    pot = cfg.potential_obj()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_lo, n_hi = cfg.n_range
    window = (n_lo, n_hi + 1)
    plus = series_coefficients(pot, Side.PLUS, window, default_k_max(pot, Side.PLUS, window))
    minus = series_coefficients(pot, Side.MINUS, window, default_k_max(pot, Side.MINUS, window))
    states = bound_states(pot)
    kernels = glm_kernel(pot, cfg.grid_log2, states=states)
    probe = 0 if n_lo <= 0 < n_hi + 1 else n_lo
    reports = _edge_reports(pot)
    lines = [f"config_hash={cfg.hash}", f"probe_site={probe}"]
    try:
        origin = t_at_origin(plus, minus, pot, probe)
    except NumericalFailure as exc:
        lines += [f"A_minus1 ~ 0: {exc}", "flag: vanishing leading coefficient, T has a pole at the origin"]
        lines += _resonance_lines(reports)
        (out / "origin.txt").write_text("\n".join(lines) + "\n")
        raise
    res = glm_residual(plus, minus, kernels, pot, origin, cfg.n_range)
    write_csv(out / "glm_residuals.csv", cfg, ["n[site]", "j[index]", "equation", "residual[1]"],
              [[float(n), float(j), eq, r] for n, j, eq, r in res.rows])
    kp, km = kernels[Side.PLUS], kernels[Side.MINUS]
    s_vals = np.arange(-64, 65)
    write_csv(out / "kernel_F.csv", cfg,
              ["s[index]", "F_plus[1]", "F_minus[1]", "calF_plus[1]", "calF_minus[1]"],
              [[s, kp.F(s), km.F(s), kp.script_F(s), km.script_F(s)] for s in s_vals])
    lines += [f"A_minus1={fmt(origin.A_minus1)}", f"A_0={fmt(origin.A_0)}", f"T(0)={fmt(origin.T0)}",
              f"T'(0)={fmt(origin.T0_prime)}"]
    if abs(origin.A_minus1) < 1e-8:
        lines.append("flag: A_minus1 close to zero")
    lines += _resonance_lines(reports)
    (out / "origin.txt").write_text("\n".join(lines) + "\n")
    worst = res.max()
    return {"summary": f"glm: max residual {worst:.3e} over n in [{n_lo}, {n_hi}]", "residual": worst,
            "origin": origin}


# --------------------------------------------------------------------------- evolve


def expected_exponent(norm_spec: NormSpec, resonant: bool) -> float | None:
    """Decay rate predicted by the theory for this norm, or None when no rate is stated."""
    if norm_spec.kind is NormKind.L1_TO_LINF:
        return -1.0 / 3.0
    if norm_spec.kind is NormKind.L2SIG:
        if norm_spec.sigma > 1.5 and not resonant:
            return -1.5
        return -0.5 if norm_spec.sigma > 0.5 else None
    return None if resonant else -4.0 / 3.0


def cross_route_difference(pot: Potential, N: int, times=CROSS_ROUTE_TIMES, window=CROSS_ROUTE_WINDOW,
                           op: TruncatedOperator | None = None) -> tuple[float, tuple]:
    """Largest block difference between the routes over the times inside the reflection-free range."""
    op = op or TruncatedOperator.build(pot, N)
    used = tuple(t for t in times if t <= t_max(N, pot.m))
    worst = 0.0
    for t in used:
        a = propagator_exact(pot, N, t, window, op).matrix
        b = spectral_kernel(pot, t, window).matrix
        worst = max(worst, float(np.abs(a - b).max()))
    return worst, used


def cmd_evolve(cfg: RunConfig) -> dict:
    if cfg.exceeds_truncation():
        raise TruncationError(f"t_max={cfg.t_grid[1]:g} exceeds the reflection-free time "
                              f"{t_max(cfg.N, cfg.mass):.1f} for N={cfg.N}; use N >= {cfg.suggested_N()}")
    pot = cfg.potential_obj()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_grid = geometric_grid(*cfg.t_grid)
    reports = _edge_reports(pot)
    resonant = any(r.is_resonant for r in reports)
    routes = ("exact", "spectral") if cfg.route == "both" else (cfg.route,)
    op = TruncatedOperator.build(pot, cfg.N) if "exact" in routes else None
    fits = []
    for norm_spec in cfg.norms:
        rows = []
        for route in routes:
            with warnings.catch_warnings():
                warnings.simplefilter("error", TruncationWarning)
                f = decay_fit(pot, norm_spec.kind, t_grid, route=route, sigma=norm_spec.sigma, N=cfg.N, op=op)
            fits.append((norm_spec, route, f))
            rows += [[t, y, route] for t, y in zip(f.t, f.norm)]
        write_csv(out / f"decay_{norm_spec.label}.csv", cfg, ["t[1/unit-hopping]", "norm[1]", "route"], rows)
    v = np.linspace(0.0, 1.2 * np.sqrt(kappa(cfg.mass)), 241)
    scan = kernel_scan(pot, float(t_grid[-1]), v)
    write_csv(out / "kernel_scan.csv", cfg, ["v[sites/time]", "sup_block[1]"], zip(scan.v, scan.sup_block))
    lines = ["# Decay report", "", f"config hash `{cfg.hash}`, mass {cfg.mass:g}, "
             f"{len(cfg.potential)} nonzero sites, t in [{cfg.t_grid[0]:g}, {cfg.t_grid[1]:g}] "
             f"({cfg.t_grid[2]} points)", "", "## Band edges", ""]
    lines += [f"- {s}" for s in _resonance_lines(reports)]
    lines += ["", "## Exponents", "", "| norm | route | target | fitted | envelope fit |", "|---|---|---|---|---|"]
    for norm_spec, route, f in fits:
        target = expected_exponent(norm_spec, resonant)
        tgt = "none stated" if target is None else f"{target:.3f}"
        lines.append(f"| {norm_spec.label} | {route} | {tgt} | {f.exponent:.3f} ± {f.ci:.3f} | "
                     f"{'yes' if f.envelope else 'no'} |")
    lines += ["", f"Wavefront: kernel_scan at t={t_grid[-1]:g} peaks at v={scan.argmax_v:.4f}, "
              f"sqrt(kappa)={np.sqrt(kappa(cfg.mass)):.4f}"]
    result = {"fits": fits, "scan": scan}
    if cfg.route == "both":
        diff, used = cross_route_difference(pot, cfg.N, op=op)
        times = ", ".join(f"{t:g}" for t in used)
        lines.append(f"Cross-route max block difference on [-10,10]^2, t in {{{times}}}: {diff:.3e}")
        result["cross_route"] = diff
    (out / "report.md").write_text("\n".join(lines) + "\n")
    result["summary"] = "evolve: " + ", ".join(f"{s.label}/{r} {f.exponent:.3f}" for s, r, f in fits)
    return result


# --------------------------------------------------------------------------- entry point

COMMANDS = {"scatter": cmd_scatter, "glm": cmd_glm, "evolve": cmd_evolve}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirac-lattice", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("config", help="path to a key = value configuration file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--grid-log2", type=int, help="theta grid size exponent (overrides grid_log2)")
    p.add_argument("--route", choices=("exact", "spectral", "both"), help="propagator route for evolve")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(output_dir=args.out, grid_log2=args.grid_log2,
                                                      route=args.route)
    except (ConfigError, InvalidPotentialError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = COMMANDS[args.command](cfg)
    except TruncationError as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except TruncationWarning as exc:
        print(f"truncation: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(result["summary"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
