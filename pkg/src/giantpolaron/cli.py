"""Batch driver: config parsing, dispatch, dataset and manifest output.

Run specs are flat key-value text files with dotted namespaces::

    system.alpha = 1.0
    system.omega_c = 3.0
    system.n_modes = 15001
    system.n_contacts = 5
    system.spacing = 20

Energies are in units of delta, positions in lattice sites, times in 1/delta.
Every mode writes RFC-4180-style CSV files (full double precision via
shortest round-trip formatting) plus a JSON manifest with the resolved
parameters and derived quantities.  Exit codes: 0 success, 2 validation
failure, 3 numerical failure.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from .waveguide import SystemConfig, build_modes, equidistant_contacts
from .polaron import ConvergenceError, solve_self_consistent
from .equilibrium import (PhaseDiagramError, default_fit_window,
                          fit_tail_exponent, phase_diagram, photon_profile)
from .markovian import decay_rate, lamb_shift
from .dynamics import (NormDriftError, field_snapshot, spontaneous_emission,
                       stability_dt)
from .dde import DdeParams, bound_state_scan, integrate_dde
from .polaron import ground_state_excitation

MODES = ("gs", "phase-diagram", "markov", "dynamics", "dde", "bound-scan")


@dataclass
class RunSpec:
    """Parsed run configuration for one CLI invocation."""

    mode: str
    values: dict = field(default_factory=dict)
    path: str = ""

    def get(self, key, default=None):
        return self.values.get(key, default)


# ---------------------------------------------------------------------------
# config parsing

def parse_config(path) -> dict:
    """Parse a flat `key = value` file; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def load_spec(mode, config_path) -> RunSpec:
    return RunSpec(mode=mode, values=parse_config(config_path),
                   path=str(config_path))


def _as_float(spec, key, diags, required=False):
    raw = spec.get(key)
    if raw is None:
        if required:
            diags.append(f"{key}: required for mode={spec.mode}")
        return None
    try:
        return float(raw)
    except ValueError:
        diags.append(f"{key}: not a number ({raw!r})")
        return None


def _as_int(spec, key, diags, required=False):
    raw = spec.get(key)
    if raw is None:
        if required:
            diags.append(f"{key}: required for mode={spec.mode}")
        return None
    try:
        return int(raw)
    except ValueError:
        diags.append(f"{key}: not an integer ({raw!r})")
        return None


def _as_list(raw):
    return [v.strip() for v in raw.split(",") if v.strip()]


def build_system(spec: RunSpec, diags, spacing_override=None):
    """Assemble the SystemConfig from the `system.*` namespace."""
    alpha = _as_float(spec, "system.alpha", diags, required=True)
    omega_c = _as_float(spec, "system.omega_c", diags, required=True)
    n_modes = _as_int(spec, "system.n_modes", diags, required=True)
    delta = _as_float(spec, "system.delta", diags) or 1.0
    v_g = _as_float(spec, "system.v_g", diags) or 1.0
    if None in (alpha, omega_c, n_modes):
        return None

    raw_contacts = spec.get("system.contacts")
    if raw_contacts is not None and spacing_override is None:
        try:
            contacts = tuple(int(v) for v in _as_list(raw_contacts))
        except ValueError:
            diags.append(f"system.contacts: not an integer list ({raw_contacts!r})")
            return None
    else:
        n_contacts = _as_int(spec, "system.n_contacts", diags) or 1
        spacing = (spacing_override if spacing_override is not None
                   else _as_int(spec, "system.spacing", diags) or 0)
        first = _as_int(spec, "system.first_contact", diags) or 0
        if spacing == 0:
            contacts = (first,)
        else:
            contacts = equidistant_contacts(n_contacts, spacing, first)

    for idx, site in enumerate(contacts):
        if site < 0 or site >= n_modes:
            diags.append(f"system.contacts[{idx}]: site {site} outside [0, {n_modes})")
            return None
    try:
        return SystemConfig(alpha=alpha, omega_c=omega_c, n_modes=n_modes,
                            contacts=contacts, delta=delta, v_g=v_g)
    except ValueError as exc:
        diags.append(f"system: {exc}")
        return None


def sweep_axis(spec: RunSpec, prefix, diags, required=False, integer=False):
    """Read a (start, stop, count) axis; returns an array or None."""
    if spec.get(f"{prefix}.start") is None and not required:
        return None
    start = _as_float(spec, f"{prefix}.start", diags, required=required)
    stop = _as_float(spec, f"{prefix}.stop", diags, required=required)
    count = _as_int(spec, f"{prefix}.count", diags, required=required)
    if None in (start, stop, count):
        return None
    if count < 1:
        diags.append(f"{prefix}.count: must be >= 1")
        return None
    axis = np.linspace(start, stop, count)
    return np.unique(np.round(axis).astype(int)) if integer else axis


def validate(spec: RunSpec):
    """All diagnostics for a spec; an empty list means the run would start."""
    diags = []
    if spec.mode not in MODES:
        diags.append(f"mode: unknown mode {spec.mode!r}")
        return diags
    config = build_system(spec, diags)

    if spec.mode == "phase-diagram":
        sweep_axis(spec, "sweep.alpha", diags, required=True)
        sweep_axis(spec, "sweep.spacing", diags, required=True, integer=True)
    elif spec.mode == "markov":
        sweep_axis(spec, "sweep.spacing", diags, integer=True)
    elif spec.mode == "dynamics":
        t_max = _as_float(spec, "dynamics.t_max", diags, required=True)
        dt = _as_float(spec, "dynamics.dt", diags)
        if config is not None and dt is not None:
            bound = stability_dt(config)
            if dt > bound:
                diags.append(f"dynamics.dt: {dt} above the stability bound {bound:.6g}")
        if t_max is not None and t_max <= 0:
            diags.append("dynamics.t_max: must be positive")
    elif spec.mode == "dde":
        t_max = _as_float(spec, "dde.t_max", diags, required=True)
        if t_max is not None and t_max <= 0:
            diags.append("dde.t_max: must be positive")
        if config is not None and config.contact_spacing is None:
            diags.append("system.contacts: reduced model requires equidistant contacts")
    elif spec.mode == "bound-scan":
        sweep_axis(spec, "scan.alpha", diags, required=True)
        sweep_axis(spec, "scan.spacing", diags, integer=True)
        raw = spec.get("scan.n_values")
        if raw is None:
            diags.append("scan.n_values: required for mode=bound-scan")
        elif config is not None:
            try:
                ns = [int(v) for v in _as_list(raw)]
            except ValueError:
                diags.append(f"scan.n_values: not an integer list ({raw!r})")
            else:
                for n in ns:
                    if n % config.n_contacts == 0:
                        diags.append(
                            f"scan.n_values: n={n} is a multiple of "
                            f"n_contacts={config.n_contacts} (cot singularity)")
        if config is not None and not config.contact_spacing:
            diags.append("system: bound-scan requires equidistant contacts "
                         "with positive spacing")
    return diags


# ---------------------------------------------------------------------------
# output helpers

def write_csv(path, header, rows):
    """RFC-4180-style CSV with shortest round-trip float formatting."""
    import csv

    def fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return v

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return Path(path)


def write_manifest(path, spec: RunSpec, derived, t0):
    doc = {
        "tool": "giantpolaron",
        "version": __version__,
        "mode": spec.mode,
        "config_file": spec.path,
        "parameters": dict(sorted(spec.values.items())),
        "derived": derived,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return Path(path)


def _slug(config: SystemConfig):
    return (f"a{config.alpha:g}_Nc{config.n_contacts}"
            f"_x{config.contact_spacing if config.contact_spacing is not None else 'irr'}"
            f"_N{config.n_modes}")


# ---------------------------------------------------------------------------
# mode runners (each returns a `derived` dict for the manifest)

def run_gs(spec, out, jobs, plot):
    diags = []
    config = build_system(spec, diags)
    grid = build_modes(config)
    solution = solve_self_consistent(grid, config)
    profile = photon_profile(solution, grid, config)
    slug = _slug(config)

    write_csv(out / f"profile_{slug}.csv", ["x", "occupation"],
              zip(profile.x, profile.occupation))
    write_csv(out / f"solution_{slug}.csv", ["k", "re_f", "im_f"],
              zip(grid.k, solution.f.real, solution.f.imag))
    write_csv(out / f"modes_{slug}.csv", ["k", "omega", "re_g", "im_g"],
              zip(grid.k, grid.omega, grid.g_tilde.real, grid.g_tilde.imag))

    derived = {
        "delta_r": solution.delta_r,
        "localized": solution.localized,
        "residual": solution.residual,
        "iterations": solution.iterations,
        "pe_gs": ground_state_excitation(solution),
        "total_photons": profile.total_photons(),
    }
    try:
        derived["tail_exponent"] = fit_tail_exponent(profile, config)
        derived["fit_window"] = list(default_fit_window(config))
    except ValueError as exc:
        derived["tail_exponent_error"] = str(exc)
    if plot:
        from . import plots
        plots.profile_figure(profile, config, out / f"profile_{slug}.png")
    return derived


def run_phase_diagram(spec, out, jobs, plot):
    diags = []
    template = build_system(spec, diags)
    alphas = sweep_axis(spec, "sweep.alpha", diags, required=True)
    spacings = sweep_axis(spec, "sweep.spacing", diags, required=True, integer=True)
    diagram = phase_diagram(template, alphas, spacings, jobs=jobs)
    rows = [(a, x, diagram.delta_r[i, j], diagram.localized_mask[i, j])
            for i, a in enumerate(diagram.alpha_grid)
            for j, x in enumerate(diagram.x_grid)]
    write_csv(out / "diagram.csv", ["alpha", "x", "delta_r", "localized"], rows)
    if plot:
        from . import plots
        plots.diagram_figure(diagram, out / "diagram.png")
    return {"cells": len(rows),
            "localized_cells": int(diagram.localized_mask.sum())}


def run_markov(spec, out, jobs, plot):
    diags = []
    spacings = sweep_axis(spec, "sweep.spacing", diags, integer=True)
    if spacings is None:
        base = build_system(spec, diags)
        spacings = [base.contact_spacing if base.contact_spacing is not None else 0]
    rows = []
    for x in spacings:
        config = build_system(spec, diags, spacing_override=int(x))
        solution = solve_self_consistent(build_modes(config), config)
        gamma = decay_rate(solution, config)
        ohm = np.pi * config.alpha * solution.delta_r
        rows.append({
            "x": int(x),
            "gamma_r": gamma,
            "lamb_shift": lamb_shift(solution, config),
            "delta_r": solution.delta_r,
            "gamma_r_normalized": gamma / ohm if ohm > 0 else 0.0,
        })
    write_csv(out / "markov.csv",
              ["x", "gamma_r", "lamb_shift", "delta_r", "gamma_r_normalized"],
              [tuple(r.values()) for r in rows])
    if plot:
        from . import plots
        plots.markov_figure(rows, out / "markov.png")
    return {"points": len(rows)}


def run_dynamics(spec, out, jobs, plot):
    diags = []
    config = build_system(spec, diags)
    t_max = float(spec.get("dynamics.t_max"))
    dt = spec.get("dynamics.dt")
    dt = float(dt) if dt is not None else None
    snap_raw = spec.get("dynamics.snapshot_times", "")
    snapshot_times = [float(v) for v in _as_list(snap_raw)] if snap_raw else []

    traj, solution, grid = spontaneous_emission(
        config, t_max, dt, snapshot_times=snapshot_times)
    slug = _slug(config)
    write_csv(out / f"trajectory_{slug}.csv",
              ["t", "re_c", "im_c", "p_e_polaron", "p_e_lab"],
              zip(traj.times, traj.c.real, traj.c.imag, traj.p_e_polaron,
                  traj.p_e))
    sites = np.arange(config.n_modes)
    occupations = []
    for i, state in enumerate(traj.states):
        n_x = field_snapshot(state, solution, config)
        occupations.append(n_x)
        write_csv(out / f"snapshot_{slug}_t{state.time:g}.csv", ["x", "n"],
                  zip(sites, n_x))
    if plot:
        from . import plots
        plots.trajectory_figure(traj, out / f"trajectory_{slug}.png")
        if occupations:
            plots.snapshot_figure(sites, occupations,
                                  [s.time for s in traj.states],
                                  out / f"snapshots_{slug}.png")
    return {
        "delta_r": solution.delta_r,
        "gamma_r": decay_rate(solution, config),
        "pe_gs": traj.p_e_gs,
        "pe_final": float(traj.p_e[-1]),
        "max_norm_drift": float(np.max(np.abs(traj.norm - traj.norm[0]))),
    }


def run_dde(spec, out, jobs, plot):
    diags = []
    config = build_system(spec, diags)
    solution = solve_self_consistent(build_modes(config), config)
    params = DdeParams.from_solution(solution, config)
    t_max = float(spec.get("dde.t_max"))
    c0 = complex(float(spec.get("dde.c0", "1.0")))
    t, c = integrate_dde(params, c0, t_max)
    slug = _slug(config)
    write_csv(out / f"dde_{slug}.csv", ["t", "re_c", "im_c", "abs_c_sq"],
              zip(t, c.real, c.imag, np.abs(c) ** 2))
    if plot:
        from . import plots
        plots.dde_figure(t, c, out / f"dde_{slug}.png")
    return {"delta_r": solution.delta_r, "gamma": params.gamma,
            "zeta": params.zeta}


def run_bound_scan(spec, out, jobs, plot):
    diags = []
    template = build_system(spec, diags)
    alphas = sweep_axis(spec, "scan.alpha", diags, required=True)
    n_values = [int(v) for v in _as_list(spec.get("scan.n_values"))]
    spacing_grid = sweep_axis(spec, "scan.spacing", diags, integer=True)
    if spacing_grid is not None:
        spacing_grid = [int(v) for v in spacing_grid]
    reports = bound_state_scan(template, alphas, n_values,
                               spacing_grid=spacing_grid)
    records = [{
        "n": r.n, "alpha": r.alpha, "spacing": r.spacing,
        "delta_r_zeta_solution": r.delta_r_zeta_solution,
        "residual": r.residual, "coexisting": list(r.coexisting),
    } for r in reports]
    (out / "poles.json").write_text(json.dumps(records, indent=2) + "\n")
    if plot:
        from . import plots
        plots.bound_scan_figure(reports, out / "poles.png")
    return {"roots": len(records),
            "coexisting_pairs": sum(1 for r in reports if r.coexisting) // 2}


RUNNERS = {
    "gs": run_gs,
    "phase-diagram": run_phase_diagram,
    "markov": run_markov,
    "dynamics": run_dynamics,
    "dde": run_dde,
    "bound-scan": run_bound_scan,
}


def run(spec: RunSpec, out_dir=None, jobs=None, plot=False):
    """Validate and execute a spec; returns (exit_code, derived-or-diagnostics)."""
    diags = validate(spec)
    if diags:
        return 2, diags
    out = Path(out_dir or spec.get("output_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        derived = RUNNERS[spec.mode](spec, out, jobs, plot)
    except (ConvergenceError, NormDriftError, PhaseDiagramError,
            ZeroDivisionError, FloatingPointError) as exc:
        return 3, [f"numerical failure: {exc}"]
    write_manifest(out / "manifest.json", spec, derived, t0)
    return 0, derived


# ---------------------------------------------------------------------------
# click entry points

@click.group()
@click.version_option(__version__)
def main():
    """Polaron simulations of a giant atom in an Ohmic waveguide."""


def _invoke(mode, config, out, jobs, plot):
    spec = load_spec(mode, config)
    code, payload = run(spec, out_dir=out, jobs=jobs, plot=plot)
    if code == 2:
        for d in payload:
            click.echo(f"invalid spec: {d}", err=True)
    elif code == 3:
        for d in payload:
            click.echo(d, err=True)
    else:
        click.echo(json.dumps(payload, indent=2, default=float))
    raise SystemExit(code)


def _mode_command(mode):
    @main.command(name=mode)
    @click.option("--config", required=True, type=click.Path(exists=True))
    @click.option("--out", default=None, type=click.Path())
    @click.option("--jobs", default=None, type=int)
    @click.option("--plot", is_flag=True, default=False,
                  help="render matplotlib figures next to the CSV output")
    def _cmd(config, out, jobs, plot):
        _invoke(mode, config, out, jobs, plot)

    _cmd.__doc__ = f"Run the {mode} pipeline."
    return _cmd


for _mode in MODES:
    _mode_command(_mode)


@main.command()
@click.argument("mode", type=click.Choice(MODES))
@click.option("--config", required=True, type=click.Path(exists=True))
def check(mode, config):
    """Validate a spec without running it; lists every violation."""
    diags = validate(load_spec(mode, config))
    for d in diags:
        click.echo(d)
    raise SystemExit(2 if diags else 0)
