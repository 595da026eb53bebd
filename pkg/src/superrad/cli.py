"""Command-line front end: parse config, dispatch to solvers, write artifacts.

Usage:
    superrad <command> --config <path> [--out-dir <path>] [--format csv|json] [--seed <u64>]

Each run writes `<command>_result.(csv|json)` plus `run_manifest.json`; some
commands add JSON sidecars (fit summary, polariton branches).  Data files are
byte-identical across runs with the same config and seed.  On failure nothing
is written and a machine-readable error record goes to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, _config_to_dict, parse_config
from .cumulant import integrate_to_steady_state
from .errors import ConfigError, SuperradError
from .exact import (
    HilbertConfig,
    build_liouvillian,
    expectation,
    g2_zero_converged,
    steady_state_exact,
)
from .optics import OpticalParams, compute_reflectance_map
from .params import validate_params
from .sweep import SweepSpec, fit_power_law, run_concentration_sweep
from .units import TIME_UNIT_PS


def _fmt(value):
    """Shortest round-trip text for CSV cells."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: Path, data: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- command handlers: each returns (columns, rows, summary, sidecars) ---------

def _cmd_validate(config: RunConfig, _rng):
    p = validate_params(config.effective_params())
    columns = ["n_emitters", "delta_mev", "delta_c_mev", "g_mev", "kappa_mev",
               "omega_mev", "gamma_minus_mev", "gamma_z_mev"]
    rows = [{
        "n_emitters": p.n_emitters, "delta_mev": p.delta, "delta_c_mev": p.delta_c,
        "g_mev": p.g, "kappa_mev": p.kappa, "omega_mev": p.omega,
        "gamma_minus_mev": p.gamma_minus, "gamma_z_mev": p.gamma_z,
    }]
    return columns, rows, {"valid": True, "time_unit_ps": TIME_UNIT_PS}, {}


def _hilbert_config(config: RunConfig) -> HilbertConfig:
    p = config.effective_params()
    n_max = config.hilbert.n_max if config.hilbert else 3
    cap = config.hilbert.cap if config.hilbert else 4096
    return HilbertConfig(n_max=n_max, n_emitters=p.n_emitters, cap=cap)


def _cmd_exact(config: RunConfig, _rng):
    p = validate_params(config.effective_params())
    h = _hilbert_config(config)
    liou = build_liouvillian(p, h)
    rho = steady_state_exact(liou)
    n_phot = expectation(rho, "photon_number", h).real
    s_z = expectation(rho, "sigma_z", h, 0).real
    x_pm = expectation(rho, "cross_pm", h, 0, 1).real if p.n_emitters >= 2 else float("nan")
    columns = ["n_emitters", "n_max", "photon_number", "flux_mev", "sigma_z", "cross_pm"]
    rows = [{
        "n_emitters": p.n_emitters, "n_max": h.n_max, "photon_number": n_phot,
        "flux_mev": p.kappa * n_phot, "sigma_z": s_z, "cross_pm": x_pm,
    }]
    return columns, rows, None, {}


def _cmd_cumulant(config: RunConfig, _rng):
    p = validate_params(config.effective_params())
    m = integrate_to_steady_state(p)
    columns = ["n_emitters", "omega_mev", "n_photon", "s_z", "coh_re", "coh_im",
               "x_pm_re", "x_pm_im", "z_zz", "flux_mev"]
    rows = [{
        "n_emitters": p.n_emitters, "omega_mev": p.omega, "n_photon": m.n_photon,
        "s_z": m.s_z, "coh_re": m.coh.real, "coh_im": m.coh.imag,
        "x_pm_re": m.x_pm.real, "x_pm_im": m.x_pm.imag, "z_zz": m.z_zz,
        "flux_mev": p.kappa * m.n_photon,
    }]
    return columns, rows, None, {}


def _cmd_sweep(config: RunConfig, _rng):
    p = validate_params(config.effective_params())
    spec = SweepSpec(
        n_values=config.sweep.n_values,
        drive_rule=config.sweep.drive_rule,
        base_params=p,
        gamma_r=config.sweep.gamma_r,
    )
    sweep_rows = run_concentration_sweep(spec)
    fit = fit_power_law([(r.n, r.ratio) for r in sweep_rows])
    columns = ["n", "omega_mev", "l_cavity_mev", "l_control_mev", "ratio"]
    rows = [{
        "n": r.n, "omega_mev": r.omega, "l_cavity_mev": r.l_cavity,
        "l_control_mev": r.l_control, "ratio": r.ratio,
    } for r in sweep_rows]
    summary = {"alpha": fit.alpha, "prefactor": fit.prefactor, "rmsd": fit.rmsd}
    return columns, rows, summary, {}


def _cmd_reflectance(config: RunConfig, _rng):
    o = config.optics
    params = OpticalParams(
        e_c0=o.e_c0, n_eff=o.n_eff, delta=o.delta, g_coll=o.g_coll, kappa=o.kappa,
        kappa_ext=o.kappa_ext if o.kappa_ext is not None else o.kappa / 2,
        gamma_perp=o.gamma_perp,
    )
    thetas = np.linspace(o.theta_min, o.theta_max, o.n_theta)
    e_lo = o.e_min if o.e_min is not None else o.delta - 500.0
    e_hi = o.e_max if o.e_max is not None else o.delta + 500.0
    energies = np.linspace(e_lo, e_hi, o.n_energy)
    rmap = compute_reflectance_map(params, thetas, energies)
    columns = ["theta_deg", "energy_mev", "reflectance"]
    rows = [
        {"theta_deg": float(t), "energy_mev": float(e),
         "reflectance": float(rmap.r_values[i, j])}
        for i, t in enumerate(rmap.thetas)
        for j, e in enumerate(rmap.energies)
    ]
    branches = {
        "theta_deg": [float(t) for t in rmap.thetas],
        "lp_re_mev": [float(v) for v in rmap.lp_branch.real],
        "lp_im_mev": [float(v) for v in rmap.lp_branch.imag],
        "up_re_mev": [float(v) for v in rmap.up_branch.real],
        "up_im_mev": [float(v) for v in rmap.up_branch.imag],
    }
    return columns, rows, None, {"reflectance_branches.json": branches}


def _cmd_fit(config: RunConfig, rng):
    points = [(n, r) for n, r in config.fit.points]
    if config.fit.noise_sigma > 0:
        noise = np.exp(rng.normal(0.0, config.fit.noise_sigma, len(points)))
        points = [(n, r * w) for (n, r), w in zip(points, noise)]
    fit = fit_power_law(points)
    columns = ["n", "ratio"]
    rows = [{"n": n, "ratio": r} for n, r in points]
    summary = {"alpha": fit.alpha, "prefactor": fit.prefactor, "rmsd": fit.rmsd}
    return columns, rows, summary, {}


def _cmd_g2(config: RunConfig, _rng):
    p = validate_params(config.effective_params())
    h = _hilbert_config(config)
    g2, n_max_used = g2_zero_converged(p, h)
    liou = build_liouvillian(p, HilbertConfig(n_max_used, p.n_emitters, h.cap))
    rho = steady_state_exact(liou)
    n_phot = expectation(rho, "photon_number",
                         HilbertConfig(n_max_used, p.n_emitters, h.cap)).real
    columns = ["n_emitters", "n_max_converged", "photon_number", "flux_mev", "g2_zero"]
    rows = [{
        "n_emitters": p.n_emitters, "n_max_converged": n_max_used,
        "photon_number": n_phot, "flux_mev": p.kappa * n_phot, "g2_zero": g2,
    }]
    return columns, rows, None, {}


_HANDLERS = {
    "validate": _cmd_validate,
    "exact": _cmd_exact,
    "cumulant": _cmd_cumulant,
    "sweep": _cmd_sweep,
    "reflectance": _cmd_reflectance,
    "fit": _cmd_fit,
    "g2": _cmd_g2,
}


def run(config: RunConfig) -> list[Path]:
    """Execute a parsed configuration and write its artifacts.

    All payloads are computed before anything is written, and each file is
    written atomically, so a failing run leaves no partial result files.
    Returns the written paths.
    """
    started = time.monotonic()
    rng = np.random.default_rng(config.seed)
    columns, rows, summary, sidecars = _HANDLERS[config.command](config, rng)

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[tuple[Path, str]] = []
    if config.format == "csv":
        artifacts.append((out_dir / f"{config.command}_result.csv", _csv_text(columns, rows)))
        if summary is not None:
            artifacts.append((out_dir / f"{config.command}_summary.json", _json_text(summary)))
    else:
        payload = {"rows": rows, "summary": summary}
        for name, obj in sidecars.items():
            payload[Path(name).stem] = obj
        artifacts.append((out_dir / f"{config.command}_result.json", _json_text(payload)))
    if config.format == "csv":
        for name, obj in sidecars.items():
            artifacts.append((out_dir / name, _json_text(obj)))

    manifest = {
        "command": config.command,
        "tool_version": __version__,
        "wall_time_s": time.monotonic() - started,
        "config": _config_to_dict(config),
        "artifacts": [p.name for p, _ in artifacts],
    }
    artifacts.append((out_dir / "run_manifest.json", _json_text(manifest)))

    written = []
    for path, text in artifacts:
        _atomic_write(path, text)
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="superrad",
        description="Steady-state collective emission toolkit.",
    )
    parser.add_argument("command", choices=sorted(_HANDLERS))
    parser.add_argument("--config", required=True, help="path to the YAML configuration")
    parser.add_argument("--out-dir", default=None, help="override config output_dir")
    parser.add_argument("--format", default=None, choices=["csv", "json"],
                        help="override config format")
    parser.add_argument("--seed", default=None, type=int, help="override config seed")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(json.dumps({"error": "ConfigFileUnreadable", "message": str(e)}))
        return 1

    try:
        config = parse_config(text)
        if config.command != args.command:
            raise ConfigError(
                f"config document is for command '{config.command}', "
                f"but '{args.command}' was requested"
            )
        if args.out_dir is not None:
            config = replace(config, output_dir=args.out_dir)
        if args.format is not None:
            config = replace(config, format=args.format)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be non-negative")
            config = replace(config, seed=args.seed)
        written = run(config)
    except SuperradError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}))
        return 1

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
