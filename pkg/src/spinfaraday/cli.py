"""Command-line front end.

Each subcommand reproduces one figure-style dataset as CSV (angles in
degrees, detunings in MHz; everything stays in rad/s internally) and writes
a JSON manifest echoing the fully-resolved configuration. Re-running a
command from its own manifest reproduces the output byte for byte.

Subcommands:
  fig2      fluorescence lineshapes at three excitation powers
  fig4      ensemble-averaged transmittance and rotation angle vs detuning
  fig5      conditional spin-population curves for the analyzer measurement
  fig6      cavity-design scans (length, mirror reflectivity)
  validate  run the numerical invariant suite and report pass/fail

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
The default output directory can be set with SPINFARADAY_OUT.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .lindblad import CutoffError, fluorescence_lineshape, transmittance_steady
from .measurement import (
    MeasurementError,
    TRANSMITTED,
    conditional_curves,
    conditional_population,
    detection_prob_down,
    kraus,
    population_vs_detuning,
    pure_rotation_curves,
)
from .montecarlo import (
    CoincidenceConfig,
    MotionModel,
    SelectionError,
    average_rotation,
    average_transmittance,
    sample_selected_trajectories,
    threshold_trajectories,
)
from .optics import (
    InsufficientCountsError,
    Transmittance,
    rotation_curve,
    t_minus_value,
)
from .params import (
    ConfigError,
    GeometryError,
    TWO_PI,
    build_settings,
    derive_kappa,
    derive_waist,
    load_config,
    settings_to_flat,
)
from .scans import scan_length, scan_reflectivity

OUTPUT_ENV_VAR = "SPINFARADAY_OUT"

ENSEMBLE_THRESHOLD = "threshold"
ENSEMBLE_COINCIDENCE = "coincidence"

# Run-level defaults per command. Anything here is accepted as a config-file
# key (and echoed into the manifest); remaining keys must be physics keys.
_RUN_DEFAULTS: dict[str, dict[str, object]] = {
    "fig2": {
        "seed": 7,
        "samples": 1000,
        "grid": "-10:10:121",
        "excitation_waist_um": 24.0,
    },
    "fig4": {
        "seed": 12345,
        "samples": 10000,
        "grid": "-3:3:121",
        "ensemble": ENSEMBLE_THRESHOLD,
        "selection_threshold": 0.9,
        "rate_max_per_s": 7.6e5,
        "coincidence_window_ns": 600.0,
        "excitation_waist_um": 24.0,
        "v_fall_mps": 0.3,
        "v_transverse_rms_mps": 0.04,
        "window_us": 34.0,
        "time_step_us": 0.5,
    },
    "fig5": {
        "seed": 12345,
        "samples": 2000,
        "grid": "-3:3:121",
        "v_fall_mps": 0.3,
        "v_transverse_rms_mps": 0.04,
        "window_us": 4.0,
        "time_step_us": 0.5,
    },
    "fig6": {
        "seed": None,
        "samples": None,
        "grid": None,
    },
    "validate": {
        "seed": 12345,
        "samples": 300,
        "grid": None,
    },
}


def _out_dir(args: argparse.Namespace) -> str:
    out = args.out or os.environ.get(OUTPUT_ENV_VAR) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _resolve(args: argparse.Namespace, command: str):
    """Merge CLI flags > config file > defaults into (settings, run dict)."""
    file_cfg = dict(load_config(args.config)) if args.config else {}
    file_cfg.pop("command", None)  # manifests echo it; informational only

    run: dict[str, object] = {}
    for key, default in _RUN_DEFAULTS[command].items():
        run[key] = file_cfg.pop(key, default)
    # Tolerate run keys of sibling commands so any manifest loads anywhere.
    for other in _RUN_DEFAULTS.values():
        for key in other:
            file_cfg.pop(key, None)

    if args.seed is not None:
        run["seed"] = args.seed
    if args.samples is not None:
        run["samples"] = args.samples
    if args.grid is not None:
        run["grid"] = args.grid

    if run.get("seed") is not None and int(run["seed"]) < 0:
        raise ConfigError("seed must be non-negative")
    if run.get("samples") is not None and int(run["samples"]) < 1:
        raise ConfigError("samples must be at least 1")

    params, geometry, detection = build_settings(file_cfg)
    return params, geometry, detection, run


def _parse_grid(text: object) -> np.ndarray:
    """Parse 'min:max:n' (MHz) into a detuning grid in rad/s."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be 'min:max:n' in MHz, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"grid must be 'min:max:n' in MHz, got {text!r}") from exc
    if n < 1:
        raise ConfigError("grid must contain at least one point")
    if hi < lo or (hi == lo and n > 1):
        raise ConfigError("grid maximum must exceed the minimum")
    return TWO_PI * 1e6 * np.linspace(lo, hi, n)


def _write_manifest(out_dir: str, command: str, run, params, geometry, detection) -> str:
    payload: dict[str, object] = {"command": command}
    payload.update(run)
    payload.update(settings_to_flat(params, geometry, detection))
    name = f"{command}.manifest.json"
    with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return name


def _format_cell(value: object) -> str:
    if isinstance(value, str):
        return value
    return f"{float(value):.10g}"


def _write_csv(out_dir: str, name: str, manifest: str, header, rows) -> str:
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# manifest: {manifest}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")
    return path


def _motion_from_run(run: dict) -> MotionModel:
    return MotionModel(
        v_fall=float(run["v_fall_mps"]),
        v_transverse_rms=float(run["v_transverse_rms_mps"]),
        window=float(run["window_us"]) * 1e-6,
        seed=int(run["seed"]),
        time_step=float(run["time_step_us"]) * 1e-6,
    )


def cmd_fig2(args: argparse.Namespace) -> int:
    params, geometry, detection, run = _resolve(args, "fig2")
    grid = _parse_grid(run["grid"])
    out_dir = _out_dir(args)
    manifest = _write_manifest(out_dir, "fig2", run, params, geometry, detection)

    rows = []
    for label, scale in (("1 nW", 1.0 / 300.0), ("100 nW", 100.0 / 300.0), ("300 nW", 1.0)):
        shape = fluorescence_lineshape(
            params,
            scale,
            grid,
            n_samples=int(run["samples"]),
            seed=int(run["seed"]),
            excitation_waist=float(run["excitation_waist_um"]) * 1e-6,
        )
        if shape.failed_points:
            print(
                f"warning: {shape.failed_points}/{grid.size} solver points failed "
                f"for {label}; curve continued without them",
                file=sys.stderr,
            )
        for detuning, value in zip(shape.detunings, shape.normalized):
            rows.append([detuning / (TWO_PI * 1e6), value, label])

    path = _write_csv(
        out_dir,
        "fig2.csv",
        manifest,
        ["detuning_mhz", "normalized_fluorescence", "power_label"],
        rows,
    )
    print(f"wrote {path}")
    return 0


def cmd_fig4(args: argparse.Namespace) -> int:
    params, geometry, detection, run = _resolve(args, "fig4")
    grid = _parse_grid(run["grid"])
    ensemble = str(run["ensemble"])
    if ensemble not in (ENSEMBLE_THRESHOLD, ENSEMBLE_COINCIDENCE):
        raise ConfigError(
            f"ensemble must be '{ENSEMBLE_THRESHOLD}' or '{ENSEMBLE_COINCIDENCE}', got {ensemble!r}"
        )
    out_dir = _out_dir(args)
    manifest = _write_manifest(out_dir, "fig4", run, params, geometry, detection)

    motion = _motion_from_run(run)
    n = int(run["samples"])
    if ensemble == ENSEMBLE_THRESHOLD:
        trajectories = threshold_trajectories(
            motion, params, n, threshold=float(run["selection_threshold"])
        )
    else:
        coinc = CoincidenceConfig(
            window_ns=float(run["coincidence_window_ns"]),
            rate_max=float(run["rate_max_per_s"]),
        )
        trajectories = sample_selected_trajectories(
            motion,
            coinc,
            params,
            n,
            excitation_waist=float(run["excitation_waist_um"]) * 1e-6,
        )

    averaged_t = average_transmittance(trajectories, grid, params)
    pinned_t = np.abs(t_minus_value(grid, params.g0, params))
    averaged_angle = np.degrees(average_rotation(trajectories, grid, params))
    pinned_angle = np.degrees(rotation_curve(grid, params.g0, params))
    delta_mhz = grid / (TWO_PI * 1e6)

    path_a = _write_csv(
        out_dir,
        "fig4a.csv",
        manifest,
        ["delta_mhz", "averaged_transmittance", "pinned_transmittance"],
        list(zip(delta_mhz, averaged_t, pinned_t)),
    )
    path_b = _write_csv(
        out_dir,
        "fig4b.csv",
        manifest,
        ["delta_mhz", "averaged_angle_deg", "pinned_angle_deg"],
        list(zip(delta_mhz, averaged_angle, pinned_angle)),
    )
    print(f"wrote {path_a}")
    print(f"wrote {path_b}")
    return 0


def cmd_fig5(args: argparse.Namespace) -> int:
    params, geometry, detection, run = _resolve(args, "fig5")
    grid = _parse_grid(run["grid"])
    out_dir = _out_dir(args)
    manifest = _write_manifest(out_dir, "fig5", run, params, geometry, detection)

    motion = _motion_from_run(run)
    n = int(run["samples"])

    # Panel (a): ideal rotation of -10 degrees, three priors, transmitted port.
    phi_deg = np.linspace(0.0, 180.0, 181)
    priors = (0.75, 0.5, 0.25)
    curves = pure_rotation_curves(math.radians(-10.0), priors, np.radians(phi_deg))
    rows_a = []
    for i, prior in enumerate(priors):
        for j, phi in enumerate(phi_deg):
            rows_a.append([phi, prior, curves[i, j]])
    path_a = _write_csv(
        out_dir, "fig5a.csv", manifest, ["phi_deg", "prior", "p_down"], rows_a
    )

    # Panel (b): elliptical transmittance at delta = -2pi x 1.1 MHz with
    # motional averaging, both analyzer ports, prior 1/2.
    delta_probe = -TWO_PI * 1.1e6
    cc = conditional_curves(0.5, delta_probe, params, motion, n_samples=n)
    rows_b = []
    for j, phi in enumerate(cc.phi_deg):
        rows_b.append([phi, "transmitted", cc.p_down_transmitted[j], cc.click_prob_transmitted[j]])
    for j, phi in enumerate(cc.phi_deg):
        rows_b.append([phi, "reflected", cc.p_down_reflected[j], cc.click_prob_reflected[j]])
    path_b = _write_csv(
        out_dir,
        "fig5b.csv",
        manifest,
        ["phi_deg", "port", "p_down", "click_prob"],
        rows_b,
    )

    # Inset: population versus detuning at a fixed 60-degree analyzer.
    inset = population_vs_detuning(
        0.5, math.radians(60.0), grid, params, motion, port=TRANSMITTED, n_samples=n
    )
    rows_i = list(zip(grid / (TWO_PI * 1e6), inset))
    path_i = _write_csv(
        out_dir, "fig5_inset.csv", manifest, ["delta_mhz", "p_down"], rows_i
    )

    for path in (path_a, path_b, path_i):
        print(f"wrote {path}")
    return 0


def cmd_fig6(args: argparse.Namespace) -> int:
    params, geometry, detection, run = _resolve(args, "fig6")
    out_dir = _out_dir(args)
    manifest = _write_manifest(out_dir, "fig6", run, params, geometry, detection)

    length_scan = scan_length(anchor=params, anchor_geometry=geometry)
    header_a, rows_a = length_scan.rows()
    path_a = _write_csv(out_dir, "fig6a.csv", manifest, header_a, rows_a)

    reflectivity_scan = scan_reflectivity(anchor=params, anchor_geometry=geometry)
    header_b, rows_b = reflectivity_scan.rows()
    path_b = _write_csv(out_dir, "fig6b.csv", manifest, header_b, rows_b)

    print(f"wrote {path_a}")
    print(f"wrote {path_b}")
    return 0


def _validate_checks(params, geometry, rng: np.random.Generator, draws: int):
    """Yield (name, passed, detail) for the numerical invariant suite."""
    # Steady-state solver against the analytic transmittance.
    deltas = TWO_PI * 1e6 * np.array([-4.0, -1.1, 0.0, 0.7, 3.3])
    worst = 0.0
    for delta in deltas:
        analytic = t_minus_value(delta, params.g0, params)
        numeric = transmittance_steady(delta, params.g0, params)
        worst = max(worst, abs(numeric - analytic) / abs(analytic))
    yield (
        "steady-state transmittance vs analytic",
        worst < 1e-6,
        f"max relative error {worst:.3e} (tol 1e-06)",
    )

    # Kraus completeness and reversal.
    worst_complete = 0.0
    worst_reversal = 0.0
    identity = np.eye(2)
    for _ in range(draws):
        theta, phi, basis = rng.uniform(-math.pi, math.pi, size=3)
        op = kraus(theta, phi)
        partner = op.partner()
        total = op.matrix.conj().T @ op.matrix + partner.matrix.conj().T @ partner.matrix
        worst_complete = max(worst_complete, float(np.max(np.abs(total - identity))))
        forward = kraus(theta, basis)
        reverse = kraus(-theta, basis - theta)
        product = reverse.matrix @ forward.matrix
        scale = math.cos(basis) * math.cos(basis - theta)
        worst_reversal = max(
            worst_reversal, float(np.max(np.abs(product - scale * identity)))
        )
    yield (
        "Kraus completeness",
        worst_complete < 1e-12,
        f"max deviation {worst_complete:.3e} over {draws} draws (tol 1e-12)",
    )
    yield (
        "measurement reversal proportional to identity",
        worst_reversal < 1e-12,
        f"max deviation {worst_reversal:.3e} over {draws} draws (tol 1e-12)",
    )

    # Bayes total probability on the lossless manifold.
    worst_bayes = 0.0
    for _ in range(draws):
        prior = rng.uniform(0.0, 1.0)
        phi = rng.uniform(0.0, math.pi)
        t = Transmittance(t_minus=complex(np.exp(1j * rng.uniform(-math.pi, math.pi))))
        transmitted = conditional_population(prior, phi, t, port="transmitted")
        reflected = conditional_population(prior, phi, t, port="reflected")
        total = (
            transmitted.p_down_given_click * transmitted.click_probability
            + reflected.p_down_given_click * reflected.click_probability
        )
        worst_bayes = max(worst_bayes, abs(total - prior))
    yield (
        "Bayes total probability (lossless)",
        worst_bayes < 1e-12,
        f"max deviation {worst_bayes:.3e} over {draws} draws (tol 1e-12)",
    )

    # Port-sum identity for a general lossy transmittance.
    worst_port = 0.0
    for _ in range(draws):
        phi = rng.uniform(0.0, math.pi)
        t_val = rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        t = Transmittance(t_minus=complex(t_val))
        total = detection_prob_down(phi, t) + detection_prob_down(phi + math.pi / 2.0, t)
        expected = (1.0 + abs(t_val) ** 2) / 2.0
        worst_port = max(worst_port, abs(float(total) - expected))
    yield (
        "two-port click probability sum",
        worst_port < 1e-12,
        f"max deviation {worst_port:.3e} over {draws} draws (tol 1e-12)",
    )

    # Geometry anchors.
    waist = derive_waist(geometry, params.wavelength)
    kappa = derive_kappa(geometry)
    waist_ok = abs(waist - 19e-6) < 1e-6
    kappa_ok = abs(kappa - TWO_PI * 4.5e6) / (TWO_PI * 4.5e6) < 0.05
    yield (
        "derived waist near 19 um",
        waist_ok,
        f"waist {waist * 1e6:.3f} um (tol +-1 um)",
    )
    yield (
        "derived cavity decay near 2pi x 4.5 MHz",
        kappa_ok,
        f"kappa 2pi x {kappa / (TWO_PI * 1e6):.4f} MHz (tol 5%)",
    )


def cmd_validate(args: argparse.Namespace) -> int:
    params, geometry, detection, run = _resolve(args, "validate")
    out_dir = _out_dir(args)
    _write_manifest(out_dir, "validate", run, params, geometry, detection)

    rng = np.random.default_rng(int(run["seed"]))
    failures = 0
    for name, passed, detail in _validate_checks(params, geometry, rng, int(run["samples"])):
        tag = "PASS" if passed else "FAIL"
        print(f"{tag}  {name}: {detail}")
        if not passed:
            failures += 1
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinfaraday",
        description="Cavity-enhanced spin-dependent polarization rotation: figure data and validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = (
        ("fig2", cmd_fig2, "fluorescence lineshapes at 1/100/300 nW-equivalent powers"),
        ("fig4", cmd_fig4, "ensemble-averaged transmittance and rotation vs detuning"),
        ("fig5", cmd_fig5, "conditional spin populations vs analyzer angle"),
        ("fig6", cmd_fig6, "cavity length and mirror reflectivity design scans"),
        ("validate", cmd_validate, "run the numerical invariant suite"),
    )
    for name, func, help_text in commands:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", metavar="PATH", help="JSON or key=value config file")
        sp.add_argument(
            "--out",
            metavar="DIR",
            help=f"output directory (default: ${OUTPUT_ENV_VAR} or current directory)",
        )
        sp.add_argument("--seed", type=int, metavar="N", help="random seed override")
        sp.add_argument(
            "--samples", type=int, metavar="N", help="sample count override"
        )
        sp.add_argument(
            "--grid",
            metavar="MIN:MAX:N",
            help="detuning grid in MHz; write --grid=-3:3:121 for negative "
            "minima (ignored by fig6)",
        )
        sp.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GeometryError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (
        CutoffError,
        SelectionError,
        MeasurementError,
        InsufficientCountsError,
        np.linalg.LinAlgError,
        ValueError,
        RuntimeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
