"""Command-line interface: reproducible figure-style runs from config files.

    cavityspdc <subcommand> --config <path> [--out <dir>] [--format text|binary]
               [--threads N]

Subcommands: jsi-sr, jsi-dr, marginal, temporal, brightness-sweep, design,
airy.  Every run writes its artifacts plus a manifest listing each file with
the sha256 hash of the normalized configuration; identical configuration and
package version give bitwise-identical binary outputs.  Physics errors exit
nonzero with a single machine-parsable line on stderr:
error: module=<module>: <message>.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .brightness import (
    brightness_vs_r1p_sweep,
    brightness_vs_sigma_sweep,
    plateau_brightness_vs_r2,
)
from .cavity import airy, free_spectral_range, mode_width
from .config import load_config
from .constants import c
from .dispersion import refractive_index
from .design import design_source, report_design, spectral_check
from .doubly_resonant import jsi_doubly_resonant
from .errors import CavitySpdcError, ConfigError
from .gridfile import config_hash, write_columns, write_grid, write_text
from .spectral import jsi_singly_resonant, marginal_spectrum
from .temporal import (
    correlation_time,
    extract_peaks,
    joint_temporal_intensity,
    jsa_singly_resonant_rotated,
    time_difference_marginal,
)

_SUBCOMMANDS = ("jsi-sr", "jsi-dr", "marginal", "temporal", "brightness-sweep", "design", "airy")

_REQUIRED_SECTIONS = {
    "jsi-sr": ("crystal", "cavity", "pump", "grid"),
    "jsi-dr": ("crystal", "cavity", "pump", "grid"),
    "marginal": ("crystal", "cavity", "pump", "grid"),
    "temporal": ("crystal", "cavity", "pump", "filters", "grid"),
    "brightness-sweep": ("crystal", "cavity", "pump", "filters", "grid", "sweep"),
    "design": ("design",),
    "airy": ("crystal", "cavity", "grid"),
}


def _metadata(cfg, extra=None):
    meta = {
        "generator": f"cavityspdc {__version__}",
        "config_sha256": config_hash(cfg.normalized_text()),
    }
    meta.update(extra or {})
    return meta


def _run_jsi(cfg, out_dir, fmt, doubly_resonant):
    crystal = cfg.crystal()
    cavity = cfg.cavity(crystal)
    pump = cfg.pump()
    filters = cfg.filters()
    grid = cfg.grid()
    if doubly_resonant:
        jsi = jsi_doubly_resonant(cavity, pump, filters, grid)
        name = "jsi_dr.grid"
    else:
        jsi = jsi_singly_resonant(cavity, pump, filters, grid)
        name = "jsi_sr.grid"
    path = out_dir / name
    write_grid(jsi, path, fmt, _metadata(cfg, {"quantity": name.split(".")[0]}))
    return [path], (cavity, pump, filters, jsi)


def _cmd_jsi_sr(cfg, out_dir, fmt, threads):
    paths, _ = _run_jsi(cfg, out_dir, fmt, False)
    return paths


def _cmd_jsi_dr(cfg, out_dir, fmt, threads):
    paths, _ = _run_jsi(cfg, out_dir, fmt, True)
    return paths


def _cmd_marginal(cfg, out_dir, fmt, threads):
    paths, (_, _, _, jsi) = _run_jsi(cfg, out_dir, fmt, False)
    axis = cfg.get("marginal", "axis", "signal")
    marg = marginal_spectrum(jsi, axis)
    path = out_dir / f"marginal_{axis}.dat"
    write_columns(
        path,
        (marg.axis, marg.density),
        (f"omega_{axis}_rad_s", "density"),
        _metadata(cfg, {"quantity": f"marginal over the other axis, {axis} kept"}),
    )
    return paths + [path]


def _cmd_temporal(cfg, out_dir, fmt, threads):
    crystal = cfg.crystal()
    cavity = cfg.cavity(crystal)
    pump = cfg.pump()
    filters = cfg.filters()
    if filters is None:
        raise ConfigError("the temporal subcommand needs gaussian [filters]")
    omega_s0, omega_i0 = cfg.band_centers()
    sec = cfg.sections.get("temporal", {})
    per_width = sec.get("samples_per_mode_width", 8)
    minus_half = sec.get("minus_halfwidth_filter_fwhm", 3.0) * min(
        filters[0].fwhm, filters[1].fwhm
    )
    plus_half = sec.get("plus_halfwidth_sigma", 4.5) * pump.sigma
    prominence = sec.get("min_prominence", 1e-4)

    width = min(mode_width(cavity, omega_s0, "signal"), mode_width(cavity, omega_i0, "idler"))
    d_minus = width / per_width
    d_plus = width / max(per_width // 2, 2)
    n_minus = int(np.ceil(2 * minus_half / d_minus)) + 1
    n_plus = int(np.ceil(2 * plus_half / d_plus)) + 1
    center_plus = pump.omega_p0
    plus = np.linspace(center_plus - plus_half, center_plus + plus_half, n_plus)
    minus = np.linspace(
        (omega_s0 - omega_i0) - minus_half, (omega_s0 - omega_i0) + minus_half, n_minus
    )
    rot = jsa_singly_resonant_rotated(cavity, pump, filters, plus, minus)
    n0 = refractive_index(crystal, omega_s0, "ordinary")
    round_trip = 2 * (crystal.length_l * n0 + (cavity.length_L - crystal.length_l)) / c
    tgrid = joint_temporal_intensity(rot, round_trip_time=round_trip)
    marg = time_difference_marginal(tgrid)
    peaks = extract_peaks(marg.axis, marg.density, prominence)
    t_c = correlation_time(peaks)
    spacing = float(np.median(np.diff(peaks.positions))) if peaks.positions.size > 1 else 0.0

    marg_path = out_dir / "time_difference.dat"
    write_columns(
        marg_path,
        (marg.axis, marg.density),
        ("t_minus_s", "density"),
        _metadata(cfg, {"quantity": "emission time difference marginal"}),
    )
    peaks_path = out_dir / "peaks.dat"
    write_columns(
        peaks_path,
        (peaks.positions, peaks.heights),
        ("t_minus_s", "height"),
        _metadata(cfg),
    )
    summary_path = out_dir / "temporal_summary.kv"
    write_text(
        summary_path,
        (
            f"correlation_time_s = {t_c:.17g}\n"
            f"peak_spacing_s = {spacing:.17g}\n"
            f"round_trip_time_s = {round_trip:.17g}\n"
            f"peak_count = {peaks.positions.size}\n"
        ),
        _metadata(cfg),
    )
    return [marg_path, peaks_path, summary_path]


def _cmd_brightness_sweep(cfg, out_dir, fmt, threads):
    crystal = cfg.crystal()
    cavity = cfg.cavity(crystal)
    pump = cfg.pump()
    filters = cfg.filters()
    if filters is None:
        raise ConfigError("brightness sweeps need gaussian [filters]")
    sweep = cfg.require("sweep")
    kinds = sweep["kind"].split()
    factors = sweep.get("factors", "central_approx")
    paths = []
    for kind in kinds:
        if kind == "sigma_r2":
            table = brightness_vs_sigma_sweep(
                cavity, pump, filters, cfg.require("sweep", "sigma_list"),
                cfg.require("sweep", "r2_list"), factors, threads,
            )
        elif kind == "plateau_r2":
            r2_list = sweep.get("plateau_r2_list", sweep.get("r2_list"))
            if r2_list is None:
                raise ConfigError("[sweep] plateau_r2 needs plateau_r2_list or r2_list")
            table = plateau_brightness_vs_r2(cavity, pump, filters, r2_list, factors, threads)
        elif kind == "r1p":
            table = brightness_vs_r1p_sweep(
                cavity, pump, filters, cfg.require("sweep", "r1p_list"),
                cfg.require("sweep", "sigma_list"), factors, threads,
            )
        else:
            raise ConfigError(
                f"unknown sweep kind {kind!r}; expected sigma_r2, plateau_r2 or r1p"
            )
        path = out_dir / f"brightness_{kind}.tsv"
        write_text(path, table.to_text(), _metadata(cfg, {"sweep": kind}))
        paths.append(path)
    return paths


def _cmd_design(cfg, out_dir, fmt, threads):
    target = cfg.design_target()
    pin = cfg.get("design", "pin_cavity_length")
    result = design_source(target, pin_cavity_length=pin)
    check = spectral_check(target, result)
    report = report_design(target, result, check)
    report_path = out_dir / "design_report.txt"
    write_text(report_path, report, _metadata(cfg))
    kv_path = out_dir / "design.kv"
    write_text(
        kv_path,
        (
            f"lambda_idler_m = {result.lambda_idler:.17g}\n"
            f"cut_angle_rad = {result.cut_angle:.17g}\n"
            f"cavity_length_m = {result.cavity_length:.17g}\n"
            f"r2_magnitude = {result.r2_magnitude:.17g}\n"
            f"finesse = {result.finesse:.17g}\n"
            f"sigma_max_rad_s = {result.sigma_max:.17g}\n"
            f"check_marginal_fwhm_rad_s = {check[0]:.17g}\n"
            f"check_marginal_center_rad_s = {check[1]:.17g}\n"
        ),
        _metadata(cfg),
    )
    return [report_path, kv_path]


def _cmd_airy(cfg, out_dir, fmt, threads):
    crystal = cfg.crystal()
    cavity = cfg.cavity(crystal)
    grid = cfg.grid()
    omega_s0, omega_i0 = cfg.band_centers()
    paths = []
    modes = ["signal", "idler"]
    if cavity.mirror(1, "pump").magnitude * cavity.mirror(2, "pump").magnitude > 0:
        modes.append("pump")
    for mode in modes:
        axis = grid.omega_s_axis if mode == "signal" else grid.omega_i_axis
        if mode == "pump":
            axis = grid.omega_s_axis + omega_i0
        values = airy(axis, mode, cavity)
        meta = _metadata(cfg, {"mode": mode})
        center = omega_s0 if mode != "idler" else omega_i0
        if mode != "pump":
            meta["mode_width_rad_s"] = f"{mode_width(cavity, center, mode):.17g}"
            meta["free_spectral_range_rad_s"] = f"{free_spectral_range(cavity, center):.17g}"
        path = out_dir / f"airy_{mode}.dat"
        write_columns(path, (axis, values), ("omega_rad_s", "airy"), meta)
        paths.append(path)
    return paths


_HANDLERS = {
    "jsi-sr": _cmd_jsi_sr,
    "jsi-dr": _cmd_jsi_dr,
    "marginal": _cmd_marginal,
    "temporal": _cmd_temporal,
    "brightness-sweep": _cmd_brightness_sweep,
    "design": _cmd_design,
    "airy": _cmd_airy,
}


def _attribute_module(exc):
    """Name the physics module an error originated from, for the error line."""
    best = "cavityspdc"
    for frame in traceback.extract_tb(exc.__traceback__):
        name = Path(frame.filename).stem
        if name in (
            "dispersion", "cavity", "spectral", "doubly_resonant",
            "temporal", "brightness", "design", "config", "gridfile",
        ):
            best = name
    return best


def _write_manifest(out_dir, cfg, paths):
    manifest = out_dir / "manifest"
    digest = config_hash(cfg.normalized_text())
    lines = [f"# generator = cavityspdc {__version__}"]
    for path in paths:
        lines.append(f"{path.name}\t{digest}")
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="cavityspdc",
        description="Cavity-enhanced SPDC spectra, temporal correlations, brightness and design",
    )
    parser.add_argument("subcommand", choices=_SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--out", default=None, help="output directory (default from config)")
    parser.add_argument("--format", choices=("text", "binary"), default=None)
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("CAVITYSPDC_THREADS", "1")),
        help="worker threads for sweeps (default: CAVITYSPDC_THREADS or 1)",
    )
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, require=_REQUIRED_SECTIONS[args.subcommand])
        out_dir = Path(args.out or cfg.get("output", "directory", "out"))
        out_dir.mkdir(parents=True, exist_ok=True)
        fmt = args.format or cfg.get("output", "format", "binary")
        sys.stdout.write(f"# normalized configuration\n{cfg.normalized_text()}")
        paths = _HANDLERS[args.subcommand](cfg, out_dir, fmt, max(args.threads, 1))
        manifest = _write_manifest(out_dir, cfg, paths)
        for path in paths + [manifest]:
            sys.stdout.write(f"wrote {path}\n")
        return 0
    except CavitySpdcError as exc:
        sys.stderr.write(f"error: module={_attribute_module(exc)}: {exc}\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: module=cli: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
