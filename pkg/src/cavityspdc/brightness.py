"""Source brightness: pair-emission integral and the cavity parameter sweeps.

Brightness per pump pulse (up to an overall experimental constant b, set to
one here because every reported number is a normalized ratio):

    B = (U / sigma) integral integral
        [k'(omega_s) omega_s / n^2(omega_s)] [k'(omega_i) omega_i / n^2(omega_i)]
        S(omega_i, omega_s) d omega_s d omega_i.

The sweep drivers evaluate the integral on an adaptive stripe in rotated
coordinates (omega_plus bounded by the pump envelope, omega_minus by the
filters) so that narrow cavity modes stay resolved at any reflectivity
without gigantic rectangular grids.  The "equivalent source without a
cavity" reference sets every SPDC-mode reflectivity to zero with identical
pump and filters.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .cavity import airy, mode_width
from .doubly_resonant import DrPhaseContext, phase_balancing
from .dispersion import group_slowness, refractive_index
from .errors import UnderResolvedError
from .spectral import jsa_bare

__all__ = [
    "BrightnessResult",
    "SweepTable",
    "brightness",
    "brightness_from_cavity",
    "brightness_vs_sigma_sweep",
    "plateau_brightness_vs_r2",
    "brightness_vs_r1p_sweep",
]

_SQRT_2LN2 = np.sqrt(2 * np.log(2.0))


@dataclass(frozen=True)
class BrightnessResult:
    """Normalized brightness, its raw integral, and the unit convention used."""

    value: float
    raw_integral: float
    normalization_ref: str

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("brightness must be non-negative")


class SweepTable(NamedTuple):
    """Plain tabular sweep output: column names first, one tuple per row."""

    columns: tuple
    rows: list

    def to_text(self):
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
        return "\n".join(lines) + "\n"

    def column(self, name):
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows])


def _rate_factor(crystal, omega):
    """Brightness weight k'(omega) omega / n^2(omega) for an ordinary SPDC photon."""
    kp = group_slowness(crystal, omega, "ordinary")
    n = refractive_index(crystal, omega, "ordinary")
    return kp * omega / n**2


def brightness(jsi, pump, crystal, mode="central_approx", min_feature_width=None):
    """Brightness integral of a sampled joint spectral intensity grid.

    mode 'exact_factors' evaluates the k' omega / n^2 weights across the
    grid; 'central_approx' freezes them at the axis midpoints (the usual
    short-window approximation).  min_feature_width, when given, is the
    narrowest spectral feature (cavity mode width) the grid must resolve
    with at least 8 samples per axis.
    """
    values = jsi.values
    if np.iscomplexobj(values):
        raise ValueError("brightness expects a real joint spectral intensity")
    if np.any(values < 0):
        raise ValueError("joint spectral intensity must be non-negative")
    if min_feature_width is not None:
        worst = max(jsi.d_omega_s, jsi.d_omega_i)
        if min_feature_width < 8 * worst:
            raise UnderResolvedError(
                f"grid step {worst:.3e} rad/s gives {min_feature_width / worst:.1f} "
                f"samples across the narrowest feature {min_feature_width:.3e} rad/s (< 8)"
            )
    omega_s0 = float(jsi.omega_s_axis[jsi.omega_s_axis.size // 2])
    omega_i0 = float(jsi.omega_i_axis[jsi.omega_i_axis.size // 2])
    if mode == "central_approx":
        weight = _rate_factor(crystal, omega_s0) * _rate_factor(crystal, omega_i0)
        integrand = values * weight
    elif mode == "exact_factors":
        d_s = _rate_factor(crystal, jsi.omega_s_axis)
        d_i = _rate_factor(crystal, jsi.omega_i_axis)
        integrand = values * np.outer(d_i, d_s)
    else:
        raise ValueError(f"unknown factor mode {mode!r}")
    raw = float(np.trapezoid(np.trapezoid(integrand, jsi.omega_s_axis, axis=1), jsi.omega_i_axis))
    value = pump.energy_u / pump.sigma * raw
    return BrightnessResult(value, raw, "b = 1; absolute scale arbitrary")


def _stripe_axes(cavity, pump, filters, doubly_resonant):
    """Adaptive rotated-coordinate axes resolving pump, filters and cavity modes."""
    f_s, f_i = filters
    if f_s.shape == "none" or f_i.shape == "none":
        raise ValueError("sweep integration requires gaussian filters on both modes")
    center_plus = pump.omega_p0
    half_plus = 4.0 * pump.sigma

    # Finest structure along each rotated axis; a cavity mode of width dw
    # appears with width 2 dw along either rotated axis.
    scales_common = []
    for mode, center in (("signal", f_s.center), ("idler", f_i.center)):
        if cavity.mirror(2, mode).magnitude > 0:
            scales_common.append(2.0 * mode_width(cavity, center, mode))
    d_plus_scales = [pump.sigma / 2.0] + scales_common
    d_minus_scales = [min(f_s.fwhm, f_i.fwhm)] + scales_common
    if doubly_resonant:
        r_eff = cavity.mirror(1, "pump").magnitude * cavity.mirror(2, "pump").magnitude
        if r_eff > 0:
            d_plus_scales.append(mode_width(cavity, pump.omega_p0, "pump"))
    d_plus = min(scale / 8.0 for scale in d_plus_scales)
    d_minus = min(scale / 8.0 for scale in d_minus_scales)

    n_plus = max(int(np.ceil(2 * half_plus / d_plus)) + 1, 33)
    plus = np.linspace(center_plus - half_plus, center_plus + half_plus, n_plus)

    s_lo, s_hi = f_s.center - 3.3 * f_s.fwhm, f_s.center + 3.3 * f_s.fwhm
    i_lo, i_hi = f_i.center - 3.3 * f_i.fwhm, f_i.center + 3.3 * f_i.fwhm
    lo_m, hi_m = s_lo - i_hi, s_hi - i_lo
    n_minus = max(int(np.ceil((hi_m - lo_m) / d_minus)) + 1, 33)
    minus = np.linspace(lo_m, hi_m, n_minus)
    return plus, minus


def _stripe_integral(cavity, pump, filters, doubly_resonant, factor_mode, threads=1):
    """Integral of D_s D_i S over the plane, evaluated on the rotated stripe."""
    plus, minus = _stripe_axes(cavity, pump, filters, doubly_resonant)
    crystal = cavity.crystal
    if factor_mode == "central_approx":
        d_s0 = _rate_factor(crystal, filters[0].center)
        d_i0 = _rate_factor(crystal, filters[1].center)

    def column_integrals(chunk):
        """Inner trapezoid over omega_minus for one chunk of omega_plus values."""
        pp = plus[chunk][None, :]
        mm = minus[:, None]
        omega_s = (pp + mm) / 2.0
        omega_i = (pp - mm) / 2.0
        s = np.abs(jsa_bare(pump, crystal, filters, omega_s, omega_i)) ** 2
        s = s * airy(omega_s, "signal", cavity) * airy(omega_i, "idler", cavity)
        if doubly_resonant:
            ctx = DrPhaseContext.from_cavity(cavity, omega_s, omega_i)
            s = s * airy(plus[chunk], "pump", cavity)[None, :]
            s = s * phase_balancing(ctx, cavity.mirror(2, "pump").magnitude)
        if factor_mode == "central_approx":
            s = s * (d_s0 * d_i0)
        elif factor_mode == "exact_factors":
            s = s * _rate_factor(crystal, omega_s) * _rate_factor(crystal, omega_i)
        else:
            raise ValueError(f"unknown factor mode {factor_mode!r}")
        return np.trapezoid(s, minus, axis=0)

    chunks = [
        slice(k, min(k + 64, plus.size)) for k in range(0, plus.size, 64)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(column_integrals, chunks))
    else:
        parts = [column_integrals(chunk) for chunk in chunks]
    g = np.concatenate(parts)
    # Jacobian of (omega_s, omega_i) -> (omega_plus, omega_minus) is 1/2.
    return 0.5 * float(np.trapezoid(g, plus))


def brightness_from_cavity(
    cavity, pump, filters, doubly_resonant=False, factor_mode="central_approx", threads=1
):
    """Brightness of a cavity source via the adaptive stripe integral."""
    raw = _stripe_integral(cavity, pump, filters, doubly_resonant, factor_mode, threads)
    value = pump.energy_u / pump.sigma * raw
    return BrightnessResult(value, raw, "b = 1; absolute scale arbitrary")


def _no_cavity(cavity):
    out = cavity
    for mode in ("signal", "idler"):
        out = out.with_mirror(2, mode, magnitude=0.0)
        out = out.with_mirror(1, mode, magnitude=0.0)
    for nu in (1, 2):
        out = out.with_mirror(nu, "pump", magnitude=0.0)
    return out


def brightness_vs_sigma_sweep(
    cavity, pump, filters, sigma_list, r2_list, factor_mode="central_approx", threads=1
):
    """Brightness vs pump bandwidth for a ladder of mirror-2 reflectivities.

    Rows are (sigma, r2, B_norm); unity corresponds to the equivalent source
    without a cavity evaluated at the smallest requested sigma.
    """
    sigma_ref = min(sigma_list)
    reference = brightness_from_cavity(
        _no_cavity(cavity), replace(pump, sigma=sigma_ref), filters, False, factor_mode, threads
    ).value
    rows = []
    for r2 in r2_list:
        cav = cavity.with_mirror(2, "signal", magnitude=r2).with_mirror(2, "idler", magnitude=r2)
        if r2 == 0.0:
            cav = _no_cavity(cavity)
        for sigma in sigma_list:
            b = brightness_from_cavity(
                cav, replace(pump, sigma=sigma), filters, False, factor_mode, threads
            ).value
            rows.append((float(sigma), float(r2), b / reference))
    return SweepTable(("sigma_rad_s", "r2", "B_norm"), rows)


def plateau_brightness_vs_r2(
    cavity, pump, filters, r2_list, factor_mode="central_approx", threads=1
):
    """Plateau (small-sigma) brightness vs mirror-2 reflectivity.

    For each r2 the pump bandwidth is set to the plateau condition
    sigma = delta_omega(r2) / sqrt(2 ln 2); the result is normalized to the
    equivalent source without a cavity at the same sigma.
    """
    rows = []
    for r2 in r2_list:
        cav = cavity.with_mirror(2, "signal", magnitude=r2).with_mirror(2, "idler", magnitude=r2)
        if r2 > 0:
            sigma = mode_width(cav, filters[0].center, "signal") / _SQRT_2LN2
        else:
            sigma = pump.sigma
        swept_pump = replace(pump, sigma=sigma)
        reference = brightness_from_cavity(
            _no_cavity(cavity), swept_pump, filters, False, factor_mode, threads
        ).value
        if r2 == 0.0:
            rows.append((float(r2), float(sigma), 1.0))
            continue
        b = brightness_from_cavity(cav, swept_pump, filters, False, factor_mode, threads).value
        rows.append((float(r2), float(sigma), b / reference))
    return SweepTable(("r2", "sigma_rad_s", "B_norm"), rows)


def brightness_vs_r1p_sweep(
    cavity, pump, filters, r1p_list, sigma_list, factor_mode="central_approx", threads=1
):
    """Doubly-resonant brightness vs pump reflectivity of mirror 1.

    Requires |r_2p| = 1 (pump enters and exits through mirror 1).  Rows are
    (sigma, r1p, B_norm) normalized per sigma to the r1p = 0 value; at
    r1p = 1 no pump enters the cavity and the brightness is exactly zero.
    """
    if cavity.mirror(2, "pump").magnitude != 1.0:
        raise ValueError("the r1p sweep assumes a perfect pump reflectivity on mirror 2")
    rows = []
    for sigma in sigma_list:
        swept_pump = replace(pump, sigma=sigma)
        reference = brightness_from_cavity(
            cavity.with_mirror(1, "pump", magnitude=0.0), swept_pump, filters, True,
            factor_mode, threads,
        ).value
        for r1p in r1p_list:
            if r1p == 1.0:
                rows.append((float(sigma), 1.0, 0.0))
                continue
            cav = cavity.with_mirror(1, "pump", magnitude=r1p)
            b = brightness_from_cavity(cav, swept_pump, filters, True, factor_mode, threads).value
            rows.append((float(sigma), float(r1p), b / reference))
    return SweepTable(("sigma_rad_s", "r1p", "B_norm"), rows)
