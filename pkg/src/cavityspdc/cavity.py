"""Per-mode cavity quantities: phases, Airy weights, finesse, mode geometry.

The cavity holds a crystal of length l inside mirrors separated by L >= l.
Mirror 1 faces the pump input, mirror 2 the output.  For each mode
mu in {signal, idler, pump} and mirror nu in {1, 2} a complex amplitude
reflectivity r = |r| exp(i delta) is stored; transmissivities follow the
lossless relation |t|^2 = 1 - |r|^2.

Round-trip phase factor for the SPDC modes:

    Delta_mu(omega) = 2 theta_mu(omega) + delta_1mu + delta_2mu - Gamma_mu

with theta_mu = omega (L - l)/c + l n_mu(omega) omega / c the single-pass
phase.  Gamma_mu is the free-space phase rate accumulated outside the cavity
per round trip; its literal frozen-slowness form 2 k'(omega_0) L omega
cancels the round-trip phase slope near the band center and with it the
whole resonance comb, so the default convention sets Gamma to zero (a pure
relabeling of the mirror phase origin).  The frozen convention remains
available through CavitySpec.gamma_convention for algebraic studies.

The pump mode uses Delta_p(omega) = 2 theta_p + delta_1p + delta_2p with no
Gamma term.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import c
from .dispersion import group_slowness, polarization_for_mode, refractive_index
from .errors import (
    DivergenceError,
    InfiniteWidthError,
    PhaseRelaxationWarning,
    UnsupportedConfigurationError,
)

__all__ = [
    "MODES",
    "MirrorSpec",
    "CavitySpec",
    "singly_resonant_cavity",
    "single_pass_phase",
    "extra_cavity_phase",
    "round_trip_phase_mismatch",
    "coefficient_of_finesse",
    "airy",
    "mode_width",
    "free_spectral_range",
    "solve_resonance_phases",
]

MODES = ("signal", "idler", "pump")
_TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class MirrorSpec:
    """Amplitude reflectivity |r| exp(i delta) of one mirror for one mode."""

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError(f"reflectivity magnitude must lie in [0, 1], got {self.magnitude}")

    @property
    def transmissivity(self):
        """Lossless |t| = sqrt(1 - |r|^2)."""
        return float(np.sqrt(1.0 - self.magnitude**2))

    @property
    def amplitude(self):
        """Complex amplitude reflectivity."""
        return self.magnitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class CavitySpec:
    """Cavity geometry plus the full (mirror, mode) reflectivity table.

    mirrors maps (nu, mode) with nu in {1, 2} and mode in MODES to a
    MirrorSpec.  Missing entries default to a perfectly transmissive mirror.
    band_centers supplies the per-mode expansion frequency omega_0 required
    by the frozen Gamma convention.
    """

    length_L: float
    crystal: object
    mirrors: dict = field(default_factory=dict)
    gamma_convention: str = "zero"
    band_centers: dict | None = None

    def __post_init__(self):
        if self.length_L < self.crystal.length_l:
            raise ValueError(
                f"cavity length {self.length_L} shorter than crystal length "
                f"{self.crystal.length_l}"
            )
        if self.gamma_convention not in ("zero", "frozen"):
            raise ValueError(f"unknown gamma convention {self.gamma_convention!r}")
        for key in self.mirrors:
            nu, mode = key
            if nu not in (1, 2) or mode not in MODES:
                raise ValueError(f"bad mirror key {key!r}")

    def mirror(self, nu, mode):
        return self.mirrors.get((nu, mode), MirrorSpec(0.0))

    def with_mirror(self, nu, mode, magnitude=None, phase=None):
        """Copy of the spec with one mirror entry replaced."""
        old = self.mirror(nu, mode)
        new = MirrorSpec(
            old.magnitude if magnitude is None else magnitude,
            old.phase if phase is None else phase,
        )
        mirrors = dict(self.mirrors)
        mirrors[(nu, mode)] = new
        return replace(self, mirrors=mirrors)


def singly_resonant_cavity(length_L, crystal, r2_signal, r2_idler=None, **kwargs):
    """Singly-resonant preset: mirror 1 perfect for SPDC, both mirrors open for the pump."""
    if r2_idler is None:
        r2_idler = r2_signal
    mirrors = {
        (1, "signal"): MirrorSpec(1.0),
        (1, "idler"): MirrorSpec(1.0),
        (2, "signal"): MirrorSpec(r2_signal),
        (2, "idler"): MirrorSpec(r2_idler),
        (1, "pump"): MirrorSpec(0.0),
        (2, "pump"): MirrorSpec(0.0),
    }
    return CavitySpec(length_L, crystal, mirrors, **kwargs)


def single_pass_phase(cavity, omega, mode):
    """Phase theta_mu = omega (L - l)/c + l n_mu(omega) omega / c for one cavity pass."""
    crystal = cavity.crystal
    n = refractive_index(crystal, omega, polarization_for_mode(mode))
    omega = np.asarray(omega, dtype=float)
    theta = omega * (cavity.length_L - crystal.length_l) / c + crystal.length_l * n * omega / c
    return theta if theta.ndim else float(theta)


def extra_cavity_phase(cavity, omega, mode):
    """Extra-cavity phase-rate coefficient 2 k'(omega) L, seconds.

    Only defined for L = l; the free-space segment of a longer cavity has no
    counterpart in the underlying round-trip bookkeeping.
    """
    if cavity.length_L != cavity.crystal.length_l:
        raise UnsupportedConfigurationError(
            "extra-cavity phase coefficient is only defined for L = l "
            f"(L={cavity.length_L}, l={cavity.crystal.length_l})"
        )
    kp = group_slowness(cavity.crystal, omega, polarization_for_mode(mode))
    return 2.0 * kp * cavity.length_L


def _gamma_phase(cavity, omega, mode):
    """Gamma_mu as a phase (radians) under the cavity's convention."""
    if cavity.gamma_convention == "zero" or mode == "pump":
        return np.zeros_like(np.asarray(omega, dtype=float)) if np.ndim(omega) else 0.0
    centers = cavity.band_centers or {}
    if mode not in centers:
        raise UnsupportedConfigurationError(
            f"frozen gamma convention requires a band center for mode {mode!r}"
        )
    omega0 = centers[mode]
    kp0 = group_slowness(cavity.crystal, omega0, polarization_for_mode(mode))
    l = cavity.crystal.length_l
    rate = 2.0 * (kp0 * l + (cavity.length_L - l) / c)
    omega = np.asarray(omega, dtype=float)
    gamma = rate * omega
    return gamma if gamma.ndim else float(gamma)


def round_trip_phase_mismatch(cavity, omega, mode):
    """Phase factor Delta_mu(omega); resonances sit at even multiples of pi.

    Signal/idler: 2 theta + delta_1 + delta_2 - Gamma.  Pump: 2 theta_p +
    delta_1p + delta_2p.  Returned unfolded (no 2 pi reduction).
    """
    theta = single_pass_phase(cavity, omega, mode)
    d1 = cavity.mirror(1, mode).phase
    d2 = cavity.mirror(2, mode).phase
    delta = 2.0 * theta + d1 + d2
    if mode != "pump":
        delta = delta - _gamma_phase(cavity, omega, mode)
    return delta


def coefficient_of_finesse(r_eff):
    """Coefficient of finesse F = 4 r / (1 - r)^2 for effective reflectivity r.

    r_eff is |r_2| for the SPDC modes (mirror 1 perfect) and |r_1p r_2p| for
    the pump.
    """
    if not 0.0 <= r_eff < 1.0:
        if r_eff == 1.0:
            raise DivergenceError("coefficient of finesse diverges at unit reflectivity")
        raise ValueError(f"effective reflectivity must lie in [0, 1), got {r_eff}")
    return 4.0 * r_eff / (1.0 - r_eff) ** 2


def _airy_pump(cavity, omega):
    r1 = cavity.mirror(1, "pump")
    r2 = cavity.mirror(2, "pump")
    r_eff = r1.magnitude * r2.magnitude
    if r_eff >= 1.0:
        raise DivergenceError("pump Airy function diverges at |r_1p r_2p| = 1")
    fin = coefficient_of_finesse(r_eff)
    prefactor = r1.transmissivity**2 / (1.0 - r_eff) ** 2
    delta = round_trip_phase_mismatch(cavity, omega, "pump")
    return prefactor / (1.0 + fin * np.sin(delta / 2.0) ** 2)


def airy(omega, mode, cavity):
    """Airy weight A_mu(omega) selecting the cavity-resonant frequencies.

    SPDC modes: |t_2|^2/(1-|r_2|)^2 / (1 + F sin^2(Delta/2)).  The pump
    variant uses |t_1p|^2/(1-|r_1p r_2p|)^2 and the pump phase factor.
    """
    if mode == "pump":
        return _airy_pump(cavity, omega)
    m2 = cavity.mirror(2, mode)
    if m2.magnitude >= 1.0:
        raise DivergenceError(f"Airy function diverges at |r_2{mode[0]}| = 1")
    fin = coefficient_of_finesse(m2.magnitude)
    prefactor = m2.transmissivity**2 / (1.0 - m2.magnitude) ** 2
    delta = round_trip_phase_mismatch(cavity, omega, mode)
    return prefactor / (1.0 + fin * np.sin(delta / 2.0) ** 2)


def _optical_length(cavity, omega0, mode):
    n0 = refractive_index(cavity.crystal, omega0, polarization_for_mode(mode))
    l = cavity.crystal.length_l
    return l * n0 + (cavity.length_L - l)


def mode_width(cavity, omega0, mode):
    """FWHM of one cavity resonance: delta_omega = 2c/(l n + (L - l)) F^(-1/2)."""
    if mode == "pump":
        r_eff = cavity.mirror(1, "pump").magnitude * cavity.mirror(2, "pump").magnitude
    else:
        r_eff = cavity.mirror(2, mode).magnitude
    fin = coefficient_of_finesse(r_eff)
    if fin == 0.0:
        raise InfiniteWidthError("mode width is unbounded for zero coefficient of finesse")
    return 2.0 * c / _optical_length(cavity, omega0, mode) / np.sqrt(fin)


def free_spectral_range(cavity, omega0, mode="signal"):
    """Resonance spacing Delta_omega = pi c / (l n(omega0) + (L - l))."""
    return np.pi * c / _optical_length(cavity, omega0, mode)


def _smallest_nonnegative(phase, period=_TWO_PI):
    out = phase % period
    # Guard against the float wrap 2*pi -> 0 expectation at exact multiples.
    if abs(out - period) < 1e-12:
        out = 0.0
    return out


def solve_resonance_phases(cavity, omega_s0, omega_i0, omega_p0=None, adjustable=None):
    """Mirror phases putting the cavity on resonance at the band centers.

    Always enforces Delta_s(omega_s0) = 0 and Delta_i(omega_i0) = 0 (mod
    2 pi).  When omega_p0 is given, additionally enforces the doubly-resonant
    conditions Delta_p(omega_p0) = 0 (mod 2 pi) and the pass-to-pass balance
    theta_s + theta_i + theta_p + delta_1s + delta_1i + delta_2p = 0 (mod
    2 pi), the even-multiple branch that maximizes the phase-balancing
    factor.  Solved phases are the smallest non-negative values.

    adjustable optionally restricts which (mirror, mode) phases may change;
    a condition whose designated phase is locked is relaxed with a
    PhaseRelaxationWarning naming it.
    """
    if adjustable is None:
        adjustable = {(nu, mode) for nu in (1, 2) for mode in MODES}
    else:
        adjustable = set(adjustable)

    def solve_condition(cav, name, target_key, residual_fn):
        if target_key not in adjustable:
            warnings.warn(
                f"resonance condition {name} relaxed: phase of mirror "
                f"{target_key[0]} for mode {target_key[1]!r} is not adjustable",
                PhaseRelaxationWarning,
                stacklevel=3,
            )
            return cav
        nu, mode = target_key
        current = cav.mirror(nu, mode).phase
        residual = residual_fn(cav)
        needed = _smallest_nonnegative(current - residual)
        return cav.with_mirror(nu, mode, phase=needed)

    out = cavity
    # Pass-to-pass balance first: it fixes delta_2p, which Delta_p then absorbs.
    if omega_p0 is not None:
        theta_sum = (
            single_pass_phase(out, omega_s0, "signal")
            + single_pass_phase(out, omega_i0, "idler")
            + single_pass_phase(out, omega_p0, "pump")
        )

        def balance_residual(cav):
            return (
                theta_sum
                + cav.mirror(1, "signal").phase
                + cav.mirror(1, "idler").phase
                + cav.mirror(2, "pump").phase
            )

        out = solve_condition(out, "pair-phase balance", (2, "pump"), balance_residual)
        out = solve_condition(
            out,
            "pump resonance",
            (1, "pump"),
            lambda cav: round_trip_phase_mismatch(cav, omega_p0, "pump"),
        )
    out = solve_condition(
        out,
        "signal resonance",
        (2, "signal"),
        lambda cav: round_trip_phase_mismatch(cav, omega_s0, "signal"),
    )
    out = solve_condition(
        out,
        "idler resonance",
        (2, "idler"),
        lambda cav: round_trip_phase_mismatch(cav, omega_i0, "idler"),
    )
    return out
