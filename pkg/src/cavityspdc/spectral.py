"""Bare and singly-resonant joint spectral quantities on 2-D frequency grids.

The bare joint spectral amplitude is

    f(omega_i, omega_s) = alpha(omega_s + omega_i) phi(omega_i, omega_s)
                          F_s(omega_s) F_i(omega_i)

with a Gaussian pump envelope alpha, the crystal phasematching amplitude
phi = sinc(dk l / 2) exp(i dk l / 2) and optional Gaussian intensity filters
F.  The cavity multiplies each photon by the geometric-sum amplitude A_mu;
in the many-pass limit the joint spectral intensity factorizes into
S_SR = A_s(omega_s) A_i(omega_i) |f|^2 with A the Airy weights.

Grid convention: SpectralGrid.values[i, j] belongs to
(omega_i_axis[i], omega_s_axis[j]).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cavity import _gamma_phase, airy, mode_width, round_trip_phase_mismatch
from .constants import c
from .dispersion import wavevector
from .errors import DivergenceError, UnderResolutionWarning

__all__ = [
    "PumpSpec",
    "FilterSpec",
    "SpectralGrid",
    "Marginal",
    "fwhm_to_sigma",
    "wavelength_fwhm_to_angular",
    "pump_envelope",
    "phasematching",
    "jsa_bare",
    "sr_amplitude_factor_finite",
    "sr_amplitude_factor",
    "jsa_singly_resonant",
    "jsi_singly_resonant",
    "marginal_spectrum",
    "default_grid",
]

_LN2 = np.log(2.0)


def wavelength_fwhm_to_angular(lambda0, fwhm_lambda):
    """Convert a wavelength FWHM at center lambda0 to an angular-frequency FWHM."""
    return 2 * np.pi * c * fwhm_lambda / lambda0**2


def fwhm_to_sigma(fwhm_omega):
    """Gaussian amplitude width sigma from the intensity FWHM of exp[-2 x^2/sigma^2]."""
    return fwhm_omega / np.sqrt(2 * _LN2)


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian pump: center omega_p0 (rad/s), amplitude width sigma (rad/s), energy U (J)."""

    omega_p0: float
    sigma: float
    energy_u: float = 1.0

    def __post_init__(self):
        if not self.omega_p0 > 0:
            raise ValueError("pump center frequency must be positive")
        if not self.sigma > 0:
            raise ValueError("pump bandwidth sigma must be positive")

    @classmethod
    def from_wavelength(cls, lambda0, fwhm_lambda, energy_u=1.0):
        """Pump from center wavelength and intensity-FWHM in wavelength units."""
        omega0 = 2 * np.pi * c / lambda0
        sigma = fwhm_to_sigma(wavelength_fwhm_to_angular(lambda0, fwhm_lambda))
        return cls(omega0, sigma, energy_u)


@dataclass(frozen=True)
class FilterSpec:
    """Spectral filter; fwhm is the intensity FWHM of |F|^2."""

    center: float = 0.0
    fwhm: float = 0.0
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape not in ("gaussian", "none"):
            raise ValueError(f"unknown filter shape {self.shape!r}")
        if self.shape == "gaussian" and not self.fwhm > 0:
            raise ValueError("gaussian filter requires fwhm > 0")

    @classmethod
    def none(cls):
        return cls(shape="none")

    def amplitude(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.shape == "none":
            return np.ones_like(omega)
        return np.exp(-2 * _LN2 * (omega - self.center) ** 2 / self.fwhm**2)


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Rectangular (omega_s, omega_i) sample lattice with values[i, s]."""

    omega_s_axis: np.ndarray
    omega_i_axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        for name in ("omega_s_axis", "omega_i_axis"):
            axis = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, axis)
            check_uniform_axis(axis, name)
        values = np.asarray(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != (self.omega_i_axis.size, self.omega_s_axis.size):
            raise ValueError(
                f"values shape {values.shape} does not match axes "
                f"({self.omega_i_axis.size}, {self.omega_s_axis.size})"
            )

    @property
    def d_omega_s(self):
        return float(self.omega_s_axis[1] - self.omega_s_axis[0])

    @property
    def d_omega_i(self):
        return float(self.omega_i_axis[1] - self.omega_i_axis[0])

    def meshgrid(self):
        """(omega_s, omega_i) matrices aligned with values."""
        return np.meshgrid(self.omega_s_axis, self.omega_i_axis)

    def total_power(self):
        """Trapezoidal integral of |values|^2 over both axes."""
        mag2 = np.abs(self.values) ** 2
        return float(np.trapezoid(np.trapezoid(mag2, self.omega_s_axis, axis=1), self.omega_i_axis))


def check_uniform_axis(axis, name):
    """Validate a strictly increasing, uniform 1-D axis; returns it as float array.

    The uniformity tolerance allows the spacing jitter inherent to float64
    axes whose span is many orders of magnitude below their values.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise ValueError(f"{name} must be a 1-D axis with at least 2 samples")
    d = np.diff(axis)
    if np.any(d <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    step = d.mean()
    allowed = 8 * np.finfo(float).eps * np.abs(axis).max() + 1e-9 * abs(step)
    if np.abs(d - step).max() > allowed:
        raise ValueError(f"{name} must be uniformly spaced")
    return axis


class Marginal(NamedTuple):
    """One-dimensional sampled density over an angular-frequency or time axis."""

    axis: np.ndarray
    density: np.ndarray


def pump_envelope(pump, omega):
    """Gaussian pump amplitude exp[-(omega - omega_p0)^2 / sigma^2]."""
    omega = np.asarray(omega, dtype=float)
    out = np.exp(-((omega - pump.omega_p0) ** 2) / pump.sigma**2)
    return out if out.ndim else float(out)


def phasematching(crystal, omega_s, omega_i):
    """Phasematching amplitude sinc(dk l / 2) exp(i dk l / 2).

    dk = k_p(omega_s + omega_i) - k_s(omega_s) - k_i(omega_i) with the pump
    extraordinary at the cut angle and signal/idler ordinary.
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    dk = (
        wavevector(crystal, omega_s + omega_i, "extraordinary")
        - wavevector(crystal, omega_s, "ordinary")
        - wavevector(crystal, omega_i, "ordinary")
    )
    x = dk * crystal.length_l / 2.0
    out = np.sinc(x / np.pi) * np.exp(1j * x)
    return out if np.ndim(out) else complex(out)


def jsa_bare(pump, crystal, filters, omega_s, omega_i):
    """Bare joint spectral amplitude alpha * phi * F_s * F_i.

    filters is a (signal, idler) pair of FilterSpec or None for no filtering.
    """
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    f = pump_envelope(pump, omega_s + omega_i) * phasematching(crystal, omega_s, omega_i)
    if filters is not None:
        f_s, f_i = filters
        f = f * f_s.amplitude(omega_s) * f_i.amplitude(omega_i)
    return f


def _sr_ratio(cavity, omega, mode):
    """Common geometric ratio |r_2| e^{i Delta_mu(omega)} and the mirror pair."""
    m2 = cavity.mirror(2, mode)
    if m2.magnitude >= 1.0:
        raise DivergenceError(f"geometric sum diverges at |r_2{mode[0]}| = 1")
    delta = round_trip_phase_mismatch(cavity, omega, mode)
    return m2, m2.magnitude * np.exp(1j * np.asarray(delta))


def _gamma_free_space(cavity, omega):
    """Propagation phase gamma = omega (L - l)/(2 c) from crystal face to mirror 2."""
    return np.asarray(omega, dtype=float) * (cavity.length_L - cavity.crystal.length_l) / (2 * c)


def sr_amplitude_factor_finite(cavity, omega, mode, n_passes):
    """Per-photon amplitude A_mu^(n) after n passes of the unfolded cavity.

    Closed form of the geometric sum over exit paths:

        A = t_2 e^{i [gamma + (n-1) Gamma]} (1 - rho^n) / (1 - rho),
        rho = |r_2| e^{i Delta_mu(omega)}.
    """
    if n_passes < 1:
        raise ValueError("n_passes must be >= 1")
    m2, rho = _sr_ratio(cavity, omega, mode)
    phase = _gamma_free_space(cavity, omega) + (n_passes - 1) * np.asarray(
        _gamma_phase(cavity, omega, mode)
    )
    out = m2.transmissivity * np.exp(1j * phase) * (1.0 - rho**n_passes) / (1.0 - rho)
    return out if np.ndim(out) else complex(out)


def sr_amplitude_factor(cavity, omega, mode):
    """Many-pass limit of A_mu^(n): t_2 e^{i gamma} / (1 - rho).

    Drops the pass-counting extra-cavity phase e^{i (n-1) Gamma}, which has
    no n -> infinity limit when Gamma is nonzero; it cancels in every
    intensity and amounts to a shift of the arrival-time origin.
    """
    m2, rho = _sr_ratio(cavity, omega, mode)
    out = m2.transmissivity * np.exp(1j * _gamma_free_space(cavity, omega)) / (1.0 - rho)
    return out if np.ndim(out) else complex(out)


def _warn_if_under_resolved(cavity, grid, where):
    for mode, axis_step, center in (
        ("signal", grid.d_omega_s, float(np.median(grid.omega_s_axis))),
        ("idler", grid.d_omega_i, float(np.median(grid.omega_i_axis))),
    ):
        if cavity.mirror(2, mode).magnitude <= 0:
            continue
        width = mode_width(cavity, center, mode)
        if width < 8 * axis_step:
            warnings.warn(
                f"{where}: {mode} axis resolves the cavity mode width "
                f"{width:.3e} rad/s with only {width / axis_step:.1f} samples (< 8)",
                UnderResolutionWarning,
                stacklevel=3,
            )


def jsa_singly_resonant(cavity, pump, filters, grid):
    """Many-pass joint spectral amplitude f_SR = A_s A_i f on the given grid axes."""
    _warn_if_under_resolved(cavity, grid, "jsa_singly_resonant")
    a_s = sr_amplitude_factor(cavity, grid.omega_s_axis, "signal")
    a_i = sr_amplitude_factor(cavity, grid.omega_i_axis, "idler")
    omega_s, omega_i = grid.meshgrid()
    values = jsa_bare(pump, cavity.crystal, filters, omega_s, omega_i)
    values = values * np.outer(a_i, a_s)
    return SpectralGrid(grid.omega_s_axis, grid.omega_i_axis, values)


def jsi_singly_resonant(cavity, pump, filters, grid):
    """Singly-resonant joint spectral intensity S_SR = A_s A_i |f|^2 (real grid)."""
    _warn_if_under_resolved(cavity, grid, "jsi_singly_resonant")
    a_s = airy(grid.omega_s_axis, "signal", cavity)
    a_i = airy(grid.omega_i_axis, "idler", cavity)
    omega_s, omega_i = grid.meshgrid()
    f = jsa_bare(pump, cavity.crystal, filters, omega_s, omega_i)
    values = np.outer(a_i, a_s) * np.abs(f) ** 2
    return SpectralGrid(grid.omega_s_axis, grid.omega_i_axis, values)


def marginal_spectrum(grid, axis):
    """Marginal density over one frequency axis of a real-valued grid.

    axis names the kept axis: 'signal' integrates over omega_i and returns a
    density on the signal axis, 'idler' the converse.
    """
    values = grid.values
    if np.iscomplexobj(values):
        raise ValueError("marginal_spectrum expects a real-valued grid")
    if axis == "signal":
        density = np.trapezoid(values, grid.omega_i_axis, axis=0)
        return Marginal(grid.omega_s_axis, density)
    if axis == "idler":
        density = np.trapezoid(values, grid.omega_s_axis, axis=1)
        return Marginal(grid.omega_i_axis, density)
    raise ValueError(f"axis must be 'signal' or 'idler', got {axis!r}")


def default_grid(center_s, center_i, halfwidth, samples=1024):
    """Empty square grid spanning center +- halfwidth on both axes."""
    s_axis = np.linspace(center_s - halfwidth, center_s + halfwidth, samples)
    i_axis = np.linspace(center_i - halfwidth, center_i + halfwidth, samples)
    return SpectralGrid(s_axis, i_axis, np.zeros((samples, samples)))
