"""Crystal dispersion: refractive index, wavevector, group slowness, phasematching.

Sellmeier formulas take the wavelength in micrometers; every API boundary
uses angular frequency in rad/s.  Uniaxial crystals only: the extraordinary
index at the cut angle follows the index ellipse

    1/n^2(theta) = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.

Type-I geometry is fixed as e -> o + o: the pump propagates as extraordinary
at the cut angle, signal and idler as ordinary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import c
from .errors import DispersionWindowError, NotPhasematchableError

__all__ = [
    "BBO_ORDINARY",
    "BBO_EXTRAORDINARY",
    "CrystalSpec",
    "bbo",
    "refractive_index",
    "wavevector",
    "group_slowness",
    "phasematching_angle",
    "polarization_for_mode",
]

# Sellmeier coefficient sets (a, b, c, d):  n^2 = a + b / (lam^2 + c) + d * lam^2
# with lam in micrometers.  Values below are the widely used set for beta-BBO.
BBO_ORDINARY = (2.7405, 0.0184, -0.0179, -0.0155)
BBO_EXTRAORDINARY = (2.3730, 0.0128, -0.0156, -0.0044)

# Relative step for the central-difference group-slowness stencil.
_FD_STEP = 1e-6


def _sellmeier_n2(coefficients, lam_um):
    a, b, cc, d = coefficients
    return a + b / (lam_um**2 + cc) + d * lam_um**2


@dataclass(frozen=True)
class CrystalSpec:
    """Uniaxial nonlinear crystal: dispersion model, cut angle and length.

    Attributes
    ----------
    sellmeier_ordinary, sellmeier_extraordinary:
        Four-coefficient sets (a, b, c, d) for n^2 = a + b/(lam^2+c) + d lam^2,
        lam in micrometers.
    cut_angle:
        Angle between the optic axis and the propagation direction, radians.
    length_l:
        Crystal length in meters.
    window_um:
        Validity window of the Sellmeier model, micrometers (lo, hi).
    """

    sellmeier_ordinary: tuple
    sellmeier_extraordinary: tuple
    cut_angle: float
    length_l: float
    window_um: tuple = (0.2, 1.1)

    def __post_init__(self):
        if not self.length_l > 0:
            raise ValueError(f"crystal length must be positive, got {self.length_l}")
        if not 0.0 <= self.cut_angle <= np.pi / 2:
            raise ValueError(f"cut angle must lie in [0, pi/2], got {self.cut_angle}")
        lo, hi = self.window_um
        if not 0 < lo < hi:
            raise ValueError(f"invalid validity window {self.window_um}")
        # The model must stay real and physical across its declared window.
        lam = np.linspace(lo, hi, 64)
        for coeffs in (self.sellmeier_ordinary, self.sellmeier_extraordinary):
            n2 = _sellmeier_n2(coeffs, lam)
            if not np.all(n2 > 1.0):
                raise ValueError("Sellmeier model gives n^2 <= 1 inside the validity window")

    @property
    def omega_window(self):
        """Validity window translated to angular frequency (rad/s), (lo, hi)."""
        lo_um, hi_um = self.window_um
        return (2 * np.pi * c / (hi_um * 1e-6), 2 * np.pi * c / (lo_um * 1e-6))


def bbo(cut_angle, length_l):
    """BBO crystal with the built-in Sellmeier sets."""
    return CrystalSpec(BBO_ORDINARY, BBO_EXTRAORDINARY, cut_angle, length_l)


def polarization_for_mode(mode):
    """Polarization of a cavity mode under the type-I e -> o + o convention."""
    if mode in ("signal", "idler"):
        return "ordinary"
    if mode == "pump":
        return "extraordinary"
    raise ValueError(f"unknown mode {mode!r}")


def _check_window(crystal, omega, margin=0.0):
    lo, hi = crystal.omega_window
    lo, hi = lo * (1 + margin), hi * (1 - margin)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < lo) or np.any(omega > hi):
        lo_um, hi_um = crystal.window_um
        raise DispersionWindowError(
            f"angular frequency outside the Sellmeier validity window "
            f"{lo_um}-{hi_um} um ({lo:.4e}-{hi:.4e} rad/s)"
        )


def refractive_index(crystal, omega, polarization):
    """Refractive index at angular frequency omega.

    polarization is 'ordinary' or 'extraordinary'; the extraordinary value is
    evaluated at the crystal cut angle through the index ellipse.
    """
    _check_window(crystal, omega)
    omega = np.asarray(omega, dtype=float)
    lam_um = 2 * np.pi * c / omega * 1e6
    n_o2 = _sellmeier_n2(crystal.sellmeier_ordinary, lam_um)
    if polarization == "ordinary":
        n = np.sqrt(n_o2)
    elif polarization == "extraordinary":
        n_e2 = _sellmeier_n2(crystal.sellmeier_extraordinary, lam_um)
        theta = crystal.cut_angle
        n = 1.0 / np.sqrt(np.cos(theta) ** 2 / n_o2 + np.sin(theta) ** 2 / n_e2)
    else:
        raise ValueError(f"unknown polarization {polarization!r}")
    return n if n.ndim else float(n)


def wavevector(crystal, omega, polarization):
    """Wavevector magnitude k = n(omega) * omega / c in rad/m."""
    n = refractive_index(crystal, omega, polarization)
    return n * np.asarray(omega, dtype=float) / c if np.ndim(omega) else n * omega / c


def group_slowness(crystal, omega, polarization):
    """Group slowness k'(omega) = dk/domega in s/m by central finite difference.

    Uses a relative step h = 1e-6 * omega; omega +- h must stay inside the
    Sellmeier validity window.
    """
    omega_arr = np.asarray(omega, dtype=float)
    h = _FD_STEP * omega_arr
    try:
        _check_window(crystal, omega_arr + h)
        _check_window(crystal, omega_arr - h)
    except DispersionWindowError as exc:
        raise DispersionWindowError(
            f"omega too close to the validity-window edge for the finite-difference stencil: {exc}"
        ) from exc
    k_hi = wavevector(crystal, omega_arr + h, polarization)
    k_lo = wavevector(crystal, omega_arr - h, polarization)
    kp = (k_hi - k_lo) / (2 * h)
    return kp if np.ndim(omega) else float(kp)


def phasematching_angle(crystal, omega_p0, omega_s0, omega_i0):
    """Cut angle solving collinear type-I phasematching k_p - k_s - k_i = 0.

    The pump index is the extraordinary index at the returned angle; signal
    and idler are ordinary.  Raises NotPhasematchableError when the mismatch
    does not change sign on [0, pi/2].
    """
    if abs(omega_p0 - (omega_s0 + omega_i0)) > 1e-6 * omega_p0:
        raise ValueError("energy conservation requires omega_p0 = omega_s0 + omega_i0")

    k_s = wavevector(crystal, omega_s0, "ordinary")
    k_i = wavevector(crystal, omega_i0, "ordinary")

    def mismatch(theta):
        probe = CrystalSpec(
            crystal.sellmeier_ordinary,
            crystal.sellmeier_extraordinary,
            theta,
            crystal.length_l,
            crystal.window_um,
        )
        return wavevector(probe, omega_p0, "extraordinary") - k_s - k_i

    lo, hi = 0.0, np.pi / 2
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if f_lo * f_hi > 0:
        raise NotPhasematchableError(
            f"phase mismatch does not change sign on [0, pi/2] "
            f"(dk(0)={f_lo:.3e}, dk(pi/2)={f_hi:.3e} rad/m)"
        )
    theta = brentq(mismatch, lo, hi, xtol=1e-12, rtol=1e-15)
    residual = mismatch(theta)
    if abs(residual) > 1.0:
        raise NotPhasematchableError(f"root residual too large: {residual:.3e} rad/m")
    return theta
