"""Coupled-oscillator cavity optics.

Angle-dependent planar-cavity dispersion, polariton eigenmodes of the 2x2
non-Hermitian cavity-emitter matrix, single-port input-output reflectance,
cavity-filtered emission lineshape, and the coherence-length estimate
L_coh = lambda^2 / d_lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import AngleOutOfRange, InsufficientPoints, PeakNotFound, ZeroLinewidth
from .sweep import fit_power_law


@dataclass(frozen=True)
class OpticalParams:
    """Coupled-oscillator model inputs; linewidths are FWHM in meV."""

    e_c0: float        # cavity mode energy at normal incidence, meV
    n_eff: float       # effective intracavity refractive index
    delta: float       # emitter transition energy, meV
    g_coll: float      # collective coupling g * sqrt(N), meV
    kappa: float       # total cavity linewidth, meV
    kappa_ext: float   # external (mirror) coupling linewidth, meV
    gamma_perp: float  # emitter homogeneous linewidth, meV

    def __post_init__(self):
        if not self.n_eff > 1:
            raise ValueError("n_eff must be > 1")
        if not (0 <= self.kappa_ext <= self.kappa):
            raise ValueError("kappa_ext must lie in [0, kappa]")
        if self.kappa < 0 or self.gamma_perp < 0 or self.g_coll < 0:
            raise ValueError("linewidths and coupling must be >= 0")
        if self.e_c0 <= 0 or self.delta <= 0:
            raise ValueError("energies must be > 0")


def cavity_dispersion(p: OpticalParams, theta_deg: float) -> float:
    """Planar-cavity mode energy e_c0 / sqrt(1 - sin^2(theta)/n_eff^2), meV."""
    if not 0 <= theta_deg < 90:
        raise AngleOutOfRange(f"theta = {theta_deg} deg outside [0, 90)")
    sin_t = math.sin(math.radians(theta_deg))
    return p.e_c0 / math.sqrt(1.0 - (sin_t / p.n_eff) ** 2)


def polariton_eigenmodes(p: OpticalParams, theta_deg: float) -> tuple[complex, complex]:
    """Eigenvalues of [[E_c(theta) - i kappa/2, g], [g, delta - i gamma_perp/2]].

    Returned sorted by real part (lower polariton first).  At resonance the
    real-part splitting is 2*sqrt(g^2 - (kappa - gamma_perp)^2/16) when the
    radicand is positive and 0 otherwise.
    """
    e_c = cavity_dispersion(p, theta_deg) - 0.5j * p.kappa
    e_x = p.delta - 0.5j * p.gamma_perp
    half_sum = 0.5 * (e_c + e_x)
    root = np.sqrt((0.5 * (e_c - e_x)) ** 2 + p.g_coll**2 + 0j)
    lo, hi = half_sum - root, half_sum + root
    if lo.real > hi.real:
        lo, hi = hi, lo
    return complex(lo), complex(hi)


def reflectance_spectrum(p: OpticalParams, theta_deg: float, energies) -> np.ndarray:
    """Single-port reflectance R(E) = |1 - kappa_ext / D(E)|^2.

    D(E) = kappa/2 - i(E - E_c(theta)) + g^2 / (gamma_perp/2 - i(E - delta)).
    For kappa_ext <= kappa the formula lies in [0, 1] by construction; the
    bound is asserted rather than clamped.
    """
    e_arr = np.asarray(energies, dtype=float)
    if not np.all(np.isfinite(e_arr)):
        raise ValueError("energies must be finite")
    e_c = cavity_dispersion(p, theta_deg)
    denom = 0.5 * p.kappa - 1j * (e_arr - e_c)
    if p.g_coll != 0:
        denom = denom + p.g_coll**2 / (0.5 * p.gamma_perp - 1j * (e_arr - p.delta))
    refl = np.abs(1.0 - p.kappa_ext / denom) ** 2
    assert np.all(refl >= 0.0) and np.all(refl <= 1.0 + 1e-12), "reflectance left [0, 1]"
    return refl


@dataclass(frozen=True)
class ReflectanceMap:
    """Angle x energy reflectance grid with polariton branch overlays."""

    thetas: np.ndarray      # degrees
    energies: np.ndarray    # meV
    r_values: np.ndarray    # shape (n_theta, n_energy), in [0, 1]
    lp_branch: np.ndarray   # complex eigenvalues per angle, meV
    up_branch: np.ndarray

    def validate(self) -> "ReflectanceMap":
        if self.r_values.shape != (len(self.thetas), len(self.energies)):
            raise ValueError("r_values shape does not match the grid")
        if len(self.lp_branch) != len(self.thetas) or len(self.up_branch) != len(self.thetas):
            raise ValueError("branch arrays must have one entry per angle")
        if np.any(self.r_values < 0) or np.any(self.r_values > 1 + 1e-12):
            raise ValueError("reflectance values outside [0, 1]")
        if np.any(self.lp_branch.real > self.up_branch.real + 1e-12):
            raise ValueError("LP branch must lie below UP branch")
        return self


def compute_reflectance_map(p: OpticalParams, thetas, energies) -> ReflectanceMap:
    """Evaluate the reflectance model over an angle x energy grid."""
    thetas = np.asarray(thetas, dtype=float)
    energies = np.asarray(energies, dtype=float)
    r_values = np.empty((len(thetas), len(energies)))
    lp = np.empty(len(thetas), dtype=complex)
    up = np.empty(len(thetas), dtype=complex)
    for k, theta in enumerate(thetas):
        r_values[k] = reflectance_spectrum(p, theta, energies)
        lp[k], up[k] = polariton_eigenmodes(p, theta)
    return ReflectanceMap(
        thetas=thetas, energies=energies, r_values=r_values, lp_branch=lp, up_branch=up
    ).validate()


def minimum_branch_splitting(
    p: OpticalParams, theta_max_deg: float = 64.0, n_grid: int = 2001
) -> float:
    """Smallest real-part LP/UP separation over [0, theta_max] degrees."""
    thetas = np.linspace(0.0, theta_max_deg, n_grid)
    split = np.empty(n_grid)
    for k, theta in enumerate(thetas):
        lo, hi = polariton_eigenmodes(p, theta)
        split[k] = hi.real - lo.real
    return float(split.min())


def _lorentzian(e, center, fwhm):
    half = 0.5 * fwhm
    return half**2 / ((e - center) ** 2 + half**2)


def emission_fwhm(p: OpticalParams, theta_deg: float) -> tuple[float, float]:
    """Peak position and FWHM of the cavity-filtered emission lineshape.

    The model is the product of the emitter Lorentzian (delta, gamma_perp) and
    the cavity filter Lorentzian (E_c(theta), kappa).  Peak and half-maximum
    crossings are located numerically to better than 1e-3 relative.
    """
    if p.gamma_perp <= 0 or p.kappa <= 0:
        raise ZeroLinewidth("emission model needs gamma_perp > 0 and kappa > 0")
    e_c = cavity_dispersion(p, theta_deg)
    widths = p.kappa + p.gamma_perp
    separation = abs(e_c - p.delta)
    if separation > 10.0 * widths:
        raise PeakNotFound(
            f"cavity filter at {e_c:.1f} meV and emitter at {p.delta:.1f} meV are "
            f"separated by {separation:.1f} meV >> combined widths {widths:.1f} meV"
        )

    def spectrum(e):
        return _lorentzian(e, p.delta, p.gamma_perp) * _lorentzian(e, e_c, p.kappa)

    lo = min(e_c, p.delta) - 5.0 * widths
    hi = max(e_c, p.delta) + 5.0 * widths
    grid = np.linspace(lo, hi, 4001)
    vals = spectrum(grid)
    k0 = int(np.argmax(vals))
    bracket_lo = grid[max(k0 - 1, 0)]
    bracket_hi = grid[min(k0 + 1, len(grid) - 1)]
    res = minimize_scalar(
        lambda e: -spectrum(e), bounds=(bracket_lo, bracket_hi), method="bounded",
        options={"xatol": 1e-9 * widths},
    )
    e_peak = float(res.x)
    s_peak = spectrum(e_peak)
    half = 0.5 * s_peak

    def crossing(a, b):
        return brentq(lambda e: spectrum(e) - half, a, b, xtol=1e-10 * widths)

    span = widths
    left = e_peak - span
    while spectrum(left) > half:
        left -= span
        if e_peak - left > 1e3 * widths:
            raise PeakNotFound("no half-maximum crossing found on the low side")
    right = e_peak + span
    while spectrum(right) > half:
        right += span
        if right - e_peak > 1e3 * widths:
            raise PeakNotFound("no half-maximum crossing found on the high side")
    e_left = crossing(left, e_peak)
    e_right = crossing(e_peak, right)
    return e_peak, float(e_right - e_left)


def coherence_length(lambda_nm: float, delta_lambda_nm: float) -> float:
    """Coherence length lambda^2 / d_lambda, returned in micrometres."""
    if lambda_nm <= 0:
        raise ValueError("wavelength must be > 0")
    if delta_lambda_nm <= 0:
        raise ZeroLinewidth("spectral width must be > 0")
    return lambda_nm**2 / delta_lambda_nm / 1000.0


def fit_coupling_scaling(points) -> float:
    """Log-log slope of collective coupling vs emitter count (0.5 for sqrt-N)."""
    pts = list(points)
    if len(pts) < 2:
        raise InsufficientPoints("coupling-scaling fit needs >= 2 points")
    return fit_power_law(pts).alpha
