"""Crack-tip fields for the gorge: square-root singularity plus cusp correction.

Near the bottom of a cuspidal gorge the two faces close with zero opening
angle, so the leading local field is the plane-strain crack field with
intensity factors (K_I, K_II); the finite opening of the faces away from the
tip feeds a correction growing like r^(m - 3/2) relative measured against the
r^(-1/2) lead.  Angles follow the usual convention: the crack occupies
theta = +-pi and theta = 0 points into the material ahead of the tip.

The local_slope helper quantifies how the correction bends the log-log decay
of the stress magnitude away from -1/2, and rounding_cutoff converts a tip
rounding at scale delta into the stress cap |K| / sqrt(rho_delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitting import ScalingFit, fit_loglog
from .geometry import CuspShape, rounded_tip_radius

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class WilliamsField:
    """Plane-strain crack-tip data: intensity factors and elastic constants."""

    KI: float
    KII: float
    nu: float
    mu: float

    def __post_init__(self) -> None:
        if not 0.0 < self.nu < 0.5:
            raise ValueError(f"need 0 < nu < 1/2, got {self.nu}")
        if not self.mu > 0:
            raise ValueError(f"need mu > 0, got {self.mu}")

    @property
    def kappa(self) -> float:
        """Plane-strain Kolosov constant 3 - 4 nu."""
        return 3.0 - 4.0 * self.nu

    @property
    def lam(self) -> float:
        return 2.0 * self.mu * self.nu / (1.0 - 2.0 * self.nu)


def _mode1_shape(theta):
    """Mode-I angular stress tensor at unit K / sqrt(2 pi r)."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    s3 = np.sin(1.5 * theta)
    sxx = c * (1.0 - s * s3)
    syy = c * (1.0 + s * s3)
    sxy = c * s * np.cos(1.5 * theta)
    return np.stack([np.stack([sxx, sxy]), np.stack([sxy, syy])])


def _mode2_shape(theta):
    """Mode-II angular stress tensor at unit K / sqrt(2 pi r)."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    c3 = np.cos(1.5 * theta)
    sxx = -s * (2.0 + c * c3)
    syy = s * c * c3
    sxy = c * (1.0 - s * np.sin(1.5 * theta))
    return np.stack([np.stack([sxx, sxy]), np.stack([sxy, syy])])


def williams_stress(field: WilliamsField, r, theta):
    """In-plane stress tensor of the K-field at polar point (r, theta).

    Returns shape (2, 2) for scalar input, (2, 2) + broadcast shape otherwise.
    """
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r <= 0):
        raise ValueError("stress field is singular: need r > 0")
    amp1 = field.KI / np.sqrt(TWO_PI * r)
    amp2 = field.KII / np.sqrt(TWO_PI * r)
    return amp1 * _mode1_shape(theta) + amp2 * _mode2_shape(theta)


def williams_displacement(field: WilliamsField, r, theta):
    """In-plane displacement (u_x, u_y) of the K-field; vanishes at r = 0."""
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r < 0):
        raise ValueError(f"need r >= 0, got {r}")
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    kap = field.kappa
    scale = np.sqrt(r / TWO_PI) / (2.0 * field.mu)
    ux = scale * (
        field.KI * c * (kap - 1.0 + 2.0 * s * s)
        + field.KII * s * (kap + 1.0 + 2.0 * c * c)
    )
    uy = scale * (
        field.KI * s * (kap + 1.0 - 2.0 * c * c)
        - field.KII * c * (kap - 1.0 - 2.0 * s * s)
    )
    return np.stack([ux, uy])


def crack_opening(field: WilliamsField, r) -> np.ndarray:
    """Face separation u_y(r, pi) - u_y(r, -pi) = (K_I / mu) sqrt(r / 2 pi) (kappa + 1)."""
    r = np.asarray(r, dtype=float)
    return field.KI / field.mu * np.sqrt(r / TWO_PI) * (field.kappa + 1.0)


def strain_energy_density(field: WilliamsField, sigma) -> np.ndarray:
    """Plane-strain energy density (1/2) sigma : eps recovered from stress alone."""
    sigma = np.asarray(sigma, dtype=float)
    lam, mu = field.lam, field.mu
    trace = sigma[0, 0] + sigma[1, 1]
    tr_eps = trace / (2.0 * (lam + mu))
    eye = np.zeros_like(sigma)
    eye[0, 0] = eye[1, 1] = 1.0
    eps = (sigma - lam * tr_eps * eye) / (2.0 * mu)
    return 0.5 * np.einsum("ij...,ij...->...", sigma, eps)


def default_correction(field: WilliamsField, shape: CuspShape, r_ref: float = 0.1,
                       fraction: float = 0.1) -> float:
    """Correction amplitude making the cusp term a given fraction of the lead at r_ref."""
    if not r_ref > 0:
        raise ValueError(f"need r_ref > 0, got {r_ref}")
    k_mag = math.hypot(field.KI, field.KII)
    return fraction * k_mag * r_ref ** (1.5 - shape.m) / math.sqrt(TWO_PI * r_ref)


def corrected_stress(field: WilliamsField, shape: CuspShape, c_corr: float, r, theta):
    """K-field plus the finite-opening correction c_corr r^(m - 3/2) in mode-I shape."""
    r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r <= 0):
        raise ValueError("stress field is singular: need r > 0")
    return williams_stress(field, r, theta) + c_corr * r ** (shape.m - 1.5) * _mode1_shape(theta)


def stress_magnitude(sigma) -> np.ndarray:
    """Frobenius norm over the leading (2, 2) tensor axes."""
    sigma = np.asarray(sigma, dtype=float)
    return np.sqrt(np.einsum("ij...,ij...->...", sigma, sigma))


@dataclass(frozen=True)
class LocalSlopeResult:
    """Pointwise log-log slopes plus the least-squares fit over the window."""

    radii: np.ndarray
    slopes: np.ndarray
    fit: ScalingFit


def local_slope(r, values, window: tuple[float, float] | None = None) -> LocalSlopeResult:
    """Finite-difference d log(value) / d log(r), centered inside, one-sided at ends.

    The samples must be positive with strictly increasing radii; window
    restricts both the pointwise slopes and the accompanying fit.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.shape != v.shape or r.ndim != 1:
        raise ValueError("need equal-length 1-d radius and value arrays")
    if window is not None:
        keep = (r >= window[0]) & (r <= window[1])
        r, v = r[keep], v[keep]
    if r.size < 3:
        raise ValueError(f"need at least 3 samples, got {r.size}")
    if np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing")
    if np.any(v <= 0) or np.any(r <= 0):
        raise ValueError("log-log slope needs positive samples")

    lr, lv = np.log(r), np.log(v)
    slopes = np.empty_like(lr)
    slopes[0] = (lv[1] - lv[0]) / (lr[1] - lr[0])
    slopes[-1] = (lv[-1] - lv[-2]) / (lr[-1] - lr[-2])
    slopes[1:-1] = (lv[2:] - lv[:-2]) / (lr[2:] - lr[:-2])
    fit = fit_loglog(r, v, min_points=3)
    return LocalSlopeResult(radii=r, slopes=slopes, fit=fit)


def stress_decay_profile(
    field: WilliamsField,
    shape: CuspShape,
    r_values,
    theta: float = 0.0,
    c_corr: float | None = None,
) -> np.ndarray:
    """Magnitude of the corrected stress along a ray, for slope studies."""
    if c_corr is None:
        c_corr = default_correction(field, shape)
    return stress_magnitude(corrected_stress(field, shape, c_corr, r_values, theta))


def rounding_cutoff(field: WilliamsField, shape: CuspShape, delta: float) -> float:
    """Stress cap |K| / sqrt(rho_delta) when the tip is rounded at scale delta.

    rho_delta is the rounded-tip curvature radius, so the cap grows like
    delta^(-(2 - alpha)/2) as the rounding shrinks.
    """
    k_mag = math.hypot(field.KI, field.KII)
    return k_mag / math.sqrt(rounded_tip_radius(shape, delta))
