"""Cusp geometry: graph and horn parametrisations, arclength, curvature, blow-up.

A cuspidal profile is the even graph z = A |x|^alpha with 0 < alpha < 1,
equivalently the horn half-width b(z) = B z^m with m = 1/alpha > 1 and
B = A^(-1/alpha).  Both parametrisations are kept on one immutable type so
conversions cannot drift apart.

Arc-length along a branch, the signed curvature, and the tubular
(natural) coordinate map are the ingredients the outer expansion consumes;
the blow-up map and the anisotropically scaled Laplacian coefficients feed
the inner region.  Everything here is purely geometric: no material data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class CuspShape:
    """Even cusp z = A|x|^alpha, alias half-width b(z) = B z^m.

    lambda_R is the reference wavelength used to form the dimensionless
    sharpness a = A * lambda_R^(alpha - 1); with the default normalisation
    lambda_R = 1 the sharpness equals A.
    """

    A: float
    alpha: float
    lambda_R: float = 1.0

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise ValueError(f"need A > 0, got {self.A}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"need 0 < alpha < 1, got {self.alpha}")
        if not self.lambda_R > 0:
            raise ValueError(f"need lambda_R > 0, got {self.lambda_R}")

    @property
    def m(self) -> float:
        """Horn exponent m = 1/alpha > 1."""
        return 1.0 / self.alpha

    @property
    def B(self) -> float:
        """Horn half-width amplitude, b(z) = B z^m."""
        return self.A ** (-1.0 / self.alpha)

    @property
    def a(self) -> float:
        """Dimensionless sharpness A * lambda_R^(alpha - 1)."""
        return self.A * self.lambda_R ** (self.alpha - 1.0)

    @classmethod
    def from_graph(cls, A: float, alpha: float, lambda_R: float = 1.0) -> "CuspShape":
        return cls(A=A, alpha=alpha, lambda_R=lambda_R)

    @classmethod
    def from_horn(cls, B: float, m: float, lambda_R: float = 1.0) -> "CuspShape":
        if not m > 1.0:
            raise ValueError(f"need m > 1, got {m}")
        alpha = 1.0 / m
        return cls(A=B ** (-alpha), alpha=alpha, lambda_R=lambda_R)


@dataclass(frozen=True)
class InnerScales:
    """Inner-region scales: length ell_a, wavelength fraction eps_a = 2 pi ell_a,
    and the inner-to-outer displacement amplitude ratio (= ell_a)."""

    ell_a: float
    eps_a: float
    u_ratio: float


def half_width(shape: CuspShape, s: float) -> float:
    """Horn half-width B s^m at axial position s >= 0."""
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    return shape.B * s**shape.m


def graph_slope(shape: CuspShape, q: float) -> float:
    """Slope A alpha q^(alpha-1) of the branch at parameter q > 0."""
    if not q > 0:
        raise ValueError(f"need q > 0, got {q}")
    return shape.A * shape.alpha * q ** (shape.alpha - 1.0)


def arclength(shape: CuspShape, q: float) -> float:
    """Arc-length of one branch from the tip to parameter q.

    The naive integrand sqrt(1 + A^2 alpha^2 eta^(2 alpha - 2)) blows up at
    eta = 0; the substitution eta = t^(1/alpha) trades the singularity for the
    bounded integrand sqrt(A^2 alpha^2 + t^(2(1-alpha)/alpha)) / alpha.
    """
    if q < 0:
        raise ValueError(f"need q >= 0, got {q}")
    if q == 0.0:
        return 0.0
    A, alpha = shape.A, shape.alpha
    expo = 2.0 * (1.0 - alpha) / alpha
    aa = (A * alpha) ** 2

    def f(t: float) -> float:
        return math.sqrt(aa + t**expo) / alpha

    val, err = quad(f, 0.0, q**alpha, epsabs=1e-14, epsrel=1e-12, limit=200)
    if err > 1e-9 * max(1.0, abs(val)):
        raise ArithmeticError(f"arclength quadrature failed: estimate {val}, error {err}")
    return val


def arclength_asymptotic(shape: CuspShape, q: float) -> float:
    """Two-term small-q law A q^alpha + q^(2-alpha) / (2 A alpha (2-alpha))."""
    A, alpha = shape.A, shape.alpha
    return A * q**alpha + q ** (2.0 - alpha) / (2.0 * A * alpha * (2.0 - alpha))


def arclength_inverse(shape: CuspShape, s: float) -> float:
    """Branch parameter q with arclength(shape, q) = s, to 1e-12 relative."""
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    if s == 0.0:
        return 0.0
    A, alpha = shape.A, shape.alpha
    # both regimes bound q from above: s >= A q^alpha and s >= q
    hi = max(s, (s / A) ** (1.0 / alpha)) * 1.001
    while arclength(shape, hi) < s:
        hi *= 2.0
    lo = 0.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if arclength(shape, mid) < s:
            lo = mid
        else:
            hi = mid
    q = 0.5 * (lo + hi)
    tol = 1e-13 * max(1.0, s)
    for _ in range(30):
        err = arclength(shape, q) - s
        if abs(err) < tol:
            break
        speed = math.sqrt(1.0 + (A * alpha) ** 2 * q ** (2.0 * alpha - 2.0))
        q -= err / speed
        q = min(max(q, lo), hi)
    return q


def signed_curvature(shape: CuspShape, q: float) -> float:
    """Signed curvature of either branch at parameter q > 0 (branches share it).

    kappa = A alpha (alpha-1) q^(alpha-2) / (1 + A^2 alpha^2 q^(2 alpha-2))^(3/2),
    negative for a cusp (0 < alpha < 1) and singular as q -> 0 when alpha > 1/2.
    """
    if not q > 0:
        raise ValueError(f"need q > 0, got {q}")
    A, alpha = shape.A, shape.alpha
    num = A * alpha * (alpha - 1.0) * q ** (alpha - 2.0)
    den = (1.0 + (A * alpha) ** 2 * q ** (2.0 * alpha - 2.0)) ** 1.5
    return num / den


def tangent_normal(shape: CuspShape, branch: int, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangent and unit normal of branch delta = +-1 at parameter q > 0.

    The tangent points away from the tip; the normal is the tangent rotated
    so that it points off the branch with positive z-component.
    """
    if branch not in (-1, 1):
        raise ValueError(f"branch must be +-1, got {branch}")
    p = graph_slope(shape, q)
    speed = math.hypot(1.0, p)
    tau = np.array([branch, p]) / speed
    nu = np.array([-branch * p, 1.0]) / speed
    return tau, nu


def natural_to_cartesian(shape: CuspShape, branch: int, s: float, n: float) -> np.ndarray:
    """Map natural coordinates (s, n) on branch delta = +-1 to the (x, z) plane.

    s is arc-length from the tip, n the signed offset along the unit normal.
    Valid only inside the tubular neighbourhood 1 - kappa n > 0.
    """
    if not s > 0:
        raise ValueError(f"need s > 0, got {s}")
    q = arclength_inverse(shape, s)
    scale = 1.0 - signed_curvature(shape, q) * n
    if scale <= 0.0:
        raise ValueError(f"point (s={s}, n={n}) leaves the tubular neighbourhood")
    _, nu = tangent_normal(shape, branch, q)
    base = np.array([branch * q, shape.A * q**shape.alpha])
    return base + n * nu


def inner_scales(shape: CuspShape) -> InnerScales:
    """Scales of the tip region where the outer expansion stops being valid."""
    ell = shape.a ** (1.0 / (2.0 - shape.alpha))
    return InnerScales(ell_a=ell, eps_a=2.0 * math.pi * ell, u_ratio=ell)


def outer_validity(shape: CuspShape, s: float) -> float:
    """Size a |s|^(alpha-2) of the formal expansion parameter at arclength s.

    Equals 1 exactly at |s| = ell_a; the outer expansion needs it small.
    """
    if s == 0:
        raise ValueError("outer validity is undefined at the tip")
    return shape.a * abs(s) ** (shape.alpha - 2.0)


def blowup_coordinates(shape: CuspShape, s: float, n: float) -> tuple[float, float]:
    """Inner variables (r, eta): r = s/ell_a and eta = n / half-width."""
    if not s > 0:
        raise ValueError(f"need s > 0, got {s}")
    ell = inner_scales(shape).ell_a
    return s / ell, n / (shape.B * s**shape.m)


def blowup_point(shape: CuspShape, r: float, eta: float) -> tuple[float, float]:
    """Inverse of blowup_coordinates: (s, n) = (ell_a r, B (ell_a r)^m eta)."""
    if not r > 0:
        raise ValueError(f"need r > 0, got {r}")
    ell = inner_scales(shape).ell_a
    s = ell * r
    return s, shape.B * s**shape.m * eta


def blowup_laplacian_coefficients(
    shape: CuspShape, r: float, eta: float
) -> tuple[float, float, float, float, float]:
    """Coefficients of the Laplacian in blow-up variables (r, eta).

    Returns (c_rr, c_reta, c_etaeta, c_eta, c_trans) such that for
    w(s, n) = W(r, eta),

        Lap w = c_rr W_rr + c_reta W_reta + c_etaeta W_etaeta + c_eta W_eta
                + c_trans W_etaeta,

    where the first four terms carry the longitudinal derivatives scaled by
    ell_a^(-2) and the last one is the dominant transverse stiffness
    ell_a^(-2m) B^(-2) r^(-2m).
    """
    if not r > 0:
        raise ValueError(f"need r > 0, got {r}")
    m, B = shape.m, shape.B
    ell = inner_scales(shape).ell_a
    long_scale = ell**-2.0
    c_rr = long_scale
    c_reta = -long_scale * 2.0 * m * eta / r
    c_etaeta = long_scale * (m * eta / r) ** 2
    c_eta = long_scale * m * (m + 1.0) * eta / r**2
    c_trans = ell ** (-2.0 * m) / B**2 * r ** (-2.0 * m)
    return c_rr, c_reta, c_etaeta, c_eta, c_trans


def rounded_graph(shape: CuspShape, delta: float, n: float) -> float:
    """Rounded profile s_delta(n) = A (n^2 + delta^2)^(alpha/2) - A delta^alpha.

    Smooths the cusp tip at scale delta > 0; vanishes at n = 0 and approaches
    the sharp graph A|n|^alpha for |n| >> delta.
    """
    if not delta > 0:
        raise ValueError(f"need delta > 0, got {delta}")
    A, alpha = shape.A, shape.alpha
    return A * (n * n + delta * delta) ** (0.5 * alpha) - A * delta**alpha


def rounded_tip_radius(shape: CuspShape, delta: float) -> float:
    """Curvature radius delta^(2-alpha) / (A alpha) of the rounded tip."""
    if not delta > 0:
        raise ValueError(f"need delta > 0, got {delta}")
    return delta ** (2.0 - shape.alpha) / (shape.A * shape.alpha)
