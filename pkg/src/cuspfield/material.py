"""Isotropic elastic constants and surface-wave speeds.

Everything downstream (mode profiles, projection constants, FEM element
matrices) pulls its material data from here, so the types are small and
strict: positive Lame constants and density, speeds ordered cR < cS < cP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ElasticModuli:
    """Lame constants and mass density of an isotropic solid."""

    lam: float
    mu: float
    rho: float

    def __post_init__(self) -> None:
        if not (self.lam > 0 and self.mu > 0 and self.rho > 0):
            raise ValueError(
                f"moduli must be positive, got lam={self.lam}, mu={self.mu}, rho={self.rho}"
            )

    @property
    def poisson(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))

    @classmethod
    def from_poisson(cls, nu: float, mu: float = 1.0, rho: float = 1.0) -> "ElasticModuli":
        if not 0.0 < nu < 0.5:
            raise ValueError(f"need 0 < nu < 1/2, got {nu}")
        return cls(lam=2.0 * mu * nu / (1.0 - 2.0 * nu), mu=mu, rho=rho)


@dataclass(frozen=True)
class WaveSpeeds:
    """Pressure, shear and surface (Rayleigh) wave speeds."""

    cP: float
    cS: float
    cR: float

    def __post_init__(self) -> None:
        if not 0.0 < self.cR < self.cS < self.cP:
            raise ValueError(f"speeds must satisfy 0 < cR < cS < cP, got {self}")


def kolosov(m: ElasticModuli) -> float:
    """Plane-strain Kolosov constant 3 - 4*nu."""
    return 3.0 - 4.0 * m.poisson


def rayleigh_residual(m: ElasticModuli, c: float) -> float:
    """Residual of the squared, radical-free surface-wave equation at speed c.

    With x = (c/cS)^2 and gamma = (cS/cP)^2 the equation reads

        x^3 - 8 x^2 + (24 - 16 gamma) x - 16 (1 - gamma) = 0,

    obtained by squaring the usual form and dividing out the spurious x = 0
    root.  The physical root is the unique zero in (0, 1).
    """
    gamma = m.mu / (m.lam + 2.0 * m.mu)
    x = c * c * m.rho / m.mu
    return x**3 - 8.0 * x**2 + (24.0 - 16.0 * gamma) * x - 16.0 * (1.0 - gamma)


def wave_speeds(m: ElasticModuli) -> WaveSpeeds:
    """Wave speeds of the half-space: cP and cS in closed form, cR by root finding.

    The surface-wave speed is bracketed by bisection on (0, cS) in the
    radical-free polynomial and polished by Newton steps; the returned value
    satisfies the polynomial to better than 1e-12.
    """
    cP = math.sqrt((m.lam + 2.0 * m.mu) / m.rho)
    cS = math.sqrt(m.mu / m.rho)
    gamma = (cS / cP) ** 2

    def g(x: float) -> float:
        return x**3 - 8.0 * x**2 + (24.0 - 16.0 * gamma) * x - 16.0 * (1.0 - gamma)

    def dg(x: float) -> float:
        return 3.0 * x**2 - 16.0 * x + (24.0 - 16.0 * gamma)

    # g(0) = -16(1-gamma) < 0 and g(1) = 1 > 0: the physical root lies in (0, 1).
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(8):
        step = g(x) / dg(x)
        x -= step
        if abs(step) < 1e-16:
            break

    if not 0.0 < x < 1.0:
        raise ArithmeticError(f"surface-wave root escaped (0, 1): x = {x}")
    if 2.0 - x < 0.0:
        # squaring the dispersion relation admits roots with 2 - (c/cS)^2 < 0;
        # those do not solve the original equation and must be rejected
        raise ArithmeticError("spurious root of the squared dispersion relation")
    cR = cS * math.sqrt(x)
    speeds = WaveSpeeds(cP=cP, cS=cS, cR=cR)
    if abs(rayleigh_residual(m, cR)) > 1e-12:
        raise ArithmeticError("surface-wave root failed the residual check")
    return speeds


def decay_rates(speeds: WaveSpeeds) -> tuple[float, float]:
    """Depth-decay exponents (p, beta) of the surface mode, in units of 1/q.

    p = sqrt(1 - cR^2/cP^2) controls the dilatational part and
    beta = sqrt(1 - cR^2/cS^2) the shear part; they satisfy the compatibility
    identity (1 + beta^2)^2 = 4 p beta.
    """
    p = math.sqrt(1.0 - (speeds.cR / speeds.cP) ** 2)
    beta = math.sqrt(1.0 - (speeds.cR / speeds.cS) ** 2)
    return p, beta
