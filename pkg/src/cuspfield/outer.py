"""First-order outer corrections: curvature forcing, projections, wavelength shift.

In natural coordinates a slightly curved traction-free surface perturbs the
flat-surface mode at first order through two inputs: the local curvature
profile k(s) (with its derivative k'(s)) and a uniform wavenumber shift.
Applied to the travelling phasor both perturbations factor as
exp(i q s) times a depth density built from the mode profile, so every
projection onto the mode reduces to integrals of n^j exp(-g n) over the half
line.  Those are evaluated in closed form (j! / g^(j+1)) through a small
exponential-polynomial algebra; an adaptive-quadrature path is kept as a
cross-check.

The solvability (orthogonality) condition for the first-order problem then
fixes the relative wavelength correction m1 on a given arclength interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .geometry import CuspShape
from .material import ElasticModuli
from .rayleigh import RayleighMode


class ExpPoly:
    """Finite sum of terms c * n^j * exp(-g n) on the half line n >= 0.

    Closed under addition, products, differentiation and conjugation, with
    exact half-line integrals; j is a nonnegative integer, c and g complex.
    Terms with Re g <= 0 are representable but refuse to integrate.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, complex], complex] | None = None):
        self.terms: dict[tuple[int, complex], complex] = {}
        if terms:
            for (j, g), c in terms.items():
                if c != 0:
                    self.terms[(int(j), complex(g))] = complex(c)

    @classmethod
    def exponential(cls, g: complex, c: complex = 1.0) -> "ExpPoly":
        """The single term c * exp(-g n)."""
        return cls({(0, g): c})

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0.0) + c
        return ExpPoly(out)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "ExpPoly":
        return ExpPoly({key: c * v for key, v in self.terms.items()})

    def times_n(self) -> "ExpPoly":
        return ExpPoly({(j + 1, g): c for (j, g), c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            out: dict[tuple[int, complex], complex] = {}
            for (j1, g1), c1 in self.terms.items():
                for (j2, g2), c2 in other.terms.items():
                    key = (j1 + j2, g1 + g2)
                    out[key] = out.get(key, 0.0) + c1 * c2
            return ExpPoly(out)
        return self.scaled(other)

    __rmul__ = __mul__

    def derivative(self) -> "ExpPoly":
        out: dict[tuple[int, complex], complex] = {}
        for (j, g), c in self.terms.items():
            if j > 0:
                key = (j - 1, g)
                out[key] = out.get(key, 0.0) + c * j
            key = (j, g)
            out[key] = out.get(key, 0.0) - c * g
        return ExpPoly(out)

    def conjugate(self) -> "ExpPoly":
        return ExpPoly({(j, g.conjugate()): c.conjugate() for (j, g), c in self.terms.items()})

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        out = np.zeros(n.shape, dtype=complex)
        for (j, g), c in self.terms.items():
            out += c * n**j * np.exp(-g * n)
        return out if out.shape else complex(out)

    def integrate(self) -> complex:
        """Exact half-line integral: sum of c * j! / g^(j+1)."""
        total = 0.0 + 0.0j
        for (j, g), c in self.terms.items():
            if g.real <= 0.0:
                raise ValueError(f"non-decaying term (j={j}, g={g}) has no half-line integral")
            total += c * math.factorial(j) / g ** (j + 1)
        return total


@dataclass(frozen=True)
class ProjectionConstants:
    """Mode projections of the two curvature densities and the shift density.

    normalization records (q, mu, lam, rho) the constants were evaluated at.
    """

    C_kappa: complex
    C_kappa_prime: complex
    D_m: complex
    normalization: tuple[float, float, float, float]


@dataclass(frozen=True)
class WavelengthCorrection:
    """Relative first-order wavelength shift m1 on an arclength interval."""

    m1: float
    interval: tuple[float, float]

    def effective_wavelength(self, a: float, lambda_R: float = 1.0) -> float:
        """First-order effective wavelength lambda_R (1 - a m1)."""
        return lambda_R * (1.0 - a * self.m1)


def _profile_polys(mode: RayleighMode) -> tuple[ExpPoly, ExpPoly]:
    """Mode profile (phi_u, phi_v) as exponential polynomials in n."""
    p, beta = mode.decay
    q = mode.q
    ep = ExpPoly.exponential(p * q)
    eb = ExpPoly.exponential(beta * q)
    phi_u = (ep - eb.scaled(mode.cb)).scaled(1j)
    phi_v = ep.scaled(-p) + eb.scaled(mode.cv)
    return phi_u, phi_v


def _curvature_density(mode: RayleighMode) -> tuple[ExpPoly, ExpPoly]:
    """Interior forcing per unit curvature value k(s), phasor factored out."""
    lam, mu = mode.moduli.lam, mode.moduli.mu
    q = mode.q
    u, v = _profile_polys(mode)
    du, dv = u.derivative(), v.derivative()
    f1 = (
        u.times_n().scaled(2.0 * (lam + 2.0 * mu) * q * q)
        + dv.times_n().scaled(-1j * q * (lam + mu))
        + v.scaled(1j * q * (lam + 3.0 * mu))
        + du.scaled(mu)
    )
    f2 = (
        v.times_n().scaled(2.0 * mu * q * q)
        + du.times_n().scaled(-1j * q * (lam + mu))
        + u.scaled(-1j * q * (lam + 3.0 * mu))
        + dv.scaled(lam + 2.0 * mu)
    )
    return f1, f2


def _curvature_gradient_density(mode: RayleighMode) -> tuple[ExpPoly, ExpPoly]:
    """Interior forcing per unit curvature derivative k'(s)."""
    lam, mu = mode.moduli.lam, mode.moduli.mu
    q = mode.q
    u, v = _profile_polys(mode)
    f1 = u.times_n().scaled(-1j * q * (lam + 2.0 * mu)) + v.scaled(lam + 2.0 * mu)
    f2 = v.times_n().scaled(-1j * q * mu) + u.scaled(-mu)
    return f1, f2


def _shift_density(mode: RayleighMode) -> tuple[ExpPoly, ExpPoly]:
    """Interior forcing per unit relative wavenumber shift."""
    lam, mu = mode.moduli.lam, mode.moduli.mu
    q = mode.q
    u, v = _profile_polys(mode)
    du, dv = u.derivative(), v.derivative()
    f1 = u.scaled(-2.0 * (lam + 2.0 * mu) * q * q) + dv.scaled(1j * q * (lam + mu))
    f2 = du.scaled(1j * q * (lam + mu)) + v.scaled(-2.0 * mu * q * q)
    return f1, f2


def _curvature_boundary(mode: RayleighMode) -> np.ndarray:
    """Surface forcing per unit k(s): (-mu phi_u(0), +lam phi_v(0))."""
    lam, mu = mode.moduli.lam, mode.moduli.mu
    phi = mode.profile(0.0)
    return np.array([-mu * phi[0], lam * phi[1]])


def _shift_boundary(mode: RayleighMode) -> np.ndarray:
    """Surface forcing per unit shift: (i q mu phi_v(0), i q lam phi_u(0))."""
    lam, mu = mode.moduli.lam, mode.moduli.mu
    q = mode.q
    phi = mode.profile(0.0)
    return np.array([1j * q * mu * phi[1], 1j * q * lam * phi[0]])


def curvature_forcing(mode: RayleighMode, k: float, kprime: float, s, n):
    """First-order interior forcing of the curved surface at (s, n).

    Linear in the curvature data: exp(iqs) (k F_kappa(n) + k' F_kappa'(n)).
    """
    fk = _curvature_density(mode)
    fkp = _curvature_gradient_density(mode)
    phase = np.exp(1j * mode.q * np.asarray(s))
    return phase * np.stack(
        [k * fk[0](n) + kprime * fkp[0](n), k * fk[1](n) + kprime * fkp[1](n)]
    )


def curvature_boundary_forcing(mode: RayleighMode, k: float, s):
    """First-order surface forcing of the curved surface at arclength s."""
    phase = np.exp(1j * mode.q * np.asarray(s))
    return k * phase * _curvature_boundary(mode)


def shift_forcing(mode: RayleighMode, nu: float, s, n):
    """Interior forcing of a relative wavenumber shift nu at (s, n)."""
    f = _shift_density(mode)
    phase = np.exp(1j * mode.q * np.asarray(s))
    return nu * phase * np.stack([f[0](n), f[1](n)])


def shift_boundary_forcing(mode: RayleighMode, nu: float, s):
    """Surface forcing of a relative wavenumber shift nu at arclength s."""
    phase = np.exp(1j * mode.q * np.asarray(s))
    return nu * phase * _shift_boundary(mode)


def rotation_field(mode: RayleighMode, alpha: float, s: float, n):
    """First-order field rotation f'(s) (v0 - n u0_s, -u0 - n v0_s).

    f(s) = |s|^alpha is the normalised profile, so the prefactor
    f'(s) = alpha sign(s) |s|^(alpha-1) blows up like |s|^(alpha-1) at the
    tip; this is the term whose growth invalidates the outer expansion.
    """
    if s == 0:
        raise ValueError("rotation field is undefined at s = 0")
    fp = alpha * math.copysign(abs(s) ** (alpha - 1.0), s)
    w = mode.phasor(s, n)
    du_s = 1j * mode.q * w[0]
    dv_s = 1j * mode.q * w[1]
    n = np.asarray(n, dtype=float)
    return fp * np.stack([w[1] - n * du_s, -w[0] - n * dv_s])


def _project_closed_form(density: tuple[ExpPoly, ExpPoly], phi: tuple[ExpPoly, ExpPoly]) -> complex:
    total = 0.0 + 0.0j
    for f, g in zip(density, phi):
        total += (f * g.conjugate()).integrate()
    return total


def _project_quadrature(mode: RayleighMode, density: tuple[ExpPoly, ExpPoly]) -> complex:
    p, beta = mode.decay
    cut = 60.0 / (min(p, beta) * mode.q)

    def integrand(n: float, part: str) -> float:
        phi = mode.profile(n)
        val = density[0](n) * phi[0].conjugate() + density[1](n) * phi[1].conjugate()
        return val.real if part == "re" else val.imag

    re, _ = quad(integrand, 0.0, cut, args=("re",), epsabs=1e-13, epsrel=1e-13, limit=400)
    im, _ = quad(integrand, 0.0, cut, args=("im",), epsabs=1e-13, epsrel=1e-13, limit=400)
    return re + 1j * im


def projection_constants(
    moduli: ElasticModuli,
    q: float = 1.0,
    amplitude: complex = 1.0 + 0.0j,
    method: str = "closed_form",
) -> ProjectionConstants:
    """Project the three first-order densities onto the mode profile.

    C_kappa and C_kappa_prime multiply k(s) and k'(s) in the solvability
    condition; D_m multiplies the wavenumber-shift unknown.  Interior parts
    are integrated against conj(Phi) over the depth, surface parts dotted
    with conj(Phi(0)).  method selects the closed-form exponential integrals
    (default) or adaptive quadrature (cross-check); both see the same
    densities.  A common amplitude on the mode scales every projection by
    |amplitude|^2 and cancels from the solvability condition.
    """
    if method not in ("closed_form", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    mode = RayleighMode(moduli=moduli, q=q)
    phi = _profile_polys(mode)
    phi0 = mode.profile(0.0)
    weight = abs(amplitude) ** 2

    def project(density: tuple[ExpPoly, ExpPoly]) -> complex:
        if method == "closed_form":
            return _project_closed_form(density, phi)
        return _project_quadrature(mode, density)

    def boundary(forcing: np.ndarray) -> complex:
        return complex(forcing[0] * phi0[0].conjugate() + forcing[1] * phi0[1].conjugate())

    c_kappa = project(_curvature_density(mode)) + boundary(_curvature_boundary(mode))
    c_kappa_prime = project(_curvature_gradient_density(mode))
    d_m = project(_shift_density(mode)) + boundary(_shift_boundary(mode))
    return ProjectionConstants(
        C_kappa=weight * c_kappa,
        C_kappa_prime=weight * c_kappa_prime,
        D_m=weight * d_m,
        normalization=(q, moduli.mu, moduli.lam, moduli.rho),
    )


def curvature_profile(shape: CuspShape, s: float) -> float:
    """Leading curvature profile k(s) = alpha (alpha - 1) |s|^(alpha - 2).

    This is the curvature of the normalised graph |s|^alpha; the sharpness a
    multiplies it externally in the first-order problem.
    """
    if s == 0:
        raise ValueError("curvature profile is singular at s = 0")
    alpha = shape.alpha
    return alpha * (alpha - 1.0) * abs(s) ** (alpha - 2.0)


def curvature_integral(shape: CuspShape, interval: tuple[float, float]) -> float:
    """Closed form of the curvature profile integral over delta < |s| < R.

    Both branches together give 2 alpha (R^(alpha-1) - delta^(alpha-1)).
    """
    delta, big_r = _checked_interval(interval)
    alpha = shape.alpha
    return 2.0 * alpha * (big_r ** (alpha - 1.0) - delta ** (alpha - 1.0))


def _checked_interval(interval: tuple[float, float]) -> tuple[float, float]:
    delta, big_r = interval
    if not 0.0 < delta < big_r:
        raise ValueError(f"need 0 < delta < R, got delta={delta}, R={big_r}")
    return delta, big_r


def solve_m1(
    constants: ProjectionConstants,
    shape: CuspShape,
    interval: tuple[float, float],
) -> WavelengthCorrection:
    """Wavelength correction from the solvability condition on delta < |s| < R.

    The condition D_m m1 |I| = Re integral of (C_kappa k + C_kappa' k') ds is
    solved for m1, with |I| = 2 (R - delta).  The k'-integral cancels between
    the two branches (k is even), so only the closed-form k-integral enters.
    """
    delta, big_r = _checked_interval(interval)
    if abs(constants.D_m) < 1e-14:
        raise ZeroDivisionError("degenerate shift projection D_m")
    rhs = (constants.C_kappa * curvature_integral(shape, interval)).real
    m1 = rhs / (constants.D_m.real * 2.0 * (big_r - delta))
    return WavelengthCorrection(m1=m1, interval=(delta, big_r))


def fredholm_residual(
    constants: ProjectionConstants,
    shape: CuspShape,
    m1: float,
    interval: tuple[float, float],
) -> float:
    """Magnitude of the solvability integral evaluated with a given m1.

    Integrates the projected densities numerically (independent of the
    closed form used by solve_m1); near zero for the solved m1.
    """
    delta, big_r = _checked_interval(interval)

    def density(s: float) -> float:
        return (constants.C_kappa * curvature_profile(shape, s)).real - constants.D_m.real * m1

    val, _ = quad(density, delta, big_r, epsabs=1e-12, epsrel=1e-12, limit=200)
    # the odd k' density integrates to zero over the two branches; the even
    # part above appears once per branch
    return abs(2.0 * val)
