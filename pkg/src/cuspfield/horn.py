"""Reduced 1-d horn model of axial motion in a cusp-shaped sliver.

The half-width b(s) = B s^m (m > 1) closes at s = 0, so the cross-sectional
area A(s) = 2 B s^m and bending moment I(s) = (2/3) B^3 s^(3m) degenerate at
the tip.  The axial reduced equation (b q')' + k^2 b q = 0, equivalently

    q'' + (m/s) q' + k^2 q = 0,

has a regular even power-series branch and a singular branch ~ s^(1-m) whose
energy diverges; tip resultants must vanish fast enough (or the tip must be
truncated at a cutoff) for bounded stress.  The eps-study quantifies how the
regular branch approaches its two-term expansion as the wavenumber is scaled
down, which is the reduced-model face of the outer wavelength correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .fitting import ScalingFit, fit_loglog


@dataclass(frozen=True)
class HornProblem:
    """Half-width amplitude B, sharpness exponent m > 1, wavenumber k, length ell."""

    B: float
    m: float
    k: float = 1.0
    ell: float = 1.0

    def __post_init__(self) -> None:
        if not self.B > 0:
            raise ValueError(f"need B > 0, got {self.B}")
        if not self.m > 1.0:
            raise ValueError(f"need m > 1, got {self.m}")
        if self.k < 0:
            raise ValueError(f"need k >= 0, got {self.k}")
        if not self.ell > 0:
            raise ValueError(f"need ell > 0, got {self.ell}")


@dataclass(frozen=True)
class TipResultants:
    """Sectional resultants carried to the tip: axial N0, shear Q0, flux moment H0."""

    N0: float = 0.0
    Q0: float = 0.0
    H0: float = 0.0


@dataclass(frozen=True)
class BranchScalings:
    """Power-law exponents in s of the named response quantities near the tip."""

    stress: float
    strain: float
    displacement: float
    energy: float


def section_properties(problem: HornProblem, s: float) -> tuple[float, float]:
    """Cross-section area 2 B s^m and bending moment (2/3) B^3 s^(3m)."""
    if s < 0:
        raise ValueError(f"need s >= 0, got {s}")
    area = 2.0 * problem.B * s**problem.m
    moment = (2.0 / 3.0) * problem.B**3 * s ** (3.0 * problem.m)
    return area, moment


def min_cutoff(problem: HornProblem, sigma_star: float, resultants: TipResultants) -> float:
    """Smallest truncation depth keeping section stresses below sigma_star.

    Axial and shear resultants each demand delta >= (|.| / (2 B sigma*))^(1/m);
    a pure flux moment (Q0 = 0) demands delta >= (3 |H0| / (2 B^2 sigma*))^(1/(2m)).
    With Q0 and H0 both nonzero the moment bound is implicit and not covered
    here.  All resultants zero: no truncation needed, returns 0.
    """
    if not sigma_star > 0:
        raise ValueError(f"need sigma_star > 0, got {sigma_star}")
    B, m = problem.B, problem.m
    bounds = [0.0]
    if resultants.N0 != 0.0:
        bounds.append((abs(resultants.N0) / (2.0 * B * sigma_star)) ** (1.0 / m))
    if resultants.Q0 != 0.0:
        bounds.append((abs(resultants.Q0) / (2.0 * B * sigma_star)) ** (1.0 / m))
    if resultants.H0 != 0.0:
        if resultants.Q0 != 0.0:
            raise ValueError("flux-moment bound only applies with Q0 = 0")
        bounds.append(
            (3.0 * abs(resultants.H0) / (2.0 * B**2 * sigma_star)) ** (1.0 / (2.0 * m))
        )
    return max(bounds)


def branch_scalings(problem: HornProblem, channel: str) -> BranchScalings:
    """Near-tip exponents of the singular branch for a load channel.

    force and shear channels share (-m, -m, 1-m, 1-m); the moment channel
    decays faster in stress but its displacement grows like s^(2-3m) with
    energy exponent 1-3m.
    """
    m = problem.m
    if channel in ("force", "shear"):
        return BranchScalings(stress=-m, strain=-m, displacement=1.0 - m, energy=1.0 - m)
    if channel == "moment":
        return BranchScalings(
            stress=-2.0 * m, strain=-2.0 * m, displacement=2.0 - 3.0 * m, energy=1.0 - 3.0 * m
        )
    raise ValueError(f"unknown channel {channel!r}")


def weighted_membership(problem: HornProblem, channel: str, beta: float) -> bool:
    """Whether the singular branch lies in the s^beta-weighted energy space.

    The weighted energy integral near the tip converges iff beta > m - 1 for
    the force/shear channels and beta > 3m - 1 for the moment channel.
    """
    m = problem.m
    if channel in ("force", "shear"):
        return beta > m - 1.0
    if channel == "moment":
        return beta > 3.0 * m - 1.0
    raise ValueError(f"unknown channel {channel!r}")


def flux(problem: HornProblem, s, qprime):
    """Axial flux A(s) q'(s), conserved along k = 0 solutions."""
    s = np.asarray(s, dtype=float)
    return 2.0 * problem.B * s**problem.m * np.asarray(qprime)


def regular_series(problem: HornProblem, eps: float, s, q0: float = 1.0, terms: int = 4):
    """Even power-series branch sum_j c_j s^(2j) with scaled wavenumber eps*k.

    The recurrence c_{j+1} = -(eps k)^2 c_j / ((2j+2)(2j+1+m)) follows from
    matching powers in the reduced equation.
    """
    if terms < 1:
        raise ValueError(f"need terms >= 1, got {terms}")
    s = np.asarray(s, dtype=float)
    ksq = (eps * problem.k) ** 2
    c = float(q0)
    total = np.full(s.shape, c)
    power = np.ones(s.shape)
    for j in range(terms - 1):
        c = -ksq * c / ((2.0 * j + 2.0) * (2.0 * j + 1.0 + problem.m))
        power = power * s * s
        total = total + c * power
    return total if total.shape else float(total)


def regular_series_derivative(
    problem: HornProblem, eps: float, s, q0: float = 1.0, terms: int = 4
):
    """Derivative of regular_series with matching truncation."""
    s = np.asarray(s, dtype=float)
    ksq = (eps * problem.k) ** 2
    c = float(q0)
    total = np.zeros(s.shape)
    for j in range(terms - 1):
        c = -ksq * c / ((2.0 * j + 2.0) * (2.0 * j + 1.0 + problem.m))
        total = total + c * (2.0 * j + 2.0) * s ** (2.0 * j + 1.0)
    return total if total.shape else float(total)


def first_correction(problem: HornProblem, eps: float, s, q0: float = 1.0):
    """Two-term expansion q0 (1 - (eps k)^2 s^2 / (2 (m+1)))."""
    return regular_series(problem, eps, s, q0=q0, terms=2)


def integrate_horn(
    problem: HornProblem,
    eps: float = 1.0,
    s_start: float = 1e-3,
    q0: float = 1.0,
    n_grid: int = 200,
    y0: tuple[float, float] | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the reduced equation from s_start to ell on a fixed grid.

    Initial data default to the four-term regular series at s_start (the
    equation is singular at s = 0, so the series carries the solution off the
    axis); pass y0 = (q, q') to follow another branch.  Returns (s, q, q')
    sampled on the uniform n_grid-point grid used by the eps-study.
    """
    if not 0.0 < s_start < problem.ell:
        raise ValueError(f"need 0 < s_start < ell, got {s_start}")
    if n_grid < 2:
        raise ValueError(f"need n_grid >= 2, got {n_grid}")
    kk = (eps * problem.k) ** 2
    m = problem.m

    def rhs(s: float, y: np.ndarray) -> list[float]:
        return [y[1], -(m / s) * y[1] - kk * y[0]]

    if y0 is None:
        y0 = (
            regular_series(problem, eps, s_start, q0=q0),
            regular_series_derivative(problem, eps, s_start, q0=q0),
        )
    grid = np.linspace(s_start, problem.ell, n_grid)
    sol = solve_ivp(
        rhs,
        (s_start, problem.ell),
        list(y0),
        method="DOP853",
        t_eval=grid,
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise ArithmeticError(f"horn integration failed: {sol.message}")
    return grid, sol.y[0], sol.y[1]


def eps_expansion_error(
    problem: HornProblem,
    eps_list,
    s_start: float = 1e-3,
    q0: float = 1.0,
    n_grid: int = 200,
) -> tuple[ScalingFit, list[tuple[float, float]]]:
    """Max deviation of the integrated branch from its two-term expansion.

    For each eps the equation is integrated with wavenumber eps*k and the
    worst-case error against first_correction on the shared grid is recorded;
    the log-log fit of error against eps exposes the quartic remainder.  The
    largest eps is dropped once if it sits more than 3 fit-RMS off the line
    (outside the asymptotic regime).
    """
    eps_arr = sorted(float(e) for e in eps_list)
    if len(eps_arr) < 4:
        raise ValueError(f"need at least 4 eps values, got {len(eps_arr)}")
    if eps_arr[0] <= 0:
        raise ValueError("eps values must be positive")
    table: list[tuple[float, float]] = []
    for eps in eps_arr:
        grid, q, _ = integrate_horn(problem, eps=eps, s_start=s_start, q0=q0, n_grid=n_grid)
        err = float(np.max(np.abs(q - first_correction(problem, eps, grid, q0=q0))))
        if err == 0.0:
            raise ValueError(f"zero expansion error at eps = {eps}; nothing to fit")
        table.append((eps, err))

    x = np.array([t[0] for t in table])
    y = np.array([t[1] for t in table])
    fit = fit_loglog(x, y, min_points=4)
    resid = np.log(y) - (fit.slope * np.log(x) + fit.intercept)
    rms = float(np.sqrt(np.mean(resid[:-1] ** 2)))
    if rms > 0 and abs(resid[-1]) > 3.0 * rms and len(table) > 4:
        fit = fit_loglog(x[:-1], y[:-1], min_points=4)
    return fit, table
