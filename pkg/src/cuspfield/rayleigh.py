"""The flat-surface Rayleigh mode: depth profile, phasor, physical field.

The mode travels along the surface coordinate s with wavenumber q and decays
into the body along n >= 0.  Components are ordered (tangential, normal) =
(u, v).  The phasor convention is W0 = exp(i q s) Phi(n) with unit amplitude;
the physical displacement is (A W0 exp(-i omega t) + conjugate) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .material import ElasticModuli, WaveSpeeds, decay_rates, wave_speeds

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RayleighMode:
    """Surface mode of the traction-free half-space n >= 0."""

    moduli: ElasticModuli
    q: float = TWO_PI
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self) -> None:
        if not self.q > 0:
            raise ValueError(f"need q > 0, got {self.q}")

    @cached_property
    def speeds(self) -> WaveSpeeds:
        return wave_speeds(self.moduli)

    @cached_property
    def decay(self) -> tuple[float, float]:
        """Depth-decay pair (p, beta)."""
        return decay_rates(self.speeds)

    @property
    def p(self) -> float:
        return self.decay[0]

    @property
    def beta(self) -> float:
        return self.decay[1]

    @property
    def cb(self) -> float:
        """Shear admixture 2 p beta / (1 + beta^2) in the tangential component."""
        p, beta = self.decay
        return 2.0 * p * beta / (1.0 + beta * beta)

    @property
    def cv(self) -> float:
        """Shear admixture 2 p / (1 + beta^2) in the normal component."""
        p, beta = self.decay
        return 2.0 * p / (1.0 + beta * beta)

    @property
    def omega(self) -> float:
        """Angular frequency c_R q of the travelling mode."""
        return self.speeds.cR * self.q

    @property
    def energy_scale(self) -> float:
        """Frequency-squared mass scale rho c_R^2 q^2 of the eigenvalue problem."""
        return self.moduli.rho * self.speeds.cR**2 * self.q**2

    def profile(self, n):
        """Depth profile Phi(n) = (phi_u, phi_v), complex, decaying in n.

        phi_u = i (exp(-p q n) - cb exp(-beta q n)),
        phi_v = -p exp(-p q n) + cv exp(-beta q n).

        Accepts scalar or array n; returns shape (2,) or (2,) + n.shape.
        """
        n = np.asarray(n, dtype=float)
        p, beta = self.decay
        ep = np.exp(-p * self.q * n)
        eb = np.exp(-beta * self.q * n)
        phi_u = 1j * (ep - self.cb * eb)
        phi_v = -p * ep + self.cv * eb
        return np.stack([phi_u, phi_v])

    def profile_derivative(self, n):
        """d Phi / d n, same shape conventions as profile."""
        n = np.asarray(n, dtype=float)
        p, beta = self.decay
        ep = np.exp(-p * self.q * n)
        eb = np.exp(-beta * self.q * n)
        du = 1j * self.q * (-p * ep + self.cb * beta * eb)
        dv = p * p * self.q * ep - self.cv * beta * self.q * eb
        return np.stack([du, dv])

    def phasor(self, s, n):
        """Unit-amplitude travelling phasor W0 = exp(i q s) Phi(n)."""
        return np.exp(1j * self.q * np.asarray(s)) * self.profile(n)

    def physical_field(self, s, n, t: float = 0.0):
        """Real displacement (A W0 exp(-i omega t) + conj) / 2."""
        w = self.amplitude * np.exp(-1j * self.omega * t) * self.phasor(s, n)
        return w.real

    def boundary_residual(self) -> np.ndarray:
        """Surface traction of the phasor at n = 0, which must vanish.

        Components are (mu (u_n + v_s), lambda u_s + (lambda + 2 mu) v_n)
        with the common factor exp(i q s) dropped.
        """
        lam, mu = self.moduli.lam, self.moduli.mu
        phi = self.profile(0.0)
        dphi = self.profile_derivative(0.0)
        shear = mu * (dphi[0] + 1j * self.q * phi[1])
        normal = 1j * self.q * lam * phi[0] + (lam + 2.0 * mu) * dphi[1]
        return np.array([shear, normal])
