"""The limiting spectral law of truncated Haar unitaries and its QUQ counterpart.

For ``m/n -> lambda`` the eigenvalues fill the disc of radius
``1/sqrt(lambda)`` with density ``(lambda-1) r / (pi (1-r^2)^2)`` in the
coordinates ``dr dphi``. Three conventions appear in practice and each has
its own function here:

* :func:`limit_density` -- per ``dr dphi`` (as usually displayed),
* :func:`limit_area_density` -- per unit area ``dA = r dr dphi``,
* :func:`limit_radial_density` -- the radial marginal, per ``dr``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.stats import beta

from truncated_haar.potential import RadialMeasure


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    return lam


def edge_radius(lam: float) -> float:
    return 1.0 / math.sqrt(_check_lambda(lam))


def _radii(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise ValueError("radius must lie in [0, 1)")
    return r


def limit_density(r, lam: float):
    """Density of the limit law per ``dr dphi``; zero beyond the edge radius."""
    lam = _check_lambda(lam)
    r = _radii(r)
    value = (lam - 1) * r / (math.pi * (1 - r**2) ** 2)
    out = np.where(r <= edge_radius(lam), value, 0.0)
    return float(out) if out.ndim == 0 else out


def limit_area_density(r, lam: float):
    """Density of the limit law with respect to planar area."""
    lam = _check_lambda(lam)
    r = _radii(r)
    out = np.where(r <= edge_radius(lam), (lam - 1) / (math.pi * (1 - r**2) ** 2), 0.0)
    return float(out) if out.ndim == 0 else out


def limit_radial_density(r, lam: float):
    """Density of |z| under the limit law, 2 (lambda-1) r / (1-r^2)^2 on the support."""
    return 2 * math.pi * limit_density(r, lam)


def limit_radial_cdf(t, lam: float):
    """P(|z| <= t) under the limit law."""
    lam = _check_lambda(lam)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("t must lie in [0, 1]")
    inside = t < edge_radius(lam)
    safe = np.where(inside, t, 0.0)
    out = np.where(inside, (lam - 1) * safe**2 / (1 - safe**2), 1.0)
    out = np.minimum(out, 1.0)
    return float(out) if out.ndim == 0 else out


def sample_limit(lam: float, count: int, stream: np.random.Generator) -> np.ndarray:
    """I.i.d. draws from the limit law by inverting its radial CDF."""
    lam = _check_lambda(lam)
    if count < 1:
        raise ValueError("count must be positive")
    u = stream.random(count)
    phi = stream.random(count) * 2 * math.pi
    radius = np.sqrt(u / (lam - 1 + u))
    return radius * np.exp(1j * phi)


def theoretical_abs2_moment(lam: float) -> float:
    """E|z|^2 under the limit law, 1 + (lambda-1) log(1 - 1/lambda)."""
    lam = _check_lambda(lam)
    closed = 1 + (lam - 1) * math.log1p(-1 / lam)
    quad, _ = integrate.quad(
        lambda r: r**2 * 2 * (lam - 1) * r / (1 - r**2) ** 2, 0, edge_radius(lam), epsabs=1e-13, epsrel=1e-12
    )
    if abs(quad - closed) > 1e-10:
        raise ArithmeticError(f"E|z|^2 closed form {closed} disagrees with quadrature {quad}")
    return closed


@dataclass(frozen=True)
class LimitLaw:
    lam: float

    def __post_init__(self):
        _check_lambda(self.lam)

    @property
    def edge_radius(self) -> float:
        return edge_radius(self.lam)

    def density(self, r):
        return limit_density(r, self.lam)

    def radial_density(self, r):
        return limit_radial_density(r, self.lam)

    def radial_cdf(self, t):
        return limit_radial_cdf(t, self.lam)

    def sample(self, count: int, stream: np.random.Generator) -> np.ndarray:
        return sample_limit(self.lam, count, stream)

    def abs2_moment(self) -> float:
        return theoretical_abs2_moment(self.lam)

    def radial_measure(self, grid_size: int = 1024) -> RadialMeasure:
        """The law tabulated on ``grid_size`` equispaced radii spanning its support."""
        radii = np.linspace(0.0, self.edge_radius, grid_size)
        return RadialMeasure.from_density(radii, self.radial_density(radii), normalize=False)

    def moment(self, k1: int, k2: int) -> complex:
        if k1 != k2:
            return 0j
        if k1 == 0:
            return 1 + 0j
        value, _ = integrate.quad(
            lambda r: r ** (2 * k1) * 2 * (self.lam - 1) * r / (1 - r**2) ** 2, 0, self.edge_radius,
            epsabs=1e-13, epsrel=1e-12,
        )
        return complex(value)


@dataclass(frozen=True)
class BrownMixture:
    """An atom at the origin plus a rescaled copy of the limit law.

    This is the limiting spectral law of QUQ, where U is an m x m Haar
    unitary and Q a rank-n coordinate projection.
    """

    law: LimitLaw

    @property
    def continuous_mass(self) -> float:
        return 1.0 / self.law.lam

    @property
    def atom_mass(self) -> float:
        return 1.0 - self.continuous_mass

    def continuous_density(self, r):
        """Per ``dr dphi`` density of the absolutely continuous part."""
        return self.continuous_mass * self.law.density(r)

    def radial_cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self.atom_mass + self.continuous_mass * self.law.radial_cdf(t), 0.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, count: int, stream: np.random.Generator) -> np.ndarray:
        atoms = stream.random(count) < self.atom_mass
        z = self.law.sample(count, stream)
        z[atoms] = 0
        return z

    def moment(self, k1: int, k2: int) -> complex:
        if k1 == 0 and k2 == 0:
            return 1 + 0j
        return self.continuous_mass * self.law.moment(k1, k2)


def brown_mixture(lam: float) -> BrownMixture:
    return BrownMixture(LimitLaw(lam))


def finite_radial_cdf(t, m: int, n: int):
    """Expected radial CDF of the spectrum of one n x n truncation, for finite m, n.

    The squared moduli of the eigenvalues are distributed like independent
    Beta(k + 1, m - n) variables, k = 0, ..., n - 1, so the mean radial CDF
    is the average of those Beta CDFs evaluated at t**2.
    """
    if n < 1 or m <= n:
        raise ValueError(f"need m > n >= 1, got m={m}, n={n}")
    t = np.asarray(t, dtype=float)
    k = np.arange(n)[:, None]
    out = beta.cdf(np.atleast_1d(t)[None, :] ** 2, k + 1, m - n).mean(axis=0)
    return float(out[0]) if t.ndim == 0 else out
