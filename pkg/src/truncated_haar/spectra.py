"""Empirical spectral measures and the statistics used to compare them with theory."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from truncated_haar.sampling import MODULUS_SLACK

EDGE_CLAMP = 1.0 - 1e-12
"""Atoms beyond this modulus are pulled radially back onto it."""

MAX_MOMENT_ORDER = 64
DEFAULT_GRID_SIZE = 512


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finitely many weighted atoms in the closed unit disc."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=complex))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or loc.ndim != 1 or loc.size == 0:
            raise ValueError("need a nonempty 1-d array of atoms with matching weights")
        if np.any(w <= 0):
            raise ValueError("atom weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")
        if np.any(np.abs(loc) > 1.0):
            raise ValueError("atoms must lie in the closed unit disc")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.locations.size

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.locations)

    def moment(self, k1: int, k2: int) -> complex:
        z = self.locations
        terms = self.weights * z**k1 * np.conj(z) ** k2
        return complex(math.fsum(terms.real), math.fsum(terms.imag))


@dataclass(frozen=True)
class RadialCdfTable:
    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.shape != v.shape or r.ndim != 1 or r.size == 0:
            raise ValueError("radii and values must be matching 1-d arrays")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] > 1:
            raise ValueError("radii must be increasing inside [0, 1]")
        if np.any(np.diff(v) < -1e-15):
            raise ValueError("CDF values must be nondecreasing")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)


def clamp_to_disc(eigs) -> np.ndarray:
    """Pull points of modulus above ``EDGE_CLAMP`` back onto that circle.

    Points further out than ``1 + MODULUS_SLACK`` are rejected rather than moved.
    """
    z = np.atleast_1d(np.asarray(eigs, dtype=complex))
    r = np.abs(z)
    if np.any(r > 1 + MODULUS_SLACK):
        raise ValueError(f"point of modulus {r.max():.17g} is outside the unit disc")
    out = z.copy()
    far = r > EDGE_CLAMP
    out[far] = z[far] / r[far] * EDGE_CLAMP
    return out


def empirical_measure(eigs) -> EmpiricalMeasure:
    """Uniform atomic measure on a list of eigenvalues (clamped to the disc)."""
    z = clamp_to_disc(eigs)
    if z.size == 0:
        raise ValueError("empty eigenvalue list")
    return EmpiricalMeasure(z, np.full(z.size, 1.0 / z.size))


def pooled_measure(spectra) -> EmpiricalMeasure:
    """Empirical measure of all eigenvalues of several draws taken together."""
    arrays = [np.atleast_1d(np.asarray(s, dtype=complex)) for s in spectra]
    if not arrays:
        raise ValueError("no spectra to pool")
    return empirical_measure(np.concatenate(arrays))


def default_grid(size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    return np.linspace(0.0, 1.0, size)


def radial_cdf_empirical(mu: EmpiricalMeasure, grid=None) -> RadialCdfTable:
    """Weight of atoms with modulus at most t, for each t on the grid."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid[-1] != 1.0:
        raise ValueError("radial grid must end at 1")
    order = np.argsort(mu.moduli)
    rs = mu.moduli[order]
    cum = np.concatenate([[0.0], np.cumsum(mu.weights[order])])
    idx = np.searchsorted(rs, grid, side="right")
    values = cum[idx]
    # the last grid point sees every atom; pin it so rounding in cumsum cannot leave it short of 1
    values[-1] = 1.0
    return RadialCdfTable(grid, np.minimum(values, 1.0))


def radial_cdf_table(cdf, grid=None) -> RadialCdfTable:
    """Tabulate a callable radial CDF on a grid."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    return RadialCdfTable(grid, np.asarray(cdf(grid), dtype=float))


def mixed_moment(mu, k1: int, k2: int) -> complex:
    """The integral of z**k1 * conj(z)**k2 against ``mu``.

    Works for any measure object with a ``moment`` method, which includes
    the radial measures of :mod:`truncated_haar.potential`.
    """
    if k1 < 0 or k2 < 0:
        raise ValueError("moment orders must be nonnegative")
    if k1 + k2 > MAX_MOMENT_ORDER:
        raise ValueError(f"k1 + k2 must not exceed {MAX_MOMENT_ORDER}")
    return mu.moment(int(k1), int(k2))


def moment_table(mu, max_order: int) -> dict[tuple[int, int], complex]:
    return {
        (k1, k2): mixed_moment(mu, k1, k2)
        for total in range(max_order + 1)
        for k1 in range(total + 1)
        for k2 in [total - k1]
    }


def moment_distance(mu1, mu2, max_order: int) -> float:
    """Largest mixed-moment gap over all orders k1 + k2 <= max_order."""
    if not 1 <= max_order <= MAX_MOMENT_ORDER:
        raise ValueError(f"max_order must lie in [1, {MAX_MOMENT_ORDER}]")
    t1 = moment_table(mu1, max_order)
    t2 = moment_table(mu2, max_order)
    return max(abs(t1[k] - t2[k]) for k in t1)


def kolmogorov_distance(a: RadialCdfTable, b: RadialCdfTable) -> float:
    if a.radii.shape != b.radii.shape or not np.array_equal(a.radii, b.radii):
        raise ValueError("CDF tables are on different grids")
    return float(np.max(np.abs(a.values - b.values)))
