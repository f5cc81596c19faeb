"""Logarithmic energies, the rate function and radial equilibrium problems.

Rotation-invariant measures on the unit disc are stored by their radial
density ``rho`` with respect to ``dr``; the planar measure is
``rho(r) / (2 pi) dr dphi``. A tabulated density is taken to vanish
outside ``[radii[0], radii[-1]]``, so the grid of a measure is also its
support.

Energies of radial measures use the circle-average identity

    (1/2pi) \\int_0^{2pi} log|z - s e^{i phi}| dphi = log max(|z|, s),

which turns the double integral of log|z - w| into a double integral of
``log max(r, s)`` over radii. On a quadrature grid the node masses ``a_i``
enter through

    sum_ij a_i b_j x_max(i,j) = x_N A B - sum_l (x_{l+1} - x_l) P_l Q_l

with ``x = log r`` sorted, and ``P``, ``Q`` the running sums of ``a``,
``b``. The right side costs O(G) and is manifestly <= 0 whenever the total
charge vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate
from scipy.special import gammaln

from truncated_haar.spectra import EmpiricalMeasure

MASS_TOL = 1e-8
EDGE_CUTOFF = 1.0 - 1e-3
"""Energies are evaluated on the measure restricted to ``|z| <= EDGE_CUTOFF``."""
SINGULAR_EDGE = 1.0 - 1e-15
LAMBDA_FLOOR = 1.0 + 1e-6
B_CROSSCHECK_TOL = 1e-6


class ConditionsNotMet(ValueError):
    """A radial weight fails the hypotheses of the equilibrium solver."""


def quadrature_weights(radii: np.ndarray) -> np.ndarray:
    """Quadrature weights for a 1-d grid.

    Uniform grids with at least 8 nodes get the end-corrected trapezoid
    rule (Gregory weights 3/8, 7/6, 23/24), exact for cubics; any other
    grid gets the plain trapezoid rule.
    """
    r = np.asarray(radii, dtype=float)
    if r.size < 2:
        raise ValueError("need at least two grid points")
    h = np.diff(r)
    if r.size >= 8 and np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        step = (r[-1] - r[0]) / (r.size - 1)
        w = np.full(r.size, step)
        ends = np.array([3 / 8, 7 / 6, 23 / 24]) * step
        w[:3] = ends
        w[-3:] = ends[::-1]
        return w
    w = np.zeros(r.size)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


@dataclass(frozen=True, eq=False)
class RadialMeasure:
    """Rotation-invariant probability measure given by a tabulated radial density."""

    radii: np.ndarray
    density: np.ndarray
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        rho = np.asarray(self.density, dtype=float)
        if r.ndim != 1 or r.shape != rho.shape:
            raise ValueError("radii and density must be matching 1-d arrays")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] > 1:
            raise ValueError("radii must be strictly increasing inside [0, 1]")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise ValueError("density must be finite and nonnegative")
        w = quadrature_weights(r)
        mass = float(np.dot(w, rho))
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"radial density has mass {mass:.12g}, expected 1")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "density", rho)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_density(cls, radii, density, normalize: bool = True) -> RadialMeasure:
        radii = np.asarray(radii, dtype=float)
        density = np.asarray(density, dtype=float)
        if normalize:
            mass = float(np.dot(quadrature_weights(radii), density))
            if not mass > 0:
                raise ValueError("density has no mass")
            density = density / mass
        return cls(radii, density)

    @classmethod
    def from_function(cls, fn, r_lo: float, r_hi: float, size: int, normalize: bool = True):
        """Tabulate ``fn`` on ``size`` equispaced radii in ``[r_lo, r_hi]``."""
        radii = np.linspace(r_lo, r_hi, size)
        return cls.from_density(radii, fn(radii), normalize=normalize)

    @property
    def node_masses(self) -> np.ndarray:
        return self.weights * self.density

    @property
    def mass(self) -> float:
        return float(np.dot(self.weights, self.density))

    def moment(self, k1: int, k2: int) -> complex:
        if k1 != k2:
            return 0j
        a = self.node_masses
        return complex(math.fsum(a * self.radii ** (2 * k1)) / math.fsum(a))

    def expect(self, fn) -> float:
        """Integral of a radial function against the measure."""
        return float(np.dot(self.node_masses, fn(self.radii)) / self.mass)


def mixture(mu1: RadialMeasure, mu2: RadialMeasure, t: float = 0.5) -> RadialMeasure:
    """The convex combination ``(1 - t) mu1 + t mu2`` of measures on one grid."""
    if not np.array_equal(mu1.radii, mu2.radii):
        raise ValueError("mixtures need measures on the same grid")
    return RadialMeasure(mu1.radii, (1 - t) * mu1.density + t * mu2.density)


def restrict(mu: RadialMeasure, r_max: float = EDGE_CUTOFF) -> tuple[RadialMeasure, float]:
    """Condition ``mu`` on ``{|z| <= r_max}``; also return the mass cut off."""
    if mu.radii[-1] <= r_max:
        return mu, 0.0
    inside = mu.radii < r_max
    if inside.sum() < 1:
        raise ValueError(f"measure has no mass inside radius {r_max}")
    radii = np.append(mu.radii[inside], r_max)
    density = np.append(mu.density[inside], np.interp(r_max, mu.radii, mu.density))
    w = quadrature_weights(radii)
    kept = float(np.dot(w, density))
    if not kept > 0:
        raise ValueError(f"measure has no mass inside radius {r_max}")
    return RadialMeasure(radii, density / kept), max(0.0, 1.0 - kept)


# ---------------------------------------------------------------------------
# energies


def _log_radii(radii: np.ndarray) -> np.ndarray:
    """log r on a sorted grid, with the origin replaced by a finite value.

    A node at r = 0 carries the mass of the tiny disc around the origin;
    its self-interaction is the mean of log max(r, s) over [0, c]^2, which
    is log c - 1/2, with c taken as half the first positive radius.
    """
    x = np.empty(radii.size)
    pos = radii > 0
    x[pos] = np.log(radii[pos])
    if not pos.all():
        first = radii[pos][0] if pos.any() else 1.0
        x[~pos] = math.log(first / 2) - 0.5
    return x


def _merged(mu1: RadialMeasure, mu2: RadialMeasure):
    radii, inverse = np.unique(np.concatenate([mu1.radii, mu2.radii]), return_inverse=True)
    a = np.zeros(radii.size)
    b = np.zeros(radii.size)
    k = mu1.radii.size
    np.add.at(a, inverse[:k], mu1.node_masses / mu1.mass)
    np.add.at(b, inverse[k:], mu2.node_masses / mu2.mass)
    return radii, a, b


def _log_max_form(radii: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    x = _log_radii(radii)
    pa = np.cumsum(a)
    pb = np.cumsum(b)
    gaps = np.diff(x)
    return float(x[-1] * pa[-1] * pb[-1] - np.dot(gaps, pa[:-1] * pb[:-1]))


def log_energy_pair(mu1: RadialMeasure, mu2: RadialMeasure) -> float:
    """The mixed energy, the integral of log|z - w| d mu1(z) d mu2(w)."""
    return _log_max_form(*_merged(mu1, mu2))


def log_energy_radial(mu: RadialMeasure) -> float:
    """The integral of log|z - w| d mu(z) d mu(w) for a radial measure."""
    a = mu.node_masses / mu.mass
    return _log_max_form(mu.radii, a, a)


def signed_energy(mu1: RadialMeasure, mu2: RadialMeasure) -> float:
    """Energy of the zero-mass signed measure ``mu1 - mu2``.

    Nonpositive by construction, and zero only when the two tables describe
    the same node masses.
    """
    radii, a, b = _merged(mu1, mu2)
    nu = a - b
    return _log_max_form(radii, nu, nu)


def _pairwise_log_abs(z: np.ndarray, block: int = 512):
    """Yield row blocks of log|z_i - z_j| with the diagonal set to 0."""
    for start in range(0, z.size, block):
        rows = z[start:start + block]
        with np.errstate(divide="ignore"):
            d = np.log(np.abs(rows[:, None] - z[None, :]))
        idx = np.arange(rows.size)
        d[idx, start + idx] = 0.0
        yield start, d


def log_energy_discrete(mu: EmpiricalMeasure) -> float:
    """Off-diagonal log energy of an atomic measure; ``-inf`` on coincident atoms."""
    if len(mu) < 2:
        raise ValueError("discrete energy needs at least two atoms")
    z, w = mu.locations, mu.weights
    total = 0.0
    for start, d in _pairwise_log_abs(z):
        rows = w[start:start + d.shape[0]]
        if np.isneginf(d).any():
            return -math.inf
        total += float(rows @ d @ w)
    return total


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 1:
        raise ValueError(f"lambda must exceed 1, got {lam}")
    return lam


def weighted_term(mu, lam: float) -> float:
    """-(lambda - 1) times the integral of log(1 - |z|^2); always >= 0."""
    lam = _check_lambda(lam)
    if isinstance(mu, EmpiricalMeasure):
        r, w = mu.moduli, mu.weights
    else:
        r, w = mu.radii, mu.node_masses / mu.mass
    carrying = w > 0
    if np.any(r[carrying] >= SINGULAR_EDGE):
        raise ValueError("measure puts mass on the unit circle; the weight is singular there")
    return float(-(lam - 1) * np.dot(w, np.log1p(-(r**2))))


# ---------------------------------------------------------------------------
# constants


def _b_closed(lam: float) -> float:
    return (
        -lam**2 * math.log(lam) / 2
        + lam**2 * math.log(lam - 1) / 2
        - math.log(lam - 1) / 2
        + (lam - 1) / 2
    )


def constant_b_quadrature(lam: float) -> float:
    """-int_0^1 (1 - x) log((lambda - 1 + x) / x) dx by adaptive quadrature."""
    lam = _check_lambda(lam)
    # split log((l-1+x)/x) so the endpoint singularity is handled by the log weight
    smooth, _ = integrate.quad(lambda x: (1 - x) * math.log(lam - 1 + x), 0, 1, epsabs=1e-14, epsrel=1e-13)
    singular, _ = integrate.quad(lambda x: 1 - x, 0, 1, weight="alg-loga", wvar=(0, 0), epsabs=1e-14)
    return -(smooth - singular)


@lru_cache(maxsize=256)
def constant_B(lam: float) -> float:
    """Limit of log(C_[m,n]) / n^2 as m/n -> lambda.

    Computed from the closed form and checked against the integral
    representation; a disagreement above 1e-6 raises.
    """
    lam = _check_lambda(lam)
    if lam < LAMBDA_FLOOR:
        raise ValueError(f"B(lambda) diverges as lambda -> 1; need lambda >= {LAMBDA_FLOOR}")
    closed = _b_closed(lam)
    quad = constant_b_quadrature(lam)
    if abs(closed - quad) > B_CROSSCHECK_TOL:
        raise ArithmeticError(f"B({lam}) closed form {closed} disagrees with quadrature {quad}")
    return closed


def log_normalizing_constant(m: int, n: int) -> float:
    """log C_[m,n] for the joint eigenvalue density of an n x n truncation."""
    if n < 1 or m <= n:
        raise ValueError(f"need m > n >= 1, got m={m}, n={n}")
    j = np.arange(n, dtype=float)
    a = m - n + j - 1
    log_binom = gammaln(a + 1) - gammaln(j + 1) - gammaln(a - j + 1)
    return float(n * math.log(math.pi) + gammaln(n + 1) - math.fsum(log_binom + np.log(m - n + j)))


def joint_log_density(eigs, m: int, n: int) -> float:
    """Log of the joint eigenvalue density of the n x n truncation."""
    z = np.atleast_1d(np.asarray(eigs, dtype=complex))
    if z.size != n:
        raise ValueError(f"expected {n} eigenvalues, got {z.size}")
    r2 = np.abs(z) ** 2
    if np.any(r2 > 1):
        raise ValueError("eigenvalues must lie in the closed unit disc")
    exponent = m - n - 1
    log_c = log_normalizing_constant(m, n)
    if exponent > 0:
        if np.any(r2 >= 1):
            return -math.inf
        edge = exponent * float(np.sum(np.log1p(-r2)))
    else:
        edge = 0.0
    iu = np.triu_indices(n, k=1)
    gaps = np.abs(z[iu[0]] - z[iu[1]])
    if np.any(gaps == 0):
        return -math.inf
    return 2 * float(np.sum(np.log(gaps))) + edge - log_c


# ---------------------------------------------------------------------------
# rate function


@dataclass(frozen=True)
class RateReport:
    """Terms of the rate function; ``total`` is their sum."""

    sigma_term: float
    weight_term: float
    constant_b: float
    total: float
    clamp_alpha: float = math.inf
    mass_beyond_cutoff: float = 0.0

    @classmethod
    def assemble(cls, sigma_term, weight_term, constant_b, clamp_alpha=math.inf, mass_beyond_cutoff=0.0):
        total = sigma_term + weight_term + constant_b
        return cls(sigma_term, weight_term, constant_b, total, clamp_alpha, mass_beyond_cutoff)


def _edge_shift(r: np.ndarray, lam: float) -> np.ndarray:
    return -(lam - 1) / 2 * np.log1p(-(r**2))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)
_GL_U = (_GL_NODES + 1) / 2
_GL_W = _GL_WEIGHTS / 2


def _clamp_excess(r: np.ndarray, s: np.ndarray, log_eps: np.ndarray) -> np.ndarray:
    """Angular mean of max(0, log eps - log|r - s e^{i theta}|) for r, s > 0."""
    cos_star = (r**2 + s**2 - np.exp(2 * log_eps)) / (2 * r * s)
    theta_star = np.arccos(np.clip(cos_star, -1.0, 1.0))
    # theta = theta_star * u^2 tames the log singularity at theta = 0 when r = s
    theta = theta_star[:, None] * _GL_U[None, :] ** 2
    d2 = (r - s)[:, None] ** 2 + 2 * (r * s)[:, None] * (1 - np.cos(theta))
    with np.errstate(divide="ignore"):
        integrand = np.maximum(log_eps[:, None] - 0.5 * np.log(d2), 0.0)
    integrand[~np.isfinite(integrand)] = 0.0
    jac = 2 * theta_star[:, None] * _GL_U[None, :]
    return np.sum(integrand * jac * _GL_W[None, :], axis=1) / math.pi


def _clamped_radial_pair_sum(mu: RadialMeasure, lam: float, alpha: float) -> float:
    """Double integral of min(F, alpha) for a radial measure, F the pair kernel."""
    r = mu.radii
    a = mu.node_masses / mu.mass
    x = _log_radii(r)
    shift = _edge_shift(r, lam)
    unclamped = -_log_max_form(r, a, a) + 2 * float(np.dot(a, shift))

    i, j = np.triu_indices(r.size)
    c = shift[i] + shift[j]
    # F(z, w) > alpha somewhere on the pair of circles iff |r - s| < exp(c - alpha)
    log_eps = c - alpha
    with np.errstate(divide="ignore"):
        near = np.log(np.abs(r[i] - r[j])) < log_eps
    i, j, log_eps = i[near], j[near], log_eps[near]
    excess = np.zeros(i.size)
    origin = (r[i] == 0) & (r[j] == 0)
    axis = ((r[i] == 0) | (r[j] == 0)) & ~origin
    generic = ~(origin | axis)
    excess[origin] = np.maximum(log_eps[origin] + 0.0 - x[i][origin], 0.0)
    excess[axis] = np.maximum(log_eps[axis] - np.log(np.maximum(r[i], r[j])[axis]), 0.0)
    if generic.any():
        excess[generic] = _clamp_excess(r[i][generic], r[j][generic], log_eps[generic])
    pair_w = a[i] * a[j] * np.where(i == j, 1.0, 2.0)
    return unclamped - float(np.dot(pair_w, excess))


def _clamped_discrete_pair_sum(mu: EmpiricalMeasure, lam: float, alpha: float) -> float:
    z, w = mu.locations, mu.weights
    shift = _edge_shift(mu.moduli, lam)
    total = 0.0
    for start, d in _pairwise_log_abs(z):
        rows = slice(start, start + d.shape[0])
        kernel = -d + shift[rows, None] + shift[None, :]
        idx = np.arange(d.shape[0])
        kernel[idx, start + idx] = np.inf
        total += float(w[rows] @ np.minimum(kernel, alpha) @ w)
    return total


def rate_function(mu, lam: float, clamp_alpha: float | None = None) -> RateReport:
    """Rate function of the truncated-unitary spectral measure at ``mu``.

    ``mu`` is first restricted to radii at most ``EDGE_CUTOFF`` (the mass
    removed is reported). Without a clamp the energy of an atomic measure
    is its off-diagonal sum. With ``clamp_alpha`` the full pair kernel
    ``F(z, w) = -log|z - w| - (lambda-1)/2 (log(1-|z|^2) + log(1-|w|^2))``
    is capped at alpha before integrating, diagonal included.
    """
    lam = _check_lambda(lam)
    b = constant_B(lam)
    alpha = math.inf if clamp_alpha is None else float(clamp_alpha)
    if isinstance(mu, EmpiricalMeasure):
        keep = mu.moduli <= EDGE_CUTOFF
        beyond = float(mu.weights[~keep].sum())
        if keep.sum() < 2:
            raise ValueError("measure has fewer than two atoms inside the edge cutoff")
        if beyond > 0:
            w = mu.weights[keep]
            mu = EmpiricalMeasure(mu.locations[keep], w / w.sum())
        weight = weighted_term(mu, lam)
        if math.isinf(alpha):
            energy = log_energy_discrete(mu)
            if math.isinf(energy):
                return RateReport.assemble(math.inf, weight, b, alpha, beyond)
            return RateReport.assemble(-energy, weight, b, alpha, beyond)
        pair_sum = _clamped_discrete_pair_sum(mu, lam, alpha)
    else:
        mu, beyond = restrict(mu)
        weight = weighted_term(mu, lam)
        if math.isinf(alpha):
            return RateReport.assemble(-log_energy_radial(mu), weight, b, alpha, beyond)
        pair_sum = _clamped_radial_pair_sum(mu, lam, alpha)
    return RateReport.assemble(pair_sum - weight, weight, b, alpha, beyond)


# ---------------------------------------------------------------------------
# equilibrium problems


class RadialWeight:
    """External field Q(|z|) on the unit disc.

    Subclasses provide ``q(r)``, ``r_dq(r)`` (the product r Q'(r)) and
    ``density(r)`` (the derivative of r Q'(r)), plus the interval on which
    they are defined.
    """

    r_max: float = 1.0 - 1e-9

    def check(self):
        pass

    def q(self, r):
        raise NotImplementedError

    def r_dq(self, r):
        raise NotImplementedError

    def density(self, r):
        raise NotImplementedError


@dataclass(frozen=True)
class LogWeight(RadialWeight):
    """Q(z) = -(lambda - 1)/2 log(1 - |z|^2), the field of the truncated ensemble."""

    lam: float

    def __post_init__(self):
        _check_lambda(self.lam)

    def q(self, r):
        return _edge_shift(np.asarray(r, dtype=float), self.lam)

    def r_dq(self, r):
        r = np.asarray(r, dtype=float)
        return (self.lam - 1) * r**2 / (1 - r**2)

    def density(self, r):
        r = np.asarray(r, dtype=float)
        return 2 * (self.lam - 1) * r / (1 - r**2) ** 2


@dataclass(frozen=True, eq=False)
class TabulatedWeight(RadialWeight):
    """A radial field given by tables of Q and Q' on a grid in [0, 1)."""

    radii: np.ndarray
    q_values: np.ndarray
    dq_values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        q = np.asarray(self.q_values, dtype=float)
        dq = np.asarray(self.dq_values, dtype=float)
        if not (r.ndim == 1 and r.shape == q.shape == dq.shape and r.size >= 3):
            raise ValueError("weight tables must be matching 1-d arrays of length >= 3")
        if np.any(np.diff(r) <= 0) or r[0] < 0 or r[-1] >= 1:
            raise ValueError("weight grid must be strictly increasing inside [0, 1)")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "q_values", q)
        object.__setattr__(self, "dq_values", dq)

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def check(self):
        rdq = self.radii * self.dq_values
        steps = np.diff(rdq)
        scale = max(1.0, float(np.max(np.abs(rdq))))
        bad = np.flatnonzero(steps < -1e-12 * scale)
        if bad.size:
            at = self.radii[bad[0]]
            raise ConditionsNotMet(f"r Q'(r) is not increasing (decreases after r = {at:.6g})")
        if rdq[-1] < 1:
            raise ConditionsNotMet("r Q'(r) never reaches 1 on the table, so the support edge is undefined")

    def q(self, r):
        return np.interp(r, self.radii, self.q_values)

    def r_dq(self, r):
        return np.interp(r, self.radii, self.radii * self.dq_values)

    def density(self, r):
        slope = np.gradient(self.radii * self.dq_values, self.radii)
        return np.maximum(np.interp(r, self.radii, slope), 0.0)


def _bisect(predicate, lo: float, hi: float, tol: float) -> float:
    """Boundary of a monotone predicate that is False at lo and True at hi."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FrostmanCertificate:
    """Values of U^sigma + Q against their constant on the support."""

    frostman_constant: float
    max_residual_on_support: float
    min_slack_off_support: float
    tol_support: float

    @property
    def passed(self) -> bool:
        return self.max_residual_on_support <= self.tol_support and self.min_slack_off_support >= -self.tol_support


@dataclass(frozen=True)
class EquilibriumResult:
    r0: float
    R0: float
    density: RadialMeasure
    frostman_constant: float
    max_residual_on_support: float
    min_slack_off_support: float
    mass_defect: float = 0.0


def log_potential(mu: RadialMeasure, t) -> np.ndarray:
    """U^mu(t) = -int log max(t, r) d mu(r) for radii t >= 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    r, rho = mu.radii, mu.density / mu.mass
    with np.errstate(divide="ignore", invalid="ignore"):
        rho_log = np.where(rho > 0, rho * np.log(np.where(r > 0, r, 1.0)), 0.0)
    if r.size >= 3:
        cum_mass = integrate.cumulative_simpson(rho, x=r, initial=0.0)
        cum_log = integrate.cumulative_simpson(rho_log, x=r, initial=0.0)
    else:
        cum_mass = integrate.cumulative_trapezoid(rho, x=r, initial=0.0)
        cum_log = integrate.cumulative_trapezoid(rho_log, x=r, initial=0.0)
    mass_at = interpolate.CubicSpline(r, cum_mass)
    log_at = interpolate.CubicSpline(r, cum_log)
    lo, hi = r[0], r[-1]
    total_mass, total_log = cum_mass[-1], cum_log[-1]
    out = np.empty(t.size)
    below = t <= lo
    above = t >= hi
    mid = ~(below | above)
    out[below] = -total_log
    with np.errstate(divide="ignore"):
        out[above] = -np.log(t[above]) * total_mass
    tm = t[mid]
    out[mid] = -(np.log(tm) * mass_at(tm) + (total_log - log_at(tm)))
    return out


def default_certificate_grid(size: int = 4096) -> np.ndarray:
    return np.linspace(0.0, EDGE_CUTOFF, size)


def _frostman(mu: RadialMeasure, r0: float, R0: float, weight: RadialWeight, grid, tol_support: float):
    grid = np.asarray(grid, dtype=float)
    values = log_potential(mu, grid) + weight.q(grid)
    on = (grid >= r0) & (grid <= R0)
    if not on.any():
        raise ValueError("certificate grid has no points on the support")
    const = float(np.mean(values[on]))
    residual = float(np.max(np.abs(values[on] - const)))
    slack = float(np.min(values[~on] - const)) if (~on).any() else math.inf
    return FrostmanCertificate(const, residual, slack, tol_support)


def verify_equilibrium(sigma: EquilibriumResult, weight: RadialWeight, grid=None, tol_support: float = 1e-6) -> FrostmanCertificate:
    """Check that U^sigma + Q is constant on the support and no smaller off it."""
    grid = default_certificate_grid() if grid is None else grid
    return _frostman(sigma.density, sigma.r0, sigma.R0, weight, grid, tol_support)


def equilibrium_measure(weight: RadialWeight, tol: float = 1e-12, grid_size: int = 4096,
                        certificate_grid=None, tol_support: float = 1e-6) -> EquilibriumResult:
    """Equilibrium measure of a radial field with r Q'(r) increasing.

    The support is the annulus r0 <= |z| <= R0, where r0 is where Q'
    turns positive and R0 solves R0 Q'(R0) = 1; both come from bisection
    to within ``tol``. On it the radial density is (r Q'(r))'.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    weight.check()
    hi = weight.r_max
    if weight.r_dq(hi) < 1:
        raise ConditionsNotMet("r Q'(r) stays below 1, so the support edge is undefined")
    start = min(tol, hi / 2)
    if weight.r_dq(start) > 0:
        r0 = 0.0
    else:
        r0 = _bisect(lambda r: weight.r_dq(r) > 0, 0.0, hi, tol)
    R0 = _bisect(lambda r: weight.r_dq(r) >= 1, r0 + tol, hi, tol)
    if not 0 <= r0 < R0 < 1:
        raise ConditionsNotMet(f"degenerate support [{r0}, {R0}]")

    radii = np.linspace(r0, R0, grid_size)
    rho = np.asarray(weight.density(radii), dtype=float)
    mass = float(np.dot(quadrature_weights(radii), rho))
    defect = mass - 1.0
    if abs(defect) > max(10 * tol, MASS_TOL):
        rho = rho / mass
    density = RadialMeasure(radii, rho)
    grid = default_certificate_grid() if certificate_grid is None else certificate_grid
    cert = _frostman(density, r0, R0, weight, grid, tol_support)
    return EquilibriumResult(r0, R0, density, cert.frostman_constant, cert.max_residual_on_support,
                             cert.min_slack_off_support, defect)


def with_density(result: EquilibriumResult, density: RadialMeasure) -> EquilibriumResult:
    """Same support record with a different density table (for perturbation checks)."""
    return replace(result, density=density)
