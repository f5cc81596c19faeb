import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from truncated_haar.limit_law import (
    BrownMixture,
    LimitLaw,
    brown_mixture,
    finite_radial_cdf,
    limit_area_density,
    limit_density,
    limit_radial_cdf,
    limit_radial_density,
    sample_limit,
    theoretical_abs2_moment,
)
from truncated_haar.potential import LogWeight, equilibrium_measure
from truncated_haar.sampling import EnsembleConfig, batch_spectra, substream
from truncated_haar.spectra import pooled_measure

lambdas = st.floats(1.001, 50)


class TestDensity:
    def test_origin(self):
        assert limit_density(0.0, 3) == 0

    def test_edge_value(self):
        assert limit_density(1 / math.sqrt(2), 2) == pytest.approx(4 / (math.sqrt(2) * math.pi), rel=1e-12)

    def test_outside_support(self):
        assert limit_density(0.9, 2) == 0

    def test_domain(self):
        with pytest.raises(ValueError):
            limit_density(1.0, 2)
        with pytest.raises(ValueError):
            limit_density(0.5, 1.0)

    def test_conventions(self):
        r = np.linspace(0.01, 0.7, 50)
        assert np.allclose(limit_area_density(r, 2) * r, limit_density(r, 2))
        assert np.allclose(limit_radial_density(r, 2), 2 * r / (1 - r**2) ** 2)

    @pytest.mark.parametrize("lam", [1.5, 2, 4])
    def test_unit_mass(self, lam):
        mass, _ = integrate.quad(lambda r: limit_radial_density(r, lam), 0, 1 / math.sqrt(lam))
        assert mass == pytest.approx(1, abs=1e-12)


class TestCdf:
    def test_values(self):
        assert limit_radial_cdf(1 / math.sqrt(3), 3) == pytest.approx(1)
        assert limit_radial_cdf(0.5, 2) == pytest.approx(1 / 3)
        assert limit_radial_cdf(0.0, 2) == 0
        assert limit_radial_cdf(1.0, 2) == 1

    @given(lam=lambdas)
    def test_monotone(self, lam):
        t = np.linspace(0, 1, 300)
        assert np.all(np.diff(limit_radial_cdf(t, lam)) >= 0)

    @pytest.mark.parametrize("lam", [1.5, 2, 4])
    def test_derivative_matches_density(self, lam):
        edge = 1 / math.sqrt(lam)
        r = np.linspace(0, edge, 1024)[1:-1]
        h = 1e-6
        deriv = (limit_radial_cdf(r + h, lam) - limit_radial_cdf(r - h, lam)) / (2 * h)
        assert np.max(np.abs(deriv - 2 * math.pi * limit_density(r, lam))) <= 1e-6 * max(1, lam)


class TestSampler:
    def test_support(self):
        z = sample_limit(3, 10_000, substream(1, 0))
        assert np.max(np.abs(z)) <= 1 / math.sqrt(3) + 1e-12

    def test_moments(self):
        z = sample_limit(2, 100_000, substream(2, 0))
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1 + math.log(0.5), abs=0.01)
        assert abs(z.mean()) <= 0.01

    @pytest.mark.parametrize("lam", [1.5, 2, 4])
    def test_ks(self, lam):
        z = sample_limit(lam, 100_000, substream(3, int(lam * 10)))
        assert stats.kstest(np.abs(z), lambda t: limit_radial_cdf(np.clip(t, 0, 1), lam)).statistic <= 0.01

    def test_deterministic(self):
        assert np.array_equal(sample_limit(2, 5, substream(4, 0)), sample_limit(2, 5, substream(4, 0)))


class TestAbs2Moment:
    def test_lambda_two(self):
        assert theoretical_abs2_moment(2) == pytest.approx(0.306853, abs=1e-6)

    def test_quadrature(self):
        for lam in [1.2, 2, 7]:
            quad, _ = integrate.quad(lambda r: r**3 * 2 * (lam - 1) / (1 - r**2) ** 2, 0, 1 / math.sqrt(lam))
            assert theoretical_abs2_moment(lam) == pytest.approx(quad, abs=1e-10)

    def test_extremes(self):
        assert theoretical_abs2_moment(100) < 0.01
        assert theoretical_abs2_moment(1.001) > 0.95

    def test_law_moments(self):
        law = LimitLaw(2)
        assert law.moment(1, 1).real == pytest.approx(theoretical_abs2_moment(2), abs=1e-12)
        assert law.moment(2, 1) == 0 and law.moment(0, 0) == 1


class TestBrownMixture:
    def test_atom(self):
        assert brown_mixture(2).atom_mass == 0.5
        assert brown_mixture(1e9).atom_mass == pytest.approx(1, abs=1e-8)

    @given(lam=st.floats(1.0001, 1e6))
    def test_masses_sum_to_one(self, lam):
        mix = brown_mixture(lam)
        assert mix.atom_mass + mix.continuous_mass == 1

    @given(lam=lambdas)
    def test_cdf(self, lam):
        mix = brown_mixture(lam)
        t = np.linspace(0, 1, 200)
        cdf = mix.radial_cdf(t)
        assert np.all(np.diff(cdf) >= 0)
        assert cdf[0] == pytest.approx(1 - 1 / lam)
        assert cdf[-1] == pytest.approx(1)
        assert mix.radial_cdf(0.3) == pytest.approx((1 - 1 / lam) + limit_radial_cdf(0.3, lam) / lam)

    def test_continuous_density(self):
        mix = brown_mixture(2)
        r = 0.4
        assert mix.continuous_density(r) == pytest.approx(r / (2 * math.pi * (1 - r**2) ** 2))

    def test_projection_spectra_have_the_atom(self):
        spectra = batch_spectra(EnsembleConfig(10, 5, 30, 9), kind="projection")
        for eigs in spectra:
            assert np.sum(np.abs(eigs) <= 1e-8) == 5

    def test_sampler(self):
        z = brown_mixture(2).sample(20_000, substream(6, 0))
        assert np.mean(z == 0) == pytest.approx(0.5, abs=0.02)


def test_equilibrium_reproduces_limit_density():
    for lam in [1.5, 2, 4]:
        res = equilibrium_measure(LogWeight(lam))
        r = res.density.radii[res.density.radii < 1 / math.sqrt(lam)]
        rho = res.density.density[: r.size]
        assert np.max(np.abs(rho - limit_radial_density(r, lam))) <= 1e-8


class TestFiniteSize:
    def test_matches_simulation(self):
        grid = np.linspace(0, 1, 257)
        mu = pooled_measure(batch_spectra(EnsembleConfig(40, 20, 400, 2)))
        emp = np.searchsorted(np.sort(mu.moduli), grid, side="right") / len(mu)
        assert np.max(np.abs(emp - finite_radial_cdf(grid, 40, 20))) < 0.02

    def test_tends_to_limit(self):
        grid = np.linspace(0, 1, 257)
        gaps = [np.max(np.abs(finite_radial_cdf(grid, 2 * n, n) - limit_radial_cdf(grid, 2))) for n in (50, 200, 800)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_single_eigenvalue(self):
        # n = 1: |z|^2 ~ Beta(1, m - 1)
        assert finite_radial_cdf(0.5, 5, 1) == pytest.approx(1 - 0.75**4)
