import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from truncated_haar.limit_law import LimitLaw, limit_radial_cdf, sample_limit
from truncated_haar.sampling import EnsembleConfig, batch_spectra, eigenvalues, haar_unitary, substream
from truncated_haar.spectra import (
    EDGE_CLAMP,
    EmpiricalMeasure,
    RadialCdfTable,
    clamp_to_disc,
    empirical_measure,
    kolmogorov_distance,
    mixed_moment,
    moment_distance,
    pooled_measure,
    radial_cdf_empirical,
    radial_cdf_table,
)

points = st.lists(
    st.tuples(st.floats(0, 1), st.floats(0, 2 * np.pi)).map(lambda p: p[0] * np.exp(1j * p[1])),
    min_size=1,
    max_size=30,
)


class TestEmpiricalMeasure:
    def test_single_atom(self):
        mu = empirical_measure([0])
        assert len(mu) == 1 and mu.weights[0] == 1

    def test_two_atoms(self):
        mu = empirical_measure([1, -1])
        assert np.array_equal(mu.weights, [0.5, 0.5])

    def test_unitary_spectrum(self, rng):
        mu = empirical_measure(eigenvalues(haar_unitary(4, rng)))
        assert len(mu) == 4
        assert np.allclose(mu.weights, 0.25)
        assert np.allclose(mu.moduli, 1, atol=1e-8)

    def test_empty(self):
        with pytest.raises(ValueError):
            empirical_measure([])

    def test_clamping(self):
        z = clamp_to_disc([1 + 5e-9, 0.5j, -1.0])
        assert np.abs(z[0]) == pytest.approx(EDGE_CLAMP, abs=1e-16)
        assert np.angle(z[2]) == pytest.approx(np.pi)
        assert z[1] == 0.5j
        with pytest.raises(ValueError):
            clamp_to_disc([1.01])

    def test_validation(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure([0.1, 0.2], [0.5, 0.6])
        with pytest.raises(ValueError):
            EmpiricalMeasure([1.5], [1.0])

    def test_pooling(self):
        mu = pooled_measure([[0.1, 0.2], [0.3]])
        assert len(mu) == 3
        with pytest.raises(ValueError):
            pooled_measure([])


class TestRadialCdf:
    def test_atom_at_origin(self):
        table = radial_cdf_empirical(empirical_measure([0]), np.linspace(0, 1, 7))
        assert np.all(table.values == 1)

    def test_counting(self):
        table = radial_cdf_empirical(empirical_measure([0.2, -0.8j]), np.array([0, 0.5, 1]))
        assert table.values[1] == 0.5

    def test_default_grid(self):
        table = radial_cdf_empirical(empirical_measure([0.3]))
        assert table.radii.size == 512 and table.values[-1] == 1

    def test_grid_must_end_at_one(self):
        with pytest.raises(ValueError):
            radial_cdf_empirical(empirical_measure([0.3]), np.linspace(0, 0.9, 4))

    def test_table_validation(self):
        with pytest.raises(ValueError):
            RadialCdfTable(np.array([0, 0.5, 0.4]), np.array([0, 0.5, 1]))
        with pytest.raises(ValueError):
            RadialCdfTable(np.array([0, 0.5, 1]), np.array([0, 0.6, 0.5]))

    def test_theory_cdf_matches_quadrature(self):
        # F(t) = int_0^t 2 r / (1 - r^2)^2 dr at lambda = 2
        for t in [0.1, 0.5, 0.7]:
            quad, _ = integrate.quad(lambda r: 2 * r / (1 - r**2) ** 2, 0, t)
            assert limit_radial_cdf(t, 2) == pytest.approx(quad, abs=1e-12)

    @pytest.mark.slow
    def test_pooled_truncations_approach_limit(self):
        grid = np.linspace(0, 1, 512)
        theory = radial_cdf_table(lambda t: limit_radial_cdf(t, 2), grid)
        distances = []
        for n in (25, 100, 400):
            draws = max(4, 8000 // n)
            mu = pooled_measure(batch_spectra(EnsembleConfig(2 * n, n, draws, 5)))
            distances.append(kolmogorov_distance(radial_cdf_empirical(mu, grid), theory))
        assert distances[0] > distances[1] > distances[2]
        assert distances[2] < 0.04


class TestMoments:
    def test_normalization(self):
        assert mixed_moment(empirical_measure([0.3, 0.1j, -0.7]), 0, 0) == 1

    def test_first_moment_is_normalized_trace(self, rng):
        a = haar_unitary(9, rng)[:6, :6]
        assert mixed_moment(empirical_measure(eigenvalues(a)), 1, 0) == pytest.approx(np.trace(a) / 6, abs=1e-8)

    @settings(max_examples=50, deadline=None)
    @given(z=points, k1=st.integers(0, 8), k2=st.integers(0, 8))
    def test_conjugation_symmetry(self, z, k1, k2):
        mu = empirical_measure(z)
        assert mixed_moment(mu, k1, k2) == pytest.approx(np.conj(mixed_moment(mu, k2, k1)), abs=1e-14)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32), m=st.integers(3, 16))
    def test_moment_trace_consistency(self, seed, m):
        u = haar_unitary(m, substream(seed, 0))
        a = u[: m - 1, : m - 1]
        mu = empirical_measure(eigenvalues(a))
        power = np.eye(m - 1)
        for k in range(1, 7):
            power = power @ a
            assert abs(mixed_moment(mu, k, 0) - np.trace(power) / (m - 1)) <= 1e-6

    def test_rotation_invariance_in_law(self):
        small = pooled_measure(batch_spectra(EnsembleConfig(20, 10, 20, 3)))
        large = pooled_measure(batch_spectra(EnsembleConfig(20, 10, 2000, 3)))
        for k in range(1, 5):
            assert abs(mixed_moment(large, k, 0)) < 0.02
        assert sum(abs(mixed_moment(large, k, 0)) for k in range(1, 5)) < sum(
            abs(mixed_moment(small, k, 0)) for k in range(1, 5)
        )

    def test_abs2_of_limit_samples(self):
        mu = empirical_measure(sample_limit(2, 200_000, substream(8, 0)))
        assert mixed_moment(mu, 1, 1).real == pytest.approx(1 + np.log(0.5), abs=0.01)

    def test_order_guard(self):
        with pytest.raises(ValueError):
            mixed_moment(empirical_measure([0.1]), 40, 25)
        with pytest.raises(ValueError):
            mixed_moment(empirical_measure([0.1]), -1, 0)


class TestDistances:
    def test_moment_distance_identity(self):
        mu = empirical_measure([0.1, 0.5j])
        assert moment_distance(mu, mu, 6) == 0

    def test_moment_distance_first_order(self):
        assert moment_distance(empirical_measure([0]), empirical_measure([0.5]), 1) == pytest.approx(0.5)

    def test_moment_distance_limit_law(self):
        law = LimitLaw(2)
        mu = empirical_measure(sample_limit(2, 50_000, substream(1, 0)))
        assert moment_distance(mu, law, 4) < 0.02
        assert moment_distance(mu, law.radial_measure(), 4) < 0.02

    @settings(max_examples=30, deadline=None)
    @given(a=points, b=points, c=points)
    def test_pseudometric(self, a, b, c):
        ma, mb, mc = (empirical_measure(x) for x in (a, b, c))
        dab = moment_distance(ma, mb, 4)
        assert dab == pytest.approx(moment_distance(mb, ma, 4), abs=1e-15)
        assert dab <= moment_distance(ma, mc, 4) + moment_distance(mc, mb, 4) + 1e-12

    def test_kolmogorov(self):
        grid = np.linspace(0, 1, 11)
        a = radial_cdf_empirical(empirical_measure([0.2]), grid)
        b = radial_cdf_empirical(empirical_measure([0.8]), grid)
        assert kolmogorov_distance(a, a) == 0
        assert kolmogorov_distance(a, b) == 1
        with pytest.raises(ValueError):
            kolmogorov_distance(a, radial_cdf_empirical(empirical_measure([0.2]), np.linspace(0, 1, 5)))
