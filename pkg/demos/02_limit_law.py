# # The limit law and what finite n looks like
#
# With m = lambda n the pooled eigenvalues approach a radial law on the disc
# of radius 1/sqrt(lambda), with P(|z| <= t) = (lambda - 1) t^2 / (1 - t^2).

import numpy as np

from truncated_haar import (
    EnsembleConfig,
    LimitLaw,
    batch_spectra,
    default_grid,
    finite_radial_cdf,
    kolmogorov_distance,
    pooled_measure,
    radial_cdf_empirical,
    radial_cdf_table,
    theoretical_abs2_moment,
)

law = LimitLaw(2)
mu = pooled_measure(batch_spectra(EnsembleConfig(200, 100, 100, master_seed=3), workers=4))
grid = default_grid(512)
emp = radial_cdf_empirical(mu, grid)
print("KS to the limit law:", kolmogorov_distance(emp, radial_cdf_table(law.radial_cdf, grid)))

# Most of that distance is not noise. At finite size the spectrum spills
# past the edge radius: the squared moduli are independent Beta(k+1, m-n)
# variables, and their averaged CDF tracks the simulation much better.

finite = radial_cdf_table(lambda t: finite_radial_cdf(t, 200, 100), grid)
print("KS to the exact finite-n law:", kolmogorov_distance(emp, finite))
for n in (100, 400, 1600):
    t = np.linspace(0, law.edge_radius, 2001)
    gap = np.max(np.abs(finite_radial_cdf(t, 2 * n, n) - law.radial_cdf(t)))
    print(f"  n = {n:5d}: finite-n vs limit gap {gap:.4f}")

# Moments converge quickly though.

print("E|z|^2 pooled:", mu.moment(1, 1).real, " limit:", theoretical_abs2_moment(2))
print("|E z| pooled:", abs(mu.moment(1, 0)))

# QUQ with Q a rank-n projection has m - n extra zeros, so its limit is a
# mixture of an atom at the origin and the law above.

proj = pooled_measure(batch_spectra(EnsembleConfig(60, 30, 20, master_seed=4), kind="projection"))
print("fraction of zero eigenvalues in QUQ:", np.mean(proj.moduli < 1e-12))
