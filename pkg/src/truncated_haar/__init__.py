"""Truncated Haar unitary matrices: spectra, limit law and rate-function numerics."""

__version__ = "0.1.0"

from truncated_haar.sampling import (
    EnsembleConfig,
    NumericalError,
    SpectralSample,
    batch_spectra,
    eigenvalues,
    haar_unitary,
    multiset_distance,
    projection_product,
    sample_ginibre,
    sample_spectra,
    substream,
    truncate,
)
from truncated_haar.spectra import (
    EmpiricalMeasure,
    RadialCdfTable,
    default_grid,
    empirical_measure,
    kolmogorov_distance,
    mixed_moment,
    moment_distance,
    pooled_measure,
    radial_cdf_empirical,
    radial_cdf_table,
)
from truncated_haar.potential import (
    ConditionsNotMet,
    EquilibriumResult,
    LogWeight,
    RadialMeasure,
    RateReport,
    TabulatedWeight,
    constant_B,
    equilibrium_measure,
    joint_log_density,
    log_energy_discrete,
    log_energy_radial,
    log_normalizing_constant,
    mixture,
    rate_function,
    signed_energy,
    verify_equilibrium,
    weighted_term,
)
from truncated_haar.limit_law import (
    BrownMixture,
    LimitLaw,
    brown_mixture,
    finite_radial_cdf,
    limit_density,
    limit_radial_cdf,
    sample_limit,
    theoretical_abs2_moment,
)
