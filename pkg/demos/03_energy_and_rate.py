# # Logarithmic energy and the rate function
#
# For radial measures the planar log kernel averages over angles to
# log max(r, s), which makes the energy a one-dimensional double integral.
# The rate function combines that energy with the weight -(lambda-1) log(1-|z|^2)
# and a constant B(lambda), and its zero is the limit law.

import math

import numpy as np

from truncated_haar import (
    LimitLaw,
    RadialMeasure,
    constant_B,
    log_energy_radial,
    log_normalizing_constant,
    mixture,
    rate_function,
    signed_energy,
)

mu0 = LimitLaw(2).radial_measure(1024)
for lam in (2, 3):
    r = rate_function(mu0, lam)
    print(f"rate of the lambda=2 law evaluated at lambda={lam}: {r.total:.3e}")

disc = RadialMeasure.from_function(lambda r: 2 * r, 0, 1, 1024)
print("uniform disc at lambda=2:", rate_function(disc, 2).total)

# The energy is concave, and the signed energy of a difference of
# probability measures is never positive.

ring = RadialMeasure.from_function(lambda r: np.exp(-((r - 0.5) / 0.05) ** 2), 0, 1, 1024)
print("signed energy (limit law vs ring):", signed_energy(mu0, ring))
mid = log_energy_radial(mixture(disc, ring))
print("midpoint gap:", mid - (log_energy_radial(disc) + log_energy_radial(ring)) / 2)

# B(lambda) is also the limit of the scaled log normalizing constant.

print("B(2) =", constant_B(2), " -2 log 2 + 1/2 =", -2 * math.log(2) + 0.5)
for n in (250, 500, 1000):
    print(f"  n = {n}: (1/n^2) log C = {log_normalizing_constant(2 * n, n) / n**2:.6f}")

# Clamping the pair kernel at alpha makes the energy of atomic measures
# finite; the clamped rate increases to the unclamped value as alpha grows.

for alpha in (1, 4, 16, 64):
    print(f"  alpha = {alpha:2d}: {rate_function(disc, 2, alpha).total:.6f}")
