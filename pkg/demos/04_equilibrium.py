# # Equilibrium measures for radial weights
#
# For a radial weight Q with r Q'(r) increasing, the equilibrium measure
# lives on an annulus r0 <= |z| <= R0 where r Q' runs from 0 to 1, with
# radial density d(r Q')/dr. The Frostman certificate checks that
# U^sigma + Q equals a constant on the support and is no smaller outside.

import numpy as np

from truncated_haar import ConditionsNotMet, LogWeight, TabulatedWeight, equilibrium_measure, verify_equilibrium

for lam in (1.5, 2, 4):
    weight = LogWeight(lam)
    res = equilibrium_measure(weight)
    cert = verify_equilibrium(res, weight)
    print(f"lambda = {lam}: R0 = {res.R0:.12f} (1/sqrt(lambda) = {lam ** -0.5:.12f}),"
          f" residual {cert.max_residual_on_support:.1e}, passed {cert.passed}")

# Any weight can be supplied as a table of Q and Q'. Q = r^2 gives the
# uniform disc of radius 1/sqrt(2).

r = np.linspace(0, 0.99, 4001)
res = equilibrium_measure(TabulatedWeight(r, r**2, 2 * r))
print("Q = r^2: R0 =", res.R0, " density at R0/2:", np.interp(res.R0 / 2, res.density.radii, res.density.density))

# A table whose r Q' is not monotone is rejected.

dq = 2 * r
dq[1000:1200] = 0
try:
    equilibrium_measure(TabulatedWeight(r, r**2, dq))
except ConditionsNotMet as exc:
    print("rejected:", exc)
