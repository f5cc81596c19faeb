# # Sampling truncated Haar unitaries
#
# A Haar unitary comes from the QR factorization of a complex Gaussian
# matrix, once the phases of R are pushed into Q. Chopping out the top-left
# n x n block gives a contraction whose eigenvalues sit strictly inside the
# unit disc.

import numpy as np

from truncated_haar import EnsembleConfig, batch_spectra, haar_unitary, substream, truncate

# Every draw has its own random stream, keyed by a master seed and the
# sample index.

stream = substream(master_seed=7, sample_index=0)
U = haar_unitary(6, stream)
print("unitarity defect:", np.max(np.abs(U @ U.conj().T - np.eye(6))))

A = truncate(U, 3)
print("eigenvalue moduli of the 3 x 3 block:", np.round(np.abs(np.linalg.eigvals(A)), 4))

# Batches are reproducible, and the worker count does not matter because
# sample i always uses stream (seed, i).

config = EnsembleConfig(m=40, n=20, sample_count=16, master_seed=1)
serial = batch_spectra(config, workers=1)
threaded = batch_spectra(config, workers=8)
print("identical across worker counts:", all(np.array_equal(a, b) for a, b in zip(serial, threaded)))

# The full unitary has its whole spectrum on the circle, while the
# truncation has been pulled inward.

full = batch_spectra(config, kind="unitary")[0]
print("max | |z| - 1 | for the full unitary:", np.max(np.abs(np.abs(full) - 1)))
print("largest truncation modulus:", max(np.abs(s).max() for s in serial))
