"""Haar unitaries, their truncations and complex spectra.

Every draw is tied to a ``(master_seed, sample_index)`` pair through
:class:`numpy.random.SeedSequence`, so a batch produces the same matrices
no matter how many workers share the work.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

MODULUS_SLACK = 1e-8
"""Eigenvalue moduli may exceed 1 by this much (eigensolver roundoff)."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a usable result."""


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of a batch of ``n x n`` truncations of ``m x m`` Haar unitaries."""

    m: int
    n: int
    sample_count: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and isinstance(self.n, (int, np.integer))):
            raise TypeError("m and n must be integers")
        if self.n < 1 or self.m <= self.n:
            raise ValueError(f"need m > n >= 1, got m={self.m}, n={self.n}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @property
    def ratio(self) -> float:
        """The aspect ratio m/n (the finite-size stand-in for lambda)."""
        return self.m / self.n


@dataclass(frozen=True)
class SpectralSample:
    m: int
    n: int
    sample_index: int
    eigenvalues: np.ndarray

    def __post_init__(self):
        if len(self.eigenvalues) != self.n:
            raise ValueError("expected n eigenvalues")
        if np.any(np.abs(self.eigenvalues) > 1 + MODULUS_SLACK):
            raise NumericalError("truncation eigenvalue outside the unit disc")


def substream(master_seed: int, sample_index: int) -> np.random.Generator:
    """Independent generator for one sample of a seeded batch."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(sample_index),))
    return np.random.Generator(np.random.PCG64(seq))


def sample_ginibre(rows: int, cols: int, stream: np.random.Generator) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians, E|g|^2 = 1."""
    z = stream.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def haar_unitary(m: int, stream: np.random.Generator) -> np.ndarray:
    """Draw an ``m x m`` Haar unitary.

    QR-factorizes a Ginibre matrix and rotates the columns of Q so that R
    has a positive real diagonal; this choice of factor is unique and
    Haar distributed.
    """
    if m < 1:
        raise ValueError("m must be positive")
    for _ in range(2):
        z = sample_ginibre(m, m, stream)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        ad = np.abs(d)
        if np.all(ad > 1e-300):
            return q * (d / ad)
    raise NumericalError("singular Ginibre draw twice in a row")


def _check_block(U: np.ndarray, n: int) -> int:
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("expected a square matrix")
    m = U.shape[0]
    if not 1 <= n < m:
        raise ValueError(f"invalid truncation size n={n} for m={m}")
    return m


def truncate(U: np.ndarray, n: int) -> np.ndarray:
    """Top-left ``n x n`` block of a square matrix."""
    _check_block(U, n)
    return np.array(U[:n, :n])


def projection_product(U: np.ndarray, n: int) -> np.ndarray:
    """``Q U Q`` with ``Q`` the coordinate projection onto the first n axes."""
    m = _check_block(U, n)
    out = np.zeros((m, m), dtype=complex)
    out[:n, :n] = U[:n, :n]
    return out


def eigenvalues(A: np.ndarray) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a general complex square matrix."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        return scipy.linalg.eigvals(A, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge for\n{A!r}") from exc


def truncation_spectrum(config: EnsembleConfig, sample_index: int) -> SpectralSample:
    stream = substream(config.master_seed, sample_index)
    U = haar_unitary(config.m, stream)
    eigs = eigenvalues(truncate(U, config.n))
    return SpectralSample(config.m, config.n, sample_index, eigs)


_SPECTRUM_OF = {
    "truncation": lambda U, n: truncate(U, n),
    "projection": lambda U, n: projection_product(U, n),
    "unitary": lambda U, n: U,
}


def batch_spectra(config: EnsembleConfig, workers: int = 1, kind: str = "truncation") -> list[np.ndarray]:
    """Spectra of ``config.sample_count`` independent draws, in sample-index order.

    ``kind`` picks the matrix that is diagonalized: ``"truncation"`` (the
    n x n block), ``"projection"`` (the m x m product QUQ) or ``"unitary"``
    (the full Haar matrix). Sample ``i`` always uses the substream
    ``(master_seed, i)``, so ``workers`` never changes the output.
    """
    if kind not in _SPECTRUM_OF:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    make = _SPECTRUM_OF[kind]

    def one(index):
        U = haar_unitary(config.m, substream(config.master_seed, index))
        return eigenvalues(make(U, config.n))

    indices = range(config.sample_count)
    if workers <= 1:
        return [one(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, indices))


def sample_spectra(config: EnsembleConfig, workers: int = 1) -> list[SpectralSample]:
    spectra = batch_spectra(config, workers=workers)
    return [SpectralSample(config.m, config.n, i, eigs) for i, eigs in enumerate(spectra)]


def sort_spectrum(eigs) -> np.ndarray:
    """Sort by modulus, then by argument."""
    eigs = np.asarray(eigs, dtype=complex)
    order = np.lexsort((np.angle(eigs), np.abs(eigs)))
    return eigs[order]


def multiset_distance(a, b) -> float:
    """Largest pairing distance under the optimal matching of two multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("multisets of different sizes")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
