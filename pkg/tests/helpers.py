"""Random samplers shared by the test modules.

Everything takes an explicit numpy Generator so each test controls its
own seed and the suite stays reproducible.
"""

import numpy as np


def random_markovian(rng, n):
    """Generator with non-negative off-diagonal rates and zero column sums."""
    r = rng.uniform(0.0, 2.0, size=(n, n))
    np.fill_diagonal(r, 0.0)
    np.fill_diagonal(r, -r.sum(axis=0))
    return r


def random_forced_negative(rng, n, floor=1e-2):
    """Markovian sample with exactly one off-diagonal rate pushed below -floor."""
    r = rng.uniform(0.1, 2.0, size=(n, n))
    np.fill_diagonal(r, 0.0)
    i = int(rng.integers(n))
    j = int((i + 1 + rng.integers(n - 1)) % n)
    r[i, j] = -float(rng.uniform(floor, 1.0))
    np.fill_diagonal(r, -r.sum(axis=0))
    return r


def random_interior(rng, n):
    """Distribution bounded away from the simplex boundary by 0.1 / n."""
    return 0.9 * rng.dirichlet(np.ones(n)) + 0.1 / n


def random_zero_sum(rng, n, scale=1e-3):
    d = rng.standard_normal(n)
    d -= d.mean()
    return scale * d


def random_density(rng, d):
    """Full-rank density matrix, cushioned toward the maximally mixed state."""
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    rho = rho / np.trace(rho).real
    return 0.9 * rho + 0.1 * np.eye(d) / d


def random_traceless_hermitian(rng, d, scale=1e-2):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = 0.5 * (a + a.conj().T)
    h -= (np.trace(h).real / d) * np.eye(d)
    return scale * h
