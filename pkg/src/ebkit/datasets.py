"""Synthetic generators and pointers to public datasets.

Nothing here downloads data; the public URLs are printed by the CLI so users
can fetch the files themselves.
"""

from __future__ import annotations

import numpy as np

PROSTATE_URL = "https://web.stanford.edu/~hastie/CASI_files/DATA/prostz.txt"
SUSHI_URL = "https://www.kamishima.net/sushi/"

DATASET_URLS = {
    "prostate": PROSTATE_URL,
    "sushi": SUSHI_URL,
}


def conjugate_normal(n: int = 5000, seed: int = 0, tau2: float = 1.0, sigma2: float = 1.0):
    """``mu ~ N(0, tau2)``, ``z | mu ~ N(mu, sigma2)``; returns ``(mu, z)``."""
    rng = np.random.default_rng(seed)
    mu = rng.normal(0.0, np.sqrt(tau2), size=n)
    z = mu + rng.normal(0.0, np.sqrt(sigma2), size=n)
    return mu, z


def grouped_normal(n_groups: int = 50, n_per: int = 5, seed: int = 0, tau: float = 1.0, sigma: float = 1.0):
    """``mu_i ~ N(0, tau^2)``, ``n_per`` observations per group ``~ N(mu_i, sigma^2)``.

    Returns ``(mu, groups)`` with ``groups`` a list of (n_per, 1) arrays.
    """
    rng = np.random.default_rng(seed)
    mu = rng.normal(0.0, tau, size=n_groups)
    groups = [rng.normal(m, sigma, size=(n_per, 1)) for m in mu]
    return mu, groups


def blood_pressure_intervals(n_patients: int = 60, n_measurements: int = 3, seed: int = 0):
    """Synthetic systolic/diastolic readings aggregated to intervals.

    Patients are drawn from three groups (normal, elevated, hypertensive);
    each patient's repeated readings give ``[min, max]`` per dimension.

    Returns:
        ``(lower, upper, group)`` with bounds of shape (n_patients, 2).
    """
    rng = np.random.default_rng(seed)
    means = np.array([[115.0, 75.0], [132.0, 85.0], [155.0, 98.0]])
    group = rng.integers(0, 3, size=n_patients)
    base = means[group] + rng.normal(0.0, 4.0, size=(n_patients, 2))
    reads = base[:, None, :] + rng.normal(0.0, 3.0, size=(n_patients, n_measurements, 2))
    return reads.min(axis=1), reads.max(axis=1), group


def vmf_rankings(t: int, kappa: float, n: int, seed: int = 0, center=None):
    """Rankings sampled exactly from the discrete vMF over all ``t!`` permutations.

    Only practical for small ``t`` (enumeration).
    """
    from itertools import permutations

    from .ranking import standardize_ranking

    perms = np.array(list(permutations(range(1, t + 1))))
    X = np.array([standardize_ranking(p) for p in perms])
    m = standardize_ranking(np.arange(1, t + 1) if center is None else center)
    logw = kappa * (X @ m)
    w = np.exp(logw - logw.max())
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(perms), size=n, p=w / w.sum())
    return perms[idx]


__all__ = [
    "PROSTATE_URL",
    "SUSHI_URL",
    "DATASET_URLS",
    "conjugate_normal",
    "grouped_normal",
    "blood_pressure_intervals",
    "vmf_rankings",
]
