"""Gaussian-process surrogate and acquisition functions for surrogate search.

Points are the integer index vectors of architectures; both kernels are
functions of the Euclidean distance between those vectors and equal one at
zero distance.  The posterior follows the standard noiseless GP conditioning
with a scalar prior mean (the arithmetic mean of the observations).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import norm

GAUSSIAN = "Gaussian"
MATERN = "Matern"
KERNELS = (GAUSSIAN, MATERN)

_SQRT3 = math.sqrt(3.0)


class SurrogateError(RuntimeError):
    pass


def kernel_matrix(kind: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel values for all pairs of rows of `a` and `b`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1)
    if kind == GAUSSIAN:
        return np.exp(-sq)
    if kind == MATERN:
        r = np.sqrt(sq)
        return (1.0 + _SQRT3 * r) * np.exp(-_SQRT3 * r)
    raise ValueError(f"unknown kernel {kind!r}")


class GaussianProcess:
    """Noiseless GP posterior over observed (X, y) with escalating jitter.

    Duplicate or near-duplicate lattice points can make the covariance matrix
    numerically singular; the Cholesky factorization retries with a diagonal
    jitter growing tenfold from 1e-10 up to 1e-6 before giving up.
    """

    def __init__(self, kernel: str = MATERN) -> None:
        if kernel not in KERNELS:
            raise ValueError(f"unknown kernel {kernel!r}")
        self.kernel = kernel
        self.jitter_used: float | None = None
        self._x: np.ndarray | None = None
        self._chol: np.ndarray | None = None
        self._alpha: np.ndarray | None = None
        self.prior_mean: float = 0.0

    def fit(self, x: np.ndarray, y: np.ndarray) -> "GaussianProcess":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 2 or len(x) != len(y) or len(x) == 0:
            raise ValueError("need matching, nonempty observations")
        cov = kernel_matrix(self.kernel, x, x)
        chol = None
        jitter = 1e-10
        while jitter <= 1e-6:
            try:
                chol = np.linalg.cholesky(cov + jitter * np.eye(len(x)))
                break
            except np.linalg.LinAlgError:
                jitter *= 10.0
        if chol is None:
            raise SurrogateError(
                "covariance factorization failed even with jitter 1e-6"
            )
        self.jitter_used = jitter
        self.prior_mean = float(np.mean(y))
        self._x = x
        self._chol = chol
        resid = solve_triangular(chol, y - self.prior_mean, lower=True)
        self._alpha = solve_triangular(chol.T, resid, lower=False)
        return self

    def predict(
        self, x: np.ndarray, clamp: bool = True
    ) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at the given points.

        With clamp=False the raw variance is returned (it may dip a hair
        below zero from rounding; callers asserting numerics want the raw
        value, everyone else the clamped one).
        """
        if self._x is None:
            raise SurrogateError("predict before fit")
        x = np.asarray(x, dtype=float)
        cross = kernel_matrix(self.kernel, x, self._x)
        mean = self.prior_mean + cross @ self._alpha
        v = solve_triangular(self._chol, cross.T, lower=True)
        var = 1.0 - (v**2).sum(axis=0)
        if clamp:
            var = np.clip(var, 0.0, None)
        return mean, var


def expected_improvement(
    mu: np.ndarray, sigma: np.ndarray, best: float
) -> np.ndarray:
    """EI over the incumbent `best`; collapses to max(mu - best, 0) at sigma=0."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    improvement = mu - best
    out = np.maximum(improvement, 0.0)
    positive = sigma > 0
    if np.any(positive):
        z = improvement[positive] / sigma[positive]
        out = out.astype(float)
        out[positive] = improvement[positive] * norm.cdf(z) + sigma[positive] * norm.pdf(z)
    return out


def upper_confidence_bound(mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    return np.asarray(mu, dtype=float) + np.asarray(sigma, dtype=float)
