"""Gaussian detection noise and the noisy Cramer-Rao bound.

The detector confuses outcome m' for m with probability
Gamma_{m,m'} = exp(-(m-m')^2 / 2 sigma^2), normalized over the finite
outcome range m in {-N/2..N/2} (column-stochastic).  The edge effects of
that truncation are what separates the exact bound from its closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

from .metrology import ProbDist, _cfi_arrays
from .spin_core import DimensionError

KERNEL_CLAMP = 1e-300


@dataclass(frozen=True)
class NoiseKernel:
    """Column-stochastic confusion matrix over Jz outcomes."""

    sigma: float
    gamma: np.ndarray

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class NqcrbResult:
    sigma: float
    n_particles: int
    f_q: float
    f_numeric: float
    f_analytic: float


def noise_kernel(n_particles: int, sigma: float) -> NoiseKernel:
    """Gaussian confusion matrix of width sigma; sigma = 0 is the identity."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    dim = n_particles + 1
    if sigma == 0:
        return NoiseKernel(sigma=0.0, gamma=np.eye(dim))
    m = np.arange(dim) - n_particles / 2.0
    g = np.exp(-((m[:, None] - m[None, :]) ** 2) / (2.0 * sigma ** 2))
    if sigma < n_particles / 20.0:
        # flush denormal-range entries for cross-platform determinism
        g[g < KERNEL_CLAMP] = 0.0
    return NoiseKernel(sigma=float(sigma), gamma=g / g.sum(axis=0, keepdims=True))


def apply_noise(d: ProbDist, k: NoiseKernel) -> ProbDist:
    """Convolve both the probabilities and their derivatives with the kernel."""
    if d.dim != k.dim:
        raise DimensionError("distribution and kernel dimensions differ")
    return ProbDist(p=k.gamma @ d.p, dp=k.gamma @ d.dp)


def make_popt(n_particles: int, f0: float) -> ProbDist:
    """The maximally noise-robust distribution: half weight on each extreme outcome.

    p = 1/2 at m = +-N/2, dp = +-sqrt(f0)/2 there, zero elsewhere;
    its noiseless Fisher information is exactly f0.
    """
    if f0 < 0:
        raise ValueError("f0 must be non-negative")
    dim = n_particles + 1
    p = np.zeros(dim)
    dp = np.zeros(dim)
    p[0] = p[-1] = 0.5
    root = np.sqrt(f0) / 2.0
    dp[-1] = root
    dp[0] = -root
    return ProbDist(p=p, dp=dp)


def nqcrb_numeric(n_particles: int, f_q: float, sigma: float) -> float:
    """Exact discrete bound: Fisher information of the noise-convolved extremal distribution."""
    if f_q < 0:
        raise ValueError("f_q must be non-negative")
    noisy = apply_noise(make_popt(n_particles, f_q), noise_kernel(n_particles, sigma))
    return _cfi_arrays(noisy.p, noisy.dp)


def nqcrb_analytic(n_particles: int, f_q: float, sigma: float) -> float:
    """Closed-form bound F_q (1 - 2 Erf[a/2]/Erf[a])^2 with a = N / (sqrt(2) sigma).

    Evaluated through erfc so the large-a regime does not cancel; sigma = 0
    returns f_q (the a -> infinity limit).
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return float(f_q)
    a = n_particles / (np.sqrt(2.0) * sigma)
    num = 1.0 - 2.0 * erfc(a / 2.0) + erfc(a)  # = Erf(a) - 2 Erf(a/2), negated
    den = 1.0 - erfc(a)
    return float(f_q * (num / den) ** 2)


def evaluate_nqcrb(n_particles: int, f_q: float, sigma: float) -> NqcrbResult:
    return NqcrbResult(
        sigma=float(sigma),
        n_particles=n_particles,
        f_q=float(f_q),
        f_numeric=nqcrb_numeric(n_particles, f_q, sigma),
        f_analytic=nqcrb_analytic(n_particles, f_q, sigma),
    )


def two_point_cfi(f0: float, a: float, b: float, sigma: float) -> float:
    """Noisy Fisher information of an optimal two-outcome distribution at a and b.

    Infinite-domain result f0 * Erf[(b-a) / (2 sqrt(2) sigma)]^2, already
    maximized over the weight split (equal halves).
    """
    if a == b:
        raise ValueError("outcomes must be distinct")
    if sigma <= 0:
        if sigma == 0:
            return float(f0)
        raise ValueError("sigma must be non-negative")
    return float(f0 * erf(abs(b - a) / (2.0 * np.sqrt(2.0) * sigma)) ** 2)
