"""Stochastic verification that the two-point distribution is maximally robust.

Distributions with fixed noiseless Fisher information F0 live on a sphere:
writing v_i = sqrt(p_i) and vdot_i = dp_i / (2 v_i), any orthogonal matrix
applied to both vectors preserves |v| = 1 and F_C(0) = 4 |vdot|^2.  The
hill climb proposes small random plane rotations and accepts whenever the
*noisy* Fisher information improves; random orthogonal transforms of the
extremal distribution certify the bound from below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrology import CFI_EPS, IllConditionedDistributionError, ProbDist, _cfi_arrays
from .noise import make_popt, noise_kernel


@dataclass(frozen=True)
class AmplitudePair:
    """Square-root parametrization (v, vdot) of a ProbDist."""

    v: np.ndarray
    vdot: np.ndarray

    @property
    def dim(self) -> int:
        return self.v.shape[0]

    def fisher_zero(self) -> float:
        return float(4.0 * (self.vdot @ self.vdot))


@dataclass(frozen=True)
class OptTrace:
    iteration: int
    f_sigma: float
    f_zero: float
    d_h_to_popt: float


def pair_from_dist(d: ProbDist) -> AmplitudePair:
    """v = sqrt(p), vdot = dp / (2 sqrt(p)); zero-probability entries need dp = 0."""
    p = np.asarray(d.p, dtype=float)
    dp = np.asarray(d.dp, dtype=float)
    live = p > CFI_EPS
    bad = ~live & (np.abs(dp) > np.sqrt(CFI_EPS))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise IllConditionedDistributionError(
            f"outcome {i} has p={p[i]:.3e} but dp={dp[i]:.3e}")
    v = np.sqrt(np.clip(p, 0.0, None))
    vdot = np.zeros_like(v)
    vdot[live] = dp[live] / (2.0 * v[live])
    return AmplitudePair(v=v, vdot=vdot)


def dist_from_pair(pair: AmplitudePair) -> ProbDist:
    """p = v^2, dp = 2 v vdot (valid for either sign of v)."""
    return ProbDist(p=pair.v ** 2, dp=2.0 * pair.v * pair.vdot)


def random_plane_rotation(pair: AmplitudePair, max_angle: float, rng) -> AmplitudePair:
    """Rotate v and vdot by the same random small-angle plane rotation.

    The plane is spanned by two orthonormalized Gaussian vectors and the
    angle is uniform in (0, max_angle]; being orthogonal, the map
    conserves both the normalization of v and 4 |vdot|^2.
    """
    if max_angle <= 0:
        raise ValueError("max_angle must be positive")
    rng = np.random.default_rng(rng)
    e1 = rng.standard_normal(pair.dim)
    e1 /= np.linalg.norm(e1)
    e2 = rng.standard_normal(pair.dim)
    e2 -= (e1 @ e2) * e1
    e2 /= np.linalg.norm(e2)
    angle = rng.uniform(0.0, max_angle)
    cm1 = np.cos(angle) - 1.0
    s = np.sin(angle)

    def rot(x: np.ndarray) -> np.ndarray:
        a1 = e1 @ x
        a2 = e2 @ x
        return x + cm1 * (a1 * e1 + a2 * e2) + s * (a1 * e2 - a2 * e1)

    return AmplitudePair(v=rot(pair.v), vdot=rot(pair.vdot))


def _hellinger_to_popt(p: np.ndarray) -> float:
    # P_opt has weight 1/2 on each extreme outcome only.
    inner = np.sqrt(max(p[0], 0.0) * 0.5) + np.sqrt(max(p[-1], 0.0) * 0.5)
    return float(np.sqrt(max(0.0, 1.0 - inner)))


def hill_climb(start: ProbDist, sigma: float, iterations: int, max_angle: float,
               seed) -> tuple[ProbDist, list[OptTrace]]:
    """Accept/reject climb of the noisy Fisher information at fixed F_C(0).

    Each iteration rotates the amplitude pair in a random plane, rebuilds
    the distribution, convolves with the noise kernel and keeps the
    proposal only on strict improvement (ties reject).  Returns the best
    distribution and the per-iteration trace.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    rng = np.random.default_rng(seed)
    pair = pair_from_dist(start)
    kern = noise_kernel(start.dim - 1, sigma).gamma

    def noisy_fisher(p: np.ndarray, dp: np.ndarray) -> float:
        return _cfi_arrays(kern @ p, kern @ dp)

    p = pair.v ** 2
    dp = 2.0 * pair.v * pair.vdot
    f_sig = noisy_fisher(p, dp)
    trace: list[OptTrace] = []
    for it in range(1, iterations + 1):
        cand = random_plane_rotation(pair, max_angle, rng)
        cp = cand.v ** 2
        cdp = 2.0 * cand.v * cand.vdot
        f_new = noisy_fisher(cp, cdp)
        if f_new > f_sig:
            pair, p, f_sig = cand, cp, f_new
        trace.append(OptTrace(iteration=it, f_sigma=f_sig,
                              f_zero=pair.fisher_zero(),
                              d_h_to_popt=_hellinger_to_popt(p)))
    return dist_from_pair(pair), trace


def random_orthogonal(dim: int, rng) -> np.ndarray:
    """Orthonormalization (QR) of a Gaussian matrix, sign-fixed columns."""
    rng = np.random.default_rng(rng)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_constrained_dist(n_particles: int, f0: float, seed) -> ProbDist:
    """A random distribution with F_C(0) = f0: orthogonal transform of P_opt."""
    if f0 < 0:
        raise ValueError("f0 must be non-negative")
    pair = pair_from_dist(make_popt(n_particles, f0))
    a = random_orthogonal(pair.dim, seed)
    return dist_from_pair(AmplitudePair(v=a @ pair.v, vdot=a @ pair.vdot))


def reference_starts(n_particles: int, f0: float) -> dict[str, ProbDist]:
    """Three structurally different starting distributions with F_C(0) = f0.

    uniform: flat probabilities with a linear-in-m derivative profile;
    edge_pair: the two adjacent outcomes next to m = +N/2;
    mid_pair: two adjacent outcomes straddling the spectrum center.
    """
    dim = n_particles + 1
    m = np.arange(dim) - n_particles / 2.0
    p = np.full(dim, 1.0 / dim)
    dp = m / np.sqrt(dim * np.sum(m ** 2))
    dp *= np.sqrt(f0)
    uniform = ProbDist(p=p, dp=dp)

    def pair_at(i: int, j: int) -> ProbDist:
        p = np.zeros(dim)
        dp = np.zeros(dim)
        p[i] = p[j] = 0.5
        dp[j] = np.sqrt(f0) / 2.0
        dp[i] = -np.sqrt(f0) / 2.0
        return ProbDist(p=p, dp=dp)

    return {
        "uniform": uniform,
        "edge_pair": pair_at(dim - 2, dim - 1),
        "mid_pair": pair_at(dim // 2 - 1, dim // 2),
    }
