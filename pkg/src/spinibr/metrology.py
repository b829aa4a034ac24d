"""Phase encoding, measurement distributions, and Fisher information.

The phase is imprinted as exp(i Jn phi) about a unit axis n.  For pure
preparations n is taken from the collective covariance matrix (largest
eigenvalue direction); mixed states require an explicit axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spin_core import (
    DimensionError,
    MixedState,
    PureState,
    QuantumState,
    SpinOps,
    Unitary,
    expm_generator,
)

CFI_EPS = 1e-12
AXIS_TIE_TOL = 1e-9


class IllConditionedDistributionError(ValueError):
    """A probability vanished while its phi-derivative did not."""


@dataclass(frozen=True)
class PhaseAxis:
    """Unit vector n = (n_x, n_y, n_z) and the matrix Jn = J . n."""

    n: np.ndarray
    jn: np.ndarray


@dataclass(frozen=True)
class ProbDist:
    """Outcome probabilities p_m and their analytic phi-derivatives dp_m."""

    p: np.ndarray
    dp: np.ndarray

    @property
    def dim(self) -> int:
        return self.p.shape[0]


def phase_axis(n: np.ndarray, ops: SpinOps) -> PhaseAxis:
    """Axis from an explicit 3-vector (normalized here)."""
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValueError("axis vector must be nonzero")
    n = n / norm
    jn = n[0] * ops.jx + n[1] * ops.jy + n[2] * ops.jz
    return PhaseAxis(n=n, jn=jn)


def covariance_matrix(s: PureState, ops: SpinOps) -> np.ndarray:
    """3x3 symmetrized collective covariance matrix of (Jx, Jy, Jz)."""
    psi = s.amplitudes
    mats = (ops.jx, ops.jy, ops.jz)
    applied = [m @ psi for m in mats]
    means = np.array([np.real(psi.conj() @ a) for a in applied])
    cov = np.empty((3, 3))
    for k in range(3):
        for l in range(k, 3):
            sym = np.real(applied[k].conj() @ applied[l])
            cov[k, l] = cov[l, k] = sym - means[k] * means[l]
    return cov


def _tie_broken_axis(eigvals: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    # Within the near-degenerate top eigenspace, maximize |n_z|, then |n_y|,
    # then |n_x| (projection of the preferred cartesian axis onto the space).
    top = eigvals >= eigvals[-1] - AXIS_TIE_TOL
    space = eigvecs[:, top]
    n = None
    for axis_idx in (2, 1, 0):
        e = np.zeros(3)
        e[axis_idx] = 1.0
        proj = space @ (space.T @ e)
        if np.linalg.norm(proj) > 1e-12:
            n = proj / np.linalg.norm(proj)
            break
    if n is None:  # projections onto a nonempty subspace cannot all vanish
        n = space[:, -1]
    nz = np.nonzero(np.abs(n) > 1e-12)[0]
    if nz.size and n[nz[0]] < 0:
        n = -n
    return n


def optimal_phase_axis(s: QuantumState, ops: SpinOps) -> PhaseAxis:
    """QFI-maximizing axis of a pure state, from the covariance matrix.

    Mixed states carry no covariance heuristic here; pass an explicit axis
    via phase_axis instead (the QND scheme uses n = y).
    """
    if isinstance(s, MixedState):
        raise ValueError("mixed states need an explicit axis; use phase_axis")
    w, v = np.linalg.eigh(covariance_matrix(s, ops))
    if w[-1] - w[-2] < AXIS_TIE_TOL:
        n = _tie_broken_axis(w, v)
    else:
        n = v[:, -1]
        nz = np.nonzero(np.abs(n) > 1e-12)[0]
        if nz.size and n[nz[0]] < 0:
            n = -n
    return phase_axis(n, ops)


def encode_phase(s: QuantumState, axis: PhaseAxis, phi: float) -> QuantumState:
    """exp(i Jn phi)|psi> or the corresponding conjugation of rho."""
    u = expm_generator(axis.jn, phi)
    if isinstance(s, PureState):
        return PureState(u.u @ s.amplitudes)
    return MixedState(u.u @ s.rho @ u.u.conj().T)


def measurement_distribution(s: QuantumState, readout: Unitary | None,
                             axis: PhaseAxis) -> ProbDist:
    """Jz-basis outcome distribution of U2|psi> with its analytic derivative.

    The state is assumed to be already phase-encoded; the derivative is
    d p_m / d phi = <m| U2 (i [Jn, rho]) U2^dag |m>.
    """
    if readout is not None and readout.dim != s.dim:
        raise DimensionError("readout and state dimensions differ")
    if isinstance(s, PureState):
        psi = s.amplitudes
        jpsi = axis.jn @ psi
        if readout is not None:
            amp = readout.u @ psi
            damp = readout.u @ (1j * jpsi)
        else:
            amp = psi
            damp = 1j * jpsi
        p = np.abs(amp) ** 2
        dp = 2.0 * np.real(np.conj(amp) * damp)
    else:
        rho = s.rho
        drho = 1j * (axis.jn @ rho - rho @ axis.jn)
        if readout is not None:
            u = readout.u
            p = np.real(np.einsum("ij,jk,ik->i", u, rho, u.conj()))
            dp = np.real(np.einsum("ij,jk,ik->i", u, drho, u.conj()))
        else:
            p = np.real(np.diag(rho))
            dp = np.real(np.diag(drho))
    return ProbDist(p=p, dp=dp)


def cfi(d: ProbDist) -> float:
    """Classical Fisher information sum dp_m^2 / p_m.

    Outcomes with p <= 1e-12 contribute zero provided their derivative is
    also negligible (|dp| <= 1e-6); otherwise the distribution is reported
    as ill-conditioned rather than silently truncated.
    """
    return _cfi_arrays(d.p, d.dp)


def _cfi_arrays(p: np.ndarray, dp: np.ndarray) -> float:
    mask = p > CFI_EPS
    bad = ~mask & (np.abs(dp) > np.sqrt(CFI_EPS))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise IllConditionedDistributionError(
            f"outcome {i}: p={p[i]:.3e} below {CFI_EPS} but |dp|={abs(dp[i]):.3e}")
    return float(np.sum(dp[mask] ** 2 / p[mask]))


def qfi_pure(s: PureState, axis: PhaseAxis) -> float:
    """4 Var(Jn) for a pure state."""
    psi = s.amplitudes
    jpsi = axis.jn @ psi
    mean = np.real(psi.conj() @ jpsi)
    return float(4.0 * (np.real(jpsi.conj() @ jpsi) - mean ** 2))


def qfi_mixed(s: MixedState, axis: PhaseAxis) -> float:
    """Mixed-state QFI, sum_ij 2 |<e_i|Jn|e_j>|^2 (l_i - l_j)^2 / (l_i + l_j)."""
    lam, vecs = np.linalg.eigh(s.rho)
    a = vecs.conj().T @ axis.jn @ vecs
    li = lam[:, None]
    lj = lam[None, :]
    den = li + lj
    mask = den > CFI_EPS
    num = 2.0 * np.abs(a) ** 2 * (li - lj) ** 2
    return float(np.sum(num[mask] / den[mask]))


def hellinger(d1: ProbDist, d2: ProbDist) -> float:
    """Hellinger distance sqrt(1 - sum_m sqrt(p_m q_m)), in [0, 1]."""
    if d1.dim != d2.dim:
        raise DimensionError("distributions have different lengths")
    p = np.clip(d1.p, 0.0, None)
    q = np.clip(d2.p, 0.0, None)
    return float(np.sqrt(max(0.0, 1.0 - np.sum(np.sqrt(p * q)))))
