"""Dense linear algebra for the collective-spin Hilbert space.

Conventions used throughout the package:

* N particles, total spin j = N/2, Hilbert-space dimension N+1.
* Basis index i in {0..N} labels the Jz eigenstate with eigenvalue
  m = i - N/2 (ascending).  For odd N the m values are half-integers,
  stored as floats at the same integer indices.
* Matrix exponentials of Hermitian generators are computed by
  eigendecomposition, never by truncated series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised for invalid particle numbers or mismatched matrix shapes."""


@dataclass(frozen=True)
class SpinOps:
    """Collective angular-momentum matrices for N particles in the Jz basis."""

    n_particles: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    m_values: np.ndarray

    @property
    def dim(self) -> int:
        return self.n_particles + 1


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector in the Jz basis."""

    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm_defect(self) -> float:
        return abs(float(np.sum(np.abs(self.amplitudes) ** 2)) - 1.0)


@dataclass(frozen=True)
class MixedState:
    """Hermitian unit-trace density matrix in the Jz basis."""

    rho: np.ndarray

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


QuantumState = PureState | MixedState


@dataclass(frozen=True)
class Unitary:
    u: np.ndarray

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def dagger(self) -> "Unitary":
        return Unitary(self.u.conj().T)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.u @ other.u)


def build_spin_ops(n_particles: int) -> SpinOps:
    """Standard ladder construction for total spin j = N/2.

    Jz is diagonal with entries m = -N/2..N/2 ascending; J+ has
    sqrt(j(j+1) - m(m+1)) on the first subdiagonal.
    """
    if n_particles < 1:
        raise DimensionError(f"need at least one particle, got {n_particles}")
    n = int(n_particles)
    j = n / 2.0
    m = np.arange(n + 1) - j
    jz = np.diag(m).astype(complex)
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jp = np.zeros((n + 1, n + 1), dtype=complex)
    jp[np.arange(1, n + 1), np.arange(n)] = ladder
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    return SpinOps(n_particles=n, jx=jx, jy=jy, jz=jz, m_values=m)


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.abs(h - h.conj().T).max())


def unitarity_defect(u: Unitary | np.ndarray) -> float:
    mat = u.u if isinstance(u, Unitary) else u
    eye = np.eye(mat.shape[0])
    return float(np.abs(mat.conj().T @ mat - eye).max())


def expm_generator(h: np.ndarray, scale: float) -> Unitary:
    """exp(i * scale * h) for Hermitian h, via eigendecomposition.

    Exact to machine precision; no series truncation.
    """
    h = np.asarray(h)
    tol = 1e-10 * max(1.0, float(np.abs(h).max()))
    if hermiticity_defect(h) > tol:
        raise ValueError("generator is not Hermitian within tolerance")
    w, v = np.linalg.eigh(h)
    return Unitary((v * np.exp(1j * scale * w)) @ v.conj().T)


def jz_eigenstate(n_particles: int, m: float) -> PureState:
    """Jz eigenstate |m> as a basis vector; m must be one of -N/2..N/2."""
    idx = m + n_particles / 2.0
    i = int(round(idx))
    if abs(idx - i) > 1e-9 or not 0 <= i <= n_particles:
        raise DimensionError(f"m={m} is not a Jz eigenvalue for N={n_particles}")
    amps = np.zeros(n_particles + 1, dtype=complex)
    amps[i] = 1.0
    return PureState(amps)


def apply(u: Unitary, s: QuantumState) -> QuantumState:
    """U|psi> for pure states, U rho U^dag for mixed states."""
    if u.dim != s.dim:
        raise DimensionError(f"unitary dim {u.dim} != state dim {s.dim}")
    if isinstance(s, PureState):
        return PureState(u.u @ s.amplitudes)
    return MixedState(u.u @ s.rho @ u.u.conj().T)


@dataclass(frozen=True)
class HusimiField:
    """Q(theta, phi) sampled on a regular spherical grid.

    theta runs over [0, pi] inclusive; phi over [0, 2pi) exclusive.
    q has shape (len(theta), len(phi)).
    """

    theta: np.ndarray
    phi: np.ndarray
    q: np.ndarray

    def integral(self) -> float:
        """Quadrature of Q over the sphere (trapezoid in theta, periodic in phi)."""
        dphi = 2 * np.pi / self.phi.size
        per_theta = np.trapezoid(self.q * np.sin(self.theta)[:, None], self.theta, axis=0)
        return float(per_theta.sum() * dphi)


def husimi_q(s: QuantumState, ops: SpinOps, grid: tuple[int, int] = (200, 400)) -> HusimiField:
    """Husimi function Q = (N+1)/(4 pi) <theta,phi| rho |theta,phi>.

    The coherent states are |theta,phi> = exp(i phi Jz) exp(i theta Jy) |N/2>.
    """
    n_theta, n_phi = grid
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid counts must be at least 2")
    if s.dim != ops.dim:
        raise DimensionError(f"state dim {s.dim} != operator dim {ops.dim}")
    n = ops.n_particles
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    wy, vy = np.linalg.eigh(ops.jy)
    top = vy.conj().T[:, -1]  # |N/2> in the Jy eigenbasis
    phase_z = np.exp(1j * np.outer(ops.m_values, phi))  # (dim, n_phi)
    if isinstance(s, PureState):
        comps = [(1.0, s.amplitudes)]
    else:
        lam, vecs = np.linalg.eigh(s.rho)
        comps = [(float(l), vecs[:, k]) for k, l in enumerate(lam) if l > 1e-14]
    q = np.zeros((n_theta, n_phi))
    for i, th in enumerate(theta):
        coh = vy @ (np.exp(1j * th * wy) * top)  # exp(i theta Jy)|N/2>
        b = coh[:, None] * phase_z  # coherent-state amplitudes, (dim, n_phi)
        for weight, vec in comps:
            q[i] += weight * np.abs(b.conj().T @ vec) ** 2
    q *= (n + 1) / (4 * np.pi)
    return HusimiField(theta=theta, phi=phi, q=q)
