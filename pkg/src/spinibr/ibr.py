"""Interaction-based readouts and phi-optimized Fisher-information sweeps.

A readout is a unitary U2 applied after phase encoding, before the Jz
measurement.  Implemented families:

    linear            U2 = U_theta (a plain rotation, or identity)
    echo              U2 = U1^dag
    flip_echo         U2 = U_flip U1^dag
    flip_prime_echo   U2 = U'_flip U1^dag
    optimal           U2 = U_p U1^dag (constructed at phi_0)

U_flip is the twist-rotate-untwist sequence built from one-axis twisting
about y; it leaves even-m outcomes in place and exchanges odd-m outcomes
with their -m partners, which relocates the information-carrying
probability next to one pole onto the opposite pole.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .metrology import (
    IllConditionedDistributionError,
    PhaseAxis,
    _cfi_arrays,
    optimal_phase_axis,
    phase_axis,
)
from .noise import noise_kernel, nqcrb_numeric
from .spin_core import PureState, SpinOps, Unitary, build_spin_ops, expm_generator
from .state_prep import PrepScheme, prep_unitary, qnd_state, scheme

READOUT_KINDS = ("linear", "echo", "flip_echo", "flip_prime_echo", "optimal")

# Smallest phi used in optimization grids.  Must exceed 2*sqrt(CFI_EPS) so
# that quadratically vanishing outcomes cannot trip the ill-conditioned
# guard at sigma = 0, yet stay small enough that the echo-family readouts
# remain QCRB-saturating to well under 1e-6 relative at N = 100.
PHI_FLOOR = 4e-6

GRID_POINTS = 201


class BasisDeficitError(ValueError):
    """Gram-Schmidt could not complete the readout basis."""


class PhaseCrossingError(ValueError):
    """No half-overlap crossing exists in (0, pi]."""


@dataclass(frozen=True)
class ReadoutKind:
    """Readout family selector; u_theta only applies to the linear family."""

    kind: str
    u_theta: Unitary | None = None

    def __post_init__(self):
        if self.kind not in READOUT_KINDS:
            raise ValueError(f"unknown readout {self.kind!r}; expected one of {READOUT_KINDS}")


@dataclass(frozen=True)
class SweepRecord:
    scheme: str
    readout: str
    sigma: float
    phi_opt: float
    f_c: float
    f_n: float
    f_q: float


def u_flip(n_particles: int, ops: SpinOps) -> Unitary:
    """Cat-mediated flip: fixes even-m outcomes, swaps odd m with -m (even N).

    For odd N the half-integer variant uses the shifted twisting
    Jy(Jy+1) and a rotation angle (pi/2)(1 + 1/N); it acts inside each
    (m, -m) pair but is not an exact permutation.
    """
    if n_particles % 2 == 0:
        gen = ops.jy @ ops.jy
        theta = np.pi / 2
    else:
        gen = ops.jy @ (ops.jy + np.eye(ops.dim))
        theta = (np.pi / 2) * (1.0 + 1.0 / n_particles)
    return (expm_generator(gen, -np.pi / 2)
            @ expm_generator(ops.jz, theta)
            @ expm_generator(gen, np.pi / 2))


def u_flip_prime(n_particles: int, ops: SpinOps) -> Unitary:
    """Modified flip with a pi/4 rotation: exchanges m with -m when m/2 is odd."""
    if n_particles % 2:
        raise ValueError("the modified flip is defined for even N only")
    gen = ops.jy @ ops.jy
    return (expm_generator(gen, -np.pi / 2)
            @ expm_generator(ops.jz, np.pi / 4)
            @ expm_generator(gen, np.pi / 2))


def _overlap_weights(u1: Unitary, axis: PhaseAxis):
    dim = u1.dim
    psi0 = np.zeros(dim, dtype=complex)
    psi0[-1] = 1.0
    psi1 = u1.u @ psi0
    wn, vn = np.linalg.eigh(axis.jn)
    weights = np.abs(vn.conj().T @ psi1) ** 2
    return wn, weights


def find_phi0(u1: Unitary, axis: PhaseAxis) -> float:
    """Smallest phi > 0 where |<psi0| U1^dag e^{i Jn phi} U1 |psi0>|^2 = 1/2.

    Coarse scan at step 1e-3 over (0, pi], then bisection of the first
    crossing to an overlap tolerance of 1e-9.
    """
    wn, weights = _overlap_weights(u1, axis)

    def overlap2(phi: float) -> float:
        return abs(np.sum(weights * np.exp(1j * phi * wn))) ** 2

    step = 1e-3
    lo = 0.0
    hi = None
    phi = step
    while phi <= np.pi + 1e-12:
        if overlap2(phi) < 0.5:
            hi = phi
            break
        lo = phi
        phi += step
    if hi is None:
        raise PhaseCrossingError("overlap never crosses 1/2 in (0, pi]")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if overlap2(mid) > 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def u_opt(u1: Unitary, axis: PhaseAxis, ops: SpinOps) -> Unitary:
    """The constructed maximally robust readout U_p U1^dag.

    U_p fixes |N/2>, sends the orthogonalized echoed state psi' at phi_0
    to |-N/2>, and completes the basis by Gram-Schmidt over the Jz basis
    vectors m = -N/2..N/2-1 (ascending) against span{|N/2>, psi'},
    dropping the one candidate absorbed by psi' and mapping the N-1
    survivors to |m> for m = -N/2+1..N/2-1 in ascending order.
    """
    dim = u1.dim
    n = dim - 1
    phi0 = find_phi0(u1, axis)
    psi0 = np.zeros(dim, dtype=complex)
    psi0[-1] = 1.0
    enc = expm_generator(axis.jn, phi0)
    psi_b = u1.u.conj().T @ (enc.u @ (u1.u @ psi0))
    overlap = psi_b[-1]  # <psi0|psi_b>
    psi_p = psi_b - overlap * psi0
    norm = np.linalg.norm(psi_p)
    if norm < 1e-8:
        raise BasisDeficitError("echoed state at phi_0 is parallel to |N/2>")
    psi_p = psi_p / norm

    basis = np.zeros((dim, dim), dtype=complex)  # rows are assembled vectors
    basis[0] = psi0
    basis[1] = psi_p
    count = 2
    kept: list[np.ndarray] = []
    for i in range(0, n):  # candidates |m> for m = -N/2 .. N/2-1
        v = np.zeros(dim, dtype=complex)
        v[i] = 1.0
        b = basis[:count]
        v = v - b.T @ (b.conj() @ v)
        v = v - b.T @ (b.conj() @ v)  # reorthogonalization pass
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v = v / nv
        basis[count] = v
        count += 1
        kept.append(v)
    if len(kept) != n - 1:
        raise BasisDeficitError(
            f"assembled {len(kept) + 2} of {dim} basis vectors")
    u_p = np.zeros((dim, dim), dtype=complex)
    u_p[-1] = psi0.conj()       # |N/2><N/2|
    u_p[0] = psi_p.conj()       # |-N/2><psi'|
    for row, vec in enumerate(kept, start=1):
        u_p[row] = vec.conj()
    return Unitary(u_p @ u1.u.conj().T)


def default_linear_rotation(scheme_kind: str, ops: SpinOps) -> Unitary:
    """The no-IBR rotation: e^{i pi/2 Jy} for oat/cat/tnt/css, identity otherwise."""
    if scheme_kind in ("oat", "cat", "tnt", "css"):
        return expm_generator(ops.jy, np.pi / 2)
    return Unitary(np.eye(ops.dim, dtype=complex))


def default_phi_grid(phi0: float, points: int = GRID_POINTS) -> np.ndarray:
    """phi in [0, 2 phi_0] with the zero endpoint lifted to PHI_FLOOR."""
    grid = np.linspace(0.0, 2.0 * phi0, points)
    grid[0] = PHI_FLOOR
    return grid


@dataclass(frozen=True)
class SweepSetup:
    """Preparation-dependent pieces shared by all readouts of one sweep."""

    prep: PrepScheme
    ops: SpinOps
    u1: Unitary
    axis: PhaseAxis
    f_q: float
    phi0: float
    state_is_mixed: bool
    rho: np.ndarray | None
    psi1: np.ndarray | None


def sweep_setup(prep: PrepScheme, ops: SpinOps | None = None) -> SweepSetup:
    """Resolve state, axis, preparation unitary and phi_0 for a scheme.

    For the mixed qnd scheme the axis is fixed to y and the echo readouts
    borrow the adiabatic-sweep unitary at the same N (chi_t0 = 20).
    """
    from .metrology import qfi_mixed, qfi_pure  # local to avoid cycle at import time

    if ops is None:
        ops = build_spin_ops(prep.n_particles)
    if prep.kind == "qnd":
        state = qnd_state(prep.n_particles, prep.delta, ops)
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        u1 = prep_unitary(scheme("qpt", prep.n_particles, chi_t0=prep.chi_t0 or 20.0,
                                 steps=prep.steps), ops)
        f_q = qfi_mixed(state, axis)
        phi0 = find_phi0(u1, axis)
        return SweepSetup(prep=prep, ops=ops, u1=u1, axis=axis, f_q=f_q, phi0=phi0,
                          state_is_mixed=True, rho=state.rho, psi1=None)
    u1 = prep_unitary(prep, ops)
    psi0 = np.zeros(ops.dim, dtype=complex)
    psi0[-1] = 1.0
    psi1 = u1.u @ psi0
    state = PureState(psi1)
    axis = optimal_phase_axis(state, ops)
    f_q = qfi_pure(state, axis)
    phi0 = find_phi0(u1, axis)
    return SweepSetup(prep=prep, ops=ops, u1=u1, axis=axis, f_q=f_q, phi0=phi0,
                      state_is_mixed=False, rho=None, psi1=psi1)


def build_readout(readout: ReadoutKind, setup: SweepSetup) -> Unitary:
    """Resolve a readout family to its unitary for a given preparation."""
    kind = readout.kind
    if kind == "linear":
        return readout.u_theta or default_linear_rotation(setup.prep.kind, setup.ops)
    if kind == "echo":
        return setup.u1.dagger()
    if kind == "flip_echo":
        return u_flip(setup.prep.n_particles, setup.ops) @ setup.u1.dagger()
    if kind == "flip_prime_echo":
        return u_flip_prime(setup.prep.n_particles, setup.ops) @ setup.u1.dagger()
    if kind == "optimal":
        if setup.state_is_mixed:
            raise ValueError("the constructed optimum needs a pure preparation")
        return u_opt(setup.u1, setup.axis, setup.ops)
    raise ValueError(kind)


class _DistEngine:
    """Evaluates (p, dp) of U2 e^{i Jn phi} |state> as a function of phi."""

    def __init__(self, setup: SweepSetup, u2: Unitary):
        self.wn, self.vn = np.linalg.eigh(setup.axis.jn)
        self.mixed = setup.state_is_mixed
        self.m = u2.u @ self.vn
        if self.mixed:
            self.r = self.vn.conj().T @ setup.rho @ self.vn
            self.dw = self.wn[:, None] - self.wn[None, :]
        else:
            self.w_psi = self.vn.conj().T @ setup.psi1
            self.g_psi = self.wn * self.w_psi

    def grid(self, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(p, dp) stacked over the grid; shapes (dim, len(phis))."""
        if not self.mixed:
            phases = np.exp(1j * np.outer(self.wn, phis))
            amp = self.m @ (phases * self.w_psi[:, None])
            damp = self.m @ (1j * phases * self.g_psi[:, None])
            p = np.abs(amp) ** 2
            dp = 2.0 * np.real(np.conj(amp) * damp)
            return p, dp
        cols = [self.single(phi) for phi in phis]
        return (np.stack([c[0] for c in cols], axis=1),
                np.stack([c[1] for c in cols], axis=1))

    def single(self, phi: float) -> tuple[np.ndarray, np.ndarray]:
        if not self.mixed:
            p, dp = self.grid(np.array([phi]))
            return p[:, 0], dp[:, 0]
        r_phi = self.r * np.exp(1j * phi * self.dw)
        dr_phi = 1j * self.dw * r_phi
        p = np.real(np.einsum("ij,jk,ik->i", self.m, r_phi, self.m.conj()))
        dp = np.real(np.einsum("ij,jk,ik->i", self.m, dr_phi, self.m.conj()))
        return p, dp


def _cfi_columns(p: np.ndarray, dp: np.ndarray, phis: np.ndarray,
                 context: str) -> np.ndarray:
    from .metrology import CFI_EPS
    mask = p > CFI_EPS
    bad = ~mask & (np.abs(dp) > np.sqrt(CFI_EPS))
    if np.any(bad):
        col = int(np.argmax(bad.any(axis=0)))
        raise IllConditionedDistributionError(f"{context}, phi={phis[col]!r}")
    contrib = np.where(mask, dp ** 2 / np.where(mask, p, 1.0), 0.0)
    return contrib.sum(axis=0)


def _golden_max(f, a: float, b: float, iters: int = 80) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a < 1e-13:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def cfi_sweep(prep: PrepScheme, readout: ReadoutKind, sigmas, phi_grid=None, *,
              ops: SpinOps | None = None, setup: SweepSetup | None = None,
              threads: int = 1) -> list[SweepRecord]:
    """Max-over-phi noisy Fisher information for each sigma, with NQCRB reference.

    The grid optimum is polished by golden-section refinement inside the
    bracketing grid cells, so the result does not depend on execution
    order or thread count.
    """
    if setup is None:
        setup = sweep_setup(prep, ops)
    u2 = build_readout(readout, setup)
    engine = _DistEngine(setup, u2)
    if phi_grid is None:
        phi_grid = default_phi_grid(setup.phi0)
    phi_grid = np.asarray(phi_grid, dtype=float)
    p_grid, dp_grid = engine.grid(phi_grid)
    n = setup.prep.n_particles
    sigmas = [float(s) for s in sigmas]

    def eval_sigma(sigma: float) -> SweepRecord:
        kern = noise_kernel(n, sigma)
        label = f"scheme={prep.label()} readout={readout.kind} sigma={sigma}"
        if sigma == 0:
            pt, dt = p_grid, dp_grid
        else:
            pt, dt = kern.gamma @ p_grid, kern.gamma @ dp_grid
        fis = _cfi_columns(pt, dt, phi_grid, label)
        k = int(np.argmax(fis))

        def f_at(phi: float) -> float:
            p, dp = engine.single(phi)
            if sigma != 0:
                p, dp = kern.gamma @ p, kern.gamma @ dp
            try:
                return _cfi_arrays(p, dp)
            except IllConditionedDistributionError as exc:
                raise IllConditionedDistributionError(
                    f"{label}, phi={phi!r}: {exc}") from None

        a = phi_grid[max(k - 1, 0)]
        b = phi_grid[min(k + 1, phi_grid.size - 1)]
        phi_ref, f_ref = _golden_max(f_at, a, b)
        if f_ref > fis[k]:
            phi_best, f_best = phi_ref, f_ref
        else:
            phi_best, f_best = float(phi_grid[k]), float(fis[k])
        return SweepRecord(scheme=prep.label(), readout=readout.kind, sigma=sigma,
                           phi_opt=phi_best, f_c=f_best,
                           f_n=nqcrb_numeric(n, setup.f_q, sigma), f_q=setup.f_q)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(eval_sigma, sigmas))
    else:
        records = [eval_sigma(s) for s in sigmas]
    return sorted(records, key=lambda r: r.sigma)
