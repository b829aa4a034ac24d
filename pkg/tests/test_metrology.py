import numpy as np
import pytest

from spinibr import (
    IllConditionedDistributionError,
    MixedState,
    ProbDist,
    PureState,
    apply,
    build_spin_ops,
    cfi,
    encode_phase,
    expm_generator,
    hellinger,
    jz_eigenstate,
    measurement_distribution,
    optimal_phase_axis,
    phase_axis,
    prep_unitary,
    prepared_state,
    qfi_mixed,
    qfi_pure,
    qnd_state,
    scheme,
)
from spinibr.metrology import covariance_matrix


def random_pure(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return PureState(amps / np.linalg.norm(amps))


class TestOptimalAxis:
    def test_cat_axis_carries_heisenberg_eigenvalue(self):
        n = 10
        ops = build_spin_ops(n)
        state = prepared_state(scheme("cat", n), ops)
        axis = optimal_phase_axis(state, ops)
        # equatorial cat: covariance top eigenvalue N^2/4 along x
        w = np.linalg.eigvalsh(covariance_matrix(state, ops))
        assert w[-1] == pytest.approx(n ** 2 / 4, rel=1e-9)
        assert abs(axis.n[0]) == pytest.approx(1.0, abs=1e-6)

    def test_css_tie_breaks_to_z(self):
        n = 12
        ops = build_spin_ops(n)
        state = prepared_state(scheme("css", n), ops)
        axis = optimal_phase_axis(state, ops)
        assert np.allclose(axis.n, [0.0, 0.0, 1.0], atol=1e-9)
        assert qfi_pure(state, axis) == pytest.approx(n, rel=1e-10)

    def test_axis_beats_random_directions(self):
        ops = build_spin_ops(14)
        state = random_pure(14, 42)
        axis = optimal_phase_axis(state, ops)
        best = qfi_pure(state, axis)
        rng = np.random.default_rng(7)
        for _ in range(100):
            u = rng.standard_normal(3)
            other = qfi_pure(state, phase_axis(u, ops))
            assert best >= other - 1e-9

    def test_mixed_state_requires_explicit_axis(self):
        ops = build_spin_ops(10)
        rho = qnd_state(10, 1.0, ops)
        with pytest.raises(ValueError):
            optimal_phase_axis(rho, ops)
        axis = phase_axis(np.array([0.0, 2.0, 0.0]), ops)
        assert np.allclose(axis.n, [0.0, 1.0, 0.0])


class TestEncodePhase:
    def test_zero_phase_is_identity(self):
        ops = build_spin_ops(8)
        state = random_pure(8, 1)
        axis = optimal_phase_axis(state, ops)
        out = encode_phase(state, axis, 0.0)
        assert np.abs(out.amplitudes - state.amplitudes).max() < 1e-14

    def test_phase_inverse_and_composition(self):
        ops = build_spin_ops(9)
        state = random_pure(9, 2)
        axis = optimal_phase_axis(state, ops)
        back = encode_phase(encode_phase(state, axis, 0.43), axis, -0.43)
        assert np.abs(back.amplitudes - state.amplitudes).max() < 1e-10
        a = encode_phase(encode_phase(state, axis, 0.2), axis, 0.5)
        b = encode_phase(state, axis, 0.7)
        assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-9

    def test_mixed_encoding_conjugates(self):
        ops = build_spin_ops(8)
        rho = qnd_state(8, 1.0, ops)
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        out = encode_phase(rho, axis, 0.3)
        assert abs(np.trace(out.rho).real - 1.0) < 1e-12
        back = encode_phase(out, axis, -0.3)
        assert np.abs(back.rho - rho.rho).max() < 1e-10


class TestMeasurementDistribution:
    def test_identity_readout_on_top_state(self):
        n = 10
        ops = build_spin_ops(n)
        axis = phase_axis(np.array([1.0, 0.0, 0.0]), ops)
        d = measurement_distribution(jz_eigenstate(n, 5), None, axis)
        expected = np.zeros(n + 1)
        expected[-1] = 1.0
        assert np.allclose(d.p, expected, atol=1e-14)

    def test_derivative_sums_to_zero(self):
        ops = build_spin_ops(16)
        u2 = expm_generator(ops.jy, 0.8)
        for seed in range(5):
            state = random_pure(16, seed)
            axis = optimal_phase_axis(state, ops)
            d = measurement_distribution(state, u2, axis)
            assert abs(d.dp.sum()) < 1e-10
            assert abs(d.p.sum() - 1.0) < 1e-12

    @pytest.mark.parametrize("n", [10, 24, 40])
    def test_derivative_matches_finite_difference(self, n):
        ops = build_spin_ops(n)
        u1 = prep_unitary(scheme("oat", n), ops)
        state = apply(u1, jz_eigenstate(n, n / 2))
        axis = optimal_phase_axis(state, ops)
        u2 = u1.dagger()
        h = 1e-5
        for phi in (0.01, 0.11):
            encoded = encode_phase(state, axis, phi)
            d = measurement_distribution(encoded, u2, axis)
            p_hi = measurement_distribution(encode_phase(state, axis, phi + h), u2, axis).p
            p_lo = measurement_distribution(encode_phase(state, axis, phi - h), u2, axis).p
            fd = (p_hi - p_lo) / (2 * h)
            assert np.abs(d.dp - fd).max() < 1e-6

    def test_mixed_distribution_derivative(self):
        n = 10
        ops = build_spin_ops(n)
        rho = qnd_state(n, 1.0, ops)
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        u2 = expm_generator(ops.jx, 0.3)
        h = 1e-5
        phi = 0.2
        d = measurement_distribution(encode_phase(rho, axis, phi), u2, axis)
        p_hi = measurement_distribution(encode_phase(rho, axis, phi + h), u2, axis).p
        p_lo = measurement_distribution(encode_phase(rho, axis, phi - h), u2, axis).p
        assert np.abs(d.dp - (p_hi - p_lo) / (2 * h)).max() < 1e-6


class TestCfi:
    def test_two_point_extremal_value_is_exact(self):
        f0 = 7.5
        n = 6
        p = np.zeros(n + 1)
        dp = np.zeros(n + 1)
        p[0] = p[-1] = 0.5
        dp[-1] = np.sqrt(f0) / 2
        dp[0] = -np.sqrt(f0) / 2
        assert cfi(ProbDist(p=p, dp=dp)) == pytest.approx(f0, rel=1e-14)

    def test_zero_derivative_gives_zero(self):
        d = ProbDist(p=np.full(5, 0.2), dp=np.zeros(5))
        assert cfi(d) == 0.0

    @pytest.mark.parametrize("pa", [0.1, 0.5, 0.9])
    def test_general_two_outcome_construction(self, pa):
        f0 = 3.0
        p = np.array([pa, 1 - pa, 0.0])
        root = np.sqrt(f0 * (pa - pa ** 2))
        dp = np.array([root, -root, 0.0])
        assert cfi(ProbDist(p=p, dp=dp)) == pytest.approx(f0, rel=1e-12)

    def test_guard_raises_on_information_at_dead_outcome(self):
        p = np.array([1.0, 0.0])
        dp = np.array([-1e-3, 1e-3])
        with pytest.raises(IllConditionedDistributionError):
            cfi(ProbDist(p=p, dp=dp))

    def test_analytic_cfi_matches_finite_difference_cfi(self):
        n = 20
        ops = build_spin_ops(n)
        u1 = prep_unitary(scheme("oat", n), ops)
        state = apply(u1, jz_eigenstate(n, 10))
        axis = optimal_phase_axis(state, ops)
        u2 = expm_generator(ops.jy, np.pi / 2)
        h = 1e-5
        for phi in (0.03, 0.2):
            d = measurement_distribution(encode_phase(state, axis, phi), u2, axis)
            p_hi = measurement_distribution(encode_phase(state, axis, phi + h), u2, axis).p
            p_lo = measurement_distribution(encode_phase(state, axis, phi - h), u2, axis).p
            fd = ProbDist(p=d.p, dp=(p_hi - p_lo) / (2 * h))
            assert cfi(d) == pytest.approx(cfi(fd), rel=1e-5)


class TestQfi:
    @pytest.mark.parametrize("n", [4, 10, 40])
    def test_reference_states(self, n):
        ops = build_spin_ops(n)
        css = prepared_state(scheme("css", n), ops)
        assert qfi_pure(css, optimal_phase_axis(css, ops)) == pytest.approx(n, rel=1e-8)
        cat = prepared_state(scheme("cat", n), ops)
        assert qfi_pure(cat, optimal_phase_axis(cat, ops)) == pytest.approx(n ** 2, rel=1e-8)
        twin = jz_eigenstate(n, 0)
        x_axis = phase_axis(np.array([1.0, 0.0, 0.0]), ops)
        assert qfi_pure(twin, x_axis) == pytest.approx(n * (n + 2) / 2, rel=1e-8)

    def test_rank_one_mixed_equals_pure(self):
        n = 12
        ops = build_spin_ops(n)
        state = random_pure(n, 9)
        axis = optimal_phase_axis(state, ops)
        rho = MixedState(np.outer(state.amplitudes, state.amplitudes.conj()))
        assert qfi_mixed(rho, axis) == pytest.approx(qfi_pure(state, axis), rel=1e-8)

    def test_maximally_mixed_gives_zero(self):
        n = 8
        ops = build_spin_ops(n)
        rho = MixedState(np.eye(n + 1, dtype=complex) / (n + 1))
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        assert abs(qfi_mixed(rho, axis)) < 1e-10

    def test_qnd_against_brute_force_double_sum(self):
        n = 10
        ops = build_spin_ops(n)
        rho = qnd_state(n, 1.0, ops)
        axis = phase_axis(np.array([0.0, 1.0, 0.0]), ops)
        lam, vecs = np.linalg.eigh(rho.rho)
        total = 0.0
        for i in range(n + 1):
            for j in range(n + 1):
                den = lam[i] + lam[j]
                if den > 1e-12:
                    amp = vecs[:, i].conj() @ (axis.jn @ vecs[:, j])
                    total += 2 * abs(amp) ** 2 * (lam[i] - lam[j]) ** 2 / den
        assert qfi_mixed(rho, axis) == pytest.approx(total, rel=1e-12)

    def test_invariance_under_global_phase_and_joint_rotation(self):
        n = 10
        ops = build_spin_ops(n)
        state = random_pure(n, 17)
        axis = optimal_phase_axis(state, ops)
        base = qfi_pure(state, axis)
        phased = PureState(np.exp(1j * 0.83) * state.amplitudes)
        assert qfi_pure(phased, axis) == pytest.approx(base, rel=1e-12)
        rot = expm_generator(ops.jy, 0.61)
        rotated_state = apply(rot, state)
        rotated_jn = rot.u @ axis.jn @ rot.u.conj().T
        from spinibr.metrology import PhaseAxis
        rotated_axis = PhaseAxis(n=axis.n, jn=rotated_jn)
        assert qfi_pure(rotated_state, rotated_axis) == pytest.approx(base, rel=1e-9)


class TestHellinger:
    def test_identical_and_disjoint(self):
        p = ProbDist(p=np.array([0.3, 0.7, 0.0]), dp=np.zeros(3))
        q = ProbDist(p=np.array([0.0, 0.0, 1.0]), dp=np.zeros(3))
        assert hellinger(p, p) == 0.0
        assert hellinger(p, q) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            a, b, c = (rng.dirichlet(np.ones(9)) for _ in range(3))
            da, db, dc = (ProbDist(p=x, dp=np.zeros(9)) for x in (a, b, c))
            assert hellinger(da, db) == pytest.approx(hellinger(db, da), abs=1e-15)
            assert hellinger(da, dc) <= hellinger(da, db) + hellinger(db, dc) + 1e-12


@pytest.mark.parametrize("kind,n", [("oat", 10), ("oat", 20), ("tact", 20), ("cat", 10)])
def test_qcrb_saturation_through_constructed_optimum(kind, n):
    # phi -> 0+ limit taken as the max over a decreasing phi ladder: tiny phi
    # trips the zero-probability cutoff, large phi feels curvature.
    from spinibr import u_opt
    ops = build_spin_ops(n)
    u1 = prep_unitary(scheme(kind, n), ops)
    state = apply(u1, jz_eigenstate(n, n / 2))
    axis = optimal_phase_axis(state, ops)
    u2 = u_opt(u1, axis, ops)
    best = max(
        cfi(measurement_distribution(encode_phase(state, axis, phi), u2, axis))
        for phi in (3e-3, 1e-3, 3e-4, 1e-4)
    )
    assert best == pytest.approx(qfi_pure(state, axis), rel=1e-6)
