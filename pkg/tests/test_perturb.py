import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ris_isac import (
    ConfigError,
    SystemConstants,
    beampattern_gain,
    build_system,
    child_rng,
    comm_optimal_phase,
    compose_phase,
    gain_upper_bound,
    solve_perturbation,
)
from ris_isac.errors import IllPosedWarning, NumericalError, ShapeError
from ris_isac.perturb import (
    RisPhase,
    eta_exact,
    eta_linearized,
    eta_targets,
    fixed_fraction_lambda,
    lambda_schedule,
    wrap_phase,
)

finite_phases = st.lists(
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False), min_size=1, max_size=32
)


def toy_consts(p=1.0, m=1, beta=1.0):
    return SystemConstants(
        transmit_power_w=p, noise_power_w=1e-11, beta_g=beta, bs_antennas=m
    )


def random_system(rng, n, k, consts=None, eta_bar=None):
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a_targets = [np.exp(1j * rng.uniform(-np.pi, np.pi, n)) for _ in range(k)]
    if eta_bar is None:
        eta_bar = rng.uniform(0.0, n, k)
    return build_system(h, a_targets, eta_bar, consts or toy_consts())


class TestWrapPhase:
    @given(finite_phases)
    def test_range_and_congruence(self, phis):
        phis = np.asarray(phis)
        w = wrap_phase(phis)
        assert np.all(w > -np.pi) and np.all(w <= np.pi)
        np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * phis), atol=1e-9)

    def test_boundary(self):
        assert wrap_phase(np.array([np.pi]))[0] == pytest.approx(np.pi)
        assert wrap_phase(np.array([-np.pi]))[0] == pytest.approx(np.pi)


class TestRisPhase:
    @given(finite_phases)
    def test_unit_modulus(self, phis):
        p = RisPhase(np.asarray(phis))
        np.testing.assert_allclose(np.abs(p.v), 1.0, atol=1e-12)

    def test_from_vector_roundtrip(self):
        v = np.exp(1j * np.array([0.1, -2.0, 3.0]))
        np.testing.assert_allclose(RisPhase.from_vector(v).v, v, atol=1e-12)


class TestEta:
    def test_exact_gain_identity(self, channels, consts):
        """Beampattern gain of the composed phases equals the exact beam-sum form."""
        rng = child_rng(11)
        v_star = comm_optimal_phase(channels.h_ue, channels.g_ris)
        for _ in range(20):
            dphi = rng.uniform(-0.5, 0.5, 441)
            v = compose_phase(v_star, dphi)
            for a in channels.a_targets:
                eta = eta_exact(dphi, channels.h_ue, a)
                pref = consts.transmit_power_w * consts.beta_g * consts.bs_antennas
                gain = beampattern_gain(v.v, a, channels.g_ris, consts)
                assert gain == pytest.approx(pref * abs(eta) ** 2, rel=1e-9)

    def test_linearized_matches_exact_at_zero(self, channels):
        z = np.zeros(441)
        for a in channels.a_targets:
            assert eta_linearized(z, channels.h_ue, a) == pytest.approx(
                eta_exact(z, channels.h_ue, a)
            )

    @given(scale=st.floats(min_value=1e-4, max_value=0.3))
    @settings(max_examples=25, deadline=None)
    def test_taylor_bound(self, scale):
        rng = child_rng(12)
        h = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        a = np.exp(1j * rng.uniform(-np.pi, np.pi, 16))
        dphi = scale * rng.standard_normal(16)
        gap = abs(eta_exact(dphi, h, a) - eta_linearized(dphi, h, a))
        assert gap <= np.sum(dphi**2) / 2.0 + 1e-12

    def test_eta_targets(self):
        np.testing.assert_allclose(eta_targets(0.5, (0.5, 0.5), 441), [110.25, 110.25])
        with pytest.raises(ConfigError):
            eta_targets(0.5, (0.6, 0.6), 441)


class TestBuildSystem:
    def test_stacked_objective_equivalence(self):
        """Real stacked least squares reproduces the weighted complex objective."""
        rng = child_rng(13)
        for _ in range(100):
            n = int(rng.integers(4, 64))
            k = int(rng.integers(1, 5))
            consts = toy_consts(
                p=float(rng.uniform(0.1, 10)), m=int(rng.integers(1, 16)),
                beta=float(rng.uniform(1e-8, 1.0)),
            )
            sys_ = random_system(rng, n, k, consts)
            dphi = rng.standard_normal(n)
            lhs = np.linalg.norm(sys_.a_stacked @ dphi - sys_.b_stacked) ** 2
            etas = sys_.eta_linearized_all(dphi)
            rhs = sys_.scale**2 * np.sum(np.abs(etas - sys_.eta_bar) ** 2)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_overdetermined_warns(self):
        rng = child_rng(14)
        with pytest.warns(IllPosedWarning):
            random_system(rng, 3, 5)

    def test_shape_errors(self):
        rng = child_rng(15)
        h = rng.standard_normal(8) + 0j
        with pytest.raises(ShapeError):
            build_system(h, [], np.array([]), toy_consts())
        with pytest.raises(ShapeError):
            build_system(h, [np.ones(8)], np.array([1.0, 2.0]), toy_consts())

    def test_svd_shapes_full(self):
        sys_ = random_system(child_rng(16), 12, 2)
        assert sys_.svd_u.shape == (4, 4)
        assert sys_.svd_vt.shape == (12, 12)
        assert np.all(np.diff(sys_.svd_s) <= 0)


class TestLambdaSchedules:
    def test_adaptive_endpoints(self):
        assert lambda_schedule(0.0, 3.0) == 3.0
        assert lambda_schedule(1.0, 3.0) == 0.0
        assert lambda_schedule(0.5, 4.0) == pytest.approx(3.0)

    def test_fixed_fraction(self):
        assert fixed_fraction_lambda(0.1, 5.0) == pytest.approx(0.5)

    @given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=1e6))
    def test_adaptive_nonnegative_decreasing(self, alpha, sigma):
        lam = lambda_schedule(alpha, sigma)
        assert 0.0 <= lam <= sigma


class TestSolver:
    def test_matches_normal_equation_oracle(self):
        """SVD-filtered solve equals the dense ridge normal equations."""
        rng = child_rng(17)
        for _ in range(12):
            n = int(rng.integers(8, 128))
            k = int(rng.integers(1, 9))
            sys_ = random_system(rng, n, k)
            for frac in (1e-3, 1.0, 10.0):
                lam = frac * sys_.sigma_max
                report = solve_perturbation(sys_, lam)
                a, b = sys_.a_stacked, sys_.b_stacked
                oracle = np.linalg.solve(a.T @ a + lam * np.eye(n), a.T @ b)
                np.testing.assert_allclose(report.delta_phi, oracle, rtol=1e-8, atol=1e-10)

    def test_lambda_zero_is_pseudo_inverse(self):
        sys_ = random_system(child_rng(18), 32, 2)
        report = solve_perturbation(sys_, 0.0)
        oracle, *_ = np.linalg.lstsq(sys_.a_stacked, sys_.b_stacked, rcond=None)
        np.testing.assert_allclose(report.delta_phi, oracle, rtol=1e-8, atol=1e-10)

    def test_norm_decreases_with_lambda(self):
        sys_ = random_system(child_rng(19), 32, 2)
        norms = [
            np.linalg.norm(solve_perturbation(sys_, lam).delta_phi)
            for lam in (0.0, 0.1 * sys_.sigma_max, sys_.sigma_max, 10 * sys_.sigma_max)
        ]
        assert norms == sorted(norms, reverse=True)

    def test_negative_lambda_rejected(self):
        sys_ = random_system(child_rng(20), 8, 1)
        with pytest.raises(ValueError):
            solve_perturbation(sys_, -1.0)

    def test_report_fields(self):
        sys_ = random_system(child_rng(21), 16, 2)
        report = solve_perturbation(sys_, sys_.sigma_max)
        assert report.lambda_used == pytest.approx(sys_.sigma_max)
        assert report.max_abs_perturbation == pytest.approx(
            np.max(np.abs(report.delta_phi))
        )
        assert report.objective_value >= 0
        assert report.linearization_error_bound == pytest.approx(
            np.sum(report.delta_phi**2) / 2
        )


class TestCompose:
    def test_compose_shifts_phases(self):
        base = RisPhase(np.array([0.0, 1.0]))
        out = compose_phase(base, np.array([0.5, -0.5]))
        np.testing.assert_allclose(out.phi, [0.5, 0.5])

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            compose_phase(RisPhase(np.zeros(2)), np.zeros(3))


class TestGainUpperBound:
    def test_value(self):
        c = toy_consts(p=2.0, m=3, beta=0.5)
        ub = gain_upper_bound(0.5, (0.5, 0.5), c, 100)
        # P*beta*M*(alpha*zeta*N)^2 = 2*0.5*3*(25)^2
        np.testing.assert_allclose(ub, [1875.0, 1875.0])

    def test_increasing_in_alpha(self):
        c = toy_consts()
        lo = gain_upper_bound(0.2, (1.0,), c, 10)
        hi = gain_upper_bound(0.8, (1.0,), c, 10)
        assert np.all(hi > lo)
