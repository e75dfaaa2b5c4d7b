"""Tests for the expected-landscape formulas."""

import math

import numpy as np
import pytest

from gencs.generator import GeneratorNetwork, forward
from gencs.landscape import (
    angle,
    expected_risk,
    g_theta,
    h_direction,
    landscape_eval,
    q_matrix,
    rho,
    rho_table,
    theta_sequence,
)
from gencs.numerics import (
    STREAM_MEASUREMENT,
    gaussian_matrix,
    make_rng,
    substream,
)
from gencs.risk import RecoveryProblem, risk_value


class TestAngleContraction:
    def test_fixes_zero(self):
        assert g_theta(0.0) == 0.0

    def test_halves_pi(self):
        assert g_theta(math.pi) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_right_angle(self):
        assert g_theta(math.pi / 2) == pytest.approx(math.acos(1 / math.pi), abs=1e-15)

    @pytest.mark.parametrize("theta", [-0.1, math.pi + 0.1])
    def test_domain_enforced(self, theta):
        with pytest.raises(ValueError):
            g_theta(theta)

    def test_maps_into_domain_and_contracts(self):
        grid = np.linspace(0.0, math.pi, 2001)
        values = np.array([g_theta(t) for t in grid])
        assert np.all(values >= 0.0)
        assert np.all(values <= math.pi)
        assert np.all(values <= grid + 1e-15)

    def test_slope_between_zero_and_one(self):
        grid = np.linspace(0.0, math.pi, 2001)
        values = np.array([g_theta(t) for t in grid])
        slopes = np.diff(values) / np.diff(grid)
        assert slopes.min() >= -1e-9
        assert slopes.max() <= 1.0 + 1e-9


class TestThetaSequence:
    def test_zero_fixed_point(self):
        assert np.array_equal(theta_sequence(0.0, 5), np.zeros(5))

    def test_pi_start(self):
        np.testing.assert_allclose(
            theta_sequence(math.pi, 2), [math.pi, math.pi / 2], atol=1e-15
        )

    def test_nonincreasing_everywhere(self):
        for theta0 in np.linspace(0.0, math.pi, 50):
            seq = theta_sequence(theta0, 8)
            assert np.all(np.diff(seq) <= 1e-15)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            theta_sequence(4.0, 3)
        with pytest.raises(ValueError):
            theta_sequence(1.0, 0)


class TestAngle:
    def test_accurate_near_parallel(self):
        x = np.array([1.0, 0.0])
        y = np.array([1.0, 1e-9])
        assert angle(x, y) == pytest.approx(1e-9, rel=1e-6)

    def test_accurate_near_antiparallel(self):
        x = np.array([1.0, 0.0])
        y = np.array([-1.0, 1e-9])
        assert angle(x, y) == pytest.approx(math.pi - 1e-9, abs=1e-13)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            angle(np.zeros(2), np.ones(2))


class TestHDirection:
    @pytest.mark.parametrize("d", range(1, 7))
    def test_vanishes_at_ground_truth(self, d):
        xs = make_rng(1).standard_normal(6)
        assert np.linalg.norm(h_direction(xs, xs, d)) <= 1e-10

    @pytest.mark.parametrize("d", range(1, 7))
    def test_vanishes_at_spurious_point(self, d):
        xs = make_rng(2).standard_normal(6)
        assert np.linalg.norm(h_direction(-rho(d) * xs, xs, d)) <= 1e-10

    def test_zero_inputs_rejected(self):
        with pytest.raises(ValueError):
            h_direction(np.zeros(3), np.ones(3), 2)
        with pytest.raises(ValueError):
            h_direction(np.ones(3), np.zeros(3), 2)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_lipschitz_bound_outside_ball(self, d):
        # ||h_x - h_y|| <= (1 + (6d + 4d^2) / (pi r)) ||x - y|| / 2^d
        # for ||x||, ||y|| >= r ||xstar||, here with r = 0.5
        rng = make_rng(88 + d)
        xs = rng.standard_normal(6)
        const = (1.0 + (6 * d + 4 * d * d) / (math.pi * 0.5)) / 2.0 ** d
        for _ in range(1000):
            a = rng.standard_normal(6)
            a *= rng.uniform(0.5, 3.0) * np.linalg.norm(xs) / np.linalg.norm(a)
            b = rng.standard_normal(6)
            b *= rng.uniform(0.5, 3.0) * np.linalg.norm(xs) / np.linalg.norm(b)
            lhs = np.linalg.norm(h_direction(a, xs, d) - h_direction(b, xs, d))
            assert lhs <= const * np.linalg.norm(a - b) + 1e-12


class TestExpectedRisk:
    def test_zero_at_ground_truth(self):
        xs = make_rng(3).standard_normal(5)
        assert expected_risk(xs, xs, 3) == pytest.approx(0.0, abs=1e-15)

    def test_origin_limit(self):
        xs = make_rng(4).standard_normal(5)
        expected = float(xs @ xs) / 2.0 ** 4
        assert expected_risk(np.zeros(5), xs, 3) == pytest.approx(expected, rel=1e-15)

    def test_zero_ground_truth_rejected(self):
        with pytest.raises(ValueError):
            expected_risk(np.ones(3), np.zeros(3), 2)

    def test_matches_monte_carlo_mean_over_wide_nets(self):
        # the empirical risk under fresh wide Gaussian layers and a fresh
        # Gaussian measurement matrix averages to the closed form
        rng = make_rng(77)
        k = 4
        xstar = rng.standard_normal(k)
        x = rng.standard_normal(k)
        values = []
        for s in range(200):
            net = GeneratorNetwork.random([k, 400, 1600], seed=30000 + s)
            A = gaussian_matrix(300, 1600, 1.0 / 300, substream(30000 + s, STREAM_MEASUREMENT))
            signal, _ = forward(net, xstar)
            p = RecoveryProblem(
                net=net, A=A, y=A @ signal, ground_truth=xstar, noise=np.zeros(300)
            )
            values.append(risk_value(p, x))
        analytic = expected_risk(x, xstar, 2)
        assert abs(np.mean(values) - analytic) <= 0.05 * analytic


class TestRho:
    def test_depth_one_is_zero(self):
        assert abs(rho(1)) <= 1e-12

    def test_depth_two_is_one_over_pi(self):
        assert rho(2) == pytest.approx(1 / math.pi, abs=1e-12)

    def test_nondecreasing_and_bounded(self):
        values = [rho(d) for d in range(1, 51)]
        assert all(0.0 <= v < 1.0 for v in values)
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("d", range(2, 51))
    def test_complement_bound(self, d):
        assert 1.0 - rho(d) <= 250.0 / (d + 1)

    def test_rejects_bad_depth(self):
        with pytest.raises(ValueError):
            rho(0)

    def test_table_rows(self):
        table = rho_table([1, 2, 3])
        rows = list(table.rows())
        assert rows[0][0] == 1
        assert rows[1][1] == pytest.approx(1 / math.pi, abs=1e-12)
        assert rows[2][2] == pytest.approx(250.0 / 4.0)


class TestQMatrix:
    def test_parallel_is_half_identity(self):
        x = make_rng(5).standard_normal(4)
        np.testing.assert_allclose(q_matrix(x, x), np.eye(4) / 2, atol=1e-14)
        np.testing.assert_allclose(q_matrix(x, 2 * x), np.eye(4) / 2, atol=1e-14)

    def test_antiparallel_is_zero(self):
        x = make_rng(6).standard_normal(4)
        np.testing.assert_allclose(q_matrix(x, -x), np.zeros((4, 4)), atol=1e-14)

    def test_orthogonal_pair(self):
        e1, e2 = np.eye(3)[0], np.eye(3)[1]
        M = np.zeros((3, 3))
        M[0, 1] = M[1, 0] = 1.0
        expected = np.eye(3) / 4 + M / (2 * math.pi)
        np.testing.assert_allclose(q_matrix(e1, e2), expected, atol=1e-14)

    def test_symmetric_with_bounded_spectrum(self):
        rng = make_rng(7)
        for _ in range(50):
            x = rng.standard_normal(5)
            y = rng.standard_normal(5)
            Q = q_matrix(x, y)
            np.testing.assert_allclose(Q, Q.T, atol=1e-14)
            eigs = np.linalg.eigvalsh(Q)
            assert eigs.min() >= -1e-12
            assert eigs.max() <= 0.5 + 1e-12

    def test_zero_inputs_rejected(self):
        with pytest.raises(ValueError):
            q_matrix(np.zeros(3), np.ones(3))


class TestLandscapeEval:
    def test_bundles_consistent_values(self):
        rng = make_rng(8)
        x = rng.standard_normal(5)
        xs = rng.standard_normal(5)
        ev = landscape_eval(x, xs, 3)
        assert ev.d == 3
        assert np.all(np.diff(ev.theta_bars) <= 1e-15)
        assert np.all((ev.theta_bars >= 0) & (ev.theta_bars <= math.pi))
        np.testing.assert_allclose(ev.h, h_direction(x, xs, 3), atol=1e-15)
        assert ev.f_expected == pytest.approx(expected_risk(x, xs, 3), abs=1e-15)
