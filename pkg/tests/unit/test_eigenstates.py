"""
Tests for the Bargmann eigenstates and their Fock expansions
"""

import math

import numpy as np
import pytest

from common.config import get_settings
from common.exceptions import DeformationDomainError, RouteError, TruncationError
from oscillator.eigenstates import (
    annihilation_residual,
    coeff_f_closed,
    coeff_f_recursive,
    eigenstate_fock,
    ground_state_fock,
    ground_state_from_q_exponential,
    hermite_limit,
    injected_fault,
    ladder_check,
    normalization,
    normalization_recursive,
    polynomial_p,
    polynomial_value,
)
from oscillator.qcalc import q_number
from tests.conftest import derived
from tests.fixtures.parameters import HERMITE_T_VALUES, random_q_t


def _gap(p, r) -> float:
    return float(np.max(np.abs(p.to_dense() - r.to_dense())))


class TestCoefficients:

    def test_low_orders(self):
        q, t = 1.6, 0.35
        assert coeff_f_closed(0, 0, q, t) == 1.0
        assert coeff_f_closed(1, 1, q, t) == pytest.approx(1.0 - t * t / q, rel=1e-14)
        assert coeff_f_closed(2, 0, q, t) == pytest.approx(-t * (1.0 - t * t / q ** 3), rel=1e-14)
        assert coeff_f_closed(2, 2, q, t) == pytest.approx((1.0 - t * t / q) * (1.0 - t * t / q ** 3), rel=1e-14)

    def test_f_3_1(self):
        q, t = 1.6, 0.35
        expected = -q_number(3, q) * (t / q) * (1.0 - t * t / q ** 3) * (1.0 - t * t / q ** 5)
        assert coeff_f_closed(3, 1, q, t) == pytest.approx(expected, rel=1e-13)

    def test_boundary_entry(self):
        assert coeff_f_closed(4, -1, 1.5, 0.2) == 0.0

    @pytest.mark.parametrize("n,m", [(3, 2), (2, 3), (-1, 0), (4, 6)])
    def test_invalid_indices(self, n, m):
        with pytest.raises(DeformationDomainError):
            coeff_f_closed(n, m, 1.5, 0.2)

    def test_pure_state_at_t_zero(self):
        for n in range(6):
            assert coeff_f_closed(n, n, 1.7, 0.0) == 1.0
            for m in range(n % 2, n - 1, 2):
                assert coeff_f_closed(n, m, 1.7, 0.0) == 0.0

    def test_recursion_matches_closed_form(self, rng):
        for q, t in random_q_t(rng, 10):
            rows = coeff_f_recursive(20, q, t)
            for n, row in enumerate(rows):
                closed = {m: coeff_f_closed(n, m, q, t) for m in row}
                scale = max(abs(v) for v in closed.values())
                for m, value in row.items():
                    assert abs(value - closed[m]) <= 1e-10 * scale

    def test_log_domain(self):
        value = coeff_f_closed(7, 3, 1.4, -0.5, log_domain=True)
        assert value.to_float() == pytest.approx(coeff_f_closed(7, 3, 1.4, -0.5), rel=1e-14)

    def test_injected_fault_is_scoped(self):
        clean = coeff_f_closed(3, 1, 1.5, 0.3)
        with injected_fault(3, 1):
            assert coeff_f_closed(3, 1, 1.5, 0.3) == pytest.approx(1.001 * clean, rel=1e-14)
            assert coeff_f_closed(3, 3, 1.5, 0.3) == coeff_f_closed(3, 3, 1.5, 0.3)
        assert coeff_f_closed(3, 1, 1.5, 0.3) == clean


class TestNormalization:

    def test_trivial_values(self):
        assert normalization(0, 1.8, 0.0) == 1.0
        assert normalization(3, 1.8, 0.0) == pytest.approx(1.0 / math.sqrt(q_number(2, 1.8) * q_number(3, 1.8)), rel=1e-14)

    def test_classical_ground_state(self):
        # q = 1: N_0 = (1 - t^2)^(1/4)
        assert normalization(0, 1.0, 0.6) == pytest.approx(0.64 ** 0.25, rel=1e-12)

    def test_recursion_matches_closed_form(self, rng):
        for q, t in random_q_t(rng, 8):
            for n in range(16):
                assert normalization_recursive(n, q, t) == pytest.approx(normalization(n, q, t), rel=1e-10)

    def test_needs_t_inside_unit_disc(self):
        with pytest.raises(DeformationDomainError):
            normalization(0, 1.5, 1.0)


class TestPolynomials:

    def test_p0_and_p2(self):
        q, t = 1.5, 0.4
        assert polynomial_p(0, q, t).coeffs == {0: 1.0}
        p2 = polynomial_p(2, q, t)
        assert p2.coefficient(2) == pytest.approx((1.0 - t * t / q) * (1.0 - t * t / q ** 3), rel=1e-14)
        assert p2.coefficient(0) == pytest.approx(-t * (1.0 - t * t / q ** 3), rel=1e-14)

    def test_parity(self):
        p5 = polynomial_p(5, 1.5, 0.4, route="recursive")
        assert p5.parity == "odd"
        assert sorted(p5.coeffs) == [1, 3, 5]
        assert polynomial_value(p5, -0.7) == pytest.approx(-polynomial_value(p5, 0.7), rel=1e-14)

    def test_three_routes_agree(self):
        closed = polynomial_p(6, 1.5, 0.4)
        for route in ("recursive", "jacobi"):
            assert _gap(closed, polynomial_p(6, 1.5, 0.4, route=route)) <= 1e-11 * closed.max_abs_coeff()

    def test_routes_agree_at_random_parameters(self, rng):
        for q, t in random_q_t(rng, 8):
            for n in range(13):
                closed = polynomial_p(n, q, t)
                tol = 1e-9 * closed.max_abs_coeff()
                assert _gap(closed, polynomial_p(n, q, t, route="recursive")) <= tol
                assert _gap(closed, polynomial_p(n, q, t, route="jacobi")) <= tol

    def test_jacobi_route_needs_deformation(self):
        with pytest.raises(RouteError):
            polynomial_p(4, 1.0, 0.3, route="jacobi")

    def test_unknown_route(self):
        with pytest.raises(DeformationDomainError):
            polynomial_p(2, 1.5, 0.3, route="series")


class TestFockExpansion:

    def test_ground_state_ratio(self, general_dp):
        psi = ground_state_fock(general_dp, sigma_max=30)
        assert psi.coeffs[0] > 0
        assert psi.coeffs[1] / psi.coeffs[0] == pytest.approx(general_dp.t / math.sqrt(general_dp.q + 1.0), rel=1e-12)

    def test_ground_state_at_t_zero(self, equal_dp):
        psi = ground_state_fock(equal_dp)
        assert psi.coeffs[0] == 1.0
        assert not any(psi.coeffs[1:])

    def test_pure_q_boson_state_at_t_zero(self, equal_dp):
        psi = eigenstate_fock(equal_dp, 3)
        assert psi.parity == "odd"
        assert psi.fock_indices()[:3] == [1, 3, 5]
        assert psi.coeffs[1] == 1.0
        assert sum(abs(c) for c in psi.coeffs) == 1.0

    def test_first_state_matches_ground_state(self, general_dp):
        np.testing.assert_allclose(
            eigenstate_fock(general_dp, 0, sigma_max=40).coeffs,
            ground_state_fock(general_dp, sigma_max=40).coeffs,
            rtol=1e-12, atol=1e-15,
        )

    def test_q_exponential_route(self, general_dp, mirrored_dp):
        for dp in (general_dp, mirrored_dp):
            np.testing.assert_allclose(
                ground_state_from_q_exponential(dp, 30).coeffs,
                ground_state_fock(dp, sigma_max=30).coeffs,
                rtol=1e-12, atol=1e-15,
            )

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_closed_form_normalization(self, general_dp, n):
        psi = eigenstate_fock(general_dp, n, sigma_max=80)
        assert psi.norm_squared() == pytest.approx(1.0, rel=1e-14)
        assert psi.closed_form_norm == pytest.approx(1.0, rel=1e-9)

    def test_adaptive_truncation(self, general_dp):
        psi = eigenstate_fock(general_dp, 2)
        assert abs(psi.coeffs[-1]) < 1e-14 * max(abs(c) for c in psi.coeffs)
        assert psi.tail_bound < 1e-20

    def test_tail_tolerance(self, general_dp):
        with pytest.raises(TruncationError):
            eigenstate_fock(general_dp, 2, sigma_max=2, tail_tol=1e-30)

    def test_sigma_cap(self, general_dp, monkeypatch):
        monkeypatch.setenv("QOSC_SIGMA_CAP", "4")
        get_settings.cache_clear()
        with pytest.raises(TruncationError):
            eigenstate_fock(general_dp, 1)

    def test_gram_matrix(self, general_dp):
        dim = 130
        states = [eigenstate_fock(general_dp, n, sigma_max=60).to_dense(dim) for n in range(7)]
        gram = np.array([[np.dot(a, b) for b in states] for a in states])
        np.testing.assert_allclose(gram, np.eye(7), atol=1e-8)

    def test_high_state_reports_truncation(self, general_dp):
        with pytest.raises(TruncationError):
            eigenstate_fock(general_dp, 1500)

    def test_translation_regime_rejected(self, alpha_zero_dp):
        with pytest.raises(DeformationDomainError):
            eigenstate_fock(alpha_zero_dp, 1)
        with pytest.raises(DeformationDomainError):
            ground_state_fock(alpha_zero_dp)


class TestOperatorRelations:

    def test_annihilation(self, general_dp, mirrored_dp):
        assert annihilation_residual(general_dp, 60) < 1e-8
        assert annihilation_residual(mirrored_dp, 60) < 1e-8

    def test_annihilation_needs_a_converged_tail(self):
        # t close to -1 and q close to 1: the ground state decays very slowly
        dp = derived(1e-6, 0.3)
        with pytest.raises(TruncationError):
            annihilation_residual(dp, 80, tail_tol=1e-14)

    def test_ladder_tail_check(self, general_dp):
        assert ladder_check(general_dp, 1, sigma_max=60, tail_tol=1e-14) < 1e-7
        with pytest.raises(TruncationError):
            ladder_check(general_dp, 1, sigma_max=2, tail_tol=1e-14)

    @pytest.mark.parametrize("n", range(6))
    def test_ladder(self, general_dp, n):
        assert ladder_check(general_dp, n, sigma_max=60) < 1e-7

    def test_ladder_without_mixing(self, equal_dp):
        for n in range(4):
            assert ladder_check(equal_dp, n, sigma_max=20) < 1e-12


class TestHermiteLimit:

    def test_low_orders(self):
        first, reference = hermite_limit(1, 0.5)
        assert first.coefficient(1) == pytest.approx(0.75, rel=1e-15)
        assert reference.coefficient(1) == pytest.approx(0.75, rel=1e-14)
        zeroth, reference = hermite_limit(0, 0.5)
        assert zeroth.coeffs == {0: 1.0}
        assert reference.coefficient(0) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("t", HERMITE_T_VALUES)
    def test_scaled_hermite(self, t):
        for n in range(9):
            poly, reference = hermite_limit(n, t)
            assert _gap(poly, reference) < 1e-10 * max(1.0, reference.max_abs_coeff())

    @pytest.mark.parametrize("t", [0.0, 1.0, 1.2, -0.3])
    def test_needs_t_in_unit_interval(self, t):
        with pytest.raises(DeformationDomainError):
            hermite_limit(3, t)


class TestLargeIndices:

    def test_closed_coefficient_stays_in_log_domain(self, general_dp):
        value = coeff_f_closed(1500, 0, general_dp.q, general_dp.t, log_domain=True)
        assert math.isfinite(value.log_abs)

    def test_normalization_stays_finite(self, general_dp):
        log_norm = normalization(1500, general_dp.q, general_dp.t, log_domain=True)
        assert math.isfinite(log_norm.log_abs)
        assert log_norm.log_abs < -700

    def test_recursive_normalization_at_moderate_n(self, general_dp):
        q, t = general_dp.q, general_dp.t
        assert normalization_recursive(40, q, t) == pytest.approx(normalization(40, q, t), rel=1e-10)
