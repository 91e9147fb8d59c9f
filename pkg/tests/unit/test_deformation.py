"""
Tests for parameter validation, derived scalars and the partner hierarchy
"""

import math

import pytest

from common.exceptions import DeformationDomainError, QOverflowError
from oscillator.deformation import (
    classify,
    derive,
    hierarchy,
    hierarchy_coefficients_from_factors,
    hierarchy_log,
    hierarchy_overflows,
    hyperbola_constant,
    make_params,
    partner_h1,
    shape_invariance_residuals,
)
from oscillator.qcalc import q_number
from oscillator.schemas import Regime
from oscillator.spectrum import energy
from tests.conftest import derived
from tests.fixtures.parameters import GENERAL_PAIRS


class TestParameterValidation:

    @pytest.mark.parametrize("alpha,beta", [(0.5, 3.0), (2.0, 0.5), (-0.1, 0.2), (0.2, -1e-3)])
    def test_out_of_domain(self, alpha, beta):
        with pytest.raises(DeformationDomainError):
            make_params(alpha, beta)

    @pytest.mark.parametrize("value", [math.nan, math.inf])
    def test_non_finite(self, value):
        with pytest.raises(DeformationDomainError):
            make_params(value, 0.1)

    def test_valid_pair(self):
        params = make_params(0.1, 0.2)
        assert (params.alpha, params.beta) == (0.1, 0.2)


class TestClassify:

    @pytest.mark.parametrize("alpha,beta,regime", [
        (0.1, 0.2, Regime.GENERAL),
        (0.3, 0.3, Regime.EQUAL),
        (0.3, 0.3 + 1e-15, Regime.EQUAL),
        (0.0, 0.0, Regime.UNDEFORMED),
        (0.0, 0.4, Regime.ALPHA_ZERO),
        (1e-13, 0.4, Regime.ALPHA_ZERO),
        (0.4, 0.0, Regime.BETA_ZERO),
    ])
    def test_regimes(self, alpha, beta, regime):
        assert classify(alpha, beta) == regime

    def test_tiny_product_picks_smaller_parameter(self):
        assert classify(1e-11, 1e-10) == Regime.ALPHA_ZERO
        assert classify(1e-10, 1e-11) == Regime.BETA_ZERO


class TestDerive:

    def test_equal_parameters(self, equal_dp):
        assert equal_dp.k == 1.0
        assert equal_dp.t == 0.0
        assert equal_dp.gamma == 1.0
        assert equal_dp.q == pytest.approx(1.5, rel=1e-14)
        assert equal_dp.regime == Regime.EQUAL

    def test_undeformed(self, undeformed_dp):
        dp = undeformed_dp
        assert (dp.q, dp.k, dp.g, dp.s, dp.t) == (1.0, 1.0, 1.0, 1.0, 0.0)
        assert dp.eps0 == 0.5
        assert dp.big_k == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_alpha_zero_limits(self, alpha_zero_dp):
        assert alpha_zero_dp.t == -1.0
        assert alpha_zero_dp.gamma is None
        assert alpha_zero_dp.q == 1.0
        assert alpha_zero_dp.g == pytest.approx(0.15 + math.sqrt(1.0 + 0.0225), rel=1e-14)

    def test_beta_zero_limits(self, beta_zero_dp):
        assert beta_zero_dp.t == 1.0
        assert beta_zero_dp.s == pytest.approx(0.15 + math.sqrt(1.0 + 0.0225), rel=1e-14)

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS)
    def test_factorization_identities(self, alpha, beta):
        dp = derived(alpha, beta)
        assert dp.g ** 2 - beta * dp.g * dp.s == pytest.approx(1.0, rel=1e-13)
        assert dp.s ** 2 - alpha * dp.g * dp.s == pytest.approx(1.0, rel=1e-13)
        assert dp.g / dp.s == pytest.approx(dp.k, rel=1e-14)

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS)
    def test_derived_relations(self, alpha, beta):
        dp = derived(alpha, beta)
        root = math.sqrt(alpha * beta)
        assert dp.q == pytest.approx((1 + root) / (1 - root), rel=1e-14)
        assert dp.log_q == pytest.approx(math.log(dp.q), rel=1e-13)
        assert dp.gamma == pytest.approx(math.sqrt(beta / alpha), rel=1e-15)
        assert abs(dp.t) < 1
        assert dp.one_minus_t2 == pytest.approx(1.0 - dp.t ** 2, rel=1e-12)
        assert dp.u * dp.v == pytest.approx(dp.d, rel=1e-15)
        assert hyperbola_constant(dp) == pytest.approx(dp.d, rel=1e-10, abs=1e-12)
        assert dp.eps0 == pytest.approx(0.5 * dp.g * dp.s, rel=1e-15)

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS)
    def test_exchange_flips_t(self, alpha, beta):
        forward, backward = derived(alpha, beta), derived(beta, alpha)
        assert forward.t == pytest.approx(-backward.t, rel=1e-12, abs=1e-15)
        assert forward.k * backward.k == pytest.approx(1.0, rel=1e-14)
        assert forward.q == pytest.approx(backward.q, rel=1e-15)

    def test_hyperbola_needs_gamma(self, alpha_zero_dp):
        with pytest.raises(DeformationDomainError):
            hyperbola_constant(alpha_zero_dp)


class TestHierarchy:

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS)
    def test_closed_forms_match_factors(self, alpha, beta):
        dp = derived(alpha, beta)
        energy_sum = 0.0
        for level in hierarchy(dp, 7):
            energy_sum += level.eps_i
            a_i, b_i, c_i = hierarchy_coefficients_from_factors(level.g_i, level.s_i, energy_sum, alpha, beta)
            assert level.a_i == pytest.approx(a_i, rel=1e-10)
            assert level.b_i == pytest.approx(b_i, rel=1e-10)
            assert level.c_i == pytest.approx(c_i, rel=1e-10, abs=1e-12)

    def test_ground_level_is_the_original_hamiltonian(self, general_dp):
        level = hierarchy(general_dp, 1)[0]
        assert level.a_i == pytest.approx(1.0, rel=1e-12)
        assert level.b_i == pytest.approx(1.0, rel=1e-12)
        assert level.c_i == pytest.approx(0.0, abs=1e-14)
        assert level.mass_ratio == pytest.approx(1.0, rel=1e-12)
        assert level.freq_ratio == pytest.approx(1.0, rel=1e-12)

    def test_scaling_along_the_hierarchy(self, general_dp):
        dp = general_dp
        for level in hierarchy(dp, 8):
            assert level.u_i * level.v_i == pytest.approx(dp.d, rel=1e-12)
            assert level.t_i == pytest.approx(dp.t / dp.q ** level.index, rel=1e-13)
            assert level.u_i == pytest.approx(dp.u * dp.q ** (0.5 * level.index), rel=1e-13)

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS)
    def test_shape_invariance_conditions(self, alpha, beta):
        dp = derived(alpha, beta)
        assert max(shape_invariance_residuals(hierarchy(dp, 8), alpha, beta)) < 1e-10

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS + [(0.3, 0.3)])
    def test_partner_h1(self, alpha, beta):
        dp = derived(alpha, beta)
        level = hierarchy(dp, 2)[1]
        p2, x2, constant = partner_h1(dp)
        assert p2 == pytest.approx(0.5 * level.a_i, rel=1e-10)
        assert x2 == pytest.approx(0.5 * level.b_i, rel=1e-10)
        assert constant == pytest.approx(level.c_i, rel=1e-10)

    def test_equal_parameters_partner(self):
        p2, _, constant = partner_h1(derived(0.2, 0.2))
        assert p2 == pytest.approx(0.5 * 1.2 / 0.8, rel=1e-14)
        assert constant == pytest.approx(1.0 / 0.8, rel=1e-14)

    def test_translation_hierarchy(self, alpha_zero_dp):
        beta = 0.3
        root = math.sqrt(1.0 + 0.25 * beta * beta)
        for i, level in enumerate(hierarchy(alpha_zero_dp, 6)):
            assert level.a_i == pytest.approx(1.0 + i * i * beta * beta + 2.0 * i * beta * root, rel=1e-12)
            assert level.b_i == pytest.approx(1.0, rel=1e-15)
            assert level.c_i == pytest.approx(0.5 * i * (i * beta + 2.0 * root), rel=1e-12, abs=1e-15)
            assert level.u_i is None

    def test_beta_zero_mirrors_alpha_zero(self, alpha_zero_dp, beta_zero_dp):
        for left, right in zip(hierarchy(alpha_zero_dp, 5), hierarchy(beta_zero_dp, 5)):
            assert left.a_i == pytest.approx(right.b_i, rel=1e-14)
            assert left.b_i == pytest.approx(right.a_i, rel=1e-14)
            assert left.c_i == pytest.approx(right.c_i, rel=1e-14, abs=1e-15)

    def test_translation_shape_invariance(self, alpha_zero_dp):
        assert max(shape_invariance_residuals(hierarchy(alpha_zero_dp, 6), 0.0, 0.3)) < 1e-12

    def test_levels_must_be_positive(self, general_dp):
        with pytest.raises(DeformationDomainError):
            hierarchy(general_dp, 0)

    def test_overflowing_levels(self):
        with pytest.raises(QOverflowError):
            hierarchy(derived(0.99, 0.99), 200)

    def test_constant_is_energy_minus_half_gs(self, general_dp):
        for level in hierarchy(general_dp, 6):
            expected = energy(general_dp, level.index) - 0.5 * level.g_i * level.s_i
            assert level.c_i == pytest.approx(expected, rel=1e-12, abs=1e-14)
        assert hierarchy(general_dp, 2)[1].c_i == pytest.approx(1.1747441017602442, rel=1e-12)


class TestLogHierarchy:

    @pytest.mark.parametrize("alpha,beta", GENERAL_PAIRS + [(0.3, 0.3), (0.0, 0.0)])
    def test_matches_float_levels(self, alpha, beta):
        dp = derived(alpha, beta)
        for level, log_level in zip(hierarchy(dp, 8), hierarchy_log(dp, 8)):
            assert log_level.index == level.index
            assert log_level.t_i == pytest.approx(level.t_i, rel=1e-12, abs=1e-300)
            assert log_level.log_g_i == pytest.approx(math.log(level.g_i), abs=1e-12)
            assert log_level.log_s_i == pytest.approx(math.log(level.s_i), abs=1e-12)
            assert log_level.log_eps_i == pytest.approx(math.log(level.eps_i), abs=1e-12)
            assert log_level.log_a_i == pytest.approx(math.log(level.a_i), abs=1e-12)
            assert log_level.log_b_i == pytest.approx(math.log(level.b_i), abs=1e-12)
            assert log_level.log_freq_ratio == pytest.approx(math.log(level.freq_ratio), abs=1e-12)
            if level.index == 0:
                assert log_level.log_c_i is None
            else:
                assert log_level.log_c_i == pytest.approx(math.log(level.c_i), abs=1e-12)

    def test_translation_regime(self, alpha_zero_dp):
        for level, log_level in zip(hierarchy(alpha_zero_dp, 5), hierarchy_log(alpha_zero_dp, 5)):
            assert log_level.log_a_i == pytest.approx(math.log(level.a_i), abs=1e-14)
            assert log_level.log_mass_ratio == pytest.approx(-math.log(level.a_i), abs=1e-14)

    def test_past_double_precision(self):
        dp = derived(0.99, 0.99)
        assert hierarchy_overflows(dp, 200)
        assert not hierarchy_overflows(dp, 10)
        top = hierarchy_log(dp, 200)[-1]
        assert top.log_a_i == pytest.approx(199 * dp.log_q, rel=1e-12)
        assert top.log_b_i == pytest.approx(199 * dp.log_q, rel=1e-12)
        expected_c = math.log(0.5 * (dp.q + 1.0)) + q_number(199, dp.q, log_domain=True).log_abs
        assert top.log_c_i == pytest.approx(expected_c, rel=1e-12)

    def test_levels_must_be_positive(self, general_dp):
        with pytest.raises(DeformationDomainError):
            hierarchy_log(general_dp, 0)
