"""
Deformation parameters and the partner hierarchy
Derives (k, gamma, g, s, q, u, v, t, d, K, eps0) from (alpha, beta) and builds
the hierarchy h_i = B+(g_i, s_i) B-(g_i, s_i) + sum_j eps_j
"""

import math
from typing import List, Tuple

import numpy as np
import structlog
from pydantic import ValidationError

from common.exceptions import DeformationDomainError, QOverflowError
from .qcalc import LOG_FLOAT_MAX, q_number
from .schemas import DeformationParams, DerivedParams, HierarchyLevel, LogHierarchyLevel, Regime

logger = structlog.get_logger()

# A parameter below this is treated as exactly zero
ZERO_PARAMETER = 1e-12
# Below this alpha * beta the general formula cancels catastrophically
ZERO_PRODUCT = 1e-20


def make_params(alpha: float, beta: float) -> DeformationParams:
    """Validate user input, reporting violations as DeformationDomainError"""
    try:
        return DeformationParams(alpha=alpha, beta=beta)
    except ValidationError as e:
        raise DeformationDomainError(
            f"invalid deformation parameters alpha={alpha}, beta={beta}: need alpha >= 0, beta >= 0, alpha*beta < 1"
        ) from e


def classify(alpha: float, beta: float) -> Regime:
    alpha_zero = alpha < ZERO_PARAMETER
    beta_zero = beta < ZERO_PARAMETER
    if not (alpha_zero or beta_zero) and alpha * beta <= ZERO_PRODUCT:
        alpha_zero, beta_zero = alpha <= beta, beta < alpha
    if alpha_zero and beta_zero:
        return Regime.UNDEFORMED
    if alpha_zero:
        return Regime.ALPHA_ZERO
    if beta_zero:
        return Regime.BETA_ZERO
    if abs(alpha - beta) <= ZERO_PARAMETER * max(alpha, beta):
        return Regime.EQUAL
    return Regime.GENERAL


def _factorization(alpha: float, beta: float) -> Tuple[float, float, float]:
    """Positive solution (k, g, s) of g^2 - beta g s = 1, s^2 - alpha g s = 1"""
    half_diff = 0.5 * (beta - alpha)
    k = half_diff + math.sqrt(1.0 + half_diff * half_diff)
    s = 1.0 / math.sqrt(1.0 - alpha * k)
    return k, s * k, s


def derive(params: DeformationParams) -> DerivedParams:
    """All derived scalars for the pair, with the regime classified"""
    alpha, beta = params.alpha, params.beta
    if alpha < 0 or beta < 0 or alpha * beta >= 1:
        raise DeformationDomainError(f"alpha={alpha}, beta={beta} outside alpha, beta >= 0, alpha*beta < 1")
    regime = classify(alpha, beta)

    if regime.is_translation:
        # the vanishing parameter is set to exactly zero
        a_eff = 0.0 if regime == Regime.ALPHA_ZERO else alpha
        b_eff = 0.0 if regime == Regime.BETA_ZERO else beta
        k, g, s = _factorization(a_eff, b_eff)
        derived = DerivedParams(
            alpha=alpha, beta=beta, regime=regime, k=k, g=g, s=s,
            q=1.0, log_q=0.0,
            t=-1.0 if regime == Regime.ALPHA_ZERO else 1.0,
            one_minus_t2=0.0,
            eps0=0.5 * g * s,
        )
        logger.debug("derived parameters", alpha=alpha, beta=beta, regime=regime.value)
        return derived

    if regime == Regime.UNDEFORMED:
        alpha = beta = 0.0
    elif regime == Regime.EQUAL:
        beta = alpha
    k, g, s = _factorization(alpha, beta)
    root = math.sqrt(alpha * beta)
    q = (1.0 + root) / (1.0 - root)
    log_q = math.log1p(root) - math.log1p(-root)
    if regime == Regime.GENERAL:
        gamma = math.sqrt(beta / alpha)
        t = (k - gamma) / (k + gamma)
        one_minus_t2 = 4.0 * k * gamma / (k + gamma) ** 2
    else:
        k, gamma, t, one_minus_t2 = 1.0, 1.0, 0.0, 1.0
    u = g + gamma * s
    v = g - gamma * s
    derived = DerivedParams(
        alpha=params.alpha, beta=params.beta, regime=regime, k=k, gamma=gamma, g=g, s=s,
        q=q, log_q=log_q, u=u, v=v, t=t, one_minus_t2=one_minus_t2,
        d=u * v, big_k=u * math.sqrt((q + 1.0) / (4.0 * gamma)), eps0=0.5 * g * s,
    )
    logger.debug("derived parameters", alpha=params.alpha, beta=params.beta, regime=regime.value, q=q, t=t)
    return derived


def hyperbola_constant(dp: DerivedParams) -> float:
    """g^2 - gamma^2 s^2 = u v, conserved along the hierarchy"""
    if dp.gamma is None:
        raise DeformationDomainError(f"gamma is not finite in regime {dp.regime.value}")
    return dp.g ** 2 - dp.gamma ** 2 * dp.s ** 2


def hierarchy_coefficients_from_factors(
    g_i: float, s_i: float, energy_sum: float, alpha: float, beta: float
) -> Tuple[float, float, float]:
    """(a_i, b_i, c_i) read off B+B- + sum eps_j expanded in P^2 and X^2"""
    a_i = g_i * g_i - beta * g_i * s_i
    b_i = s_i * s_i - alpha * g_i * s_i
    c_i = energy_sum - 0.5 * g_i * s_i
    return a_i, b_i, c_i


def _level(index, g_i, s_i, u_i, v_i, t_i, eps_i, a_i, b_i, c_i) -> HierarchyLevel:
    return HierarchyLevel(
        index=index, g_i=g_i, s_i=s_i, u_i=u_i, v_i=v_i, t_i=t_i, eps_i=eps_i,
        a_i=a_i, b_i=b_i, c_i=c_i, mass_ratio=1.0 / a_i, freq_ratio=math.sqrt(a_i * b_i),
    )


def _translation_hierarchy(dp: DerivedParams, levels: int) -> List[HierarchyLevel]:
    # alpha = 0: g_i = g + i beta, s_i = 1; beta = 0 mirrors it with s_i = s + i alpha
    alpha = 0.0 if dp.regime == Regime.ALPHA_ZERO else dp.alpha
    beta = 0.0 if dp.regime == Regime.BETA_ZERO else dp.beta
    result = []
    energy_sum = 0.0
    previous_gs = None
    for i in range(levels):
        if dp.regime == Regime.ALPHA_ZERO:
            g_i, s_i = dp.g + i * beta, 1.0
        else:
            g_i, s_i = 1.0, dp.s + i * alpha
        eps_i = 0.5 * g_i * s_i if previous_gs is None else 0.5 * (previous_gs + g_i * s_i)
        energy_sum += eps_i
        a_i, b_i, c_i = hierarchy_coefficients_from_factors(g_i, s_i, energy_sum, alpha, beta)
        result.append(_level(i, g_i, s_i, None, None, dp.t, eps_i, a_i, b_i, c_i))
        previous_gs = g_i * s_i
    return result


def hierarchy(dp: DerivedParams, levels: int) -> List[HierarchyLevel]:
    """Levels 0..levels-1 of the partner hierarchy"""
    if levels < 1:
        raise DeformationDomainError(f"levels must be >= 1, got {levels}")
    if dp.regime.is_translation:
        return _translation_hierarchy(dp, levels)

    if hierarchy_overflows(dp, levels):
        raise QOverflowError(f"q^i overflows before level {levels - 1} (q={dp.q}); use hierarchy_log")

    q, t, u, v, gamma = dp.q, dp.t, dp.u, dp.v, dp.gamma
    result = []
    previous_gs = None
    for i in range(levels):
        half_power = math.exp(0.5 * i * dp.log_q)
        u_i, v_i = u * half_power, v / half_power
        g_i = 0.5 * (u_i + v_i)
        s_i = (u_i - v_i) / (2.0 * gamma)
        eps_i = 0.5 * g_i * s_i if previous_gs is None else 0.5 * (previous_gs + g_i * s_i)
        q_i = half_power * half_power
        a_i = u * u / (2.0 * (q + 1.0)) * (q_i + t) * (1.0 + t * q / q_i)
        b_i = u * u / (2.0 * gamma * gamma * (q + 1.0)) * (q_i - t) * (1.0 - t * q / q_i)
        c_i = u * u / (4.0 * gamma) * (1.0 - t * t * q / q_i) * q_number(i, q)
        result.append(_level(i, g_i, s_i, u_i, v_i, t / q_i, eps_i, a_i, b_i, c_i))
        previous_gs = g_i * s_i
    return result


def hierarchy_overflows(dp: DerivedParams, levels: int) -> bool:
    """True when float levels 0..levels-1 would overflow and hierarchy_log is needed"""
    return not dp.regime.is_translation and (levels - 1) * dp.log_q > LOG_FLOAT_MAX - 10


def _log_level(level: HierarchyLevel) -> LogHierarchyLevel:
    return LogHierarchyLevel(
        index=level.index, t_i=level.t_i,
        log_g_i=math.log(level.g_i), log_s_i=math.log(level.s_i), log_eps_i=math.log(level.eps_i),
        log_a_i=math.log(level.a_i), log_b_i=math.log(level.b_i),
        log_c_i=math.log(level.c_i) if level.c_i > 0 else None,
        log_mass_ratio=-math.log(level.a_i), log_freq_ratio=0.5 * math.log(level.a_i * level.b_i),
    )


def hierarchy_log(dp: DerivedParams, levels: int) -> List[LogHierarchyLevel]:
    """Levels 0..levels-1 with logs in place of the q^i-growing quantities; never overflows"""
    if levels < 1:
        raise DeformationDomainError(f"levels must be >= 1, got {levels}")
    if dp.regime.is_translation:
        # polynomial growth in i
        return [_log_level(level) for level in _translation_hierarchy(dp, levels)]

    q, t, gamma, lq = dp.q, dp.t, dp.gamma, dp.log_q
    log_u2 = 2.0 * math.log(dp.u)
    log_gs = [
        log_u2 + i * lq + math.log1p(-t * t * math.exp(-2.0 * i * lq)) - math.log(4.0 * gamma)
        for i in range(levels)
    ]
    result = []
    for i in range(levels):
        shrink = math.exp(-i * lq)
        log_u_i = math.log(dp.u) + 0.5 * i * lq
        log_g = log_u_i + math.log1p(t * shrink) - math.log(2.0)
        log_s = log_u_i + math.log1p(-t * shrink) - math.log(2.0 * gamma)
        log_eps = log_gs[0] - math.log(2.0) if i == 0 else float(np.logaddexp(log_gs[i - 1], log_gs[i])) - math.log(2.0)
        log_a = log_u2 - math.log(2.0 * (q + 1.0)) + i * lq + math.log1p(t * shrink) + math.log1p(t * q * shrink)
        log_b = (
            log_u2 - math.log(2.0 * gamma * gamma * (q + 1.0)) + i * lq
            + math.log1p(-t * shrink) + math.log1p(-t * q * shrink)
        )
        log_c = None
        if i > 0:
            log_c = (
                log_u2 - math.log(4.0 * gamma) + math.log1p(-t * t * q * shrink)
                + q_number(i, q, log_domain=True).log_abs
            )
        result.append(LogHierarchyLevel(
            index=i, t_i=t * shrink, log_g_i=log_g, log_s_i=log_s, log_eps_i=log_eps,
            log_a_i=log_a, log_b_i=log_b, log_c_i=log_c,
            log_mass_ratio=-log_a, log_freq_ratio=0.5 * (log_a + log_b),
        ))
    return result


def partner_h1(dp: DerivedParams) -> Tuple[float, float, float]:
    """(P^2 coefficient, X^2 coefficient, constant) of the first partner Hamiltonian"""
    alpha, beta = dp.alpha, dp.beta
    if dp.regime == Regime.ALPHA_ZERO:
        alpha = 0.0
    elif dp.regime == Regime.BETA_ZERO:
        beta = 0.0
    elif dp.regime == Regime.UNDEFORMED:
        alpha = beta = 0.0
    scale = 1.0 / (1.0 - alpha * dp.k)
    return (
        0.5 * (1.0 + (2.0 * beta - alpha) * dp.k) * scale,
        0.5 * (1.0 + alpha * dp.k) * scale,
        dp.k * scale,
    )


def shape_invariance_residuals(levels: List[HierarchyLevel], alpha: float, beta: float) -> List[float]:
    """
    Largest residual per consecutive pair (i, i+1) of the scaling conditions

    g_{i+1}^2 - beta g_{i+1} s_{i+1} = g_i^2 + beta g_i s_i, its alpha counterpart
    and, where u_i, v_i exist, u_{i+1} v_{i+1} = u_i v_i and
    u_{i+1}^2 + q v_{i+1}^2 = v_i^2 + q u_i^2 (relative).
    """
    residuals = []
    for lower, upper in zip(levels, levels[1:]):
        first = upper.g_i ** 2 - beta * upper.g_i * upper.s_i - (lower.g_i ** 2 + beta * lower.g_i * lower.s_i)
        second = upper.s_i ** 2 - alpha * upper.g_i * upper.s_i - (lower.s_i ** 2 + alpha * lower.g_i * lower.s_i)
        scale = max(1.0, lower.g_i ** 2, lower.s_i ** 2)
        worst = max(abs(first), abs(second)) / scale
        if lower.u_i is not None and lower.v_i is not None and lower.v_i != 0:
            q = upper.u_i ** 2 / lower.u_i ** 2
            product = upper.u_i * upper.v_i - lower.u_i * lower.v_i
            mixed = upper.u_i ** 2 + q * upper.v_i ** 2 - (lower.v_i ** 2 + q * lower.u_i ** 2)
            worst = max(worst, abs(product) / lower.u_i ** 2, abs(mixed) / (q * lower.u_i ** 2))
        residuals.append(worst)
    return residuals
