"""
Closed-form energy spectrum
General e_n(q, t), the quadratic alpha = 0 spectrum and the q-oscillator alpha = beta spectrum
"""

import math
from typing import List, Union

import numpy as np
import structlog

from common.exceptions import DeformationDomainError, QOverflowError, SpectrumConsistencyError
from .qcalc import LOG_FLOAT_MAX, LogScalar, q_number
from .schemas import DerivedParams, Regime, SpectrumRequest, SpectrumRow

logger = structlog.get_logger()


def _check_level(n: int, lowest: int = 0) -> None:
    if n < lowest:
        raise DeformationDomainError(f"level index must be >= {lowest}, got {n}")


def _log_one_minus_t2_over(dp: DerivedParams, m: int) -> float:
    """ln(1 - t^2 / q^m), using 1 - t^2 = one_minus_t2 to avoid cancellation"""
    if dp.t == 0:
        return 0.0
    log_t2 = math.log1p(-dp.one_minus_t2)
    return math.log(-math.expm1(log_t2 - m * dp.log_q))


def _energy_scale(dp: DerivedParams) -> float:
    """u^2 / (4 gamma)"""
    return dp.u * dp.u / (4.0 * dp.gamma)


def _log_energy(dp: DerivedParams, n: int) -> float:
    log_scale = math.log(_energy_scale(dp))
    log_first = -math.inf
    if n > 0:
        log_first = _log_one_minus_t2_over(dp, n - 1) + q_number(n, dp.q, log_domain=True).log_abs
    log_second = math.log(0.5) + n * dp.log_q + _log_one_minus_t2_over(dp, 2 * n)
    return log_scale + float(np.logaddexp(log_first, log_second))


def _to_float(log_value: float, what: str) -> float:
    if log_value > LOG_FLOAT_MAX:
        raise QOverflowError(f"{what} overflows double precision; use log_domain=True")
    return math.exp(log_value)


def energy_alpha_zero(beta: float, n: int) -> float:
    """(n + 1/2) sqrt(1 + beta^2/4) + beta (n^2 + n + 1/2) / 2"""
    if beta < 0:
        raise DeformationDomainError(f"beta must be >= 0, got {beta}")
    _check_level(n)
    return (n + 0.5) * math.sqrt(1.0 + 0.25 * beta * beta) + 0.5 * beta * (n * n + n + 0.5)


def _translation_parameter(dp: DerivedParams) -> float:
    # beta = 0 is the mirror image of alpha = 0 under exchange symmetry
    return dp.beta if dp.regime == Regime.ALPHA_ZERO else dp.alpha


def energy(dp: DerivedParams, n: int, log_domain: bool = False) -> Union[float, LogScalar]:
    """
    e_n = u^2/(4 gamma) {(1 - t^2/q^(n-1)) [n]_q + (q^n - t^2/q^n) / 2}

    Translation regimes dispatch to the quadratic spectrum.
    """
    _check_level(n)
    if dp.regime.is_translation:
        value = energy_alpha_zero(_translation_parameter(dp), n)
        return LogScalar.from_float(value) if log_domain else value
    log_value = _log_energy(dp, n)
    if log_domain:
        return LogScalar(1, log_value)
    if n == 0:
        return 0.5 * _energy_scale(dp) * dp.one_minus_t2
    if dp.regime == Regime.UNDEFORMED:
        return n + 0.5
    return _to_float(log_value, f"e_{n}")


def excitation_energy(dp: DerivedParams, n: int, log_domain: bool = False) -> Union[float, LogScalar]:
    """e_n - e_0 = K^2 (1 - t^2/q^n) [n]_q / 2"""
    _check_level(n, lowest=1)
    if dp.regime.is_translation:
        beta = _translation_parameter(dp)
        value = n * math.sqrt(1.0 + 0.25 * beta * beta) + 0.5 * beta * (n * n + n)
        return LogScalar.from_float(value) if log_domain else value
    if dp.regime == Regime.UNDEFORMED and not log_domain:
        return float(n)
    log_value = (
        math.log(0.5 * dp.big_k * dp.big_k)
        + _log_one_minus_t2_over(dp, n)
        + q_number(n, dp.q, log_domain=True).log_abs
    )
    if log_domain:
        return LogScalar(1, log_value)
    return _to_float(log_value, f"e_{n} - e_0")


def ground_energy(dp: DerivedParams) -> float:
    """e_0 = u^2 (1 - t^2) / (8 gamma)"""
    return energy(dp, 0)


def energy_equal(q: float, n: int, log_domain: bool = False) -> Union[float, LogScalar]:
    """(q + 1)([n]_q + [n+1]_q) / 4 for alpha = beta"""
    if q < 1:
        raise DeformationDomainError(f"alpha = beta needs q >= 1, got {q}")
    _check_level(n)
    if log_domain:
        total = float(np.logaddexp(q_number(n, q, log_domain=True).log_abs, q_number(n + 1, q, log_domain=True).log_abs))
        return LogScalar(1, math.log(0.25 * (q + 1.0)) + total)
    return 0.25 * (q + 1.0) * (q_number(n, q) + q_number(n + 1, q))


def q_oscillator_energy(q: float, n: int) -> float:
    """(q + 1){(q + 1)[n]_q + 1} / 4, the same spectrum written through one q-number"""
    if q < 1:
        raise DeformationDomainError(f"alpha = beta needs q >= 1, got {q}")
    _check_level(n)
    return 0.25 * (q + 1.0) * ((q + 1.0) * q_number(n, q) + 1.0)


def spectrum_table(req: SpectrumRequest) -> List[SpectrumRow]:
    """Rows (n, e_n, e_n - e_0) for n = 0..n_max, checked for strict monotonicity"""
    dp = req.dp
    rows = []
    previous = None
    for n in range(req.n_max + 1):
        if req.log_domain:
            log_e = energy(dp, n, log_domain=True).log_abs
            log_exc = excitation_energy(dp, n, log_domain=True).log_abs if n > 0 else None
            row = SpectrumRow(n=n, log_e_n=log_e, log_excitation=log_exc)
            current = log_e
        else:
            e_n = energy(dp, n)
            row = SpectrumRow(n=n, e_n=e_n, excitation=excitation_energy(dp, n) if n > 0 else 0.0)
            current = e_n
        if previous is not None and not current > previous:
            raise SpectrumConsistencyError(
                f"spectrum not strictly increasing at n={n} (alpha={dp.alpha}, beta={dp.beta}); precision collapsed"
            )
        previous = current
        rows.append(row)
    logger.debug("spectrum table built", alpha=dp.alpha, beta=dp.beta, rows=len(rows), log_domain=req.log_domain)
    return rows
