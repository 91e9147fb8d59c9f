"""
Eigenstates in the Bargmann representation
Coefficients f_{n,m}, normalizations N_n, the polynomials P_n by three routes
and the Fock-basis expansion of every eigenstate
"""

import math
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Dict, Iterator, List, Literal, Optional, Tuple, Union

import numpy as np
import structlog
from scipy.special import hermite

from common.config import get_settings
from common.exceptions import (
    DeformationDomainError,
    ForbiddenParameterError,
    QOverflowError,
    RouteError,
    TruncationError,
)
from .fock_oracle import align_sign, ladder_matrices
from .qcalc import (
    LOG_FLOAT_MAX,
    STABLE_THRESHOLD,
    LogScalar,
    little_q_jacobi_coefficients,
    log_q_double_factorial_table,
    log_q_factorial_table,
    log_sum,
    one_phi_zero,
    q_derivative,
    q_exp_coefficients,
    q_factorial,
    q_number,
    q_pochhammer,
)
from .schemas import DerivedParams, EvenOddPolynomial, FockExpansion, SeriesControl
from .spectrum import excitation_energy

logger = structlog.get_logger()

Route = Literal["closed", "recursive", "jacobi"]

# Adaptive truncation: grow sigma_max until the last coefficient falls below this fraction of the largest
ADAPTIVE_START = 16
ADAPTIVE_CUTOFF = 1e-14
FAULT_FACTOR = 1.0 + 1e-3

_injected_fault: ContextVar[Optional[Tuple[int, int]]] = ContextVar("injected_fault", default=None)


@contextmanager
def injected_fault(n: int, m: int) -> Iterator[None]:
    """Perturb the closed-form f_{n,m} inside the block (mutation self-test)"""
    token = _injected_fault.set((n, m))
    try:
        yield
    finally:
        _injected_fault.reset(token)


def _series_control() -> SeriesControl:
    settings = get_settings()
    return SeriesControl(tol=settings.series_tol, max_terms=settings.series_max_terms)


def _parity(n: int) -> str:
    return "even" if n % 2 == 0 else "odd"


def _t_over_q_power(t: float, q: float, power: float) -> float:
    """t / q^power formed in logs; underflows to 0 instead of overflowing q^power"""
    if t == 0 or power == 0:
        return t
    log_value = math.log(abs(t)) - power * math.log(q)
    if log_value > LOG_FLOAT_MAX:
        raise QOverflowError(f"t/q^{power} is not finite for q={q}, t={t}")
    return math.copysign(math.exp(log_value), t)


def _t2_over_q_power(t: float, q: float, power: float) -> float:
    """t^2 / q^power"""
    return _t_over_q_power(t, q, 0.5 * power) ** 2


def _check_t(t: float) -> None:
    if not abs(t) < 1:
        raise DeformationDomainError(f"eigenstates need |t| < 1, got t={t}")


def _check_bargmann(dp: DerivedParams) -> None:
    if dp.regime.is_translation:
        raise DeformationDomainError(
            f"no normalizable Bargmann expansion in regime {dp.regime.value} (|t| = 1)"
        )


def coeff_f_closed(n: int, m: int, q: float, t: float, log_domain: bool = False) -> Union[float, LogScalar]:
    """
    f_{n,m} = [n]!/([m]! [n-m]!!) (-t/q^((n+m-2)/2))^((n-m)/2) (t^2/q^(2n-1); q^2)_((n+m)/2)

    m = -1 is the empty boundary entry and gives 0.
    """
    if m == -1:
        return LogScalar.zero() if log_domain else 0.0
    if n < 0 or not 0 <= m <= n or (n - m) % 2:
        raise DeformationDomainError(f"f_(n,m) needs 0 <= m <= n with m = n mod 2, got n={n}, m={m}")
    power = (n - m) // 2
    ratio = LogScalar.from_float(-t) / LogScalar(1, 0.5 * (n + m - 2) * math.log(q))
    value = (
        q_factorial(n, q, log_domain=True)
        / q_factorial(m, q, log_domain=True)
        / _q_double_factorial_log(n - m, q)
        * ratio ** power
        * q_pochhammer(_t2_over_q_power(t, q, 2 * n - 1), q * q, (n + m) // 2, log_domain=True)
    )
    if _injected_fault.get() == (n, m):
        value = value * FAULT_FACTOR
    return value if log_domain else value.to_float()


def _q_double_factorial_log(n: int, q: float) -> LogScalar:
    table = log_q_double_factorial_table(max(n, 0), q)
    return LogScalar(1, float(table[n])) if n > 0 else LogScalar(1, 0.0)


def coeff_f_recursive(n_max: int, q: float, t: float) -> List[Dict[int, float]]:
    """
    Rows f_{n,.} for n = 0..n_max by

        f_{n+1,m}(t) = (1 - t^2/q^(n-m+2)) f_{n,m-1}(t/q) - t [m+1]_q f_{n,m+1}(t/q)

    Each row is memoized under (n, shift), where the row is evaluated at t/q^shift.
    """
    if n_max < 0:
        raise DeformationDomainError(f"n_max must be >= 0, got {n_max}")
    memo: Dict[Tuple[int, int], Dict[int, float]] = {}

    def row(n: int, shift: int) -> Dict[int, float]:
        key = (n, shift)
        if key in memo:
            return memo[key]
        if n == 0:
            memo[key] = {0: 1.0}
            return memo[key]
        below = row(n - 1, shift + 1)
        t_s = _t_over_q_power(t, q, shift)
        result = {}
        for m in range(n % 2, n + 1, 2):
            lower = below.get(m - 1, 0.0)
            upper = below.get(m + 1, 0.0)
            result[m] = (1.0 - t_s * t_s / q ** (n - m + 1)) * lower - t_s * q_number(m + 1, q) * upper
        memo[key] = result
        return result

    return [row(n, 0) for n in range(n_max + 1)]


def normalization(
    n: int,
    q: float,
    t: float,
    ctl: Optional[SeriesControl] = None,
    log_domain: bool = False,
) -> Union[float, LogScalar]:
    """N_n = {[n]! (q^(-2n+1) t^2; q)_n 1phi0(q; -; q^2, q^(-2n) t^2)}^(-1/2)"""
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    _check_t(t)
    ctl = ctl or _series_control()
    series = one_phi_zero(q, q * q, _t2_over_q_power(t, q, 2 * n), ctl, a_exponent=0.5)
    inverse_square = (
        q_factorial(n, q, log_domain=True)
        * q_pochhammer(_t2_over_q_power(t, q, 2 * n - 1), q, n, log_domain=True)
        * series
    )
    value = inverse_square ** -0.5
    return value if log_domain else value.to_float()


def normalization_recursive(n: int, q: float, t: float, ctl: Optional[SeriesControl] = None) -> float:
    """N_n from N_0(t/q^n) by N_{k+1}(t) = {[k+1]_q (1 - t^2/q^(k+1))}^(-1/2) N_k(t/q)"""
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    _check_t(t)
    ctl = ctl or _series_control()
    t_low = _t_over_q_power(t, q, n)
    log_n = -0.5 * math.log(one_phi_zero(q, q * q, t_low * t_low, ctl, a_exponent=0.5))
    for k in range(n):
        t_k = _t_over_q_power(t, q, n - k - 1)
        log_n -= 0.5 * (q_number(k + 1, q, log_domain=True).log_abs + math.log1p(-_t2_over_q_power(t_k, q, k + 1)))
    return LogScalar(1, log_n).to_float()


def _closed_polynomial(n: int, q: float, t: float) -> EvenOddPolynomial:
    coeffs = {m: coeff_f_closed(n, m, q, t) for m in range(n % 2, n + 1, 2)}
    return EvenOddPolynomial(degree=n, parity=_parity(n), coeffs=coeffs)


def _recursive_polynomial(n: int, q: float, t: float) -> EvenOddPolynomial:
    # P_{k+1}(t) = xi P_k(t/q) - xi (t^2/q^(k+1)) P_k(t/q; q xi) - t D_q P_k(t/q)
    memo: Dict[Tuple[int, int], np.ndarray] = {}

    def dense(k: int, shift: int) -> np.ndarray:
        key = (k, shift)
        if key in memo:
            return memo[key]
        if k == 0:
            memo[key] = np.ones(1)
            return memo[key]
        prev = dense(k - 1, shift + 1)
        t_s = _t_over_q_power(t, q, shift)
        shifted = np.concatenate(([0.0], prev))
        dilated = np.concatenate(([0.0], prev * q ** np.arange(prev.size)))
        derivative = np.zeros(k + 1)
        if prev.size > 1:
            derivative[: prev.size - 1] = q_derivative(prev, q)
        memo[key] = shifted - (t_s * t_s / q ** k) * dilated - t_s * derivative
        return memo[key]

    return EvenOddPolynomial.from_dense(dense(n, 0), degree=n)


def _jacobi_polynomial(n: int, q: float, t: float) -> EvenOddPolynomial:
    """P_n through little q-Jacobi polynomials in base q^2"""
    if abs(q - 1.0) < STABLE_THRESHOLD:
        raise RouteError("little q-Jacobi route needs q != 1")
    nu, odd = divmod(n, 2)
    base = q * q
    try:
        if odd:
            # a = q, b = t^2/q^(4 nu + 2): 2phi1(q^-2nu, t^2/q^(2nu-1); q^3; q^2, z)
            lead = (
                q_pochhammer(q ** 3, base, nu)
                * q_pochhammer(t * t / q ** (4 * nu + 1), base, nu + 1)
                * (1.0 / (q ** nu * (q - 1.0))) ** nu
            )
            jacobi = little_q_jacobi_coefficients(nu, q, t * t / q ** (4 * nu + 2), base)
            z_scale = -(q ** (2 * nu + 1)) * (q - 1.0)
        else:
            # a = 1/q, b = t^2/q^(4 nu): 2phi1(q^-2nu, t^2/q^(2nu-1); q; q^2, z)
            lead = (
                q_pochhammer(q, base, nu)
                * q_pochhammer(t * t / q ** (4 * nu - 1), base, nu)
                * (1.0 / (q ** (nu - 1) * (q - 1.0))) ** nu
            )
            jacobi = little_q_jacobi_coefficients(nu, 1.0 / q, t * t / q ** (4 * nu), base)
            z_scale = -(q ** (2 * nu)) * (q - 1.0)
    except (ForbiddenParameterError, QOverflowError, OverflowError, ZeroDivisionError) as e:
        raise RouteError(f"little q-Jacobi route failed for n={n}, q={q}, t={t}: {e}") from e
    # z = z_scale xi^2 / t; the t^nu prefactor absorbs the 1/t^k
    coeffs = {
        2 * k + odd: float(lead * jacobi[k] / base ** k * z_scale ** k * t ** (nu - k))
        for k in range(nu + 1)
    }
    return EvenOddPolynomial(degree=n, parity=_parity(n), coeffs=coeffs)


def polynomial_p(n: int, q: float, t: float, route: Route = "closed") -> EvenOddPolynomial:
    """P_n(q, t; xi) by the closed form, the t/q recursion or little q-Jacobi polynomials"""
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    if route == "closed":
        return _closed_polynomial(n, q, t)
    if route == "recursive":
        return _recursive_polynomial(n, q, t)
    if route == "jacobi":
        return _jacobi_polynomial(n, q, t)
    raise DeformationDomainError(f"unknown route {route!r}")


def polynomial_value(p: EvenOddPolynomial, xi: float) -> float:
    return p.evaluate(xi)


def _finish_expansion(
    n: int,
    log_coeffs: List[LogScalar],
    log_norm: LogScalar,
    r: float,
    sigma_max: int,
) -> FockExpansion:
    """Normalize, fix the sign and estimate the tail of log-domain coefficients"""
    nonzero = [c.log_abs for c in log_coeffs if not c.is_zero]
    peak = max(nonzero)
    values = np.array([0.0 if c.is_zero else c.sign * math.exp(c.log_abs - peak) for c in log_coeffs])
    sum_squares = float(np.dot(values, values))
    closed_form_norm = LogScalar(1, 2.0 * (log_norm.log_abs + peak) + math.log(sum_squares)).to_float()
    values = align_sign(values / math.sqrt(sum_squares))
    tail_bound = float(values[-1] ** 2 * r * r / (1.0 - r * r))
    return FockExpansion(
        n=n,
        parity=_parity(n),
        coeffs=values.tolist(),
        sigma_max=sigma_max,
        tail_bound=tail_bound,
        closed_form_norm=closed_form_norm,
    )


def _tail_ratio(q: float, t: float) -> float:
    # asymptotic |c_{sigma+1} / c_sigma|
    return abs(t) / math.sqrt(q)


def _expansion(n: int, q: float, t: float, sigma_max: int) -> FockExpansion:
    """c_{2s(+1)} = N_n sum_mu sqrt([2s(+1)]!)/[2s-2mu]!! f_{n,2mu(+1)} (t/q^n)^(s-mu)"""
    offset = n % 2
    log_fact = log_q_factorial_table(2 * sigma_max + offset, q)
    log_dfact = log_q_double_factorial_table(2 * sigma_max, q)
    f = {mu: coeff_f_closed(n, 2 * mu + offset, q, t, log_domain=True) for mu in range(n // 2 + 1)}
    sign_t = 1 if t > 0 else -1
    log_ratio = math.log(abs(t)) - n * math.log(q) if t != 0 else -math.inf

    log_coeffs = []
    for sigma in range(sigma_max + 1):
        terms = []
        for mu in range(min(sigma, n // 2) + 1):
            power = sigma - mu
            if power and t == 0:
                continue
            term = LogScalar(1, 0.5 * log_fact[2 * sigma + offset] - log_dfact[2 * sigma - 2 * mu]) * f[mu]
            if power:
                term = term * LogScalar(sign_t ** power, power * log_ratio)
            terms.append(term)
        log_coeffs.append(log_sum(terms))
    return _finish_expansion(n, log_coeffs, normalization(n, q, t, log_domain=True), _tail_ratio(q, t), sigma_max)


def _adaptive(build, start: int, sigma_max: Optional[int], tail_tol: Optional[float]) -> FockExpansion:
    """Build at a fixed sigma_max, or double it until the last coefficient is negligible"""
    if sigma_max is not None:
        if sigma_max < 1:
            raise DeformationDomainError(f"sigma_max must be >= 1, got {sigma_max}")
        expansion = build(sigma_max)
    else:
        cap = get_settings().sigma_cap
        sigma = min(max(ADAPTIVE_START, start), cap)
        while True:
            expansion = build(sigma)
            peak = max(abs(c) for c in expansion.coeffs)
            if abs(expansion.coeffs[-1]) < ADAPTIVE_CUTOFF * peak:
                break
            if sigma >= cap:
                raise TruncationError(f"coefficients still significant at sigma_max={cap}")
            sigma = min(2 * sigma, cap)
    if tail_tol is not None and expansion.tail_bound > tail_tol:
        raise TruncationError(
            f"tail bound {expansion.tail_bound:.3g} exceeds {tail_tol:.3g} at sigma_max={expansion.sigma_max}"
        )
    return expansion


def eigenstate_fock(
    dp: DerivedParams,
    n: int,
    sigma_max: Optional[int] = None,
    tail_tol: Optional[float] = None,
) -> FockExpansion:
    """Fock-basis coefficients of psi_n; only indices of the parity of n are populated"""
    _check_bargmann(dp)
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    if sigma_max is None:
        cap = get_settings().sigma_cap
        if 2 * cap + n % 2 < n:
            raise TruncationError(f"sigma cap {cap} cannot reach Fock index {n}; raise QOSC_SIGMA_CAP")
    expansion = _adaptive(lambda sigma: _expansion(n, dp.q, dp.t, sigma), n, sigma_max, tail_tol)
    logger.debug("eigenstate built", n=n, sigma_max=expansion.sigma_max, tail_bound=expansion.tail_bound)
    return expansion


def ground_state_fock(
    dp: DerivedParams,
    sigma_max: Optional[int] = None,
    tail_tol: Optional[float] = None,
) -> FockExpansion:
    """c_{2nu} = N_0 sqrt([2nu-1]!!/[2nu]!!) t^nu"""
    _check_bargmann(dp)
    q, t = dp.q, dp.t

    def build(sigma: int) -> FockExpansion:
        log_dfact = log_q_double_factorial_table(2 * sigma, q)
        log_coeffs = [LogScalar(1, 0.0)]
        for nu in range(1, sigma + 1):
            if t == 0:
                log_coeffs.append(LogScalar.zero())
                continue
            log_abs = 0.5 * (log_dfact[2 * nu - 1] - log_dfact[2 * nu]) + nu * math.log(abs(t))
            log_coeffs.append(LogScalar(1 if t > 0 or nu % 2 == 0 else -1, log_abs))
        return _finish_expansion(0, log_coeffs, normalization(0, q, t, log_domain=True), _tail_ratio(q, t), sigma)

    return _adaptive(build, 0, sigma_max, tail_tol)


def ground_state_from_q_exponential(dp: DerivedParams, sigma_max: int) -> FockExpansion:
    """Expand E_{q^2}(t xi^2/(q+1)) and map xi^(2 nu) to sqrt([2nu]_q!) |2nu>"""
    _check_bargmann(dp)
    q, t = dp.q, dp.t
    series = q_exp_coefficients(t / (q + 1.0), q * q, n_terms=sigma_max + 1)
    log_fact = log_q_factorial_table(2 * sigma_max, q)
    log_coeffs = [
        LogScalar.from_float(float(c)) * LogScalar(1, 0.5 * log_fact[2 * nu])
        for nu, c in enumerate(series)
    ]
    return _finish_expansion(0, log_coeffs, normalization(0, q, t, log_domain=True), _tail_ratio(q, t), sigma_max)


def annihilation_residual(dp: DerivedParams, sigma_max: int = 80, tail_tol: Optional[float] = None) -> float:
    """||B- psi_0|| / ||psi_0|| in the truncated Fock space"""
    psi = ground_state_fock(dp, sigma_max=sigma_max, tail_tol=tail_tol)
    dim = 2 * sigma_max + 2
    vector = psi.to_dense(dim)
    _, b_minus = ladder_matrices(dim, dp, 0)
    return float(np.linalg.norm(b_minus @ vector) / np.linalg.norm(vector))


def ladder_check(dp: DerivedParams, n: int, sigma_max: int = 80, tail_tol: Optional[float] = None) -> float:
    """|| psi_{n+1}(t) - (e_{n+1} - e_0)^(-1/2) B+(t) psi_n(t/q) ||"""
    _check_bargmann(dp)
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    dim = 2 * sigma_max + 3
    states = (_expansion(n, dp.q, dp.t / dp.q, sigma_max), _expansion(n + 1, dp.q, dp.t, sigma_max + 1))
    for expansion in states:
        if tail_tol is not None and expansion.tail_bound > tail_tol:
            raise TruncationError(
                f"tail bound {expansion.tail_bound:.3g} exceeds {tail_tol:.3g} at sigma_max={expansion.sigma_max}"
            )
    lower, upper = (expansion.to_dense(dim) for expansion in states)
    b_plus, _ = ladder_matrices(dim, dp, 0)
    raised = b_plus @ lower / math.sqrt(excitation_energy(dp, n + 1))
    return float(np.linalg.norm(align_sign(upper) - align_sign(raised)))


def hermite_limit(n: int, t: float) -> Tuple[EvenOddPolynomial, EvenOddPolynomial]:
    """
    (Q_n, c^n H_n(a xi)) at q = 1

    Q_{n+1} = (1 - t^2) xi Q_n - t Q_n', a = sqrt((1 - t^2)/(2t)), c = sqrt(t(1 - t^2)/2).
    """
    if not 0 < t < 1:
        raise DeformationDomainError(f"the Hermite limit needs 0 < t < 1, got {t}")
    if n < 0:
        raise DeformationDomainError(f"n must be >= 0, got {n}")
    q_poly = np.ones(1)
    for _ in range(n):
        raised = np.concatenate(([0.0], (1.0 - t * t) * q_poly))
        if q_poly.size > 1:
            raised[: q_poly.size - 1] -= t * np.polynomial.polynomial.polyder(q_poly)
        q_poly = raised
    a = math.sqrt((1.0 - t * t) / (2.0 * t))
    c = math.sqrt(t * (1.0 - t * t) / 2.0)
    hermite_coeffs = np.asarray(hermite(n).coeffs, dtype=float)[::-1]
    reference = c ** n * hermite_coeffs * a ** np.arange(n + 1)
    return EvenOddPolynomial.from_dense(q_poly, degree=n), EvenOddPolynomial.from_dense(reference, degree=n)
