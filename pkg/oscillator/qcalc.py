"""
q-deformed arithmetic and basic special functions
q-numbers, q-factorials, q-Pochhammer symbols, the q-exponential,
the q-derivative and the basic hypergeometric series used downstream
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np
import structlog

from common.exceptions import (
    DeformationDomainError,
    ForbiddenParameterError,
    QOverflowError,
    SeriesConvergenceError,
)
from .schemas import EvenOddPolynomial, SeriesControl

logger = structlog.get_logger()

# Below this |q - 1| the q-number is expanded in powers of (q - 1)
STABLE_THRESHOLD = 1e-8
LOG_FLOAT_MAX = math.log(np.finfo(float).max)
# |1 - b^k| below this is treated as a vanishing denominator
ZERO_DENOMINATOR = 1e-14


@dataclass(frozen=True)
class LogScalar:
    """Signed real stored as (sign, ln|value|); sign 0 means exactly zero"""

    sign: int
    log_abs: float

    @classmethod
    def from_float(cls, value: float) -> "LogScalar":
        if value == 0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, -math.inf)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: Union["LogScalar", float]) -> "LogScalar":
        other = _as_log(other)
        if self.is_zero or other.is_zero:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other: Union["LogScalar", float]) -> "LogScalar":
        other = _as_log(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.is_zero:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log_abs)

    def __pow__(self, exponent: float) -> "LogScalar":
        if self.is_zero:
            return LogScalar(1, 0.0) if exponent == 0 else LogScalar.zero()
        if self.sign < 0:
            if float(exponent).is_integer():
                return LogScalar(-1 if int(exponent) % 2 else 1, self.log_abs * exponent)
            raise DeformationDomainError("fractional power of a negative value")
        return LogScalar(1, self.log_abs * exponent)

    def sqrt(self) -> "LogScalar":
        return self ** 0.5

    def to_float(self) -> float:
        if self.is_zero:
            return 0.0
        if self.log_abs > LOG_FLOAT_MAX:
            raise QOverflowError(f"value exp({self.log_abs:.6g}) exceeds double precision")
        return self.sign * math.exp(self.log_abs)


def _as_log(value: Union[LogScalar, float]) -> LogScalar:
    return value if isinstance(value, LogScalar) else LogScalar.from_float(float(value))


def log_sum(terms: Iterable[LogScalar]) -> LogScalar:
    """Signed log-sum-exp of LogScalar terms"""
    terms = [term for term in terms if not term.is_zero]
    if not terms:
        return LogScalar.zero()
    peak = max(term.log_abs for term in terms)
    total = math.fsum(term.sign * math.exp(term.log_abs - peak) for term in terms)
    if total == 0:
        return LogScalar.zero()
    return LogScalar(1 if total > 0 else -1, peak + math.log(abs(total)))


def _check_q(q: float) -> None:
    if not q > 0 or not math.isfinite(q):
        raise DeformationDomainError(f"q must be positive and finite, got {q}")


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise QOverflowError(f"{what} is not finite in double precision; use log_domain=True")
    return value


def _q_number_near_one(n: float, delta: float) -> float:
    # [n]_q = sum_k C(n, k) delta^(k-1), truncated after the quadratic term
    return n + n * (n - 1) / 2 * delta + n * (n - 1) * (n - 2) / 6 * delta * delta


def _log_abs_expm1(x: float) -> float:
    if x > 0:
        return x + math.log(-math.expm1(-x))
    return math.log(-math.expm1(x))


def q_number(n: int, q: float, log_domain: bool = False) -> Union[float, LogScalar]:
    """[n]_q = (q^n - 1) / (q - 1); negative n follows the same formula"""
    _check_q(q)
    if n == 0:
        return LogScalar.zero() if log_domain else 0.0
    delta = q - 1.0
    if abs(delta) < STABLE_THRESHOLD:
        value = _q_number_near_one(n, delta)
        return LogScalar.from_float(value) if log_domain else value
    x = n * math.log1p(delta)
    if log_domain:
        sign = (1 if x > 0 else -1) * (1 if delta > 0 else -1)
        return LogScalar(sign, _log_abs_expm1(x) - math.log(abs(delta)))
    if x > LOG_FLOAT_MAX:
        raise QOverflowError(f"[{n}]_q overflows for q={q}; use log_domain=True")
    return math.expm1(x) / delta


def q_bracket_ratio(x: float, y: float, q: float) -> float:
    """[x]_q / [y]_q without forming either bracket when q^x would overflow"""
    _check_q(q)
    delta = q - 1.0
    if abs(delta) < STABLE_THRESHOLD:
        return _q_number_near_one(x, delta) / _q_number_near_one(y, delta)
    lq = math.log1p(delta)
    if lq > 0:
        return math.exp((x - y) * lq) * math.expm1(-x * lq) / math.expm1(-y * lq)
    return math.expm1(x * lq) / math.expm1(y * lq)


def log_q_number_table(n_max: int, q: float) -> np.ndarray:
    """ln [j]_q for j = 0..n_max (entry 0 is -inf); requires q > 0"""
    _check_q(q)
    j = np.arange(n_max + 1, dtype=float)
    delta = q - 1.0
    with np.errstate(divide="ignore"):
        if abs(delta) < STABLE_THRESHOLD:
            return np.log(_q_number_near_one(j, delta))
        x = j * math.log1p(delta)
        if delta > 0:
            return x + np.log(-np.expm1(-x)) - math.log(delta)
        return np.log(-np.expm1(x)) - math.log(-delta)


def log_q_factorial_table(n_max: int, q: float) -> np.ndarray:
    """ln [j]_q! for j = 0..n_max"""
    logs = log_q_number_table(n_max, q)
    table = np.zeros(n_max + 1)
    table[1:] = np.cumsum(logs[1:])
    return table


def log_q_double_factorial_table(n_max: int, q: float) -> np.ndarray:
    """ln [j]_q!! for j = 0..n_max"""
    logs = log_q_number_table(n_max, q)
    table = np.zeros(n_max + 1)
    for j in range(1, n_max + 1):
        table[j] = logs[j] + (table[j - 2] if j >= 2 else 0.0)
    return table


def q_factorial(n: int, q: float, log_domain: bool = False) -> Union[float, LogScalar]:
    """[n]_q! = [1]_q [2]_q ... [n]_q with [0]_q! = 1"""
    if n < 0:
        raise DeformationDomainError(f"q-factorial needs n >= 0, got {n}")
    if log_domain:
        result = LogScalar(1, 0.0)
        for j in range(1, n + 1):
            result = result * q_number(j, q, log_domain=True)
        return result
    value = 1.0
    for j in range(1, n + 1):
        value *= q_number(j, q)
    return _check_finite(value, f"[{n}]_q!")


def q_double_factorial(n: int, q: float, log_domain: bool = False) -> Union[float, LogScalar]:
    """[n]_q [n-2]_q ... down to [1]_q or [2]_q; equals 1 at n = 0 and n = -1"""
    if n < -1:
        raise DeformationDomainError(f"q-double factorial needs n >= -1, got {n}")
    if log_domain:
        result = LogScalar(1, 0.0)
        for j in range(n, 0, -2):
            result = result * q_number(j, q, log_domain=True)
        return result
    value = 1.0
    for j in range(n, 0, -2):
        value *= q_number(j, q)
    return _check_finite(value, f"[{n}]_q!!")


def q_pochhammer(a: float, q: float, n: int, log_domain: bool = False) -> Union[float, LogScalar]:
    """(a; q)_n = (1 - a)(1 - a q) ... (1 - a q^(n-1)) with (a; q)_0 = 1"""
    if n < 0:
        raise DeformationDomainError(f"q-Pochhammer needs n >= 0, got {n}")
    _check_q(q)
    if log_domain:
        result = LogScalar(1, 0.0)
        if a == 0:
            return result
        log_a, log_q = math.log(abs(a)), math.log(q)
        for k in range(n):
            lk = log_a + k * log_q
            if lk > 35:
                result = result * LogScalar(-1 if a > 0 else 1, lk)
            else:
                result = result * LogScalar.from_float(1.0 - math.copysign(math.exp(lk), a))
        return result
    value = 1.0
    power = 1.0
    for _ in range(n):
        value *= 1.0 - a * power
        power *= q
    return _check_finite(value, f"({a}; {q})_{n}")


def q_exp_coefficients(
    a: float,
    q: float,
    ctl: SeriesControl = SeriesControl(),
    radius: float = 1.0,
    n_terms: Optional[int] = None,
) -> np.ndarray:
    """
    Coefficients a^n / [n]_q! of E_q(a xi)

    Truncated once a coefficient times radius^n drops below ctl.tol, or after
    exactly n_terms coefficients when n_terms is given.
    q = 1 gives the classical exponential; q < 1 is not supported.
    """
    if q < 1:
        raise DeformationDomainError(f"E_q series is implemented for q >= 1, got {q}")
    coeffs = [1.0]
    value, magnitude = 1.0, 1.0
    limit = n_terms if n_terms is not None else ctl.max_terms
    for n in range(1, limit):
        qn = q_number(n, q)
        value = value * a / qn
        magnitude = magnitude * abs(a) * radius / qn
        coeffs.append(value)
        if n_terms is None and magnitude < ctl.tol:
            return np.array(coeffs)
    if n_terms is not None:
        return np.array(coeffs)
    raise SeriesConvergenceError(f"E_q coefficients did not reach tol={ctl.tol} in {ctl.max_terms} terms")


def q_derivative(p, q: float):
    """
    D_q xi^m = [m]_q xi^(m-1)

    Accepts an EvenOddPolynomial (returns one of the opposite parity) or a
    dense coefficient sequence indexed by power.
    """
    if isinstance(p, EvenOddPolynomial):
        dense = q_derivative(p.to_dense(), q)
        return EvenOddPolynomial.from_dense(dense, degree=max(p.degree - 1, 0))
    coeffs = np.asarray(p, dtype=float)
    if coeffs.size <= 1:
        return np.zeros(1)
    factors = np.array([q_number(m, q) for m in range(1, coeffs.size)])
    return factors * coeffs[1:]


def one_phi_zero(
    q_arg: float,
    base: float,
    z: float,
    ctl: SeriesControl = SeriesControl(),
    a_exponent: Optional[float] = None,
) -> float:
    """
    1phi0(a; -; base, z) = sum_n (a; base)_n / (base; base)_n z^n

    When a = base^a_exponent is known, pass a_exponent: the term ratio is then
    evaluated as [a_exponent + n]_base / [n + 1]_base, which stays finite at
    base = 1 and gives the classical binomial series there.
    """
    _check_q(base)
    if a_exponent is None and abs(base - 1.0) < STABLE_THRESHOLD:
        raise ForbiddenParameterError("1phi0 at base 1 needs a_exponent")
    a = base ** a_exponent if a_exponent is not None else q_arg
    asymptotic = abs(z * a / base) if base > 1 else abs(z)
    if asymptotic >= 1:
        raise SeriesConvergenceError(f"1phi0 diverges: asymptotic term ratio {asymptotic:.6g} >= 1")

    total, term = 1.0, 1.0
    for n in range(ctl.max_terms):
        if a_exponent is not None:
            ratio = z * q_bracket_ratio(a_exponent + n, n + 1, base)
        elif base > 1:
            shrink = base ** -(n + 1)
            ratio = z * (shrink - a / base) / (shrink - 1.0)
        else:
            ratio = z * (1.0 - a * base ** n) / (1.0 - base ** (n + 1))
        term *= ratio
        total += term
        rho = max(abs(ratio), asymptotic)
        if rho < 1 and abs(term) * rho / (1.0 - rho) < ctl.tol:
            logger.debug("1phi0 converged", terms=n + 1, base=base, z=z)
            return total
    raise SeriesConvergenceError(f"1phi0 did not reach tol={ctl.tol} in {ctl.max_terms} terms")


def two_phi_one_term_coefficients(n_param: int, a2: float, b1: float, base: float) -> np.ndarray:
    """Coefficients of z^k, k = 0..n_param, in 2phi1(base^-n_param, a2; b1; base, z)"""
    if n_param < 0:
        raise DeformationDomainError(f"terminating 2phi1 needs n_param >= 0, got {n_param}")
    _check_q(base)
    coeffs = np.zeros(n_param + 1)
    coeffs[0] = 1.0
    for k in range(n_param):
        base_k = base ** k
        denominator = (1.0 - base_k * base) * (1.0 - b1 * base_k)
        if abs(1.0 - base_k * base) < ZERO_DENOMINATOR or abs(1.0 - b1 * base_k) < ZERO_DENOMINATOR:
            raise ForbiddenParameterError(f"2phi1 denominator vanishes at term {k + 1} (b1={b1}, base={base})")
        numerator = (1.0 - base ** (k - n_param)) * (1.0 - a2 * base_k)
        coeffs[k + 1] = coeffs[k] * numerator / denominator
    return coeffs


def two_phi_one_terminating(n_param: int, a2: float, b1: float, base: float, z: float) -> float:
    """Finite sum of the terminating 2phi1 with first numerator parameter base^-n_param"""
    coeffs = two_phi_one_term_coefficients(n_param, a2, b1, base)
    return float(np.polynomial.polynomial.polyval(z, coeffs))


def little_q_jacobi_coefficients(n: int, a: float, b: float, base: float) -> np.ndarray:
    """Power coefficients in x of p_n(x; a, b; base)"""
    terms = two_phi_one_term_coefficients(n, a * b * base ** (n + 1), a * base, base)
    return terms * base ** np.arange(n + 1)


def little_q_jacobi(n: int, x: float, a: float, b: float, base: float) -> float:
    """p_n(x; a, b; base) = 2phi1(base^-n, a b base^(n+1); a base; base, base x)"""
    return two_phi_one_terminating(n, a * b * base ** (n + 1), a * base, base, base * x)
