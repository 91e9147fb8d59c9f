"""
Schema definitions for the deformed oscillator
Pydantic models for validation and type safety
"""

from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator


class Regime(str, Enum):
    """Which closed forms apply to a (alpha, beta) pair"""

    GENERAL = "general"
    ALPHA_ZERO = "alpha_zero"
    BETA_ZERO = "beta_zero"
    EQUAL = "equal"
    UNDEFORMED = "undeformed"

    @property
    def is_translation(self) -> bool:
        return self in (Regime.ALPHA_ZERO, Regime.BETA_ZERO)


class SeriesControl(BaseModel):
    """Truncation policy for infinite series"""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-14, gt=0, description="Absolute tail bound")
    max_terms: int = Field(10000, ge=1, description="Hard cap on the number of terms")


class DeformationParams(BaseModel):
    """Dimensionless deformation parameters of [X, P] = i(1 + alpha X^2 + beta P^2)"""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=0, allow_inf_nan=False, description="Position deformation")
    beta: float = Field(..., ge=0, allow_inf_nan=False, description="Momentum deformation")

    @model_validator(mode="after")
    def validate_product(self):
        assert self.alpha * self.beta < 1, "alpha * beta must be < 1"
        return self


class DerivedParams(BaseModel):
    """Every scalar derived from (alpha, beta)

    gamma, u, v, d and big_k are None in the translation regimes, where
    gamma = sqrt(beta / alpha) has no finite value; t then holds its limit -1
    (alpha = 0) or +1 (beta = 0).
    """

    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    regime: Regime
    k: float
    gamma: Optional[float] = None
    g: float
    s: float
    q: float
    log_q: float = Field(..., description="ln q, computed without cancellation")
    u: Optional[float] = None
    v: Optional[float] = None
    t: float
    one_minus_t2: float = Field(..., description="1 - t^2, computed without cancellation")
    d: Optional[float] = None
    big_k: Optional[float] = Field(None, description="K = u sqrt((q + 1) / (4 gamma))")
    eps0: float


class HierarchyLevel(BaseModel):
    """One member h_i = (a_i P^2 + b_i X^2) / 2 + c_i of the partner hierarchy"""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0)
    g_i: float
    s_i: float
    u_i: Optional[float] = None
    v_i: Optional[float] = None
    t_i: float
    eps_i: float
    a_i: float
    b_i: float
    c_i: float
    mass_ratio: float = Field(..., description="m_i / m = 1 / a_i")
    freq_ratio: float = Field(..., description="omega_i / omega = sqrt(a_i b_i)")


class LogHierarchyLevel(BaseModel):
    """A hierarchy level with every growing quantity stored as its natural log"""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0)
    t_i: float
    log_g_i: float
    log_s_i: float
    log_eps_i: float
    log_a_i: float
    log_b_i: float
    log_c_i: Optional[float] = Field(None, description="None at level 0, where c_0 = 0")
    log_mass_ratio: float
    log_freq_ratio: float


class EvenOddPolynomial(BaseModel):
    """Polynomial in xi whose exponents all share the parity of its degree"""

    model_config = ConfigDict(frozen=True)

    degree: int = Field(..., ge=0)
    parity: Literal["even", "odd"]
    coeffs: Dict[int, float] = Field(..., description="exponent -> coefficient")

    @model_validator(mode="after")
    def validate_parity(self):
        expected = "even" if self.degree % 2 == 0 else "odd"
        assert self.parity == expected, f"degree {self.degree} must have {expected} parity"
        for m in self.coeffs:
            assert 0 <= m <= self.degree, f"exponent {m} outside 0..{self.degree}"
            assert (self.degree - m) % 2 == 0, f"exponent {m} breaks {self.parity} parity"
        return self

    @classmethod
    def from_dense(cls, dense, degree: Optional[int] = None) -> "EvenOddPolynomial":
        """Build from a dense coefficient array, keeping the degree's parity"""
        dense = np.asarray(dense, dtype=float)
        if degree is None:
            degree = len(dense) - 1
        coeffs = {m: float(dense[m]) if m < len(dense) else 0.0 for m in range(degree % 2, degree + 1, 2)}
        return cls(degree=degree, parity="even" if degree % 2 == 0 else "odd", coeffs=coeffs)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.degree + 1)
        for m, c in self.coeffs.items():
            dense[m] = c
        return dense

    def coefficient(self, m: int) -> float:
        return self.coeffs.get(m, 0.0)

    def evaluate(self, xi: float) -> float:
        return float(np.polynomial.polynomial.polyval(xi, self.to_dense()))

    def dilate(self, factor: float) -> "EvenOddPolynomial":
        """P(factor * xi)"""
        return self.model_copy(update={"coeffs": {m: c * factor ** m for m, c in self.coeffs.items()}})

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)


class FockExpansion(BaseModel):
    """Coefficients of an eigenstate over same-parity q-boson states"""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="Eigenstate index")
    parity: Literal["even", "odd"]
    coeffs: List[float] = Field(..., description="c_sigma over Fock indices 2 sigma (+1 if odd)")
    sigma_max: int
    tail_bound: float = Field(..., ge=0, description="Estimated squared norm beyond sigma_max")
    closed_form_norm: float = Field(..., description="Squared norm before renormalization")

    @field_validator("coeffs")
    @classmethod
    def validate_finite(cls, v):
        assert all(np.isfinite(v)), "coefficients must be finite"
        return v

    @property
    def offset(self) -> int:
        return 0 if self.parity == "even" else 1

    def fock_indices(self) -> List[int]:
        return [2 * sigma + self.offset for sigma in range(len(self.coeffs))]

    def norm_squared(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def to_dense(self, dim: int) -> np.ndarray:
        """Embed into the first dim Fock states"""
        vector = np.zeros(dim)
        for index, c in zip(self.fock_indices(), self.coeffs):
            if index < dim:
                vector[index] = c
        return vector


class SpectrumRequest(BaseModel):
    """Which spectrum rows to produce"""

    dp: DerivedParams
    n_max: int = Field(..., ge=0)
    log_domain: bool = False


class SpectrumRow(BaseModel):
    """One spectrum table row; log fields are filled in log-domain mode"""

    n: int
    e_n: Optional[float] = None
    excitation: Optional[float] = None
    log_e_n: Optional[float] = None
    log_excitation: Optional[float] = None


class BandedSymMatrix(BaseModel):
    """Real symmetric operator on a truncated Fock space"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(..., ge=1)
    bandwidth: int = Field(..., ge=0)
    entries: np.ndarray

    @model_validator(mode="after")
    def validate_structure(self):
        assert self.entries.shape == (self.dim, self.dim), "entries must be dim x dim"
        assert np.all(np.isfinite(self.entries)), "entries must be finite"
        assert np.array_equal(self.entries, self.entries.T), "matrix must be symmetric"
        outside = np.abs(np.subtract.outer(np.arange(self.dim), np.arange(self.dim))) > self.bandwidth
        assert not np.any(self.entries[outside]), "entries outside the band must vanish"
        return self


class EigenResult(BaseModel):
    """Ascending eigenvalues with orthonormal eigenvector columns"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    vectors: np.ndarray
    residual_bound: float
    sweeps: int
    dim: int


class CheckResult(BaseModel):
    """Outcome of one verification check"""

    name: str
    status: Literal["pass", "fail", "skipped", "error"]
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skipped")


class VerificationReport(BaseModel):
    """All checks of one verification run"""

    alpha: float
    beta: float
    regime: Regime
    checks: List[CheckResult]

    _errors: List[Exception] = PrivateAttr(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if check.status == "fail"]

    def errored_checks(self) -> List[str]:
        return [check.name for check in self.checks if check.status == "error"]

    def raise_for_errors(self) -> None:
        """Re-raise the first numerical error a check hit (truncation, overflow, convergence)"""
        if self._errors:
            raise self._errors[0]


class RunConfig(BaseModel):
    """Parsed command line"""

    command: Literal["params", "spectrum", "eigvec", "hierarchy", "verify"]
    alpha: float
    beta: float
    n_max: int = Field(10, ge=0)
    dim: int = Field(400, ge=0)
    sigma_max: Optional[int] = Field(None, ge=1)
    levels: int = Field(5, ge=1)
    tol: float = Field(1e-10, gt=0)
    format: Literal["json", "csv"] = "json"
    log_domain: bool = False
    state: int = Field(0, ge=0, description="Eigenstate index for eigvec")
    inject_fault: Optional[Tuple[int, int]] = Field(None, description="(n, m) of the f coefficient to perturb")
