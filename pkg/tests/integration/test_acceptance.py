"""
Full-size verification over the acceptance grid
"""

import numpy as np
import pytest

from oscillator.fock_oracle import eig_sym, hamiltonian
from oscillator.spectrum import energy
from oscillator.verification import run_verification
from tests.conftest import derived
from tests.fixtures.parameters import ACCEPTANCE_PAIRS

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("alpha,beta", ACCEPTANCE_PAIRS)
def test_default_battery_passes(alpha, beta):
    report = run_verification(derived(alpha, beta), n_max=10, dim=400)
    assert report.passed, report.failed_checks()


@pytest.mark.parametrize("alpha,beta", [(0.1, 0.2), (0.05, 0.4), (0.2, 0.1)])
def test_oracle_at_full_dimension(alpha, beta):
    dp = derived(alpha, beta)
    result = eig_sym(hamiltonian(400, dp))
    expected = [energy(dp, n) for n in range(10)]
    np.testing.assert_allclose(result.values[:10], expected, rtol=1e-8)
    assert result.residual_bound / abs(result.values[-1]) < 1e-10
