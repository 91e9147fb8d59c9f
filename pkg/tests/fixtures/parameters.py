"""
Parameter sets reused across the test suite
"""

import numpy as np

# (alpha, beta) pairs covering every regime
ACCEPTANCE_PAIRS = [
    (0.1, 0.2),
    (0.05, 0.4),
    (0.3, 0.3),
    (0.2, 0.1),
    (0.0, 0.3),
    (0.0, 0.0),
]

GENERAL_PAIRS = [(0.1, 0.2), (0.05, 0.4), (0.2, 0.1), (0.5, 1.2), (1.5, 0.3)]

HERMITE_T_VALUES = [0.3, 0.6, 0.9]


def random_pairs(rng: np.random.Generator, count: int):
    """Valid (alpha, beta) with alpha * beta < 0.9 and both away from zero"""
    alphas = rng.uniform(0.01, 2.0, size=count)
    betas = np.array([rng.uniform(0.01, min(2.0, 0.9 / a)) for a in alphas])
    return [(float(a), float(b)) for a, b in zip(alphas, betas)]


def random_q_t(rng: np.random.Generator, count: int, q_low: float = 1.1, q_high: float = 3.0):
    """(q, t) with q in [q_low, q_high) and |t| < 0.9"""
    qs = rng.uniform(q_low, q_high, size=count)
    ts = rng.uniform(-0.9, 0.9, size=count)
    return [(float(q), float(t)) for q, t in zip(qs, ts)]
