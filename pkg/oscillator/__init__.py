"""
Deformed Oscillator Solver
Closed-form spectra, eigenstates and a Fock-space oracle for [X, P] = i(1 + alpha X^2 + beta P^2)
"""

__version__ = "1.0.0"
