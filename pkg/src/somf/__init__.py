"""Exact-arithmetic computations for algebraic modular forms on SO(6)
attached to imaginary-quadratic discriminants, degree-two Hermitian
modular form Hecke formulas, lift L-functions, and dimension series."""

__version__ = "0.1.0"
