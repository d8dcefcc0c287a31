"""Lie symmetries, invariant solutions and numerical checks for the
Feynman-Kac equation of geometric mean reversion,

    u_t = 1/2 sigma^2 x^2 u_xx + k x (alpha - x) u_x + lambda x^2 u.
"""
from .errors import DivergenceError, DomainError
from .model import ModelParams, PdePoint, pde_operator, to_log_coords

__version__ = "0.1.0"

__all__ = ["DivergenceError", "DomainError", "ModelParams", "PdePoint", "pde_operator",
           "to_log_coords", "__version__"]
