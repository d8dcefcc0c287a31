"""Coefficients and differential operator of the GMR Feynman-Kac equation.

The equation is

    u_t = 1/2 sigma^2 x^2 u_xx + k x (alpha - x) u_x + lambda x^2 u,    x > 0,

i.e. the backward equation of dX = k(alpha - X) X dt + sigma X dW with the
potential c(x) = lambda x^2.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError

SYMMETRIC_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """SDE / PDE coefficients.

    k      reversion speed, k > 0 (k = 0 accepted as the pure-diffusion limit)
    alpha  long-run level, alpha >= 0
    sigma  volatility, sigma > 0
    lam    potential coefficient in c(x) = lam * x**2
    """

    k: float
    alpha: float
    sigma: float
    lam: float

    def __post_init__(self):
        for name in ("k", "alpha", "sigma", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.k >= 0:
            raise DomainError("k>=0 required")
        if not self.sigma > 0:
            raise DomainError("sigma>0 required")
        if not self.alpha >= 0:
            raise DomainError("alpha>=0 required")

    @classmethod
    def symmetric(cls, k: float, sigma: float) -> "ModelParams":
        """The six-generator case alpha = 0, lambda = k^2 / (2 sigma^2)."""
        return cls(k=k, alpha=0.0, sigma=sigma, lam=k * k / (2.0 * sigma * sigma))

    @property
    def lam_symmetric(self) -> float:
        return self.k ** 2 / (2.0 * self.sigma ** 2)

    def symmetric_case(self) -> bool:
        ref = self.lam_symmetric
        return self.alpha == 0 and abs(self.lam - ref) <= SYMMETRIC_RTOL * ref

    def require_symmetric(self) -> None:
        if not self.symmetric_case():
            raise DomainError(
                "symmetric case required: alpha=0 and lambda=k^2/(2 sigma^2) "
                f"(got alpha={self.alpha}, lambda={self.lam}, "
                f"k^2/(2 sigma^2)={self.lam_symmetric})"
            )

    # JSON uses the key "lambda", which is reserved in Python.
    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        k = float(d["k"])
        sigma = float(d["sigma"])
        alpha = float(d.get("alpha", 0.0))
        if "lambda" in d:
            lam = float(d["lambda"])
        elif "lam" in d:
            lam = float(d["lam"])
        else:
            lam = k * k / (2.0 * sigma * sigma)
        return cls(k=k, alpha=alpha, sigma=sigma, lam=lam)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PdePoint:
    """A point (t, x, u) of the solution space; x must be positive."""

    t: float
    x: float
    u: float

    def __post_init__(self):
        if not self.x > 0:
            raise DomainError(f"x>0 required (got x={self.x})")


def _check_finite(**arrays) -> None:
    for name, value in arrays.items():
        if not np.all(np.isfinite(value)):
            raise DomainError(f"non-finite input {name}")


def pde_operator(p: ModelParams, u, u_t, u_x, u_xx, t, x):
    """Residual 1/2 s^2 x^2 u_xx + k x (alpha - x) u_x + lam x^2 u - u_t.

    Works elementwise on numpy arrays. Exact solutions give zero.
    """
    _check_finite(u=u, u_t=u_t, u_x=u_x, u_xx=u_xx, t=t, x=x)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x>0 required")
    r = (0.5 * p.sigma ** 2 * x ** 2 * np.asarray(u_xx)
         + p.k * x * (p.alpha - x) * np.asarray(u_x)
         + p.lam * x ** 2 * np.asarray(u)
         - np.asarray(u_t))
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class LogCoefficients:
    """u_t = a u_yy + b(y) u_y + c(y) u in y = ln x."""

    a: float
    k: float
    alpha: float
    sigma: float
    lam: float

    def b(self, y):
        return self.k * (self.alpha - np.exp(y)) - 0.5 * self.sigma ** 2

    def c(self, y):
        return self.lam * np.exp(2.0 * y)

    def __call__(self, y):
        return self.a, self.b(y), self.c(y)


def to_log_coords(p: ModelParams) -> LogCoefficients:
    """Coefficients of the equation after the change of variable y = ln x.

    Uses x u_x = u_y and x^2 u_xx = u_yy - u_y.
    """
    return LogCoefficients(a=0.5 * p.sigma ** 2, k=p.k, alpha=p.alpha,
                           sigma=p.sigma, lam=p.lam)


def log_operator(p: ModelParams, u, u_t, u_y, u_yy, y):
    """Residual of the log-coordinate form, a u_yy + b u_y + c u - u_t."""
    a, b, c = to_log_coords(p)(np.asarray(y, dtype=float))
    return a * u_yy + b * u_y + c * u - u_t
