"""One-parameter point symmetry groups G1..G6 and their action on solutions.

With L = ln x, kappa = k / sigma^2 and x~ the transformed x:

    G1  (t + e, x, u)
    G2  (e^e t, exp(e^{e/2} L), u exp(kappa (x~ - x) + (e^{e/2} - 1) L/2 - sigma^2 t (e^e - 1)/8))
    G3  (t/(1 - e t), exp(L/(1 - e t)),
         u exp(kappa (x~ - x) - e t/(1 - e t) (L^2/(2 sigma^2 t) - L/2 + sigma^2 t/8)
               + ln(1 - e t)/2))
    G4  (t, e^e x, u exp(kappa x (e^e - 1)))
    G5  (t, e^{e t} x, u exp(kappa x (e^{e t} - 1) - e^2 t/(2 sigma^2) - e L/sigma^2 + e t/2))
    G6  (t, x, e^e u)

These are the exact flows of V1..V6 (see `flow_point`).  The G3 factor in
the form often quoted carries "+ e t/(1 - e t)(...)"; that version is
available as ``apply_point(..., quoted=True)`` and is *not* a symmetry.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .model import ModelParams, PdePoint


def generator_field(i: int, p: ModelParams):
    """(tau, xi, phi) of V_i as a function of (t, x, u)."""
    k, s2 = p.k, p.sigma ** 2
    kap = k / s2

    def f(t, x, u):
        L = math.log(x)
        if i == 1:
            return 1.0, 0.0, 0.0
        if i == 2:
            return t, 0.5 * x * L, (kap / 2 * x * L + L / 4 - s2 * t / 8) * u
        if i == 3:
            return (t * t, t * x * L,
                    (kap * t * x * L - L * L / (2 * s2) + t * L / 2 - s2 * t * t / 8 - t / 2) * u)
        if i == 4:
            return 0.0, x, kap * x * u
        if i == 5:
            return 0.0, t * x, (kap * t * x - L / s2 + t / 2) * u
        if i == 6:
            return 0.0, 0.0, u
        raise DomainError("generator index must be in 1..6")

    return f


@dataclass(frozen=True)
class PointMap:
    """exp(epsilon V_i) acting on (t, x, u)."""

    generator_index: int
    epsilon: float
    params: ModelParams

    def __post_init__(self):
        if self.generator_index not in range(1, 7):
            raise DomainError("generator index must be in 1..6")
        if not math.isfinite(self.epsilon):
            raise DomainError("epsilon must be finite")
        self.params.require_symmetric()

    # (t, x) part and u-exponent, vectorised ---------------------------------

    def forward_tx(self, t, x):
        i, e = self.generator_index, self.epsilon
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("x>0 required")
        L = np.log(x)
        if i == 1:
            return t + e, x
        if i == 2:
            return math.exp(e) * t, np.exp(math.exp(e / 2) * L)
        if i == 3:
            d = 1 - e * t
            if np.any(d <= 0):
                raise DomainError("finite-time singularity of projective map (1 - eps t <= 0)")
            return t / d, np.exp(L / d)
        if i == 4:
            return t, math.exp(e) * x
        if i == 5:
            return t, np.exp(e * t) * x
        return t, x

    def inverse_tx(self, tt, xx):
        """Preimage (t, x) of a transformed point (t~, x~)."""
        i, e = self.generator_index, self.epsilon
        tt = np.asarray(tt, dtype=float)
        xx = np.asarray(xx, dtype=float)
        if np.any(xx <= 0):
            raise DomainError("x>0 required")
        LL = np.log(xx)
        if i == 1:
            return tt - e, xx
        if i == 2:
            return math.exp(-e) * tt, np.exp(math.exp(-e / 2) * LL)
        if i == 3:
            d = 1 + e * tt
            if np.any(d <= 0):
                raise DomainError("finite-time singularity of projective map (1 + eps t~ <= 0)")
            return tt / d, np.exp(LL / d)
        if i == 4:
            return tt, math.exp(-e) * xx
        if i == 5:
            return tt, np.exp(-e * tt) * xx
        return tt, xx

    def log_factor(self, t, x, quoted: bool = False):
        """ln(u~/u) at the original point (t, x)."""
        i, e = self.generator_index, self.epsilon
        s2 = self.params.sigma ** 2
        kap = self.params.k / s2
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        L = np.log(x)
        _, xt = self.forward_tx(t, x)
        if i == 1:
            return 0.0 * (t + x)
        if i == 2:
            return kap * (xt - x) + 0.5 * (math.exp(e / 2) - 1) * L - s2 * t * (math.exp(e) - 1) / 8
        if i == 3:
            d = 1 - e * t
            if np.any(d <= 0):
                raise DomainError("finite-time singularity of projective map (1 - eps t <= 0)")
            # e t/(1 - e t) * L^2/(2 s^2 t) written as e L^2/(2 s^2 (1 - e t)), finite at t = 0
            bracket = e * L * L / (2 * s2 * d) + e * t / d * (-L / 2 + s2 * t / 8)
            sign = 1.0 if quoted else -1.0
            return kap * (xt - x) + sign * bracket + 0.5 * np.log(d)
        if i == 4:
            return kap * x * (math.exp(e) - 1)
        if i == 5:
            return kap * (xt - x) - e * e * t / (2 * s2) - e * L / s2 + e * t / 2
        return e + 0.0 * (t + x)

    def to_dict(self) -> dict:
        return {"g": self.generator_index, "eps": self.epsilon}

    @classmethod
    def from_dict(cls, d: dict, params: ModelParams) -> "PointMap":
        return cls(int(d["g"]), float(d["eps"]), params)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def apply_point(m: PointMap, pt: PdePoint, quoted: bool = False) -> PdePoint:
    """Image of (t, x, u) under the map.  ``quoted`` selects the quoted G3 factor."""
    tt, xx = m.forward_tx(pt.t, pt.x)
    uu = pt.u * math.exp(float(m.log_factor(pt.t, pt.x, quoted)))
    return PdePoint(float(tt), float(xx), uu)


def flow_point(i: int, eps: float, pt: PdePoint, params: ModelParams,
               rtol: float = 1e-12, atol: float = 1e-14) -> PdePoint:
    """Integrate d(t, x, u)/d eps = (tau, xi, phi) from eps = 0 to eps."""
    params.require_symmetric()
    field = generator_field(i, params)
    if eps == 0:
        return pt

    def rhs(_, z):
        if z[1] <= 0:
            raise DomainError("flow left x>0")
        return field(*z)

    def leave(_, z):
        return z[1] - 1e-300

    leave.terminal = True
    sol = solve_ivp(rhs, (0.0, eps), [pt.t, pt.x, pt.u], method="DOP853",
                    rtol=rtol, atol=atol, events=leave)
    if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
        raise DomainError(f"flow integration failed to reach eps={eps}: {sol.message}")
    t, x, u = sol.y[:, -1]
    return PdePoint(float(t), float(x), float(u))


def _preimage_jet(m: PointMap, tt):
    """t = T(t~), L = A(t~) L~ + B(t~): returns T, T', A, A', B, B'."""
    i, e = m.generator_index, m.epsilon
    tt = np.asarray(tt, dtype=float)
    one, zero = np.ones_like(tt), np.zeros_like(tt)
    if i == 1:
        return tt - e, one, one, zero, zero, zero
    if i == 2:
        return math.exp(-e) * tt, math.exp(-e) * one, math.exp(-e / 2) * one, zero, zero, zero
    if i == 3:
        d = 1 + e * tt
        return tt / d, 1 / d ** 2, 1 / d, -e / d ** 2, zero, zero
    if i == 4:
        return tt, one, one, zero, -e * one, zero
    if i == 5:
        return tt, one, one, zero, -e * tt, -e * one
    return tt, one, one, zero, zero, zero


def _rest_jet(m: PointMap, t, L):
    """Non-kappa part R of the u-exponent and R_t, R_L, R_LL at the original point."""
    i, e = m.generator_index, m.epsilon
    s2 = m.params.sigma ** 2
    z = np.zeros_like(t * L)
    if i == 2:
        return (0.5 * (math.exp(e / 2) - 1) * L - s2 * t * (math.exp(e) - 1) / 8,
                z - s2 * (math.exp(e) - 1) / 8, z + 0.5 * (math.exp(e / 2) - 1), z)
    if i == 3:
        d = 1 - e * t
        R = -e * L * L / (2 * s2 * d) + e * t * L / (2 * d) - e * s2 * t * t / (8 * d) + 0.5 * np.log(d)
        Rt = (-e * e * L * L / (2 * s2 * d * d) + e * L / (2 * d * d)
              - e * s2 * t * (2 - e * t) / (8 * d * d) - e / (2 * d))
        return R, Rt, -e * L / (s2 * d) + e * t / (2 * d), z - e / (s2 * d)
    if i == 5:
        return (-e * e * t / (2 * s2) - e * L / s2 + e * t / 2,
                z - e * e / (2 * s2) + e / 2, z - e / s2, z)
    if i == 6:
        return z + e, z, z, z
    return z, z, z, z


class MappedSolution:
    """Pullback of a solution by a point map: (g f)(t~, x~) = u~.

    Every preimage has the form t = T(t~), ln x = A(t~) ln x~ + B(t~), so
    when f has closed-form derivatives the pullback gets them too, by the
    chain rule (flow-correct maps only).
    """

    def __init__(self, m: PointMap, f, quoted: bool = False):
        self.map = m
        self.f = f
        self.quoted = quoted
        self.params = m.params
        if hasattr(f, "eval_derivs") and not (quoted and m.generator_index == 3):
            self.eval_derivs = self._eval_derivs

    def _eval_derivs(self, tt, xx):
        tt, xx = np.broadcast_arrays(np.asarray(tt, dtype=float), np.asarray(xx, dtype=float))
        t, x = self.map.inverse_tx(tt, xx)
        T, dT, A, dA, B, dB = _preimage_jet(self.map, tt)
        LL, L = np.log(xx), np.log(x)
        u, ut, ux, uxx = (np.asarray(v, dtype=float) for v in self.f.eval_derivs(t, x))
        uL, uLL = x * ux, x * x * uxx + x * ux
        # F(t~, L~) = u(T, A L~ + B)
        dL = dA * LL + dB
        F, Ft, FL, FLL = u, dT * ut + dL * uL, A * uL, A * A * uLL
        # Psi = kappa (x~ - x) + R(t, L)
        kap = self.params.k / self.params.sigma ** 2
        R, Rt, RL, RLL = _rest_jet(self.map, t, L)
        P = kap * (xx - x) + R
        Pt = -kap * x * dL + dT * Rt + dL * RL
        PL = kap * (xx - A * x) + A * RL
        PLL = kap * (xx - A * A * x) + A * A * RLL
        with np.errstate(over="ignore", invalid="ignore"):
            g = np.exp(P)
            v = g * F
            vt = g * (Ft + Pt * F)
            vL = g * (FL + PL * F)
            vLL = g * (FLL + 2 * PL * FL + (PLL + PL * PL) * F)
            out = (v, vt, vL / xx, (vLL - vL) / (xx * xx))
        if not all(np.all(np.isfinite(q)) for q in out):
            raise DomainError("transformed solution overflowed at the requested (t, x)")
        if v.ndim == 0:
            return tuple(float(q) for q in out)
        return out

    def eval(self, tt, xx):
        t, x = self.map.inverse_tx(tt, xx)
        u = _evaluate(self.f, t, x)
        with np.errstate(over="ignore", invalid="ignore"):
            v = u * np.exp(self.map.log_factor(t, x, self.quoted))
        if not np.all(np.isfinite(v)):
            raise DomainError("transformed solution overflowed at the requested (t, x)")
        return v

    def __call__(self, tt, xx):
        return self.eval(tt, xx)

    def preimage(self, tt, xx):
        return self.map.inverse_tx(tt, xx)


def _evaluate(f, t, x):
    return f.eval(t, x) if hasattr(f, "eval") else f(t, x)


def apply_to_solution(m: PointMap, f, quoted: bool = False) -> MappedSolution:
    return MappedSolution(m, f, quoted)


class Superposition:
    """f + eps g; closed-form derivatives are kept when both terms have them."""

    def __init__(self, f, g, eps: float):
        self.f, self.g, self.eps = f, g, float(eps)
        self.params = getattr(f, "params", None)
        if hasattr(f, "eval_derivs") and hasattr(g, "eval_derivs"):
            self.eval_derivs = self._eval_derivs

    def eval(self, t, x):
        if self.eps == 0:
            return _evaluate(self.f, t, x)
        return _evaluate(self.f, t, x) + self.eps * _evaluate(self.g, t, x)

    def __call__(self, t, x):
        return self.eval(t, x)

    def _eval_derivs(self, t, x):
        a = self.f.eval_derivs(t, x)
        b = self.g.eval_derivs(t, x)
        return tuple(ai + self.eps * bi for ai, bi in zip(a, b))


def superpose(f, g, eps: float) -> Superposition:
    return Superposition(f, g, eps)


def quoted_vs_flow(params: ModelParams, points, eps: float) -> dict:
    """Max relative u-difference between the quoted closed forms and the flow, per generator."""
    out = {}
    for i in range(1, 7):
        worst = 0.0
        m = PointMap(i, eps, params)
        for pt in points:
            try:
                a = apply_point(m, pt, quoted=True)
                b = flow_point(i, eps, pt, params)
            except DomainError:
                continue
            worst = max(worst, abs(a.u - b.u) / max(abs(b.u), 1e-300),
                        abs(a.x - b.x) / b.x, abs(a.t - b.t) / max(1.0, abs(b.t)))
        out[i] = worst
    return out
