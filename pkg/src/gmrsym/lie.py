"""The six-dimensional symmetry algebra and its optimal system.

Basis (symmetric case alpha = 0, lambda = k^2/(2 sigma^2)), L = ln x:

    V1 = d_t
    V2 = t d_t + 1/2 x L d_x + (k/(2 s^2) x L + L/4 - s^2 t/8) u d_u
    V3 = t^2 d_t + t x L d_x + (k/s^2 t x L - L^2/(2 s^2) + t L/2 - s^2 t^2/8 - t/2) u d_u
    V4 = x d_x + k/s^2 x u d_u
    V5 = t x d_x + (k/s^2 t x - L/s^2 + t/2) u d_u
    V6 = u d_u

Elements are coefficient vectors a in R^6.  Brackets follow [Vi, Vj] = Vi Vj - Vj Vi;
the adjoint action is Ad(exp(eps Vi)) Y = Y - eps [Vi, Y] + eps^2/2 [Vi, [Vi, Y]] - ...
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

CLASSES = ("V2_aV6", "V1pV3_aV6", "V1pV5", "V1mV5", "V1_aV6", "V4", "V6")
HAS_PARAMETER = ("V2_aV6", "V1pV3_aV6", "V1_aV6")
ETA_TOL = 1e-10
ZERO_TOL = 1e-12


def structure_constants(sigma: float) -> np.ndarray:
    """C[i, j] = coefficient vector of [V_{i+1}, V_{j+1}]."""
    s2 = sigma * sigma
    C = np.zeros((6, 6, 6))

    def put(i, j, vec):
        v = np.zeros(6)
        for idx, c in vec.items():
            v[idx - 1] = c
        C[i - 1, j - 1] = v
        C[j - 1, i - 1] = -v

    put(1, 2, {1: 1.0, 6: -s2 / 8})
    put(1, 3, {2: 2.0, 6: -0.5})
    put(1, 5, {4: 1.0, 6: 0.5})
    put(2, 3, {3: 1.0})
    put(2, 4, {4: -0.5, 6: -0.25})
    put(2, 5, {5: 0.5})
    put(3, 4, {5: -1.0})
    put(4, 5, {6: -1.0 / s2})
    return C


def ad_matrix(i: int, sigma: float) -> np.ndarray:
    """Matrix of Y -> [V_i, Y] acting on coefficient vectors."""
    return structure_constants(sigma)[i - 1].T


def adjoint_matrix(i: int, eps: float, sigma: float) -> np.ndarray:
    """Ad(exp(eps V_i)) as a 6x6 matrix; column j holds the image of V_j."""
    if i not in range(1, 7):
        raise DomainError("generator index must be in 1..6")
    s2 = sigma * sigma
    e = eps
    M = np.eye(6)
    if i == 1:
        M[[0, 5], 1] = [-e, e * s2 / 8]
        M[[0, 1, 5], 2] = [e * e, -2 * e, (4 * e - s2 * e * e) / 8]
        M[[3, 5], 4] = [-e, -e / 2]
    elif i == 2:
        ee = math.exp(e)
        M[[0, 5], 0] = [ee, s2 / 8 * (1 - ee)]
        M[2, 2] = 1 / ee
        eh = math.exp(e / 2)
        M[[3, 5], 3] = [eh, 0.5 * (eh - 1)]
        M[4, 4] = 1 / eh
    elif i == 3:
        M[[1, 2, 5], 0] = [2 * e, e * e, -e / 2]
        M[2, 1] = e
        M[4, 3] = e
    elif i == 4:
        M[[3, 5], 1] = [-e / 2, -e / 4]
        M[[4, 5], 2] = [-e, -e * e / (2 * s2)]
        M[5, 4] = e / s2
    elif i == 5:
        M[[3, 5], 0] = [e, e / 2 - e * e / (2 * s2)]
        M[4, 1] = e / 2
        M[5, 3] = -e / s2
    return M


@dataclass(frozen=True)
class AlgebraElement:
    """V = sum a_i V_i."""

    a: tuple
    sigma: float

    def __post_init__(self):
        a = tuple(float(v) for v in np.asarray(self.a, dtype=float).ravel())
        if len(a) != 6:
            raise DomainError("algebra elements have 6 coefficients")
        if not all(math.isfinite(v) for v in a):
            raise DomainError("coefficients must be finite")
        if not self.sigma > 0:
            raise DomainError("sigma>0 required")
        object.__setattr__(self, "a", a)

    @classmethod
    def basis(cls, i: int, sigma: float) -> "AlgebraElement":
        v = np.zeros(6)
        v[i - 1] = 1.0
        return cls(tuple(v), sigma)

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.a)

    def __add__(self, other):
        _same_sigma(self, other)
        return AlgebraElement(tuple(self.vec + other.vec), self.sigma)

    def __sub__(self, other):
        _same_sigma(self, other)
        return AlgebraElement(tuple(self.vec - other.vec), self.sigma)

    def __rmul__(self, c):
        return AlgebraElement(tuple(c * self.vec), self.sigma)

    def __neg__(self):
        return (-1.0) * self

    def norm(self) -> float:
        return float(np.max(np.abs(self.vec)))

    def is_zero(self) -> bool:
        return not any(self.a)

    def to_dict(self) -> dict:
        return {"a": list(self.a), "sigma": self.sigma}

    @classmethod
    def from_dict(cls, d: dict) -> "AlgebraElement":
        return cls(tuple(d["a"]), float(d["sigma"]))


def _same_sigma(X, Y):
    if X.sigma != Y.sigma:
        raise DomainError(f"sigma mismatch ({X.sigma} vs {Y.sigma})")


def commutator(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    """[X, Y] by bilinear extension of the structure constants."""
    _same_sigma(X, Y)
    C = structure_constants(X.sigma)
    x, y = X.a, Y.a
    out = np.zeros(6)
    # pairing i<j makes [Y, X] = -[X, Y] hold bit for bit
    for i in range(6):
        for j in range(i + 1, 6):
            w = x[i] * y[j] - x[j] * y[i]
            if w:
                out = out + w * C[i, j]
    return AlgebraElement(tuple(out), X.sigma)


def adjoint(i: int, eps: float, Y: AlgebraElement) -> AlgebraElement:
    """Ad(exp(eps V_i)) Y."""
    return AlgebraElement(tuple(adjoint_matrix(i, eps, Y.sigma) @ Y.vec), Y.sigma)


def eta(X: AlgebraElement) -> float:
    """The adjoint invariant a2^2 - 4 a1 a3."""
    a1, a2, a3 = X.a[:3]
    return a2 * a2 - 4 * a1 * a3


def jacobi_check(sample) -> float:
    """Max sup-norm of [X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] over the triples."""
    sample = list(sample)
    if not sample:
        raise ValueError("empty sample")
    worst = 0.0
    for X, Y, Z in sample:
        J = (commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X))
             + commutator(Z, commutator(X, Y)))
        worst = max(worst, J.norm())
    return worst


@dataclass(frozen=True)
class GroupWord:
    """Ordered adjoint maps; the first entry is applied first."""

    steps: tuple = ()

    def __post_init__(self):
        steps = tuple((int(i), float(e)) for i, e in self.steps)
        for i, e in steps:
            if i not in range(1, 7) or not math.isfinite(e):
                raise DomainError(f"bad word entry ({i}, {e})")
        object.__setattr__(self, "steps", steps)

    def then(self, i: int, eps: float) -> "GroupWord":
        return GroupWord(self.steps + ((i, eps),))

    def matrix(self, sigma: float) -> np.ndarray:
        M = np.eye(6)
        for i, e in self.steps:
            M = adjoint_matrix(i, e, sigma) @ M
        return M

    def apply(self, X: AlgebraElement) -> AlgebraElement:
        return apply_word(self, X)

    def __len__(self):
        return len(self.steps)

    def to_list(self):
        return [[i, e] for i, e in self.steps]


def apply_word(word: GroupWord, X: AlgebraElement) -> AlgebraElement:
    v = X.vec
    for i, e in word.steps:
        v = adjoint_matrix(i, e, X.sigma) @ v
    return AlgebraElement(tuple(v), X.sigma)


def representative(rep_class: str, a: float = 0.0) -> np.ndarray:
    v = np.zeros(6)
    if rep_class == "V2_aV6":
        v[1], v[5] = 1, a
    elif rep_class == "V1pV3_aV6":
        v[0], v[2], v[5] = 1, 1, a
    elif rep_class == "V1pV5":
        v[0], v[4] = 1, 1
    elif rep_class == "V1mV5":
        v[0], v[4] = 1, -1
    elif rep_class == "V1_aV6":
        v[0], v[5] = 1, a
    elif rep_class == "V4":
        v[3] = 1
    elif rep_class == "V6":
        v[5] = 1
    else:
        raise DomainError(f"unknown class {rep_class!r}")
    return v


@dataclass(frozen=True)
class OptimalRep:
    """X is conjugate, through `word`, to scale * (canonical representative)."""

    rep_class: str
    scale: float
    word: GroupWord = field(default_factory=GroupWord)
    a: float | None = None

    def representative(self, sigma: float) -> AlgebraElement:
        return AlgebraElement(tuple(representative(self.rep_class, self.a or 0.0)), sigma)

    def replay_defect(self, X: AlgebraElement) -> float:
        """Sup-norm distance of word(X) from scale * representative, relative to |scale|."""
        got = apply_word(self.word, X).vec
        want = self.scale * representative(self.rep_class, self.a or 0.0)
        return float(np.max(np.abs(got - want)) / abs(self.scale))

    def to_dict(self) -> dict:
        d = {"class": self.rep_class, "scale": self.scale, "word": self.word.to_list()}
        if self.rep_class in HAS_PARAMETER:
            d["a"] = self.a
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OptimalRep":
        return cls(d["class"], float(d["scale"]), GroupWord(tuple(map(tuple, d["word"]))),
                   d.get("a"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class _Reducer:
    """Applies adjoint maps to a working vector while recording the word."""

    def __init__(self, X: AlgebraElement):
        self.sigma = X.sigma
        self.v = X.vec
        self.word = GroupWord()

    def act(self, i, eps):
        if eps != 0.0:
            self.v = adjoint_matrix(i, eps, self.sigma) @ self.v
            self.word = self.word.then(i, eps)


def classify(X: AlgebraElement) -> OptimalRep:
    """Reduce X to its optimal-system representative.

    eta > 0  -> V2 + a V6;  eta < 0 -> V1 + V3 + a V6;  eta = 0 -> V1 +- V5,
    V1 + a V6, V4 or V6.  |eta| <= 1e-10 (1 + |X|^2) counts as eta = 0.

    V1 + V5 and V1 - V5 are reported separately by the sign of the V5
    coefficient after the reduction, but they lie on one adjoint orbit:
    Ad(exp(pi (V1 + V3))) acts as -1 on span{V4, V5} and maps one onto the
    other.
    """
    if X.is_zero():
        raise DomainError("cannot classify the zero element")
    s2 = X.sigma ** 2
    R = _Reducer(X)
    a1, a2, a3 = R.v[:3]
    nrm = float(np.linalg.norm(R.v))
    n = eta(X)

    if n > ETA_TOL * (1 + nrm * nrm):
        # kill a3 with V3, then a1 with V1; the root for beta is chosen
        # without cancellation, which also covers a1 = 0
        r = math.sqrt(n)
        beta = -2 * a3 / (a2 + r) if a2 >= 0 else 2 * a3 / (r - a2)
        R.act(3, beta)
        m = R.v[1]
        R.act(1, R.v[0] / m)
        R.act(4, 2 * R.v[3] / m)
        R.act(5, -2 * R.v[4] / m)
        return OptimalRep("V2_aV6", float(m), R.word, float(R.v[5] / m))

    if n < -ETA_TOL * (1 + nrm * nrm):
        R.act(1, a2 / (2 * a3))
        b1, b3 = R.v[0], R.v[2]
        R.act(2, 0.5 * math.log(b3 / b1))
        m = R.v[0]
        R.act(4, R.v[4] / m)
        R.act(5, -R.v[3] / m)
        return OptimalRep("V1pV3_aV6", float(m), R.word, float(R.v[5] / m))

    tiny = ZERO_TOL * float(np.max(np.abs(R.v)))
    if max(abs(a1), abs(a2), abs(a3)) > tiny:
        if abs(a1) < abs(a3) or abs(a1) <= tiny:
            # move weight into a1 first (V1 map); pick the sign that helps most
            plus = a1 - a2 + a3
            minus = a1 + a2 + a3
            R.act(1, 1.0 if abs(plus) >= abs(minus) else -1.0)
        R.act(3, -R.v[1] / (2 * R.v[0]))
        m = R.v[0]
        b5 = R.v[4] / m
        if abs(b5) > ZERO_TOL:
            R.act(2, 2.0 / 3.0 * math.log(abs(b5)))
            m = R.v[0]
            sgn = 1.0 if R.v[4] / m > 0 else -1.0
            R.act(1, sgn * R.v[3] / m)
            R.act(4, -sgn * s2 * R.v[5] / m)
            return OptimalRep("V1pV5" if sgn > 0 else "V1mV5", float(m), R.word)
        R.act(5, -R.v[3] / m)
        return OptimalRep("V1_aV6", float(m), R.word, float(R.v[5] / m))

    if abs(R.v[3]) <= tiny and abs(R.v[4]) > tiny:
        R.act(1, 1.0)  # V5 -> V5 - V4 - V6/2 creates a V4 component
    if abs(R.v[3]) > tiny:
        m = R.v[3]
        R.act(3, -R.v[4] / m)
        R.act(5, s2 * R.v[5] / m)
        return OptimalRep("V4", float(m), R.word)
    return OptimalRep("V6", float(R.v[5]), R.word)
