import itertools
import math

import numpy as np
import pytest
import sympy as sp
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from gmrsym.errors import DomainError
from gmrsym.lie import (CLASSES, AlgebraElement, GroupWord, OptimalRep, ad_matrix, adjoint,
                        adjoint_matrix, apply_word, classify, commutator, eta, jacobi_check,
                        representative, structure_constants)

SIGMA = 1.3


def E(*a, sigma=SIGMA):
    return AlgebraElement(tuple(a), sigma)


def basis(i, sigma=SIGMA):
    return AlgebraElement.basis(i, sigma)


def random_word(rng, max_len=8, max_eps=2.0):
    n = int(rng.integers(0, max_len + 1))
    return GroupWord(tuple((int(rng.integers(1, 7)), float(rng.uniform(-max_eps, max_eps)))
                           for _ in range(n)))


# structure constants vs. the vector fields themselves ----------------------

def _vector_fields():
    t, x, u, k, s = sp.symbols("t x u k sigma", positive=True)
    L = sp.log(x)
    V = [
        (1, 0, 0),
        (t, x * L / 2, (k / (2 * s ** 2) * x * L + L / 4 - s ** 2 * t / 8) * u),
        (t ** 2, t * x * L, (k / s ** 2 * t * x * L - L ** 2 / (2 * s ** 2) + t * L / 2
                             - s ** 2 * t ** 2 / 8 - t / 2) * u),
        (0, x, k / s ** 2 * x * u),
        (0, t * x, (k / s ** 2 * t * x - L / s ** 2 + t / 2) * u),
        (0, 0, u),
    ]
    return (t, x, u, k, s), V


def test_table1_matches_vector_field_brackets():
    (t, x, u, k, s), V = _vector_fields()

    def apply(v, f):
        return v[0] * sp.diff(f, t) + v[1] * sp.diff(f, x) + v[2] * sp.diff(f, u)

    pts = [(0.3, 2.0, 1.1), (1.7, 0.6, -0.4), (2.2, 3.5, 2.0), (0.9, 1.3, 0.7)]
    kv, sv = 0.8, SIGMA
    C = structure_constants(sv)
    fields = [[sp.lambdify((t, x, u), sp.sympify(c).subs({k: kv, s: sv})) for c in v] for v in V]
    for i, j in itertools.product(range(6), range(6)):
        br = [sp.lambdify((t, x, u), (apply(V[i], V[j][q]) - apply(V[j], V[i][q])).subs({k: kv, s: sv}))
              for q in range(3)]
        for p in pts:
            lhs = np.array([float(b(*p)) for b in br])
            rhs = sum(C[i, j, m] * np.array([float(f(*p)) for f in fields[m]]) for m in range(6))
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_commutator_examples():
    s2 = SIGMA ** 2
    assert commutator(basis(1), basis(2)).a == pytest.approx((1, 0, 0, 0, 0, -s2 / 8))
    assert commutator(basis(1), basis(1)).is_zero()
    assert commutator(basis(4), basis(5)).a == pytest.approx((0, 0, 0, 0, 0, -1 / s2))


def test_antisymmetry_exact():
    rng = np.random.default_rng(1)
    for _ in range(100):
        X, Y = E(*rng.normal(size=6)), E(*rng.normal(size=6))
        assert commutator(X, Y).a == (-commutator(Y, X)).a
    C = structure_constants(SIGMA)
    assert np.array_equal(C, -C.transpose(1, 0, 2))


def test_sigma_mismatch():
    with pytest.raises(DomainError, match="sigma"):
        commutator(basis(1, 1.0), basis(2, 2.0))


def test_jacobi():
    assert jacobi_check([(basis(1), basis(2), basis(3))]) <= 1e-12
    X = E(1, 2, 3, 4, 5, 6)
    assert jacobi_check([(X, X, basis(4))]) == 0.0
    rng = np.random.default_rng(2)
    triples = [tuple(E(*rng.normal(size=6)) for _ in range(3)) for _ in range(100)]
    assert jacobi_check(triples) <= 1e-9
    with pytest.raises(ValueError):
        jacobi_check([])


# adjoint representation -------------------------------------------------------

def test_adjoint_examples():
    Y = E(0.3, -1, 2, 0.5, 4, 1)
    assert adjoint(6, 1.7, Y).a == Y.a
    eps = 0.7
    assert adjoint(2, eps, basis(3)).a == pytest.approx((0, 0, math.exp(-eps), 0, 0, 0), rel=1e-15)
    got = adjoint(1, eps, basis(3)).a
    want = (eps ** 2, -2 * eps, 1, 0, 0, (4 * eps - SIGMA ** 2 * eps ** 2) / 8)
    assert got == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("eps", [-1.0, 0.3, 2.0])
@pytest.mark.parametrize("i", range(1, 7))
def test_table2_matches_integrated_flow(i, eps):
    A = ad_matrix(i, SIGMA)
    M = adjoint_matrix(i, eps, SIGMA)
    for j in range(6):
        y0 = np.eye(6)[j]
        sol = solve_ivp(lambda e, y: -A @ y, (0, eps), y0, method="DOP853", rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(M[:, j], sol.y[:, -1], atol=1e-9, rtol=1e-9)


@pytest.mark.parametrize("i", range(1, 7))
def test_table2_matches_matrix_exponential(i):
    for eps in (-1.0, 0.3, 2.0):
        np.testing.assert_allclose(adjoint_matrix(i, eps, SIGMA), expm(-eps * ad_matrix(i, SIGMA)),
                                   atol=1e-13)


def test_adjoint_group_law():
    for i in range(1, 7):
        a, b = 0.4, -1.3
        np.testing.assert_allclose(adjoint_matrix(i, a, SIGMA) @ adjoint_matrix(i, b, SIGMA),
                                   adjoint_matrix(i, a + b, SIGMA), atol=1e-13)
        assert np.array_equal(adjoint_matrix(i, 0.0, SIGMA), np.eye(6))


def test_adjoint_is_automorphism():
    rng = np.random.default_rng(3)
    for i in range(1, 7):
        X, Y = E(*rng.normal(size=6)), E(*rng.normal(size=6))
        lhs = adjoint(i, 0.8, commutator(X, Y))
        rhs = commutator(adjoint(i, 0.8, X), adjoint(i, 0.8, Y))
        np.testing.assert_allclose(lhs.vec, rhs.vec, atol=1e-12)


# eta -------------------------------------------------------------------------

def test_eta_examples():
    assert eta(basis(2)) == 1
    assert eta(E(1, 0, 1, 0, 0, 0)) == -4
    assert eta(E(1, 2, 1, 0, 0, 0)) == 0


def test_eta_invariance():
    rng = np.random.default_rng(4)
    for _ in range(500):
        X = E(*rng.normal(size=6))
        w = random_word(rng)
        n0, n1 = eta(X), eta(apply_word(w, X))
        assert abs(n1 - n0) <= 1e-8 * max(1.0, abs(n0))


# classification --------------------------------------------------------------

def test_classify_canonical_examples():
    r = classify(E(0, 1, 0, 0, 0, 5, sigma=1.0))
    assert (r.rep_class, r.a, r.scale, len(r.word)) == ("V2_aV6", 5.0, 1.0, 0)
    r = classify(E(1, 0, 1, 0, 0, 0, sigma=1.0))
    assert (r.rep_class, r.a, r.scale) == ("V1pV3_aV6", 0.0, 1.0)


def test_classify_case1_example():
    X = E(2, 1, 0, 0, 0, 0, sigma=1.0)
    r = classify(X)
    assert r.rep_class == "V2_aV6" and r.scale == pytest.approx(1.0)
    # beta = (sqrt(eta) - a2)/(2 a1) = 0, gamma = a1/(2 a1 beta + a2) = 2
    manual = adjoint(1, 2.0, adjoint(3, 0.0, X))
    assert manual.a[:5] == pytest.approx((0, 1, 0, 0, 0), abs=1e-15)
    assert r.a == pytest.approx(manual.a[5], rel=1e-14)
    assert r.replay_defect(X) <= 1e-12


def test_classify_v4_example():
    X = E(0, 0, 0, 1, 1, 0, sigma=1.0)
    r = classify(X)
    assert r.rep_class == "V4" and r.scale == pytest.approx(1.0)
    manual = adjoint(5, 1.0 ** 2 * 0.0, adjoint(3, -1.0, X))
    assert manual.a == pytest.approx((0, 0, 0, 1, 0, 0), abs=1e-15)


def test_classify_case1_with_a1_zero():
    X = E(0, -2, 3, 0.5, -1, 0.2)
    r = classify(X)
    assert r.rep_class == "V2_aV6"
    assert r.replay_defect(X) <= 1e-12


def test_case31_scaling_exponent():
    # the V2 map with eps = (2/3) ln|b5| equalises |a1| and |a5|
    X = E(1, 0, 0, 0.3, -5.0, 0.1)
    b5 = X.a[4] / X.a[0]
    Y = adjoint(2, 2 / 3 * math.log(abs(b5)), X)
    assert abs(Y.a[0]) == pytest.approx(abs(Y.a[4]), rel=1e-14)
    r = classify(X)
    assert r.rep_class == "V1mV5"
    assert r.replay_defect(X) <= 1e-12


def test_v1_plus_v5_conjugate_to_v1_minus_v5():
    # a rotation in the sl(2) part acts as -1 on span{V4, V5}
    A = ad_matrix(1, SIGMA) + ad_matrix(3, SIGMA)
    out = expm(-math.pi * A) @ representative("V1pV5")
    np.testing.assert_allclose(out, representative("V1mV5"), atol=1e-12)


def test_classify_zero():
    with pytest.raises(DomainError):
        classify(E(0, 0, 0, 0, 0, 0))


def test_classify_special_cases():
    assert classify(E(0, 0, 0, 0, 2.5, 1.0)).rep_class == "V4"
    r = classify(E(0, 0, 0, 0, 0, -3.0))
    assert (r.rep_class, r.scale) == ("V6", -3.0)
    r = classify(E(0, 0, 4.0, 1, 0, 0))  # a1 = a2 = 0, a3 != 0
    assert r.rep_class in ("V1pV5", "V1mV5")
    assert r.replay_defect(E(0, 0, 4.0, 1, 0, 0)) <= 1e-9


def _sample(rng, n):
    out = []
    for m in range(n):
        if m % 4 == 0:
            out.append((None, E(*rng.normal(size=6))))
            continue
        cls = CLASSES[int(rng.integers(len(CLASSES)))]
        v = representative(cls, float(rng.normal())) * rng.choice([-1, 1]) * math.exp(rng.normal())
        out.append((cls, apply_word(random_word(rng), E(*v))))
    return out


def test_classify_random():
    rng = np.random.default_rng(5)
    for cls, X in _sample(rng, 1000):
        r = classify(X)
        assert r.rep_class in CLASSES
        if cls in ("V1pV5", "V1mV5"):
            assert r.rep_class in ("V1pV5", "V1mV5")
        elif cls is not None:
            assert r.rep_class == cls
        assert r.replay_defect(X) <= 1e-9
        again = classify(r.representative(SIGMA))
        assert again.rep_class == r.rep_class
        if r.a is not None:
            assert again.a == pytest.approx(r.a, abs=1e-9)


def test_json_roundtrip():
    X = E(1, 2, 0.5, 0, 1, 3)
    assert AlgebraElement.from_dict(X.to_dict()) == X
    r = classify(X)
    back = OptimalRep.from_dict(r.to_dict())
    assert back.rep_class == r.rep_class and back.word == r.word
    assert back.replay_defect(X) <= 1e-9


def test_element_validation():
    with pytest.raises(DomainError):
        E(1, 2, 3)
    with pytest.raises(DomainError):
        E(1, 2, 3, 4, 5, float("nan"))
    with pytest.raises(DomainError):
        GroupWord(((7, 1.0),))
