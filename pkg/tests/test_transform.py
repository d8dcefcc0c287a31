import math

import numpy as np
import pytest

from gmrsym.errors import DomainError
from gmrsym.model import ModelParams, PdePoint
from gmrsym.solutions import SolutionFamily, catalog
from gmrsym.transform import (PointMap, apply_point, apply_to_solution, flow_point,
                              quoted_vs_flow, superpose)
from gmrsym.verify import Grid, residual_grid

P11 = ModelParams.symmetric(1.0, 1.0)
P = ModelParams.symmetric(0.7, 1.3)
EPS = (-0.5, -0.25, 0.25, 0.5)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_point_examples():
    assert apply_point(PointMap(1, 0.5, P11), PdePoint(1, 2, 3)) == PdePoint(1.5, 2, 3)
    q = apply_point(PointMap(6, math.log(2), P11), PdePoint(1, 2, 3))
    assert (q.t, q.x) == (1, 2) and q.u == pytest.approx(6, rel=1e-15)
    q = apply_point(PointMap(4, 1.0, P11), PdePoint(1, 1, 1))
    assert q.t == 1 and q.x == pytest.approx(math.e, rel=1e-15)
    assert q.u == pytest.approx(math.exp(math.e - 1), rel=1e-15)


def test_identity_is_exact():
    pt = PdePoint(0.7, 1.9, -2.5)
    for i in range(1, 7):
        assert apply_point(PointMap(i, 0.0, P), pt) == pt


@pytest.mark.parametrize("i", range(1, 7))
def test_group_law(i):
    rng = np.random.default_rng(i)
    for _ in range(20):
        pt = PdePoint(rng.uniform(0.1, 1.0), math.exp(rng.uniform(-1, 1)), rng.uniform(0.5, 2))
        e1, e2 = rng.uniform(-0.4, 0.4, 2)
        a = apply_point(PointMap(i, e1, P), apply_point(PointMap(i, e2, P), pt))
        b = apply_point(PointMap(i, e1 + e2, P), pt)
        for u, v in ((a.t, b.t), (a.x, b.x), (a.u, b.u)):
            assert abs(u - v) <= 1e-10 * max(1.0, abs(v))


def test_g3_singularity():
    with pytest.raises(DomainError, match="finite-time singularity of projective map"):
        apply_point(PointMap(3, 1.0, P), PdePoint(1.0, 2.0, 1.0))
    with pytest.raises(DomainError, match="finite-time singularity"):
        apply_point(PointMap(3, 0.5, P), PdePoint(3.0, 2.0, 1.0))


def test_flow_matches_closed_form_random():
    rng = np.random.default_rng(11)
    for _ in range(50):
        i = int(rng.integers(1, 7))
        eps = float(rng.uniform(-0.6, 0.6))
        pt = PdePoint(rng.uniform(0.1, 1.0), math.exp(rng.uniform(-1, 1)), rng.uniform(-2, 2))
        a = apply_point(PointMap(i, eps, P), pt)
        b = flow_point(i, eps, pt, P)
        assert rel(a.t, b.t) <= 1e-8 and rel(a.x, b.x) <= 1e-8 and rel(a.u, b.u) <= 1e-8


def test_flow_examples():
    pt = PdePoint(1, 2, 3)
    q = flow_point(1, 0.8, pt, P11)  # constant field: exact up to rounding
    assert (q.x, q.u) == (2, 3) and q.t == pytest.approx(1.8, rel=1e-15)
    a = flow_point(4, 1.0, PdePoint(1, 1, 1), P11)
    assert rel(a.x, math.e) <= 1e-8 and rel(a.u, math.exp(math.e - 1)) <= 1e-8


def test_g3_quoted_factor_disagrees_with_flow():
    pt = PdePoint(1, 2, 1)
    flow = flow_point(3, 0.3, pt, P11)
    right = apply_point(PointMap(3, 0.3, P11), pt)
    quoted = apply_point(PointMap(3, 0.3, P11), pt, quoted=True)
    assert rel(right.u, flow.u) <= 1e-8
    assert (quoted.t, quoted.x) == (right.t, right.x)
    assert rel(quoted.u, flow.u) > 1e-2
    diffs = quoted_vs_flow(P11, [pt, PdePoint(0.5, 0.7, 2.0)], 0.3)
    assert diffs[3] > 1e-2
    # the other quoted forms, G5 included, are the flows
    assert all(diffs[i] <= 1e-8 for i in (1, 2, 4, 5, 6))


def test_g3_quoted_factor_is_not_a_symmetry():
    f = SolutionFamily("Inv1", P11, 1, 0)
    g = Grid(0.2, 1.0, -1, 1, 12, 12)
    bad = apply_to_solution(PointMap(3, 0.3, P11), f, quoted=True)
    assert not hasattr(bad, "eval_derivs")
    assert residual_grid(bad, P11, g).max_residual > 1e-2
    good = apply_to_solution(PointMap(3, 0.3, P11), f)
    assert residual_grid(good, P11, g, mode="fd").max_residual <= 1e-8


def test_pointmap_validation_and_json():
    with pytest.raises(DomainError):
        PointMap(7, 0.1, P)
    with pytest.raises(DomainError):
        PointMap(1, float("nan"), P)
    with pytest.raises(DomainError, match="symmetric"):
        PointMap(1, 0.1, ModelParams(1, 0, 1, 0.3))
    m = PointMap(5, -0.25, P)
    assert m.to_json() == '{"g": 5, "eps": -0.25}'
    assert PointMap.from_dict({"g": 5, "eps": -0.25}, P) == m


# action on solutions ---------------------------------------------------------

def test_g6_scales():
    f = SolutionFamily("Inv3", P, 2, -1)
    g = apply_to_solution(PointMap(6, 0.4, P), f)
    t, x = np.array([0.5, 1.0, 2.0]), np.array([0.6, 1.0, 3.0])
    np.testing.assert_allclose(g.eval(t, x), math.exp(0.4) * f.eval(t, x), rtol=1e-14)


def test_g4_fixes_inv1_exponential():
    f = SolutionFamily("Inv1", P11, 1, 0)
    g = apply_to_solution(PointMap(4, 0.7, P11), f)
    t, x = np.linspace(0.2, 2, 7), np.linspace(0.3, 4, 7)
    np.testing.assert_allclose(g.eval(t, x), f.eval(t, x), rtol=1e-12)


def test_g2_on_inv1_residual():
    f = SolutionFamily("Inv1", P11, 2, -1)
    g = apply_to_solution(PointMap(2, 0.4, P11), f)
    r = residual_grid(g, P11, Grid(), mode="fd")
    assert r.mode == "fd" and r.max_residual <= 1e-6


def test_pullback_closed_derivatives_match_fd():
    from gmrsym.verify import _derivs_closed, _derivs_fd
    g = Grid(0.8, 2, -1, 1, 10, 10)
    T, Y = g.mesh()
    for f in catalog(1.3, 0.7)[:6]:
        for i in range(1, 7):
            m = apply_to_solution(PointMap(i, 0.3, f.params), f)
            for a, b in zip(_derivs_closed(m, T, Y), _derivs_fd(m, T, Y)):
                assert np.max(np.abs(a - b) / (1 + np.abs(a))) <= 1e-7


@pytest.mark.parametrize("sigma", [0.6, 1.0, 2.0])
@pytest.mark.parametrize("i", range(1, 7))
def test_solution_preservation(i, sigma):
    for f in catalog(sigma):
        for eps in EPS:
            g = apply_to_solution(PointMap(i, eps, f.params), f)
            r = residual_grid(g, f.params, Grid(), skip_domain=True)
            assert r.max_residual <= 1e-5, (f.family_id, eps, r)
            assert r.n_skipped_rows < Grid().n_t


def test_pullback_preimage_out_of_domain():
    f = SolutionFamily("Inv5", P, 1.0)
    g = apply_to_solution(PointMap(1, 0.5, P), f)
    with pytest.raises(DomainError, match="singular at t=0"):
        g.eval(0.3, 1.0)
    with pytest.raises(DomainError, match="finite-time"):
        apply_to_solution(PointMap(3, -0.5, P), f).eval(2.5, 1.0)


def test_superpose():
    f = SolutionFamily("Inv1", P11, 1, 0)
    h = SolutionFamily("Inv5", P11, 1.0)
    t, x = np.array([0.5, 1.0]), np.array([0.8, 2.0])
    np.testing.assert_array_equal(superpose(f, h, 0.0).eval(t, x), f.eval(t, x))
    np.testing.assert_allclose(superpose(f, f, 1.0).eval(t, x), 2 * f.eval(t, x), rtol=1e-15)
    s = superpose(f, h, 0.7)
    assert residual_grid(s, P11, Grid()).max_residual <= 1e-7
    assert residual_grid(s, P11, Grid(), mode="fd").max_residual <= 1e-6
    # plain callables work too
    s2 = superpose(lambda t, x: f.eval(t, x), h, 0.7)
    assert not hasattr(s2, "eval_derivs")
    np.testing.assert_allclose(s2.eval(t, x), s.eval(t, x), rtol=1e-15)
