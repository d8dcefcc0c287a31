import json
import math

import numpy as np
import pytest

from gmrsym.errors import DivergenceError, DomainError
from gmrsym.model import ModelParams
from gmrsym.solutions import SolutionFamily, catalog
from gmrsym.verify import (Grid, McConfig, ResidualReport, Surface, cn_convergence,
                           cn_manufactured, cn_solve, manufactured_data, mc_feynman_kac,
                           mc_semigroup_check, residual_grid)

P11 = ModelParams.symmetric(1.0, 1.0)
INV1 = SolutionFamily("Inv1", P11, 1, 0)


# grid residuals -----------------------------------------------------------------

def test_grid_validation_and_json():
    with pytest.raises(DomainError):
        Grid(n_t=7)
    with pytest.raises(DomainError):
        Grid(t_min=1.0, t_max=0.5)
    with pytest.raises(DomainError):
        Grid(y_max=float("inf"))
    g = Grid(0.1, 3.0, -2, 2, 9, 11)
    assert Grid.from_dict(json.loads(json.dumps(g.to_dict()))) == g


def test_residual_inv1_exact():
    r = residual_grid(INV1, P11, Grid())
    assert r.mode == "closed" and r.max_residual <= 1e-10
    assert r.max_residual >= r.mean_residual >= 0
    assert r.n_points == 2500


def test_residual_non_solution():
    r = residual_grid(lambda t, x: x + 0 * t, P11, Grid(y_min=-1, y_max=1, n_y=51))
    assert r.mode == "fd" and r.max_residual >= 0.1
    # analytic residual of u = x is lambda x^3 - k x^2
    x = np.exp(np.linspace(-1, 1, 9))
    want = np.max(np.abs(0.5 * x ** 3 - x ** 2) / (1 + x))
    r = residual_grid(lambda t, x: x + 0 * t, P11, Grid(0.4, 0.6, -1, 1, 8, 9))
    assert r.max_residual == pytest.approx(want, rel=1e-6)


def test_residual_pcfuv_figure4_parameters():
    f = SolutionFamily("PcfUV", P11, 2, 1, 2.0)
    assert residual_grid(f, P11, Grid()).max_residual <= 1e-6
    assert residual_grid(f, P11, Grid(), mode="fd").max_residual <= 1e-6


@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
def test_residual_whole_catalog(sigma):
    for f in catalog(sigma):
        assert residual_grid(f, f.params, Grid()).max_residual <= 1e-7, f.family_id
        assert residual_grid(f, f.params, Grid(), mode="fd").max_residual <= 1e-4, f.family_id


def test_residual_errors():
    with pytest.raises(DomainError, match="non-finite residual at t=0.457143"):
        residual_grid(lambda t, x: np.where(t > 0.45, np.nan, x), P11, Grid(0.2, 0.5, -1, 1, 8, 8))
    with pytest.raises(DomainError, match="mode"):
        residual_grid(INV1, P11, Grid(), mode="spline")
    with pytest.raises(DomainError, match="singular"):
        residual_grid(SolutionFamily("Inv5", P11, 1.0), P11, Grid(t_min=0.0))


def test_residual_skip_domain_rows():
    f = SolutionFamily("Inv5", P11, 1.0)
    r = residual_grid(f, P11, Grid(t_min=0.0, n_t=11), skip_domain=True)
    assert r.n_skipped_rows == 1 and r.max_residual <= 1e-7


def test_report_json():
    r = residual_grid(INV1, P11, Grid(n_t=8, n_y=8))
    d = json.loads(r.to_json())
    assert d["grid"]["n_t"] == 8 and len(d["worst_point"]) == 2
    assert isinstance(r, ResidualReport) and r.passed(1e-9)


# Crank-Nicolson ---------------------------------------------------------------------

def _heat(s0, sigma):
    def u(t, x):
        y = np.log(x)
        v = s0 + sigma ** 2 * t
        z = y - sigma ** 2 * t / 2
        return np.exp(-z * z / (2 * v)) / np.sqrt(2 * np.pi * v)
    return u


def test_cn_heat_kernel():
    p = ModelParams(0.0, 0.0, 1.0, 0.0)
    _, err = cn_manufactured(_heat(0.5, 1.0), p, Grid(0.2, 1.0, -3, 3, 400, 400))
    assert err <= 1e-5


def test_cn_inv1_second_order():
    out = cn_convergence(INV1, P11, Grid(0.2, 1.0, -1, 1, 51, 51), levels=3)
    e = out["errors"]
    assert all(a > b for a, b in zip(e, e[1:]))
    for r in (e[0] / e[1], e[1] / e[2]):
        assert 3.0 <= r <= 5.0
    assert all(1.7 <= q <= 2.3 for q in out["orders"])


def test_cn_exact_for_linear_stationary_case():
    # k = lambda = 0 and u = 1: the discrete scheme reproduces constants exactly
    p = ModelParams(0.0, 0.0, 0.8, 0.0)
    s, err = cn_manufactured(lambda t, x: np.ones_like(t * x), p, Grid(0.2, 1, -1, 1, 20, 20))
    assert err <= 1e-14


def test_cn_input_checks():
    g = Grid(0.2, 1.0, -1, 1, 10, 10)
    init, (lft, rgt) = manufactured_data(INV1, g)
    with pytest.raises(DomainError, match="shapes"):
        cn_solve(P11, g, init[:-1], (lft, rgt))
    with pytest.raises(DomainError, match="corners"):
        cn_solve(P11, g, init + 1, (lft, rgt))


def test_surface_csv(tmp_path):
    g = Grid(0.2, 1.0, -1, 1, 8, 8)
    s, _ = cn_manufactured(INV1, P11, g)
    path = tmp_path / "s.csv"
    text = s.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,y,u" and len(lines) == 65
    assert text == path.read_text()
    assert isinstance(s, Surface)


# Monte Carlo ------------------------------------------------------------------------

def test_mc_config_validation():
    with pytest.raises(DomainError):
        McConfig(n_paths=10)
    with pytest.raises(DomainError):
        McConfig(n_steps=5)
    with pytest.raises(DomainError):
        McConfig(n_paths=1001, antithetic=True)
    with pytest.raises(DomainError):
        McConfig(seed=-1)


def test_mc_degenerate_functional():
    p = ModelParams(1.0, 0.0, 1.0, 0.0)
    cf, est, z = mc_semigroup_check(p, lambda t, x: np.ones_like(x), 0.5, 0.05, 1.0,
                                    McConfig(n_paths=2000, n_steps=50))
    assert (cf, est.value, est.std_error, z) == (1.0, 1.0, 0.0, 0.0)


def test_mc_noise_free_limit():
    # sigma -> 0: X = 1/(1 + t), int_0^0.1 lambda X^2 = lambda (1 - 1/1.1)
    p = ModelParams(1.0, 0.0, 1e-4, 0.5)
    est = mc_feynman_kac(p, 1.0, 0.1, McConfig(n_paths=2000, n_steps=200))
    assert est.value == pytest.approx(math.exp(0.5 * (1 - 1 / 1.1)), rel=1e-3)


def test_mc_semigroup_inv1():
    p = ModelParams(1.0, 0.0, 1.0, 0.5)
    passes = 0
    for seed in range(5):
        cf, est, z = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0, McConfig(seed=seed))
        assert cf == pytest.approx(math.e)
        assert est.n_effective == 200_000
        passes += abs(z) <= 3
    assert passes >= 4


def test_mc_deterministic_and_schedule_independent():
    p = ModelParams(1.0, 0.0, 1.0, 0.5)
    cfg = McConfig(n_paths=30_000, n_steps=50, seed=42)
    a = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0, cfg)
    b = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0, cfg)
    c = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0,
                           McConfig(n_paths=30_000, n_steps=50, seed=42, workers=3))
    assert a == b == c
    d = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0, McConfig(n_paths=30_000, n_steps=50, seed=43))
    assert d[1].value != a[1].value


def test_mc_antithetic():
    p = ModelParams(1.0, 0.0, 1.0, 0.5)
    cf, est, z = mc_semigroup_check(p, INV1, 0.5, 0.05, 1.0,
                                    McConfig(n_paths=40_000, n_steps=50, seed=1, antithetic=True))
    assert est.n_effective == 20_000 and abs(z) <= 4


def test_mc_divergence():
    p = ModelParams(1.0, 0.0, 1.0, 0.5)
    with pytest.raises(DivergenceError, match="functional divergence; shrink"):
        mc_semigroup_check(p, INV1, 0.5, 1.0, 3.0, McConfig(n_paths=1000, n_steps=50))
    # huge volatility drives |ln X| past the cut-off
    wild = ModelParams(0.0, 0.0, 200.0, 0.0)
    with pytest.raises(DivergenceError, match="shrink"):
        mc_feynman_kac(wild, 1.0, 0.1, McConfig(n_paths=1000, n_steps=50))
    with pytest.raises(DomainError):
        mc_feynman_kac(p, -1.0, 0.1, McConfig(n_paths=1000, n_steps=50))
