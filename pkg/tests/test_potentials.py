import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from morrey_lab.grid import ELLIPTIC, GridFunction, centered_grid, make_grid
from morrey_lab.harness import families as fam
from morrey_lab.potentials import (apply_P1_adjoint, apply_P_alpha, fit_heat_constant, grad_from_heat_data,
                                   heat_constant, kernel_domination_constant, kernel_p_alpha, kernel_weights,
                                   quadrature_error, riesz_potential, time_marginal)


def radial_bump(grid, w=0.8):
    _, *xs = grid.coords()
    r2 = sum(x * x for x in xs)
    return GridFunction(grid, np.broadcast_to(np.maximum(1 - r2 / w ** 2, 0.0) ** 3, grid.shape))


@pytest.mark.parametrize("d,alpha", [(1, 0.5), (2, 1.0), (3, 1.0), (3, 2.5)])
@pytest.mark.parametrize("r", [0.3, 1.0, 4.0])
def test_time_marginal_matches_gamma(d, alpha, r):
    expected = gamma((d - alpha) / 2) * r ** (alpha - d)
    assert time_marginal(alpha, d, r) == pytest.approx(expected, rel=1e-3)


def test_kernel_is_positive_and_rejects_bad_alpha():
    s = np.linspace(0.01, 2, 7)
    assert np.all(kernel_p_alpha(1.0, 2, s, 0.5) > 0)
    with pytest.raises(ValueError):
        kernel_weights(make_grid(1, 4, 4, 0.5), 0.0)
    with pytest.raises(ValueError):
        kernel_weights(centered_grid(2, 4, 0.5, mode=ELLIPTIC), 2.5)


@pytest.mark.parametrize("d,alpha", [(1, 1.0), (2, 1.0), (2, 0.5)])
def test_layer_mass_matches_closed_form(d, alpha):
    # int over all y of p_alpha(s, .) is pi^{d/2} s^{alpha/2 - 1}
    g = make_grid(d, {1: 64, 2: 40}[d], 3, 0.25)
    W = kernel_weights(g, alpha)
    ht = g.ht
    edges = [0.0, 0.5 * ht, 1.5 * ht, 2.5 * ht]
    for j in range(3):
        mass = math.pi ** (d / 2) * (edges[j + 1] ** (alpha / 2) - edges[j] ** (alpha / 2)) / (alpha / 2)
        assert np.sum(W[j]) == pytest.approx(mass, rel=1e-6)


@pytest.mark.parametrize("d,nx", [(2, 64), (3, 40)])
def test_time_independent_data_reduce_to_riesz(d, nx):
    g = centered_grid(d, nx, 3.0 / nx, mode=ELLIPTIC)
    f = radial_bump(g)
    a = apply_P_alpha(f, 1.0).values
    b = gamma((d - 1) / 2) * riesz_potential(f, 1.0).values
    _, *xs = g.coords()
    inner = np.broadcast_to(sum(x * x for x in xs) < 0.25, g.shape)
    assert np.max(np.abs(a - b)[inner] / b[inner]) <= 0.02


def test_adjoint_identity():
    rng = np.random.default_rng(0)
    g = make_grid(1, 12, 10, 0.2)
    f = GridFunction(g, rng.normal(size=g.shape))
    h = GridFunction(g, rng.normal(size=g.shape))
    lhs = np.sum(apply_P_alpha(f, 1.0).values * h.values)
    rhs = np.sum(f.values * apply_P1_adjoint(h).values)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_potential_looks_forward_in_time():
    g = make_grid(1, 9, 8, 0.25)
    v = np.zeros(g.shape)
    v[4, 4] = 1.0
    out = apply_P_alpha(GridFunction(g, v), 1.0).values
    assert np.max(np.abs(out[5:])) <= 1e-14 * np.max(out)
    assert np.all(out[:5, 4] > 1e-3 * np.max(out))


def test_quadrature_error_small():
    g = centered_grid(1, 32, 0.125, (-1, 1))
    f = fam.gaussians()[0].values(g)
    assert quadrature_error(GridFunction(g, f), 1.0) <= 1e-6


def test_parabolic_scaling_of_the_potential():
    g = centered_grid(1, 32, 0.125, (-1, 1))
    f = fam.gaussians()[0].values(g)
    a = apply_P_alpha(GridFunction(g, f), 1.0).values
    b = apply_P_alpha(GridFunction(g.scaled(2.0), f), 1.0).values
    assert np.max(np.abs(b - 2.0 * a)) <= 1e-12 * np.max(a)


@pytest.mark.parametrize("d,nx,tol", [(1, 64, 0.02), (2, 32, 0.06)])
def test_heat_gradient_constant(d, nx, tol):
    g = centered_grid(d, nx, 4.0 / nx, (-1.5, 1.5))
    u = fam.Profile("u", fam.Shape("bump", 0.8), fam.Shape("gauss", 0.4), tc=0.1).fields(g)
    raw = grad_from_heat_data(u.gf(u.heat))
    c, misfit = fit_heat_constant(raw, tuple(u.gf(x) for x in u.du))
    assert c / heat_constant(d) == pytest.approx(1.0, abs=tol)
    assert misfit <= 0.1


def test_kernel_domination_constant():
    tau = np.linspace(0, 20, 200001)
    assert kernel_domination_constant() == pytest.approx(np.max(tau * np.exp(-tau ** 2 / 8)), rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
def test_potential_is_linear_and_positive(seed, a, b):
    rng = np.random.default_rng(seed)
    g = make_grid(1, 8, 6, 0.25)
    f = rng.random(g.shape)
    h = rng.random(g.shape)
    P = lambda v: apply_P_alpha(GridFunction(g, v), 1.5).values
    assert np.all(P(f) >= 0)
    lin = P(a * f + b * h)
    assert np.max(np.abs(lin - (a * P(f) + b * P(h)))) <= 1e-12 * (1 + np.max(np.abs(lin)))
