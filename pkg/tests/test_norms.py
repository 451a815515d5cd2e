import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morrey_lab.grid import ELLIPTIC, GridFunction, ParabolicCylinder, centered_grid, make_grid, region_cells
from morrey_lab.norms import (DegenerateNormWarning, Domain, default_rhos, elliptic_morrey_norm, lp_norm,
                              mixed_morrey_norm, mixed_norm, morrey_norm, morrey_reevaluate, slashed_lp_norm,
                              time_morrey_norm, unit_ball_volume)


def brute_morrey(f, p, beta, rhos):
    grid = f.grid
    best = 0.0
    for idx in np.ndindex(grid.shape):
        base = grid.cell_center(idx)
        if not grid.parabolic:
            base = (0.0,) + base[1:]
        for rho in rhos:
            reg = region_cells(grid, ParabolicCylinder(rho, base))
            s = np.sum(np.abs(f.values[reg.mask()]) ** p)
            best = max(best, rho ** beta * (s / reg.total) ** (1.0 / p))
    return best


def bump(grid, w=0.5):
    t, *xs = grid.coords()
    r2 = sum(x * x for x in xs) + (t - 0.2) ** 2 if grid.parabolic else sum(x * x for x in xs)
    return GridFunction(grid, np.broadcast_to(np.maximum(1 - r2 / w ** 2, 0.0) ** 2, grid.shape))


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_lp_of_constant():
    g = make_grid(2, 6, 4, 0.5)
    f = GridFunction(g, np.full(g.shape, 3.0))
    vol = g.size * g.cell_volume
    assert lp_norm(f, 2) == pytest.approx(3.0 * vol ** 0.5, rel=1e-14)
    assert slashed_lp_norm(f, 2) == pytest.approx(3.0, rel=1e-14)
    assert lp_norm(f, math.inf) == 3.0


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0])
def test_mixed_norm_collapses_to_lp(q):
    rng = np.random.default_rng(1)
    g = make_grid(2, 7, 9, 0.3)
    f = GridFunction(g, rng.normal(size=g.shape))
    assert abs(mixed_norm(f, q, q) / lp_norm(f, q) - 1) <= 1e-12


@pytest.mark.parametrize("d,p,beta", [(1, 2.0, 1.0), (1, 1.5, 2.0), (2, 2.0, 1.5)])
def test_morrey_matches_brute_force(d, p, beta):
    rng = np.random.default_rng(d)
    g = make_grid(d, {1: 8, 2: 5}[d], 6, 0.25)
    f = GridFunction(g, rng.random(g.shape))
    rhos = default_rhos(g)[:8]
    res = morrey_norm(f, p, beta, rhos=rhos)
    assert res.value == pytest.approx(brute_morrey(f, p, beta, rhos), rel=1e-10)
    assert morrey_reevaluate(f, p, beta, res) == pytest.approx(res.value, rel=1e-10)


def test_elliptic_morrey_matches_brute_force():
    rng = np.random.default_rng(9)
    g = centered_grid(2, 7, 0.2, mode=ELLIPTIC)
    f = GridFunction(g, rng.random(g.shape))
    rhos = default_rhos(g)[:6]
    assert elliptic_morrey_norm(f, 2.0, 0.5, rhos=rhos).value == pytest.approx(
        brute_morrey(f, 2.0, 0.5, rhos), rel=1e-10)


def test_zero_function_has_zero_norm():
    g = centered_grid(1, 8, 0.25, (0, 1))
    z = GridFunction(g, np.zeros(g.shape))
    assert morrey_norm(z, 2.0, 1.0).value == 0.0


def test_degenerate_beta_flagged():
    g = centered_grid(1, 8, 0.25, (0, 1))
    f = bump(g)
    with pytest.warns(DegenerateNormWarning):
        res = morrey_norm(f, 2.0, 2.0)
    assert res.degenerate and res.value > 0


def test_morrey_scaling_is_exact():
    g = centered_grid(1, 16, 0.125, (-0.5, 1.0))
    f = bump(g)
    for R in (2.0, 0.5, 3.0):
        fr = GridFunction(g.scaled(R), f.values)
        a = morrey_norm(f, 2.0, 1.2).value
        b = morrey_norm(fr, 2.0, 1.2).value
        assert abs(b / (R ** 1.2 * a) - 1) <= 1e-12


def test_critical_morrey_is_normalised_lebesgue():
    # beta = (d+2)/p and a cylinder covering the support: value = ||f||_p / |C_1|^(1/p) on the lattice
    g = centered_grid(1, 32, 0.0625, (-0.5, 1.5))
    f = bump(g, 0.4)
    p = 2.0
    res = morrey_norm(f, p, 3.0 / p)
    expected = lp_norm(f, p) / unit_ball_volume(1) ** (1 / p)
    assert res.value == pytest.approx(expected, rel=0.05)


def test_mixed_morrey_collapses_to_morrey():
    rng = np.random.default_rng(3)
    g = make_grid(2, 6, 8, 0.25)
    f = GridFunction(g, rng.random(g.shape))
    rhos = default_rhos(g)[:6]
    a = morrey_norm(f, 2.0, 1.0, rhos=rhos).value
    b = mixed_morrey_norm(f, 2.0, 2.0, 1.0, rhos=rhos).value
    assert abs(b / a - 1) <= 1e-12


def test_domain_restricts_centres_and_support():
    g = centered_grid(1, 16, 0.125, (-1.0, 1.0))
    f = bump(g)
    whole = morrey_norm(f, 2.0, 1.0).value
    strip = morrey_norm(f, 2.0, 1.0, Domain.strip(0.5, 1.0)).value
    assert strip <= whole
    with pytest.raises(ValueError):
        morrey_norm(f, 0.5, 1.0)


def test_time_morrey_identity_with_lp():
    rng = np.random.default_rng(2)
    b = rng.random(40)
    dt = 0.05
    for p in (1.0, 2.0, 3.0):
        lp = (np.sum(b ** p) * dt) ** (1 / p)
        assert abs(time_morrey_norm(b, dt, p, 1.0 / p) / lp - 1) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_morrey_positive_homogeneity(seed, lam):
    rng = np.random.default_rng(seed)
    g = make_grid(1, 8, 6, 0.25)
    f = GridFunction(g, rng.normal(size=g.shape))
    a = morrey_norm(f, 1.5, 1.0).value
    b = morrey_norm(f * lam, 1.5, 1.0).value
    assert b == pytest.approx(lam * a, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_morrey_monotone_in_modulus(seed):
    rng = np.random.default_rng(seed)
    g = make_grid(2, 5, 5, 0.25)
    f = rng.random(g.shape)
    h = f + rng.random(g.shape)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = morrey_norm(GridFunction(g, f), 2.0, 1.0).value
        b = morrey_norm(GridFunction(g, -h), 2.0, 1.0).value
    assert a <= b * (1 + 1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1.0, 2.0, 4.0]))
def test_holder_on_single_cylinder(seed, q):
    # ||fg||_1 avg <= ||f||_q avg ||g||_q' avg on every cylinder
    rng = np.random.default_rng(seed)
    g = make_grid(1, 10, 8, 0.2)
    f = GridFunction(g, rng.random(g.shape))
    h = GridFunction(g, rng.random(g.shape))
    cyl = ParabolicCylinder(0.6, (0.2, 0.0))
    qq = math.inf if q == 1.0 else q / (q - 1)
    lhs = slashed_lp_norm(f * h, 1.0, cyl)
    rhs = slashed_lp_norm(f, q, cyl) * slashed_lp_norm(h, qq, cyl)
    assert lhs <= rhs * (1 + 1e-12)
