import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morrey_lab.grid import ELLIPTIC, GridError, GridFunction, centered_grid, sample
from morrey_lab.transforms import (HESTENES_TERMS, RadialMap, annulus_pullback, cutoff, cutoff_bounds, fold_map,
                                   h_profile, hestenes_extend, hestenes_seam_identities, parabolic_scale,
                                   step_profile, time_fold)


def test_seam_identities_are_exact():
    assert hestenes_seam_identities() == (1, 1, 1)
    assert [a for a, _ in HESTENES_TERMS] == [6, -8, 3]


def test_parabolic_scale_is_exact_and_rational_only():
    g = centered_grid(1, 8, 0.25, (-1, 1))
    v = sample(lambda t, x: np.exp(-t * t - x * x), g)
    u = parabolic_scale(v, 3)
    assert u.grid.hx == 0.75 and u.grid.ht == pytest.approx(9 * g.ht)
    assert u.values.tobytes() == v.values.tobytes()
    assert parabolic_scale(v, 0.5).grid.hx == 0.125
    with pytest.raises(GridError):
        parabolic_scale(v, np.sqrt(2))
    with pytest.raises(GridError):
        parabolic_scale(v, 1.5)


def test_fold_map_values():
    assert fold_map(0.3) == 0.3
    assert fold_map(1.2) == pytest.approx(0.8)
    assert fold_map(-1.5) == pytest.approx(-0.5)
    assert fold_map(2.5, S=0.0, T=2.0) == pytest.approx(1.5)


def test_time_fold_reflects_and_truncates():
    g = centered_grid(1, 4, 0.25, (-2.0, 2.0))
    u = sample(lambda t, x: t + 0 * x, g)
    w = time_fold(u, -1.0, 1.0)
    t = g.t
    inside = np.abs(t) <= 1.0
    assert w.values[inside] == pytest.approx(u.values[inside])
    band = (np.abs(t) > 1.0) & (np.abs(t) <= 1.5)
    assert w.values[band, 0] == pytest.approx(np.sign(t[band]) * (2 - np.abs(t[band])))
    assert np.all(w.values[np.abs(t) > 1.5 + 1e-9] == 0.0)
    with pytest.raises(GridError):
        time_fold(u, -3.0, 1.0)


@pytest.mark.parametrize("d", [1, 2])
def test_hestenes_reproduces_radial_quadratics(d):
    # the three terms reproduce any quadratic in |x| across the seam; only interpolation error remains
    errs = []
    for hx in (0.05, 0.025):
        g = centered_grid(d, int(round(3.0 / hx)), hx, mode=ELLIPTIC)
        q = lambda r: 1.0 + 2.0 * (r - 1.0) - 3.0 * (r - 1.0) ** 2
        u = sample(lambda t, *xs: q(np.sqrt(sum(x * x for x in xs))), g)
        v = hestenes_extend(u, 1.0)
        _, *xs = g.coords()
        r = np.broadcast_to(np.sqrt(sum(x * x for x in xs)), g.shape)
        shell = (r >= 1.0) & (r <= 1.2)
        errs.append(np.max(np.abs(v.values[shell] - q(r[shell]))) / hx ** 2)
        assert np.all(v.values[r < 1.0] == u.values[r < 1.0])
        assert np.all(v.values[r > 1.2 + 1e-12] == 0.0)
    assert max(errs) <= 10.0


def test_hestenes_validates_reach_and_coverage():
    g = centered_grid(1, 20, 0.1, mode=ELLIPTIC)
    u = GridFunction(g, np.ones(g.shape))
    with pytest.raises(ValueError):
        hestenes_extend(u, 1.0, reach=1.4)
    with pytest.raises(GridError):
        hestenes_extend(u, 1.0, reach=1.3)


def test_step_profile_is_monotone_c2_step():
    tau = np.linspace(-0.2, 1.2, 1401)
    s = step_profile(tau)
    assert s[0] == 0.0 and s[-1] == pytest.approx(1.0)
    assert np.all(np.diff(s) >= -1e-15)
    for k in (1, 2):
        assert step_profile(np.array([0.0, 1.0]), k) == pytest.approx([0.0, 0.0], abs=1e-12)
    h = 1e-5
    mid = np.linspace(0.05, 0.95, 19)
    fd1 = (step_profile(mid + h) - step_profile(mid - h)) / (2 * h)
    fd2 = (step_profile(mid + h, 1) - step_profile(mid - h, 1)) / (2 * h)
    assert step_profile(mid, 1) == pytest.approx(fd1, rel=1e-6, abs=1e-8)
    assert step_profile(mid, 2) == pytest.approx(fd2, rel=1e-6, abs=1e-6)


def test_h_profile_derivatives():
    t = np.linspace(-0.5, 1.5, 41)
    h = 1e-6
    assert h_profile(t, 1) == pytest.approx((h_profile(t + h) - h_profile(t - h)) / (2 * h), abs=1e-6)
    assert h_profile(t, 2) == pytest.approx((h_profile(t + h, 1) - h_profile(t - h, 1)) / (2 * h), abs=1e-4)
    assert np.all(np.diff(h_profile(t)) >= 0)
    with pytest.raises(ValueError):
        h_profile(t, 3)


def test_cutoffs():
    g = centered_grid(2, 40, 0.1, (-2.0, 2.0))
    z = cutoff(g, "space", 1.0, 1.5).values
    _, *xs = g.coords()
    r = np.broadcast_to(np.sqrt(sum(x * x for x in xs)), g.shape)
    assert np.all(z[r <= 1.0] == pytest.approx(1.0)) and np.all(z[r >= 1.5] == 0.0)
    zt = cutoff(g, "time", 1.0, 1.5).values
    t = np.broadcast_to(g.coords()[0], g.shape)
    assert np.all(zt[np.abs(t) <= 1.0] == pytest.approx(1.0))
    b = cutoff_bounds(g, "space", 1.0, 1.5)
    assert b["sum012"] >= b["sum01"] >= 1.0
    with pytest.raises(ValueError):
        cutoff(g, "bogus")


def test_radial_map_and_pullback():
    m = RadialMap()
    assert m.check() >= 1.0
    with pytest.raises(GridError):
        RadialMap(phi=lambda r: r, phi_inv=lambda r: r).check()
    g = centered_grid(2, 30, 0.1, mode=ELLIPTIC)
    v = sample(lambda t, x, y: 1.0 + x * x + y * y, g)
    u = annulus_pullback(v, m)
    _, *xs = g.coords()
    r = np.broadcast_to(np.sqrt(sum(x * x for x in xs)), g.shape)
    assert np.all(u.values[(r < 0.8) | (r > 1.0)] == 0.0)
    ring = (r >= 0.85) & (r <= 0.95)
    # v at the preimage radius 2 - |x|, up to interpolation error
    assert u.values[ring] == pytest.approx(1.0 + (2 - r[ring]) ** 2, abs=0.02)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_fold_map_is_a_contraction_onto_the_interval(s, t):
    assert abs(fold_map(s)) <= 1.0 + 1e-12
    assert abs(fold_map(s) - fold_map(t)) <= abs(s - t) + 1e-12
    assert fold_map(fold_map(s)) == pytest.approx(fold_map(s))
