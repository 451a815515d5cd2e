import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morrey_lab.grid import (ELLIPTIC, GridError, GridFunction, ParabolicCylinder, PMGFormatError, ball_count,
                             ball_max, build_table, centered_grid, cylinder_sums, diff_t, diff_x, diff_xx,
                             make_grid, read_pmg, region_cells, sample, time_window_max, write_pmg)


def brute_cylinder_sum(f, rho, p=1.0):
    """Sum of |f|^p over the lattice cells of C_rho anchored at every cell."""
    grid = f.grid
    out = np.zeros(grid.shape)
    for idx in np.ndindex(grid.shape):
        cyl = ParabolicCylinder(rho, grid.cell_center(idx)) if grid.parabolic else \
            ParabolicCylinder(rho, (0.0,) + grid.cell_center(idx)[1:])
        m = region_cells(grid, cyl).mask()
        out[idx] = np.sum(np.abs(f.values[m]) ** p)
    return out


def test_make_grid_validation():
    with pytest.raises(GridError):
        make_grid(4, 8, 8, 0.1)
    with pytest.raises(GridError):
        make_grid(1, 8, 8, -0.1)
    with pytest.raises(GridError):
        make_grid(2, 100, 100, 0.1, max_cells=1000)
    g = make_grid(2, 8, 5, 0.25)
    assert g.shape == (5, 8, 8)
    assert g.ht == pytest.approx(0.0625)
    assert g.cell_volume == pytest.approx(0.25 ** 4)


def test_centered_grid_contains_origin():
    g = centered_grid(2, 16, 0.125, (-0.5, 0.5))
    idx = g.index_of((0.0, 0.0, 0.0))
    assert g.cell_center(idx) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
    e = centered_grid(3, 10, 0.1, mode=ELLIPTIC)
    assert e.shape == (1, 10, 10, 10)


def test_scaled_grid_is_parabolic_dilation():
    g = centered_grid(1, 8, 0.25, (-1, 1))
    s = g.scaled(2.0)
    assert s.hx == 0.5 and s.ht == pytest.approx(4 * g.ht)
    assert s.t == pytest.approx(4 * g.t)
    assert s.x() == pytest.approx(2 * g.x())


def test_sample_reports_singular_cell():
    g = centered_grid(1, 8, 0.25, (0, 1))
    with pytest.raises(GridError, match="cell"):
        sample(lambda t, x: 1.0 / x, g)
    f = sample(lambda t, x: 1.0 / x, g, singular_value=7.0)
    assert np.max(f.values) == 7.0


def test_grid_function_immutable_and_checked():
    g = make_grid(1, 4, 3, 0.5)
    f = GridFunction(g, np.ones(g.shape))
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0
    with pytest.raises(GridError):
        GridFunction(g, np.ones(5))
    with pytest.raises(GridError):
        GridFunction(g, np.full(g.shape, np.nan))


def test_cylinder_contains_forward_in_time():
    c = ParabolicCylinder(1.0, (0.0, 0.0))
    assert c.contains(np.array(0.0), np.array(0.0))
    assert not c.contains(np.array(-0.01), np.array(0.0))
    assert not c.contains(np.array(1.0), np.array(0.0))
    assert c.geometric_center == (0.5, 0.0)
    assert c.measure(1) == pytest.approx(2.0)


def test_region_total_counts_cells_off_grid():
    g = centered_grid(1, 8, 0.25, (0, 0.5))
    cyl = ParabolicCylinder(1.0, (0.0, 0.0))
    reg = region_cells(g, cyl)
    # 7 spatial cells |k| < 4 times 16 layers, only some of them on the grid
    assert reg.total == 7 * 16
    assert reg.count < reg.total


@pytest.mark.parametrize("d,nx,nt", [(1, 9, 12), (2, 7, 6)])
@pytest.mark.parametrize("rho_cells", [1.0, 2.5, 3.0])
def test_cylinder_sums_match_brute_force(d, nx, nt, rho_cells):
    rng = np.random.default_rng(4)
    g = make_grid(d, nx, nt, 0.2)
    f = GridFunction(g, rng.normal(size=g.shape))
    rho = rho_cells * g.hx
    table = build_table(f, 2.0)
    fast = cylinder_sums(table, rho, method="table")
    assert fast == pytest.approx(brute_cylinder_sum(f, rho, 2.0), rel=1e-10, abs=1e-12)


def test_fft_and_table_ball_sums_agree():
    rng = np.random.default_rng(5)
    g = make_grid(2, 24, 5, 0.1)
    f = GridFunction(g, rng.random(g.shape))
    table = build_table(f, 1.0)
    for kappa in (4.0, 7.5, 30.0):
        a = cylinder_sums(table, kappa * g.hx, method="table")
        b = cylinder_sums(table, kappa * g.hx, method="fft")
        assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_ball_count_matches_enumeration():
    for d in (1, 2, 3):
        for kappa in (1.0, 2.0, 3.7):
            r = int(math.ceil(kappa))
            pts = np.stack(np.meshgrid(*[np.arange(-r, r + 1)] * d, indexing="ij"), -1).reshape(-1, d)
            assert ball_count(kappa, d) == int(np.sum(np.sum(pts ** 2, 1) < kappa ** 2))


def test_ball_max_and_time_window_max():
    v = np.zeros((4, 9))
    v[1, 4] = 1.0
    m = ball_max(v, 1, 2.0)
    assert np.array_equal(m[1] > 0, np.abs(np.arange(9) - 4) < 2)
    fwd = time_window_max(v, 2, forward=True)
    assert fwd[0, 4] == 1.0 and fwd[1, 4] == 1.0 and fwd[2, 4] == 0.0
    back = time_window_max(v, 2, forward=False)
    assert back[2, 4] == 1.0 and back[0, 4] == 0.0


def test_finite_differences_on_quadratic():
    g = centered_grid(2, 16, 0.1, (0, 0.2))
    f = sample(lambda t, x, y: 3 * t + x * x + x * y, g)
    dx, dy = diff_x(f)
    inner = (slice(None), slice(1, -1), slice(1, -1))
    t, x, y = g.coords()
    assert dx.values[inner] == pytest.approx(np.broadcast_to(2 * x + y, g.shape)[inner])
    h = diff_xx(f)
    assert h.laplacian.values[inner] == pytest.approx(2.0)
    assert diff_t(f).values[1:-1] == pytest.approx(3.0)


def test_pmg_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    g = centered_grid(2, 6, 0.3, (-0.2, 0.3))
    f = GridFunction(g, rng.normal(size=g.shape))
    path = tmp_path / "f.pmg"
    write_pmg(path, f)
    back = read_pmg(path)
    assert back.grid == g
    assert back.values.tobytes() == f.values.tobytes()


def test_pmg_rejects_malformed(tmp_path):
    p = tmp_path / "bad.pmg"
    p.write_bytes(b"nonsense\n123")
    with pytest.raises(PMGFormatError):
        read_pmg(p)
    g = make_grid(1, 4, 3, 0.5)
    write_pmg(p, GridFunction(g, np.zeros(g.shape)))
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(PMGFormatError):
        read_pmg(p)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.floats(0.5, 4.0), st.integers(0, 10_000))
def test_cylinder_sums_monotone_in_radius(d, kappa, seed):
    rng = np.random.default_rng(seed)
    nx = {1: 10, 2: 7, 3: 5}[d]
    g = make_grid(d, nx, 6, 0.25)
    f = GridFunction(g, rng.random(g.shape))
    table = build_table(f, 1.0)
    small = cylinder_sums(table, kappa * g.hx)
    big = cylinder_sums(table, (kappa + 0.5) * g.hx)
    assert np.all(big >= small - 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.3, 3.0))
def test_table_sums_are_homogeneous(seed, scale):
    rng = np.random.default_rng(seed)
    g = make_grid(1, 12, 8, 0.2)
    f = GridFunction(g, rng.normal(size=g.shape))
    a = cylinder_sums(build_table(f, 2.0), 0.5)
    b = cylinder_sums(build_table(f * scale, 2.0), 0.5)
    assert b == pytest.approx(scale ** 2 * a, rel=1e-9, abs=1e-12)
