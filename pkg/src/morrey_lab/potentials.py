"""Parabolic potentials ``P_alpha``, the adjoint of ``P_1``, Riesz potentials and
the heat-kernel representation of the gradient.

Grid functions are piecewise constant on cells, so each operator is a
discrete correlation with weights equal to the kernel integrated over a cell
offset.  For ``p_alpha`` the spatial part integrates in closed form
(a product of erf differences), which leaves the 1-D integral

    W[j, v] = (pi^{d/2} / 2^d) int_{s in layer j} s^{alpha/2 - 1} prod_i E(v_i, s) ds,

    E(v, s) = erf((v + 1/2) h / sqrt s) - erf((v - 1/2) h / sqrt s).

The integrand is bounded times ``s^{alpha/2-1}``; the interval next to ``s = 0``
is split off and integrated analytically, the rest by Gauss-Legendre panels in
``log s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import erf, erfc, gamma, gammainc

from .grid import ELLIPTIC, Grid, GridError, GridFunction

# Gauss-Legendre nodes per log-panel and panels per unit of log s.
GL_NODES = 8
PANELS_PER_LOG_UNIT = 2
# Below s = SMALL_S * hx^2 the origin cell is integrated analytically.
SMALL_S = 1.0 / 400.0
# The time-marginal integral is truncated at TAIL_FACTOR * (max|y|^2 + hx^2)
# and closed with an incomplete-gamma tail.
TAIL_FACTOR = 1.0e3


@dataclass(frozen=True)
class KernelSpec:
    alpha: float
    d: int
    s_max: float
    r_max: float
    singular_rule: str = "analytic s^(alpha/2) below s_min, log-s Gauss-Legendre above"

    def __post_init__(self):
        if not 0 < self.alpha < self.d + 2:
            raise ValueError(f"alpha must lie in (0, {self.d + 2}), got {self.alpha}")


def _check_alpha(alpha: float, d: int):
    if not 0 < alpha < d + 2:
        raise ValueError(f"alpha must lie in (0, d+2) = (0, {d + 2}), got {alpha}")


def kernel_p_alpha(alpha: float, d: int, s, r):
    """``s^{-(d+2-alpha)/2} exp(-r^2/s)`` for ``s > 0`` and 0 otherwise."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    pos = s > 0
    safe = np.where(pos, s, 1.0)
    with np.errstate(under="ignore", over="ignore"):
        val = safe ** (-(d + 2 - alpha) / 2.0) * np.exp(-(r * r) / safe)
    out = np.where(pos, val, 0.0)
    return float(out) if out.ndim == 0 else out


def time_marginal(alpha: float, d: int, r: float, nodes: int = 64) -> float:
    """``int_0^inf p_alpha(s, r) ds`` by log-s Gauss-Legendre quadrature.

    Closed form: ``Gamma((d-alpha)/2) r^{alpha-d}`` for ``alpha < d``.
    """
    if not 0 < alpha < d:
        raise ValueError("the time marginal is finite only for 0 < alpha < d")
    # in w = log(s / r^2) the integrand is r^{alpha-d} exp(-(d-alpha)w/2 - e^{-w})
    lo, hi = -6.0, 80.0 / max(d - alpha, 1e-3) * 2
    edges = np.arange(lo, hi + 0.5, 0.5)
    x, w = np.polynomial.legendre.leggauss(nodes // 4 if nodes >= 16 else nodes)
    total = 0.0
    gam = (d - alpha) / 2.0
    for a, b in zip(edges[:-1], edges[1:]):
        ww = 0.5 * (b - a) * x + 0.5 * (a + b)
        total += 0.5 * (b - a) * np.sum(w * np.exp(-gam * ww - np.exp(-ww)))
    # tail beyond hi: e^{-gam w} with e^{-e^{-w}} ~ 1
    total += math.exp(-gam * edges[-1]) / gam
    return total * r ** (alpha - d)


def _erf_diff(v: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    """``E(v, s)`` for offsets ``v`` (last axis) and nodes ``s`` (first axis); stable in the tails."""
    rs = 1.0 / np.sqrt(s)[:, None]
    a = (v[None, :] - 0.5) * h * rs
    b = (v[None, :] + 0.5) * h * rs
    pos = a >= 0
    neg = b <= 0
    out = erf(b) - erf(a)
    out = np.where(pos, erfc(a) - erfc(b), out)
    out = np.where(neg, erfc(-b) - erfc(-a), out)
    return out


def _log_panels(s_lo: float, s_hi: float, nodes: int, per_unit: int):
    """Gauss-Legendre nodes and weights (including the ds = s dw Jacobian) on [s_lo, s_hi]."""
    if s_hi <= s_lo:
        return np.empty(0), np.empty(0)
    x, w = np.polynomial.legendre.leggauss(nodes)
    wl, wh = math.log(s_lo), math.log(s_hi)
    n = max(1, int(math.ceil((wh - wl) * per_unit)))
    edges = np.linspace(wl, wh, n + 1)
    ss, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        wv = 0.5 * (b - a) * x + 0.5 * (a + b)
        sv = np.exp(wv)
        ss.append(sv)
        ws.append(0.5 * (b - a) * w * sv)
    return np.concatenate(ss), np.concatenate(ws)


def _accumulate(d: int, h: float, offsets: np.ndarray, s: np.ndarray, weights: np.ndarray,
                factor_1d, chunk: int = 32) -> np.ndarray:
    """``sum_n weights[n] * prod_i factor_1d(v_i, s_n)`` over the tensor offset grid."""
    m = offsets.size
    out = np.zeros((m,) * d)
    for start in range(0, s.size, chunk):
        sl = slice(start, start + chunk)
        e = factor_1d(offsets, h, s[sl])  # (n, m)
        wv = weights[sl]
        if d == 1:
            out += wv @ e
        elif d == 2:
            out += np.einsum("n,ni,nj->ij", wv, e, e, optimize=True)
        else:
            out += np.einsum("n,ni,nj,nk->ijk", wv, e, e, e, optimize=True)
    return out


def _layer_weights(alpha: float, d: int, h: float, offsets: np.ndarray, s_lo: float, s_hi: float,
                   nodes: int) -> np.ndarray:
    """Cell weights of ``p_alpha`` over ``s in [s_lo, s_hi)``, offsets ``offsets`` per axis."""
    pref = math.pi ** (d / 2) / 2 ** d
    s_min = SMALL_S * h * h
    out = np.zeros((offsets.size,) * d)
    lo = s_lo
    if s_lo < s_min:
        # analytic piece: only the centre cell is non-negligible and there prod E = 2^d
        hi0 = min(s_min, s_hi)
        centre = (offsets.size // 2,) * d
        out[centre] += pref * 2 ** d * (hi0 ** (alpha / 2) - s_lo ** (alpha / 2)) / (alpha / 2)
        lo = hi0
    if s_hi > lo:
        s, w = _log_panels(lo, s_hi, nodes, PANELS_PER_LOG_UNIT if s_hi / lo > 3 else 1)
        out += pref * _accumulate(d, h, offsets, s, w * s ** (alpha / 2 - 1), _erf_diff)
    return out


@lru_cache(maxsize=16)
def _parabolic_kernel(alpha: float, d: int, nx: int, nt: int, hx: float, nodes: int) -> np.ndarray:
    """Weights ``W[j, v]`` for ``j = 0..nt-1`` and ``v_i = -(nx-1)..nx-1``."""
    offsets = np.arange(-(nx - 1), nx, dtype=float)
    ht = hx * hx
    W = np.empty((nt,) + (offsets.size,) * d)
    W[0] = _layer_weights(alpha, d, hx, offsets, 0.0, 0.5 * ht, nodes)
    for j in range(1, nt):
        W[j] = _layer_weights(alpha, d, hx, offsets, (j - 0.5) * ht, (j + 0.5) * ht, nodes)
    W.setflags(write=False)
    return W


@lru_cache(maxsize=16)
def _marginal_kernel(alpha: float, d: int, nx: int, hx: float, nodes: int) -> np.ndarray:
    """Cell weights of ``int_0^inf p_alpha ds`` (time-independent data)."""
    offsets = np.arange(-(nx - 1), nx, dtype=float)
    rmax2 = d * ((nx - 0.5) * hx) ** 2
    s_max = TAIL_FACTOR * (rmax2 + hx * hx)
    W = _layer_weights(alpha, d, hx, offsets, 0.0, s_max, nodes)
    # tail: for s > s_max the erf differences are the midpoint rule up to O(h^2/s)
    gam = (d - alpha) / 2.0
    grids = np.meshgrid(*([offsets * hx] * d), indexing="ij")
    c = sum(g * g for g in grids)
    x = c / s_max
    with np.errstate(divide="ignore"):
        tail = np.where(c > 0, gamma(gam) * gammainc(gam, x) * np.where(c > 0, c, 1.0) ** (-gam),
                        s_max ** (-gam) / gam)
    W = W + hx ** d * tail
    W.setflags(write=False)
    return W


def kernel_weights(grid: Grid, alpha: float, nodes: int = GL_NODES) -> np.ndarray:
    """The discrete kernel used by :func:`apply_P_alpha` on ``grid``."""
    _check_alpha(alpha, grid.d)
    if grid.mode == ELLIPTIC:
        if not alpha < grid.d:
            raise ValueError("time-independent data need alpha < d")
        return _marginal_kernel(float(alpha), grid.d, grid.nx, float(grid.hx), nodes)
    return _parabolic_kernel(float(alpha), grid.d, grid.nx, grid.nt, float(grid.hx), nodes)


def _correlate(values: np.ndarray, W: np.ndarray) -> np.ndarray:
    """``out[k, i] = sum W[j, v] values[k + j, i + v]`` (zero outside the grid)."""
    flipped = W[tuple(slice(None, None, -1) for _ in range(W.ndim))]
    full = fftconvolve(values, flipped, mode="full")
    return full[tuple(slice(n - 1, 2 * n - 1) for n in values.shape)]


def _convolve(values: np.ndarray, W: np.ndarray, time_axis: bool) -> np.ndarray:
    """``out[k, i] = sum W[j, v] values[k - j, i - v]``."""
    full = fftconvolve(values, W, mode="full")
    key = []
    for ax, n in enumerate(values.shape):
        if ax == 0 and time_axis:
            key.append(slice(0, n))
        else:
            key.append(slice(n - 1, 2 * n - 1))
    return full[tuple(key)]


def apply_P_alpha(f: GridFunction, alpha: float, nodes: int = GL_NODES) -> GridFunction:
    """``P_alpha f(t, x) = int p_alpha(s, |y|) f(t + s, x + y) dy ds``.

    On an elliptic grid ``f`` is read as time independent and the result is the
    (time independent) potential, which needs ``alpha < d``.
    """
    W = kernel_weights(f.grid, alpha, nodes)
    if f.grid.mode == ELLIPTIC:
        out = _correlate(f.values[0], W)[None]
    else:
        out = _correlate(f.values, W)
    return GridFunction(f.grid, out)


def apply_P1_adjoint(g: GridFunction, nodes: int = GL_NODES) -> GridFunction:
    """Adjoint of ``P_1`` for the grid inner product: convolution with the kernel."""
    if g.grid.mode == ELLIPTIC:
        raise GridError("the adjoint acts on space-time grids")
    W = kernel_weights(g.grid, 1.0, nodes)
    return GridFunction(g.grid, _convolve(g.values, W, time_axis=True))


def quadrature_error(f: GridFunction, alpha: float, nodes: int = GL_NODES) -> float:
    """Max difference between ``P_alpha f`` at ``nodes`` and ``2*nodes``, relative to max|P_alpha f|."""
    a = apply_P_alpha(f, alpha, nodes).values
    b = apply_P_alpha(f, alpha, 2 * nodes).values
    scale = np.max(np.abs(b))
    return float(np.max(np.abs(a - b)) / scale) if scale > 0 else 0.0


# -- Riesz potential -------------------------------------------------------------

def _pyramid_integral(d: int, alpha: float, nodes: int = 24) -> float:
    """``int_{[-1,1]^{d-1}} (1 + |w|^2)^{(alpha-d)/2} dw``."""
    if d == 1:
        return 1.0
    x, w = np.polynomial.legendre.leggauss(nodes)
    grids = np.meshgrid(*([x] * (d - 1)), indexing="ij")
    wts = np.ones_like(grids[0])
    for i in range(d - 1):
        wts = wts * w.reshape([-1 if k == i else 1 for k in range(d - 1)])
    r2 = sum(g * g for g in grids)
    return float(np.sum(wts * (1 + r2) ** ((alpha - d) / 2.0)))


@lru_cache(maxsize=16)
def _riesz_kernel(alpha: float, d: int, nx: int, hx: float, near: int = 3, sub: int = 2,
                  nodes: int = 8) -> np.ndarray:
    offsets = np.arange(-(nx - 1), nx)
    grids = np.meshgrid(*([offsets] * d), indexing="ij")
    r = np.sqrt(sum((g * hx) ** 2 for g in grids).astype(float))
    with np.errstate(divide="ignore"):
        W = np.where(r > 0, r, 1.0) ** (alpha - d) * hx ** d
    # near cells: tensor Gauss-Legendre on sub-cells
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(-0.5, 0.5, sub + 1)
    pts, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        pts.append(0.5 * (b - a) * x + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * w)
    pts, wts = np.concatenate(pts), np.concatenate(wts)
    qg = np.meshgrid(*([pts] * d), indexing="ij")
    qw = np.ones_like(qg[0])
    for i in range(d):
        qw = qw * wts.reshape([-1 if k == i else 1 for k in range(d)])
    c = nx - 1
    for v in np.ndindex(*(2 * near + 1,) * d):
        off = tuple(int(i) - near for i in v)
        if all(o == 0 for o in off) or max(abs(o) for o in off) > nx - 1:
            continue
        rr = np.sqrt(sum(((g + o) * hx) ** 2 for g, o in zip(qg, off)))
        W[tuple(c + o for o in off)] = np.sum(qw * rr ** (alpha - d)) * hx ** d
    W[(c,) * d] = 2 * d * (hx / 2) ** alpha / alpha * _pyramid_integral(d, alpha)
    W.setflags(write=False)
    return W


def riesz_potential(g: GridFunction, alpha: float) -> GridFunction:
    """Unnormalised Riesz potential ``int |y|^{alpha-d} g(x + y) dy`` of time-independent data."""
    d = g.grid.d
    if not 0 < alpha < d:
        raise ValueError(f"Riesz potential needs 0 < alpha < d = {d}")
    if g.grid.mode != ELLIPTIC:
        raise GridError("riesz_potential acts on elliptic grids")
    W = _riesz_kernel(float(alpha), d, g.grid.nx, float(g.grid.hx))
    return GridFunction(g.grid, _correlate(g.values[0], W)[None])


# -- heat representation of the gradient -------------------------------------------

def _heat_erf(v: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    """``int_cell exp(-y^2/(4s)) dy / sqrt(pi s)``."""
    return _erf_diff(v, h, 4.0 * s)


def _heat_moment(v: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    """``int_cell y exp(-y^2/(4s)) dy / (2 s)``."""
    a = (v[None, :] - 0.5) * h
    b = (v[None, :] + 0.5) * h
    q = 1.0 / (4.0 * s[:, None])
    return np.exp(-a * a * q) - np.exp(-b * b * q)


@lru_cache(maxsize=8)
def _heat_gradient_kernel(d: int, nx: int, nt: int, hx: float, nodes: int) -> tuple:
    """Cell weights of ``y_i s^{-(d+2)/2} exp(-|y|^2/(4s))``, one array per component.

    Per cell the integrand is ``2 pi^{(d-1)/2} s^{-1/2} M(v_i) prod_{k != i} E(v_k)``.
    """
    offsets = np.arange(-(nx - 1), nx, dtype=float)
    ht = hx * hx
    pref = 2.0 * math.pi ** ((d - 1) / 2.0)
    comps = []
    for i in range(d):
        W = np.empty((nt,) + (offsets.size,) * d)
        for j in range(nt):
            lo = max((j - 0.5) * ht, 0.0)
            hi = (j + 0.5) * ht
            lo = max(lo, SMALL_S * ht)  # the moment factor vanishes faster than any power below
            s, w = _log_panels(lo, hi, nodes, PANELS_PER_LOG_UNIT if hi / lo > 3 else 1)
            w = w * s ** -0.5
            factors = [_heat_moment(offsets, hx, s) if k == i else _heat_erf(offsets, hx, s) for k in range(d)]
            if d == 1:
                W[j] = w @ factors[0]
            elif d == 2:
                W[j] = np.einsum("n,ni,nj->ij", w, *factors, optimize=True)
            else:
                W[j] = np.einsum("n,ni,nj,nk->ijk", w, *factors, optimize=True)
        W *= pref
        W.setflags(write=False)
        comps.append(W)
    return tuple(comps)


def grad_from_heat_data(f: GridFunction, nodes: int = GL_NODES) -> tuple:
    """``int y s^{-(d+2)/2} exp(-|y|^2/(4s)) f(t+s, x+y) dy ds`` per component.

    Returned without the representation constant; see :func:`fit_heat_constant`.
    """
    if f.grid.mode == ELLIPTIC:
        raise GridError("grad_from_heat_data acts on space-time grids")
    kernels = _heat_gradient_kernel(f.grid.d, f.grid.nx, f.grid.nt, float(f.grid.hx), nodes)
    return tuple(GridFunction(f.grid, _correlate(f.values, W)) for W in kernels)


def fit_heat_constant(raw: tuple, du: tuple, mask: np.ndarray | None = None) -> tuple:
    """Least-squares constant ``c`` with ``du ~ c * raw`` and the max relative misfit on ``mask``.

    The misfit is measured where ``|du|`` exceeds 10% of its max.
    """
    r = np.stack([g.values for g in raw])
    u = np.stack([g.values for g in du])
    if mask is not None:
        r = r[:, mask]
        u = u[:, mask]
    c = float(np.sum(r * u) / np.sum(r * r))
    mag = np.sqrt(np.sum(u * u, axis=0))
    big = mag > 0.1 * mag.max()
    err = np.sqrt(np.sum((c * r - u) ** 2, axis=0))[big] / mag[big]
    return c, float(err.max()) if err.size else 0.0


def heat_constant(d: int) -> float:
    """The constant derived from the backward heat kernel: ``-(4 pi)^{-d/2} / 2``."""
    return -0.5 * (4.0 * math.pi) ** (-d / 2.0)


def kernel_domination_constant() -> float:
    """``sup_{tau >= 0} tau exp(-tau^2/8) = 2 exp(-1/2)`` (attained at ``tau = 2``)."""
    return 2.0 * math.exp(-0.5)
