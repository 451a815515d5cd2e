"""Maps used to localise estimates: parabolic dilation, the time fold, the
three-term radial reflection across the unit sphere, annulus pullbacks and
smooth cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.ndimage import map_coordinates

from .grid import Grid, GridError, GridFunction

# Reflection multipliers (a_k, m_k): v = sum a_k u(x (m_k + 1 - m_k |x|) / |x|),
# i.e. radius rho -> (m_k + 1) - m_k rho.
HESTENES_TERMS = ((6, 1), (-8, 2), (3, 3))
HESTENES_OUTER = 6.0 / 5.0


def hestenes_seam_identities() -> tuple:
    """``sum a_k (-m_k)^n`` for n = 0, 1, 2: each equals 1 so value, D_r and D_rr match at |x| = 1."""
    return tuple(sum(a * (-m) ** n for a, m in HESTENES_TERMS) for n in range(3))


def _ratio(R) -> Fraction:
    fr = Fraction(R).limit_denominator(10 ** 6)
    if abs(float(fr) - float(R)) > 1e-12 * abs(float(R)) or fr <= 0:
        raise GridError(f"scale ratio {R} is not a positive rational")
    if fr.denominator != 1 and fr.numerator != 1:
        raise GridError(f"scale ratio {R} must be an integer or 1/integer")
    return fr


def parabolic_scale(v: GridFunction, R) -> GridFunction:
    """``u(t, x) = v(t / R^2, x / R)`` on the dilated lattice (values unchanged, exact)."""
    fr = _ratio(R)
    return GridFunction(v.grid.scaled(float(fr)), v.values)


def fold_map(t, S: float = -1.0, T: float = 1.0):
    """``Phi(t) = t (2 / max(|t|, 1) - 1)`` conjugated to the interval ``(S, T)``."""
    mid, half = 0.5 * (S + T), 0.5 * (T - S)
    s = (np.asarray(t, dtype=float) - mid) / half
    phi = s * (2.0 / np.maximum(np.abs(s), 1.0) - 1.0)
    out = mid + half * phi
    return float(out) if out.ndim == 0 else out


def time_fold(u: GridFunction, S: float = -1.0, T: float = 1.0) -> GridFunction:
    """``w(t, x) = u(Phi(t), x)`` on the same grid, nearest-layer lookup.

    ``Phi`` is defined on the enlarged interval (half-width 3/2 of ``(S, T)``);
    ``w`` is set to zero outside it.
    """
    grid = u.grid
    if not grid.parabolic:
        raise GridError("time_fold needs a parabolic grid")
    t = grid.t
    lo_need, hi_need = S, T
    if t[0] > lo_need + grid.ht / 2 + 1e-12 or t[-1] < hi_need - grid.ht / 2 - 1e-12:
        raise GridError(f"grid time extent [{t[0]}, {t[-1]}] does not cover [{S}, {T}]")
    mid, half = 0.5 * (S + T), 0.5 * (T - S)
    inside = np.abs(t - mid) <= 1.5 * half * (1 + 1e-12)
    src = np.rint((fold_map(t, S, T) - grid.origin[0]) / grid.ht).astype(int)
    src = np.clip(src, 0, grid.nt - 1)
    vals = u.values[src] * inside.reshape((-1,) + (1,) * grid.d)
    return GridFunction(grid, vals)


def _spatial_index_coords(grid: Grid, pts: list) -> list:
    return [(p - grid.origin[1 + i]) / grid.hx for i, p in enumerate(pts)]


def _lookup(u: GridFunction, pts: list) -> np.ndarray:
    """Linear interpolation of ``u`` at spatial points ``pts`` (broadcast over time layers)."""
    grid = u.grid
    shape = grid.shape
    idx = _spatial_index_coords(grid, pts)
    tt = np.broadcast_to(np.arange(grid.nt).reshape((-1,) + (1,) * grid.d), shape)
    coords = [tt] + [np.broadcast_to(c, shape) for c in idx]
    return map_coordinates(u.values, np.array(coords), order=1, mode="constant", cval=0.0)


def hestenes_extend(u: GridFunction, R: float = 1.0, reach: float = HESTENES_OUTER) -> GridFunction:
    """Extend ``u`` from ``B_R`` to ``B_{6R/5}``.

    ``v = u`` on ``|x| < R``; for ``R <= |x| <= reach R``
    ``v = 6 u(x(2R/|x| - 1)) - 8 u(x(3R/|x| - 2)) + 3 u(x(4R/|x| - 3))``;
    zero beyond.  ``reach`` (at most 4/3, where the last argument hits the
    origin) may exceed 6/5 so that difference stencils near ``|x| = 6R/5``
    see the smooth formula.  Off-lattice values are interpolated linearly.
    """
    if not 1.0 < reach <= 4.0 / 3.0:
        raise ValueError("reach must lie in (1, 4/3]")
    grid = u.grid
    outer = reach * R
    cover = min(min(grid.origin[1 + i], -(grid.origin[1 + i] + (grid.nx - 1) * grid.hx)) for i in range(grid.d))
    if -cover < outer - grid.hx / 2 - 1e-12:
        raise GridError(f"grid does not cover the ball of radius {outer}")
    _, *xs = grid.coords()
    rad = np.sqrt(sum(x * x for x in xs))
    shell = (rad >= R) & (rad <= outer)
    safe = np.where(rad > 0, rad, 1.0)
    v = np.where(np.broadcast_to(rad < R, grid.shape), u.values, 0.0)
    ext = np.zeros(grid.shape)
    for a, m in HESTENES_TERMS:
        scale = ((m + 1) * R - m * rad) / safe
        ext += a * _lookup(u, [x * scale for x in xs])
    v = np.where(np.broadcast_to(shell, grid.shape), ext, v)
    return GridFunction(grid, v)


@dataclass(frozen=True)
class RadialMap:
    """Radial map ``y -> y phi(|y|)/|y|`` from ``{1 <= |y| <= R2}`` onto ``{R1 <= |x| <= 1}``."""

    phi: Callable = lambda r: 2.0 - r
    phi_inv: Callable = lambda r: 2.0 - r
    R1: float = 0.8
    R2: float = HESTENES_OUTER

    def check(self, samples: int = 2001) -> float:
        """Verify the map is one-to-one on the annulus; return the Lipschitz constant K."""
        r = np.linspace(1.0, self.R2, samples)
        p = np.asarray(self.phi(r), dtype=float)
        dp = np.diff(p)
        if not (np.all(dp > 0) or np.all(dp < 0)):
            raise GridError("radial map is not one-to-one on the annulus")
        ends = sorted((p[0], p[-1]))
        if abs(ends[0] - self.R1) > 1e-9 or abs(ends[1] - 1.0) > 1e-9:
            raise GridError("radial map does not carry [1, R2] onto [R1, 1]")
        back = np.asarray(self.phi_inv(p), dtype=float)
        if np.max(np.abs(back - r)) > 1e-9:
            raise GridError("phi_inv is not the inverse of phi")
        slope = np.abs(np.gradient(p, r))
        tang = p / r
        return float(max(slope.max(), (1 / slope).max(), tang.max(), (1 / tang).max()))


def annulus_pullback(v: GridFunction, radial_map: RadialMap | None = None) -> GridFunction:
    """``u(t, x) = v(t, Phi^{-1}(x)) I_{R1 <= |x| <= 1}``."""
    m = radial_map or RadialMap()
    m.check()
    grid = v.grid
    _, *xs = grid.coords()
    rad = np.sqrt(sum(x * x for x in xs))
    ring = (rad >= m.R1) & (rad <= 1.0)
    safe = np.where(rad > 0, rad, 1.0)
    scale = np.where(ring, np.asarray(m.phi_inv(np.where(ring, rad, 1.0)), dtype=float) / safe, 0.0)
    vals = _lookup(v, [x * scale for x in xs])
    return GridFunction(grid, np.where(np.broadcast_to(ring, grid.shape), vals, 0.0))


# -- cutoffs ---------------------------------------------------------------------

# Quintic smoothstep plus a skew septic correction; keeps S' >= 0 and zero
# first and second derivatives at both ends while lowering max(S + w S').
SKEW = -18.0


def step_profile(tau, derivative: int = 0):
    """Monotone C^2 step on [0, 1] (0 below, 1 above) and its derivatives."""
    t = np.clip(np.asarray(tau, dtype=float), 0.0, 1.0)
    inside = (np.asarray(tau) > 0) & (np.asarray(tau) < 1)
    if derivative == 0:
        val = t ** 3 * (10 - 15 * t + 6 * t * t) + SKEW * t ** 3 * (1 - t) ** 3 * (2 * t - 1)
        return val
    if derivative == 1:
        d5 = 30 * t * t * (1 - t) ** 2
        db = (3 * t * t * (1 - t) ** 3 * (2 * t - 1) - 3 * t ** 3 * (1 - t) ** 2 * (2 * t - 1)
              + 2 * t ** 3 * (1 - t) ** 3)
        return np.where(inside, d5 + SKEW * db, 0.0)
    if derivative == 2:
        d5 = 60 * t * (1 - t) ** 2 - 60 * t * t * (1 - t)
        # second derivative of t^3 (1-t)^3 (2t-1) = 2 t^3 (1-t)^3 - t^3(1-t)^3 ... expanded
        p = np.poly1d([-2, 7, -9, 5, -1, 0, 0, 0])  # t^3 (1-t)^3 (2t-1)
        return np.where(inside, d5 + SKEW * p.deriv(2)(t), 0.0)
    raise ValueError("derivative must be 0, 1 or 2")


def _cutoff_parts(r, inner: float, outer: float):
    w = outer - inner
    tau = (outer - np.abs(r)) / w
    val = step_profile(tau)
    d1 = -step_profile(tau, 1) / w  # d/d|r|
    d2 = step_profile(tau, 2) / (w * w)
    return val, d1, d2


def cutoff(grid: Grid, kind: str = "time", inner: float = 1.0, outer: float = 1.5,
           center: float = 0.0) -> GridFunction:
    """Smooth cutoff equal to 1 for ``|s| <= inner`` and 0 for ``|s| >= outer``.

    ``kind="time"`` uses ``s = t - center``, ``kind="space"`` uses ``s = |x|``.
    """
    if not inner < outer:
        raise ValueError("need inner < outer")
    t, *xs = grid.coords()
    if kind == "time":
        s = t - center
    elif kind == "space":
        s = np.sqrt(sum(x * x for x in xs))
    else:
        raise ValueError(f"unknown cutoff kind {kind!r}")
    val, _, _ = _cutoff_parts(s, inner, outer)
    return GridFunction(grid, np.broadcast_to(val, grid.shape))


def cutoff_bounds(grid: Grid, kind: str = "time", inner: float = 1.0, outer: float = 1.5) -> dict:
    """Grid maxima of ``|z| + |z'|`` and, for space cutoffs, ``|z| + |Dz| + |D^2 z|``."""
    t, *xs = grid.coords()
    if kind == "time":
        val, d1, _ = _cutoff_parts(t, inner, outer)
        return {"sum01": float(np.max(np.abs(val) + np.abs(d1)))}
    r = np.sqrt(sum(x * x for x in xs))
    val, d1, d2 = _cutoff_parts(r, inner, outer)
    d = grid.d
    safe = np.where(r > 0, r, 1.0)
    # Hessian of a radial function: eigenvalues z'' (radial) and z'/r (d-1 times)
    hess = np.sqrt(d2 * d2 + (d - 1) * (d1 / safe) ** 2)
    return {"sum01": float(np.max(np.abs(val) + np.abs(d1))),
            "sum012": float(np.max(np.abs(val) + np.abs(d1) + hess))}


def h_profile(t, derivative: int = 0):
    """Monotone C^2 profile: 0 for t <= 0, t for t >= 1, ``t * S(t)`` with the quintic step between."""
    t = np.asarray(t, dtype=float)
    c = np.clip(t, 0.0, 1.0)
    s0 = c ** 3 * (10 - 15 * c + 6 * c * c)
    s1 = 30 * c * c * (1 - c) ** 2
    s2 = 60 * c * (1 - c) ** 2 - 60 * c * c * (1 - c)
    mid = (t > 0) & (t < 1)
    if derivative == 0:
        return np.where(t >= 1, t, np.where(mid, t * s0, 0.0))
    if derivative == 1:
        return np.where(t >= 1, 1.0, np.where(mid, s0 + t * s1, 0.0))
    if derivative == 2:
        return np.where(mid, 2 * s1 + t * s2, 0.0)
    raise ValueError("derivative must be 0, 1 or 2")
