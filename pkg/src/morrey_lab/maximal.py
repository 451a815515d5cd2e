"""Maximal operators on parabolic cylinders.

``M_beta f(z) = sup_rho rho^beta avg_{C_rho(z)} |f|`` uses cylinders anchored at
``z``; ``M_hat f(z)`` takes the sup of averages over every cylinder that
contains ``z``.  Radii are the grid-aligned set of :func:`norms.default_rhos`
and cylinder bases run over grid cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import (BOX, Grid, GridError, GridFunction, ParabolicCylinder, ball_max, build_table,
                   sample, time_layers, time_window_max)
from .norms import _lattice_count, anchored_sums, default_rhos, morrey_norm


def _averages(f: GridFunction, rho: float, table) -> np.ndarray:
    return np.maximum(anchored_sums(table, rho), 0.0) / _lattice_count(f.grid, rho)


def M_beta(f: GridFunction, beta: float, rhos: Sequence[float] | None = None) -> GridFunction:
    """``sup_rho rho^beta`` times the average of ``|f|`` over ``C_rho(t, x)``."""
    d = f.grid.d
    top = d + 2 if f.grid.parabolic else d
    if not 0 <= beta <= top:
        raise ValueError(f"beta must lie in [0, {top}], got {beta}")
    rhos = default_rhos(f.grid) if rhos is None else np.asarray(rhos, dtype=float)
    table = build_table(f, 1.0)
    out = np.zeros(f.grid.shape)
    for rho in rhos:
        np.maximum(out, rho ** beta * _averages(f, rho, table), out=out)
    return GridFunction(f.grid, out)


def M(f: GridFunction, rhos: Sequence[float] | None = None) -> GridFunction:
    return M_beta(f, 0.0, rhos)


def M_hat(f: GridFunction, rhos: Sequence[float] | None = None) -> GridFunction:
    """Sup of ``avg_C |f|`` over grid cylinders ``C = C_rho(base)`` containing each cell.

    ``C_rho(s, y)`` contains ``(t, x)`` iff ``t - rho^2 < s <= t`` and
    ``|x - y| < rho``, so for each radius the anchored averages are pushed
    forward by a backward time-window max and a spatial ball max.
    """
    grid = f.grid
    rhos = default_rhos(grid) if rhos is None else np.asarray(rhos, dtype=float)
    table = build_table(f, 1.0)
    out = np.zeros(grid.shape)
    for rho in rhos:
        avg = _averages(f, rho, table)
        if grid.parabolic:
            avg = time_window_max(avg, time_layers(grid, rho), forward=False)
        avg = ball_max(avg, grid.d, rho / grid.hx)
        np.maximum(out, avg, out=out)
    return GridFunction(grid, out)


def envelope_Dr(r: float, t, x, d: int):
    """Closed-form envelope of ``M_hat I_{D_r}``: 1 on ``D_{2r}``, else
    ``r^{d+2} / max(|t|^{(d+2)/2}, |x|^{d+2})``.

    ``x`` is either the radius ``|x|`` or an array whose last axis has length d.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    rad = np.linalg.norm(x, axis=-1) if (d > 1 and x.ndim >= 1 and x.shape[-1] == d) else np.abs(x)
    inside = (np.abs(t) <= 4 * r * r) & (rad <= 2 * r)
    k = (d + 2) / 2.0
    denom = np.maximum(np.abs(t) ** k, rad ** (d + 2))
    with np.errstate(divide="ignore"):
        val = np.where(inside, 1.0, r ** (d + 2) / np.where(denom > 0, denom, 1.0))
    return float(val) if val.ndim == 0 else val


def envelope_on_grid(grid: Grid, r: float) -> GridFunction:
    t, *xs = grid.coords()
    rad = np.sqrt(sum(xi * xi for xi in xs))
    return GridFunction(grid, np.broadcast_to(envelope_Dr(r, t, rad, grid.d), grid.shape))


def indicator_Dr(grid: Grid, r: float) -> GridFunction:
    box = ParabolicCylinder(r, (0.0,) * (grid.d + 1), kind=BOX)
    return sample(lambda t, *xs: box.contains(t, *xs).astype(float), grid)


@dataclass(frozen=True)
class SandwichReport:
    r: float
    lower: float  # min of M_hat / envelope
    upper: float  # max of M_hat / envelope

    @property
    def N(self) -> float:
        """Smallest N with envelope / N <= M_hat <= N * envelope."""
        return max(self.upper, 1.0 / self.lower)


def sandwich(grid: Grid, r: float, mask: np.ndarray | None = None,
             rhos: Sequence[float] | None = None) -> SandwichReport:
    """Compare ``M_hat I_{D_r}`` with :func:`envelope_Dr` over the cells of ``mask``."""
    mh = M_hat(indicator_Dr(grid, r), rhos).values
    env = envelope_on_grid(grid, r).values
    m = np.ones(grid.shape, dtype=bool) if mask is None else mask
    ratio = mh[m] / env[m]
    return SandwichReport(r, float(ratio.min()), float(ratio.max()))


@dataclass(frozen=True)
class Check44:
    lhs: float
    rhs: float
    morrey: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs


def check_44(g: GridFunction, q: float, beta: float, alpha: float, r: float,
             rhos: Sequence[float] | None = None, mhat: GridFunction | None = None) -> Check44:
    """``int |g|^q (M_hat I_{D_r})^alpha`` against ``r^{d+2-q beta} ||g||^q_{E_{q,beta}}``."""
    d = g.grid.d
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if not 0 < beta <= d + 2:
        raise ValueError("beta must lie in (0, d+2]")
    if not (alpha > 0 and alpha > 1 - q * beta / (d + 2)):
        raise ValueError("need alpha > 0 and alpha > 1 - q*beta/(d+2)")
    if not g.grid.parabolic:
        raise GridError("check_44 needs a parabolic grid")
    if mhat is None:
        mhat = M_hat(indicator_Dr(g.grid, r), rhos)
    lhs = float(np.sum(np.abs(g.values) ** q * mhat.values ** alpha) * g.grid.cell_volume)
    if lhs == 0:
        return Check44(0.0, 0.0, 0.0)
    norm = morrey_norm(g, q, beta, rhos=rhos).value
    return Check44(lhs, r ** (d + 2 - q * beta) * norm ** q, norm)
