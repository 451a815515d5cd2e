"""Lebesgue, mixed and Morrey norms of grid functions.

Morrey norms are sups over parabolic cylinders ``C_rho(z)`` of ``rho**beta``
times the averaged ``L_p`` norm of ``g * I_Q`` over the cylinder.  On the grid
the sup runs over every admissible anchor cell and a discrete set of radii;
all cylinder sums come from prefix tables, so each radius costs a fixed
number of array passes.

Averages divide by the lattice count of the full cylinder, also where the
cylinder leaves the grid (the function is zero there).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import (BOX, CYLINDER, CellRegion, Grid, GridError, GridFunction, ParabolicCylinder,
                   ball_count, ball_max, build_table, cylinder_sums, region_cells,
                   spatial_ball_sums, time_layers, time_window_max, time_window_sum)

WHOLE = "whole"
STRIP = "strip"
BALL = "ball"
SLAB = "slab"


class DegenerateNormWarning(UserWarning):
    pass


class EmptyRegionError(ValueError):
    pass


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


@dataclass(frozen=True)
class Domain:
    """The set Q of a Morrey norm.

    ``whole``: the grid; ``cylinder``: ``C_R(base)``; ``strip``: ``[S, T) x R^d``;
    ``ball``: ``B_R(center)`` (elliptic grids); ``slab``: ``[t0, t1) x B_R``.
    """

    kind: str = WHOLE
    R: float | None = None
    base: tuple | None = None
    S: float | None = None
    T: float | None = None

    @classmethod
    def whole(cls):
        return cls(WHOLE)

    @classmethod
    def cylinder(cls, R: float, base: Sequence[float] | None = None):
        return cls(CYLINDER, R=float(R), base=None if base is None else tuple(map(float, base)))

    @classmethod
    def strip(cls, S: float, T: float):
        return cls(STRIP, S=float(S), T=float(T))

    @classmethod
    def ball(cls, R: float, center: Sequence[float] | None = None):
        return cls(BALL, R=float(R), base=None if center is None else tuple(map(float, center)))

    @classmethod
    def slab(cls, t0: float, t1: float, R: float):
        return cls(SLAB, R=float(R), S=float(t0), T=float(t1))

    def _base(self, d: int, parabolic: bool) -> tuple:
        if self.base is not None:
            return self.base
        return (0.0,) * (d + 1) if parabolic else (0.0,) * d

    def contains(self, grid: Grid, t, *xs) -> np.ndarray:
        """Centre-inclusion test on broadcast coordinates."""
        shape = np.broadcast_shapes(np.shape(t), *(np.shape(x) for x in xs))
        if self.kind == WHOLE:
            return np.ones(shape, dtype=bool)
        if self.kind == CYLINDER:
            base = self._base(grid.d, True)
            return np.broadcast_to(ParabolicCylinder(self.R, base).contains(t, *xs), shape)
        if self.kind == STRIP:
            tol = 1e-9 * max(abs(self.T - self.S), 1e-300)
            return np.broadcast_to((t >= self.S - tol) & (t < self.T - tol), shape)
        if self.kind == BALL:
            base = self._base(grid.d, False)
            if len(base) == grid.d + 1:
                base = base[1:]
            r2 = sum((x - b) ** 2 for x, b in zip(xs, base))
            return np.broadcast_to(r2 < self.R ** 2 * (1 - 1e-9), shape)
        if self.kind == SLAB:
            tol = 1e-9 * max(abs(self.T - self.S), 1e-300)
            r2 = sum(x * x for x in xs)
            return np.broadcast_to((t >= self.S - tol) & (t < self.T - tol) & (r2 < self.R ** 2 * (1 - 1e-9)), shape)
        raise ValueError(f"unknown domain kind {self.kind!r}")

    def mask(self, grid: Grid) -> np.ndarray:
        t, *xs = grid.coords()
        return np.array(np.broadcast_to(self.contains(grid, t, *xs), grid.shape))

    def rho_cap(self) -> float | None:
        """Largest useful radius: ``R`` for ``C_R``, the diameter for balls."""
        if self.kind == CYLINDER:
            return self.R
        if self.kind == BALL:
            return 2.0 * self.R
        return None

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for key in ("R", "base", "S", "T"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        return out

    def scaled(self, factor: float) -> "Domain":
        """Image under ``(t, x) -> (f^2 t, f x)``."""
        f2 = factor * factor
        base = None
        if self.base is not None:
            if self.kind == BALL and len(self.base) != 0:
                base = tuple(b * factor for b in self.base)
            else:
                base = (self.base[0] * f2,) + tuple(b * factor for b in self.base[1:])
        return Domain(self.kind,
                      R=None if self.R is None else self.R * factor,
                      base=base,
                      S=None if self.S is None else self.S * f2,
                      T=None if self.T is None else self.T * f2)


@dataclass(frozen=True)
class NormSpec:
    kind: str
    p: float | None = None
    q1: float | None = None
    q2: float | None = None
    beta: float | None = None
    domain: Domain = field(default_factory=Domain)
    rho_count: int = 0
    center_count: int = 0

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.p is not None:
            out["p"] = _num(self.p)
        if self.q1 is not None:
            out["q1"] = _num(self.q1)
            out["q2"] = _num(self.q2)
        if self.beta is not None:
            out["beta"] = self.beta
        out["domain"] = self.domain.to_json()
        out["rho_count"] = self.rho_count
        out["center_count"] = self.center_count
        return out


def _num(v):
    return "inf" if v == math.inf else v


@dataclass(frozen=True)
class MorreyResult:
    value: float
    rho_star: float | None
    center_star: tuple | None
    degenerate: bool
    spec: NormSpec
    warning: str | None = None

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        return {"value": self.value, "rho_star": self.rho_star,
                "center_star": None if self.center_star is None else list(self.center_star),
                "degenerate": self.degenerate, "warning": self.warning, "spec": self.spec.to_json()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- plain norms -------------------------------------------------------------

def _region_mask(f: GridFunction, region) -> tuple:
    """Return (mask, lattice measure) for a region given as mask, cylinder or Domain."""
    grid = f.grid
    if region is None:
        mask = np.ones(grid.shape, dtype=bool)
        return mask, grid.size * grid.cell_volume
    if isinstance(region, ParabolicCylinder):
        cells = region_cells(grid, region)
        return cells.mask(), cells.total * grid.cell_volume
    if isinstance(region, CellRegion):
        return region.mask(), region.total * grid.cell_volume
    if isinstance(region, Domain):
        mask = region.mask(grid)
        return mask, int(mask.sum()) * grid.cell_volume
    mask = np.asarray(region, dtype=bool)
    if mask.shape != grid.shape:
        raise GridError("region mask shape mismatch")
    return mask, int(mask.sum()) * grid.cell_volume


def _power_sum(vals: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(vals.astype(np.longdouble)) ** p))


def lp_norm(f: GridFunction, p: float, region=None) -> float:
    """``(int_region |f|^p)^{1/p}``; ``p = inf`` gives the max over cells."""
    mask, measure = _region_mask(f, region)
    if measure == 0:
        raise EmptyRegionError("empty region")
    vals = f.values[mask]
    if p == math.inf:
        return float(np.max(np.abs(vals), initial=0.0))
    return (_power_sum(vals, p) * f.grid.cell_volume) ** (1.0 / p)


def slashed_lp_norm(f: GridFunction, p: float, region=None) -> float:
    """Averaged ``L_p`` norm ``(|region|^{-1} int_region |f|^p)^{1/p}``."""
    mask, measure = _region_mask(f, region)
    if measure == 0:
        raise EmptyRegionError("empty region")
    vals = f.values[mask]
    if p == math.inf:
        return float(np.max(np.abs(vals), initial=0.0))
    return (_power_sum(vals, p) * f.grid.cell_volume / measure) ** (1.0 / p)


def _mixed_raw(values: np.ndarray, grid: Grid, q1: float, q2: float) -> float:
    axes = tuple(range(1, grid.d + 1))
    a = np.abs(values)
    if q1 == math.inf:
        inner = a.max(axis=axes)
    else:
        inner = (np.sum(a.astype(np.longdouble) ** q1, axis=axes) * grid.hx ** grid.d) ** (1.0 / q1)
    if not grid.parabolic:
        return float(inner[0])
    if q2 == math.inf:
        return float(inner.max())
    return float((np.sum(inner ** q2) * grid.ht) ** (1.0 / q2))


def mixed_norm(f: GridFunction, q1: float, q2: float, region=None, normalized: bool = False) -> float:
    """``L_{q1,q2}`` norm: ``L_{q1}`` in x inside, ``L_{q2}`` in t outside.

    With ``normalized`` the value is divided by the same norm of the region's
    indicator.
    """
    for q in (q1, q2):
        if not q >= 1:
            raise ValueError("mixed exponents must be >= 1")
    mask, measure = _region_mask(f, region)
    if measure == 0:
        raise EmptyRegionError("empty region")
    val = _mixed_raw(np.where(mask, f.values, 0.0), f.grid, q1, q2)
    if normalized:
        if isinstance(region, ParabolicCylinder):
            ind = _cylinder_indicator_mixed(f.grid, region, q1, q2)
        else:
            ind = _mixed_raw(mask.astype(float), f.grid, q1, q2)
        val /= ind
    return val


def _cylinder_indicator_mixed(grid: Grid, cyl: ParabolicCylinder, q1: float, q2: float) -> float:
    """Mixed norm of the unclipped lattice indicator of a cylinder."""
    cells = region_cells(grid, cyl, clip=False)
    layers = {}
    for t, *_rest in cells.rows:
        layers[t] = layers.get(t, 0)
    for t, lead, lo, hi in cells.rows:
        layers[t] += hi - lo
    counts = np.array(list(layers.values()), dtype=float)
    inner = np.ones_like(counts) if q1 == math.inf else (counts * grid.hx ** grid.d) ** (1.0 / q1)
    if not grid.parabolic or q2 == math.inf:
        return float(inner.max())
    return float((np.sum(inner ** q2) * grid.ht) ** (1.0 / q2))


# -- radius sets -------------------------------------------------------------

def default_rhos(grid: Grid, cap: float | None = None, extend: int = 2) -> np.ndarray:
    """Aligned radii ``k*hx`` up to the grid diameter, then ``extend`` doublings.

    Between consecutive aligned radii the lattice cylinder changes only when
    ``|v|**2`` or the layer count crosses an integer, so the aligned set plus
    the radii ``sqrt(m)*hx`` are the complete set of distinct cylinders; the
    aligned set alone is used by default.
    """
    span = grid.nx * math.sqrt(grid.d)
    if grid.parabolic:
        span = max(span, math.sqrt(grid.nt))
    kmax = int(math.ceil(span)) + 1
    rhos = list(grid.hx * np.arange(1, kmax + 1))
    top = rhos[-1]
    rhos += [top * 2.0 ** i for i in range(1, extend + 1)]
    rhos = np.array(rhos)
    if cap is not None:
        rhos = rhos[rhos <= cap * (1 + 1e-12)]
        if rhos.size == 0 or abs(rhos[-1] - cap) > 1e-12 * cap:
            rhos = np.append(rhos, cap)
    return rhos


def all_lattice_rhos(grid: Grid, cap: float) -> np.ndarray:
    """Every radius at which the lattice cylinder changes, up to ``cap``."""
    m = np.arange(1, int(math.floor((cap / grid.hx) ** 2 + 1e-9)) + 2)
    rhos = grid.hx * np.sqrt(m)
    return rhos[rhos <= cap * (1 + 1e-12)]


# -- anchored cylinder statistics --------------------------------------------

def _covering(grid: Grid, rho: float) -> bool:
    kappa = rho / grid.hx
    reach = (grid.nx - 1) * math.sqrt(grid.d)
    layers_ok = (not grid.parabolic) or time_layers(grid, rho) >= grid.nt
    return kappa > reach + 1e-9 and layers_ok


def _lattice_count(grid: Grid, rho: float) -> int:
    kappa = rho / grid.hx
    return _ball_count_fast(kappa, grid.d) * time_layers(grid, rho)


def _ball_count_fast(kappa: float, d: int) -> int:
    if d == 1 or kappa < 64:
        return ball_count(kappa, d)
    k2 = kappa * kappa
    r = int(math.ceil(kappa))
    a = np.arange(-r, r + 1, dtype=np.int64)
    if d == 2:
        rem = k2 - a * a
        w = _widths(rem)
        return int(np.sum(2 * w + 1))
    total = 0
    for ai in a:
        rem = k2 - ai * ai - a * a
        w = _widths(rem)
        total += int(np.sum(2 * w + 1))
    return total


def _widths(rem: np.ndarray) -> np.ndarray:
    rem = np.asarray(rem, dtype=float)
    k2 = np.where(np.abs(rem - np.round(rem)) <= 1e-9 * np.maximum(1.0, np.abs(rem)), np.round(rem), rem)
    w = np.floor(np.sqrt(np.maximum(k2, 0.0))).astype(np.int64)
    w = np.where(w * w >= k2, w - 1, w)
    w = np.where((w + 1) * (w + 1) < k2, w + 1, w)
    return np.where(k2 <= 0, -1, w)


def anchored_sums(table, rho: float, method: str = "auto") -> np.ndarray:
    """Raw sums over ``C_rho`` anchored at every cell (uses a shortcut for covering radii)."""
    grid = table.grid
    if _covering(grid, rho):
        t = table.table
        d = grid.d
        full = t[(slice(None),) + (-1,) * d]
        if grid.parabolic:
            # layers k..nt-1 (prefix over time has a leading zero)
            full = full[-1] - full[:-1]
        else:
            full = np.atleast_1d(full)
        out = np.broadcast_to(np.asarray(full, dtype=float).reshape((-1,) + (1,) * d), grid.shape)
        return np.array(out)
    return cylinder_sums(table, rho, method=method)


def anchored_max(values: np.ndarray, grid: Grid, rho: float) -> np.ndarray:
    """Max of ``values`` over ``C_rho`` anchored at every cell."""
    a = np.abs(values)
    if grid.parabolic:
        a = time_window_max(a, time_layers(grid, rho), forward=True)
    return ball_max(a, grid.d, rho / grid.hx)


def _index_for(grid: Grid, p: float, mixed: tuple | None = None) -> float:
    if mixed is not None:
        q1, q2 = mixed
        idx = grid.d / q1
        if grid.parabolic:
            idx += 2.0 / q2
        return idx
    return (grid.d + 2) / p if grid.parabolic else grid.d / p


def _check_beta(beta: float, index: float, kind: str):
    if beta is None or not beta > 0:
        raise ValueError("Morrey exponent beta must be positive")
    if beta > index * (1 + 1e-12):
        msg = (f"beta={beta} exceeds the index {index:.6g} of {kind}; "
               "the space contains only zero and the value is flagged degenerate")
        warnings.warn(msg, DegenerateNormWarning, stacklevel=3)
        return True, msg
    return False, None


def _center_masks(grid: Grid, domain: Domain, rho: float, centers: str, base_mask: np.ndarray):
    if centers == "all":
        return base_mask
    if centers == "everywhere":
        return np.ones(grid.shape, dtype=bool)
    if centers == "geometric":
        t, *xs = grid.coords()
        shift = rho * rho / 2.0 if grid.parabolic else 0.0
        return np.array(np.broadcast_to(domain.contains(grid, t + shift, *xs), grid.shape)) & base_mask
    raise ValueError(f"unknown center rule {centers!r}")


def morrey_norm(f: GridFunction, p: float, beta: float, domain: Domain | None = None,
                rhos: Sequence[float] | None = None, centers: str = "all",
                center_mask: np.ndarray | None = None, method: str = "auto") -> MorreyResult:
    """``sup rho^beta * avg_{C_rho(z)}(|f I_Q|^p)^{1/p}`` over anchors z in Q.

    ``centers`` selects the anchors: ``"all"`` (cells of Q), ``"geometric"``
    (anchors in Q whose cylinder has its geometric centre in Q) or
    ``"everywhere"`` (all grid cells).  ``center_mask`` further restricts
    anchors.  Works on elliptic grids too, where cylinders are balls.
    """
    grid = f.grid
    domain = domain or Domain.whole()
    if not p >= 1:
        raise ValueError("p must be >= 1")
    degenerate, msg = _check_beta(beta, _index_for(grid, p), "L_p")
    qmask = domain.mask(grid)
    g = np.where(qmask, f.values, 0.0)
    if rhos is None:
        rhos = default_rhos(grid, domain.rho_cap())
    rhos = np.asarray(rhos, dtype=float)
    anchor = qmask if center_mask is None else qmask & center_mask
    gf = GridFunction(grid, g)
    table = None if p == math.inf else build_table(gf, p)
    best, best_rho, best_idx = -1.0, None, None
    for rho in rhos:
        amask = _center_masks(grid, domain, rho, centers, anchor)
        if not amask.any():
            continue
        if p == math.inf:
            vals = anchored_max(g, grid, rho)
        else:
            count = _lattice_count(grid, rho)
            vals = np.maximum(anchored_sums(table, rho, method), 0.0) / count
            vals = vals ** (1.0 / p)
        vals = np.where(amask, vals, -1.0)
        k = int(np.argmax(vals))
        v = rho ** beta * vals.flat[k]
        if v > best:
            best, best_rho, best_idx = v, float(rho), np.unravel_index(k, grid.shape)
    spec = NormSpec("morrey", p=p, beta=beta, domain=domain, rho_count=len(rhos), center_count=int(anchor.sum()))
    if best_idx is None:
        return MorreyResult(0.0, None, None, degenerate, spec, msg)
    center = grid.cell_center(best_idx)
    if not grid.parabolic:
        center = center[1:]
    return MorreyResult(max(best, 0.0), best_rho, tuple(float(c) for c in center), degenerate, spec, msg)


def elliptic_morrey_norm(g: GridFunction, p: float, beta: float, domain: Domain | None = None,
                         **kwargs) -> MorreyResult:
    """Ball version: ``sup rho^beta * avg_{B_rho(x)}(|g I_G|^p)^{1/p}`` over x in G."""
    if g.grid.parabolic:
        raise GridError("elliptic Morrey norm needs an elliptic grid")
    return morrey_norm(g, p, beta, domain, **kwargs)


def morrey_reevaluate(f: GridFunction, p: float, beta: float, result: MorreyResult,
                      domain: Domain | None = None) -> float:
    """Recompute ``rho* ^ beta`` times the averaged norm on the reported cylinder."""
    domain = domain or Domain.whole()
    g = GridFunction(f.grid, np.where(domain.mask(f.grid), f.values, 0.0))
    base = result.center_star if f.grid.parabolic else (0.0,) + tuple(result.center_star)
    cyl = ParabolicCylinder(result.rho_star, base)
    return result.rho_star ** beta * slashed_lp_norm(g, p, cyl)


def mixed_morrey_norm(f: GridFunction, q1: float, q2: float, beta: float, domain: Domain | None = None,
                      rhos: Sequence[float] | None = None, center_mask: np.ndarray | None = None,
                      method: str = "auto") -> MorreyResult:
    """``sup rho^beta * ||f I_Q||_{L_{q1,q2}(C)}`` with the norm normalised by ``||I_C||``."""
    grid = f.grid
    if not grid.parabolic:
        raise GridError("mixed Morrey norms need a parabolic grid")
    domain = domain or Domain.whole()
    for q in (q1, q2):
        if not q >= 1:
            raise ValueError("mixed exponents must be >= 1")
    degenerate, msg = _check_beta(beta, _index_for(grid, None, (q1, q2)), "L_{q1,q2}")
    qmask = domain.mask(grid)
    g = np.abs(np.where(qmask, f.values, 0.0))
    anchor = qmask if center_mask is None else qmask & center_mask
    if rhos is None:
        rhos = default_rhos(grid, domain.rho_cap())
    rhos = np.asarray(rhos, dtype=float)
    gq = g ** q1 if q1 != math.inf else g
    best, best_rho, best_idx = -1.0, None, None
    for rho in rhos:
        kappa = rho / grid.hx
        L = time_layers(grid, rho)
        nb = _ball_count_fast(kappa, grid.d)
        if q1 == math.inf:
            inner = ball_max(g, grid.d, kappa)
        else:
            inner = np.maximum(spatial_ball_sums(gq, grid.d, kappa, method), 0.0) / nb
            inner = inner ** (1.0 / q1)
        if q2 == math.inf:
            vals = time_window_max(inner, L, forward=True)
        else:
            vals = (time_window_sum(inner ** q2, L) / L) ** (1.0 / q2)
        vals = np.where(anchor, vals, -1.0)
        k = int(np.argmax(vals))
        v = rho ** beta * vals.flat[k]
        if v > best:
            best, best_rho, best_idx = v, float(rho), np.unravel_index(k, grid.shape)
    spec = NormSpec("mixed_morrey", q1=q1, q2=q2, beta=beta, domain=domain, rho_count=len(rhos),
                    center_count=int(anchor.sum()))
    if best_idx is None:
        return MorreyResult(0.0, None, None, degenerate, spec, msg)
    return MorreyResult(max(best, 0.0), best_rho, tuple(float(c) for c in grid.cell_center(best_idx)),
                        degenerate, spec, msg)


def concentric_family(center: Sequence[float], rho_list: Sequence[float]) -> list:
    """Cylinders ``C(s)`` of radius ``s`` sharing the geometric centre ``center = (t, x)``."""
    rho_list = list(rho_list)
    if any(b < a for a, b in zip(rho_list, rho_list[1:])):
        raise ValueError("rho_list must be sorted ascending")
    t = float(center[0])
    xs = tuple(float(c) for c in center[1:])
    return [ParabolicCylinder(s, (t - s * s / 2.0,) + xs) for s in rho_list]


def time_morrey_norm(b: np.ndarray, dt: float, p: float, beta: float, taus: Sequence[float] | None = None) -> float:
    """One-dimensional time Morrey norm ``sup tau^beta (tau^{-1} int_I |b|^p)^{1/p}`` over intervals ``|I| = tau``.

    ``b`` is sampled at cell centres with step ``dt``; intervals are unions of
    whole cells.  With ``beta = 1/p`` the sup is attained by the longest
    interval and equals ``||b||_{L_p}``.
    """
    b = np.abs(np.asarray(b, dtype=float))
    n = b.size
    pref = np.concatenate([[0.0], np.cumsum(b ** p)])
    lengths = range(1, n + 1) if taus is None else sorted({max(1, int(round(t / dt))) for t in taus})
    best = 0.0
    for L in lengths:
        sums = pref[L:] - pref[:-L] if L <= n else np.array([pref[-1]])
        tau = L * dt
        v = tau ** beta * (sums.max() * dt / tau) ** (1.0 / p)
        best = max(best, v)
    return float(best)
