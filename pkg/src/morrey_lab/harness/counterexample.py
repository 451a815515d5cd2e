"""Radial counterexample: ``u_delta(x) = h(ln(delta/|x|))`` in d >= 3.

Along ``delta -> 0`` the Morrey norm of ``u_delta`` vanishes while those of
``D^2 u_delta`` and ``b |D u_delta|`` (``b = 1/|x|``) stay bounded above and
below, so no estimate of the drift term by ``eps ||D^2 u|| + K ||u||`` with
small ``eps`` can hold uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..grid import ELLIPTIC, GridFunction, centered_grid
from ..norms import Domain, elliptic_morrey_norm
from ..transforms import h_profile

DEFAULT_DELTAS = (0.4, 0.2, 0.1)
FD_TOL = 0.02
A_DROP_MAX = 0.6


@dataclass(frozen=True)
class RadialFields:
    r: np.ndarray
    u: np.ndarray
    du: tuple          # D_i u
    grad: np.ndarray   # |D u|
    d2: np.ndarray     # Frobenius norm of D^2 u


def radial_fields(grid, delta: float, r_trunc: float) -> RadialFields:
    """Closed-form derivatives of ``h(ln(delta/|x|))``; zero on ``|x| < r_trunc``.

    ``D_i u = -h' x_i/|x|^2`` and
    ``D_ij u = h'' x_i x_j/|x|^4 - h' (delta_ij/|x|^2 - 2 x_i x_j/|x|^4)``.
    """
    _, *xs = grid.coords()
    d = grid.d
    r = np.sqrt(sum(x * x for x in xs))
    keep = r >= r_trunc
    safe = np.where(keep, r, 1.0)
    tau = np.log(delta / safe)
    h0, h1, h2 = (np.where(keep, h_profile(tau, k), 0.0) for k in range(3))
    du = tuple(-h1 * x / safe ** 2 for x in xs)
    # eigenvalues of D^2 u: radial h''/r^2 + h'/r^2, tangential -h'/r^2 (multiplicity d-1)
    lam_r = (h2 + h1) / safe ** 2
    lam_t = -h1 / safe ** 2
    d2 = np.sqrt(lam_r ** 2 + (d - 1) * lam_t ** 2)
    grad = np.abs(h1) / safe
    return RadialFields(r, h0, du, grad, d2)


def hessian_frobenius(grid, delta: float, r_trunc: float) -> np.ndarray:
    """Frobenius norm assembled from the entrywise formula (cross-check of the eigenvalue form)."""
    _, *xs = grid.coords()
    r = np.sqrt(sum(x * x for x in xs))
    keep = r >= r_trunc
    safe = np.where(keep, r, 1.0)
    tau = np.log(delta / safe)
    h1 = np.where(keep, h_profile(tau, 1), 0.0)
    h2 = np.where(keep, h_profile(tau, 2), 0.0)
    tot = 0.0
    for i, xi in enumerate(xs):
        for j, xj in enumerate(xs):
            v = h2 * xi * xj / safe ** 4 - h1 * ((1.0 if i == j else 0.0) / safe ** 2 - 2 * xi * xj / safe ** 4)
            tot = tot + v * v
    return np.sqrt(tot)


def counterexample_rhos(hx: float, cap: float, aligned: int = 8, ratio: float = 2 ** 0.25) -> np.ndarray:
    """Aligned radii ``k hx`` for ``k <= aligned``, then a geometric ladder up to ``cap``."""
    rhos = list(hx * np.arange(1, aligned + 1))
    while rhos[-1] * ratio < cap:
        rhos.append(rhos[-1] * ratio)
    rhos.append(cap)
    return np.array(rhos)


@dataclass
class FDCheck:
    delta: float
    max_rel_error: float
    cells: int

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= FD_TOL


def fd_check(grid, delta: float, fields: RadialFields, core: float, shell: float) -> FDCheck:
    """Central differences of the sampled ``u`` against the closed-form gradient,
    relative to the natural size ``1/|x|`` of the gradient.

    Cells within ``shell`` of the transition spheres ``|x| = delta/e`` and
    ``|x| = delta``, inside ``|x| < core`` or next to the grid edge are left out.
    """
    hx = grid.hx
    u = fields.u[0]
    r = fields.r[0]
    d = grid.d
    keep = (r >= core) & (np.abs(r - delta / math.e) > shell) & (np.abs(r - delta) > shell) & (r < delta)
    edge = np.zeros(u.shape, dtype=bool)
    for ax in range(d):
        sl = [slice(None)] * d
        sl[ax] = slice(1, -1)
        inner = np.zeros(u.shape, dtype=bool)
        inner[tuple(sl)] = True
        edge |= ~inner
    keep &= ~edge
    err = np.zeros(u.shape)
    for ax in range(d):
        fd = (np.roll(u, -1, ax) - np.roll(u, 1, ax)) / (2 * hx)
        err += (fd - fields.du[ax][0]) ** 2
    # error measured on the 1/|x| scale of the gradient
    rel = np.sqrt(err) * r
    rel = rel[keep]
    return FDCheck(float(delta), float(rel.max()) if rel.size else 0.0, int(rel.size))


def fd_gradient_check(delta: float, d: int = 3, cells_per_delta: int = 48) -> FDCheck:
    """:func:`fd_check` on a grid with ``hx = delta / cells_per_delta`` covering ``B_delta``."""
    hx = delta / cells_per_delta
    nx = 2 * int(math.ceil(1.1 * cells_per_delta))
    grid = centered_grid(d, nx, hx, mode=ELLIPTIC)
    fx = radial_fields(grid, delta, hx)
    return fd_check(grid, delta, fx, core=8 * hx, shell=3 * hx)


@dataclass
class CounterexampleReport:
    d: int
    q: float
    beta: float
    nx: int
    hx: float
    extent: float
    r_trunc: float
    K: float
    rows: list = field(default_factory=list)
    fd: list = field(default_factory=list)

    def column(self, key: str) -> np.ndarray:
        return np.array([row[key] for row in self.rows])

    @property
    def a_decreasing(self) -> bool:
        a = self.column("a")
        return bool(np.all(np.diff(a) < 0))

    @property
    def a_drop(self) -> float:
        a = self.column("a")
        return float(a[-1] / a[0])

    def spread(self, key: str) -> float:
        v = self.column(key)
        return float(v.max() / v.min())

    def checks(self) -> dict:
        c = self.column("c")
        return {"a_strictly_decreasing": self.a_decreasing,
                "a_drop_within_0.6": self.a_drop <= A_DROP_MAX,
                "b_within_factor_2": self.spread("b") <= 2.0,
                "c_within_factor_2": self.spread("c") <= 2.0,
                "c_positive": bool(np.all(c > 0)),
                "fd_gradient": all(f.passed for f in self.fd)}

    @property
    def passed(self) -> bool:
        return all(self.checks().values())

    def to_json(self) -> dict:
        return {"d": self.d, "q": self.q, "beta": self.beta, "nx": self.nx, "hx": self.hx,
                "extent": self.extent, "r_trunc": self.r_trunc, "K": self.K, "rows": self.rows,
                "a_drop": self.a_drop, "b_spread": self.spread("b"), "c_spread": self.spread("c"),
                "fd": [{"delta": f.delta, "max_rel_error": f.max_rel_error, "cells": f.cells} for f in self.fd],
                "checks": self.checks(), "passed": self.passed}


def run_counterexample_3_11(delta_list: Sequence[float] = DEFAULT_DELTAS, d: int = 3, q: float = 1.25,
                            nx: int = 96, extent: float = 0.5, K: float = 1.0) -> CounterexampleReport:
    """Morrey norms ``E_{q,2}(B_1)`` of ``u``, ``D^2 u`` and ``|Du|/|x|`` along ``delta_list``.

    The lattice covers ``[-extent, extent]^d``; with every support inside
    ``B_extent`` a ball centred outside it is dominated by the ball of the same
    radius centred at the nearest point of ``B_extent``, so the sup over centres
    in ``B_1`` is taken on the lattice.  The cell at the origin (``|x| < hx``)
    is dropped.  Column ``eps_emp = c / (b + K a)``.
    """
    if d < 3:
        raise ValueError("the construction needs d >= 3")
    if not 1 < q < d / 2:
        raise ValueError("need 1 < q < d/2")
    deltas = [float(x) for x in delta_list]
    if any(not 0 < x < 1 for x in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must lie in (0, 1) and decrease")
    if max(deltas) >= extent:
        raise ValueError("extent must exceed every delta")
    beta = 2.0
    hx = 2.0 * extent / nx
    grid = centered_grid(d, nx, hx, mode=ELLIPTIC)
    r_trunc = hx
    cap = extent * math.sqrt(d) + max(deltas) + hx
    rhos = counterexample_rhos(hx, cap)
    dom = Domain.ball(1.0)
    rep = CounterexampleReport(d, q, beta, nx, hx, extent, r_trunc, K)
    for delta in deltas:
        fx = radial_fields(grid, delta, r_trunc)
        inv_r = np.where(fx.r >= r_trunc, 1.0 / np.where(fx.r > 0, fx.r, 1.0), 0.0)
        norm = lambda v: elliptic_morrey_norm(GridFunction(grid, v), q, beta, dom, rhos=rhos).value
        a, b, c = norm(fx.u), norm(fx.d2), norm(inv_r * fx.grad)
        rep.rows.append({"delta": delta, "a": float(a), "b": float(b), "c": float(c),
                         "eps_emp": float(c / (b + K * a))})
        rep.fd.append(fd_gradient_check(delta, d))
    return rep
