"""Test functions with closed-form derivatives, sampled on grids.

Every profile is a product ``A * T((t - tc)^2) * X(|x - xc|^2)`` whose factors
are functions of a squared argument, so first and second derivatives follow
from the chain rule without finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..grid import Grid, GridFunction, ParabolicCylinder


@dataclass(frozen=True)
class Shape:
    """``g(s)`` of a squared argument: ``gauss`` exp(-s/(2w^2)), ``bump`` (1 - s/w^2)_+^k, ``flat`` 1."""

    kind: str
    width: float = 1.0
    power: int = 4

    def __call__(self, s, k: int = 0):
        s = np.asarray(s, dtype=float)
        if self.kind == "flat":
            return np.ones_like(s) if k == 0 else np.zeros_like(s)
        w2 = self.width * self.width
        if self.kind == "gauss":
            return (-0.5 / w2) ** k * np.exp(-0.5 * s / w2)
        if self.kind == "bump":
            if k > self.power:
                return np.zeros_like(s)
            z = np.maximum(1.0 - s / w2, 0.0)
            coeff = math.perm(self.power, k) * (-1.0 / w2) ** k
            return coeff * z ** (self.power - k)
        raise ValueError(f"unknown shape {self.kind!r}")


FLAT = Shape("flat")


@dataclass
class Fields:
    """A function and its derivatives on one grid (analytic samples)."""

    grid: Grid
    u: np.ndarray
    ut: np.ndarray
    du: tuple
    hess: dict

    def gf(self, values) -> GridFunction:
        return GridFunction(self.grid, np.broadcast_to(values, self.grid.shape))

    @property
    def lap(self) -> np.ndarray:
        return sum(self.hess[(i, i)] for i in range(self.grid.d))

    @property
    def heat(self) -> np.ndarray:
        """``du/dt + Laplacian u``."""
        return self.ut + self.lap

    @property
    def grad(self) -> np.ndarray:
        return np.sqrt(sum(g * g for g in self.du))

    @property
    def d2(self) -> np.ndarray:
        """Frobenius norm of the spatial Hessian."""
        return np.sqrt(sum((1.0 if i == j else 2.0) * v * v for (i, j), v in self.hess.items()))

    def scaled(self, R: float, degree: float = 0.0) -> "Fields":
        """Fields of ``R^degree u(t/R^2, x/R)`` on the dilated lattice."""
        a = R ** degree
        return Fields(self.grid.scaled(R), a * self.u, a * self.ut / R ** 2,
                      tuple(a * g / R for g in self.du),
                      {k: a * v / R ** 2 for k, v in self.hess.items()})


@dataclass(frozen=True)
class Profile:
    name: str
    time: Shape = FLAT
    space: Shape = FLAT
    tc: float = 0.0
    xc: tuple = ()
    amp: float = 1.0

    def _center(self, d: int) -> tuple:
        return tuple(self.xc) + (0.0,) * (d - len(self.xc))

    def fields(self, grid: Grid) -> Fields:
        t, *xs = grid.coords()
        d = grid.d
        xc = self._center(d)
        ys = [x - c for x, c in zip(xs, xc)]
        tau = (t - self.tc) if grid.parabolic else np.zeros_like(t)
        T0 = self.time(tau * tau)
        T1 = 2.0 * tau * self.time(tau * tau, 1)
        s = sum(y * y for y in ys)
        X0, X1, X2 = self.space(s), self.space(s, 1), self.space(s, 2)
        shape = grid.shape
        full = lambda a: np.broadcast_to(self.amp * a, shape)
        u = full(T0 * X0)
        ut = full(T1 * X0) if grid.parabolic else np.zeros(shape)
        du = tuple(full(T0 * 2.0 * y * X1) for y in ys)
        hess = {}
        for i in range(d):
            for j in range(i, d):
                val = 4.0 * ys[i] * ys[j] * X2
                if i == j:
                    val = val + 2.0 * X1
                hess[(i, j)] = full(T0 * val)
        return Fields(grid, u, ut, du, hess)

    def values(self, grid: Grid) -> np.ndarray:
        return np.array(self.fields(grid).u)

    def evaluate(self, t, *xs) -> np.ndarray:
        """``u`` at arbitrary broadcast points (``t`` ignored by steady profiles)."""
        xc = self._center(len(xs))
        tau = np.asarray(t, dtype=float) - self.tc
        s = sum((x - c) ** 2 for x, c in zip(xs, xc))
        return self.amp * self.time(tau * tau) * self.space(s)


@dataclass(frozen=True)
class Oscillating:
    """One-signed oscillation ``profile * (1 + depth cos(k x_1))``."""

    name: str
    base: Profile
    k: float = 6.0
    depth: float = 0.5

    def values(self, grid: Grid) -> np.ndarray:
        _, x1, *_ = grid.coords()
        return self.base.values(grid) * (1.0 + self.depth * np.cos(self.k * x1))


@dataclass(frozen=True)
class CappedPower:
    """``min(|x|^-gamma, cap) * T(t^2) * X(|x|^2)``."""

    name: str
    gamma: float
    cap: float
    time: Shape = FLAT
    space: Shape = FLAT

    def values(self, grid: Grid) -> np.ndarray:
        t, *xs = grid.coords()
        r = np.sqrt(sum(x * x for x in xs))
        with np.errstate(divide="ignore"):
            core = np.minimum(np.where(r > 0, r, 0.0) ** -self.gamma, self.cap)
        tt = self.time(t * t) if grid.parabolic else 1.0
        return np.array(np.broadcast_to(core * self.space(r * r) * tt, grid.shape))


@dataclass(frozen=True)
class Indicator:
    name: str
    rho: float
    base: tuple = ()

    def values(self, grid: Grid) -> np.ndarray:
        base = tuple(self.base) + (0.0,) * (grid.d + 1 - len(self.base))
        cyl = ParabolicCylinder(self.rho, base)
        t, *xs = grid.coords()
        return np.array(np.broadcast_to(cyl.contains(t, *xs), grid.shape), dtype=float)


@dataclass(frozen=True)
class TimeOnly:
    """``b(t, x) = bhat(t)`` for a drift depending on time only."""

    name: str
    time: Shape
    tc: float = 0.0

    def bhat(self, t) -> np.ndarray:
        tau = np.asarray(t, dtype=float) - self.tc
        return self.time(tau * tau)

    def values(self, grid: Grid) -> np.ndarray:
        t = grid.t.reshape((-1,) + (1,) * grid.d)
        return np.array(np.broadcast_to(self.bhat(t), grid.shape))


# -- named families ------------------------------------------------------------

def gaussians(tc: float = 0.2) -> list:
    return [Profile(f"gauss_w{w}", Shape("bump", 0.6), Shape("gauss", w), tc=tc)
            for w in (0.25, 0.35, 0.5)]


def source_family(tc: float = 0.2) -> list:
    """Nonnegative sources: Gaussians, a tensor bump, an oscillating bump,
    a capped singular profile and a cylinder indicator."""
    out = gaussians(tc)
    out.append(Profile("bump", Shape("bump", 0.5), Shape("bump", 0.8), tc=tc, xc=(0.2,)))
    out.append(Oscillating("osc_bump", Profile("osc", Shape("bump", 0.6), Shape("bump", 1.0), tc=tc)))
    out.append(CappedPower("capped_pow", 0.5, 4.0, Shape("bump", 0.8), Shape("bump", 1.2)))
    out.append(Indicator("ind_C05", 0.5))
    return out


def solution_family() -> list:
    """Smooth compactly supported (or Gaussian-tailed) u for embedding checks."""
    return [
        Profile("u_gauss_w0.3", Shape("bump", 0.7), Shape("gauss", 0.3), tc=0.3),
        Profile("u_gauss_w0.5", Shape("bump", 0.9), Shape("gauss", 0.5), tc=0.1),
        Profile("u_bump", Shape("bump", 0.6), Shape("bump", 0.9), tc=0.4, xc=(0.15,)),
        Profile("u_bump_wide", Shape("bump", 1.0), Shape("bump", 1.3), tc=0.0, xc=(-0.2,)),
    ]


def strip_family() -> list:
    """Solutions that straddle the strip ends t = -1 and t = 1."""
    return [
        Profile("u_lo", Shape("bump", 0.8), Shape("gauss", 0.4), tc=-0.9),
        Profile("u_hi", Shape("bump", 0.8), Shape("bump", 1.0), tc=0.9),
        Profile("u_mid", Shape("bump", 1.2), Shape("gauss", 0.3), tc=0.0),
    ]


def steady_family() -> list:
    return [
        Profile("u_gauss_w0.3", space=Shape("gauss", 0.3)),
        Profile("u_gauss_w0.5", space=Shape("gauss", 0.5), xc=(0.1,)),
        Profile("u_bump", space=Shape("bump", 0.9)),
    ]


def drift_family(steady: bool = False) -> list:
    tshape = FLAT if steady else Shape("bump", 0.9)
    return [
        CappedPower("b_inv_x", 1.0, 4.0, tshape, Shape("bump", 1.3)),
        CappedPower("b_inv_sqrt", 0.5, 4.0, tshape, Shape("bump", 1.0)),
        Profile("b_gauss", tshape, Shape("gauss", 0.4), tc=0.0),
    ]


def shell_family(R1: float = 1.0, R2: float = 1.2) -> list:
    """``v >= 0`` supported in ``(0, 1) x {R1 < |x| < R2}``."""
    mid, half = 0.5 * (R1 + R2), 0.5 * (R2 - R1)
    out = []
    for name, tc, tw in (("shell_a", 0.5, 0.45), ("shell_b", 0.3, 0.25)):
        out.append(ShellProfile(name, mid, half, tc, tw))
    return out


@dataclass(frozen=True)
class ShellProfile:
    name: str
    mid: float
    half: float
    tc: float
    tw: float

    def values(self, grid: Grid) -> np.ndarray:
        t, *xs = grid.coords()
        r = np.sqrt(sum(x * x for x in xs))
        z = np.maximum(1.0 - ((r - self.mid) / self.half) ** 2, 0.0) ** 2
        w = np.maximum(1.0 - ((t - self.tc) / self.tw) ** 2, 0.0) ** 2
        return np.array(np.broadcast_to(z * w, grid.shape))

